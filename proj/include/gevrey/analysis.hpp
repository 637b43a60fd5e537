#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "gevrey/flow.hpp"

namespace gevrey {

struct NormMode {
    enum Kind { at_origin, abs_at_origin, max_coeff } kind = abs_at_origin;
    int degree = 0;  // only for max_coeff

    static NormMode origin() { return {at_origin, 0}; }
    static NormMode abs_origin() { return {abs_at_origin, 0}; }
    static NormMode max_up_to(int d) { return {max_coeff, d}; }
};

inline const char* to_string(NormMode::Kind k) {
    switch (k) {
        case NormMode::at_origin: return "at_origin";
        case NormMode::abs_at_origin: return "abs_at_origin";
        default: return "max_coeff";
    }
}

/// Coefficient-size sequence extracted from a flow, one value per t-order.
struct NormSeq {
    std::vector<Rational> values;
    NormMode mode;

    int order() const { return static_cast<int>(values.size()) - 1; }
};

inline NormSeq norm_sequence(const FlowResult& fr, NormMode mode) {
    NormSeq out{{}, mode};
    out.values.reserve(fr.series.coeffs.size());
    for (const auto& v : fr.series.coeffs) {
        const MSeries s = component_sum(v);
        switch (mode.kind) {
            case NormMode::at_origin:
                out.values.push_back(coeff_at(s, MIndex(static_cast<std::size_t>(s.nvars()), 0u)));
                break;
            case NormMode::abs_at_origin:
                out.values.push_back(
                    abs(coeff_at(s, MIndex(static_cast<std::size_t>(s.nvars()), 0u))));
                break;
            case NormMode::max_coeff: {
                if (s.trunc_deg() < 0)
                    throw truncation_error("no valid degrees left for max_coeff");
                const int d = std::min(mode.degree, s.trunc_deg());
                Rational m = 0;
                for (const auto& [idx, c] : s.terms())
                    if (static_cast<int>(total_degree(idx)) <= d) m = std::max(m, abs(c));
                out.values.push_back(m);
                break;
            }
        }
    }
    return out;
}

struct Window {
    int lo = 1;
    int hi = 1;
};

struct GevreyEstimate {
    double s_hat = 0;
    double r_hat = 0;
    double c_hat = 0;
    Window window;
    double residual = 0;  // RMS of the ratio-fit residuals
    int npoints = 0;
};

/// Least-squares fit of coefficient growth against a_k ~ C R^k (k!)^(s-1).
///
/// Consecutive positive entries a_k, a_{k'} in the window contribute a point
///   y = ln(a_{k'}/a_k)/(k'-k)  vs  x = (1/(k'-k)) sum_{j=k}^{k'-1} ln(j+1),
/// which for gap 1 is the plain ratio d_k = ln(a_{k+1}/a_k) against ln(k+1).
/// Zero entries are skipped (parity-alternating sequences have them); the
/// model is exact on a_k = C R^k (k!)^(s-1) for any gap pattern.
inline GevreyEstimate estimate_order(const NormSeq& seq, Window w) {
    if (w.lo < 1 || w.hi > seq.order() || w.lo >= w.hi)
        throw structure_error("bad window [" + std::to_string(w.lo) + "," + std::to_string(w.hi) +
                              "] for sequence of order " + std::to_string(seq.order()));
    std::vector<int> ks;
    for (int k = w.lo; k <= w.hi; ++k) {
        const Rational& v = seq.values[static_cast<std::size_t>(k)];
        if (v < 0)
            throw numeric_error("negative value in window; use an absolute mode");
        if (v > 0) ks.push_back(k);
    }
    if (ks.size() < 3)
        throw numeric_error("cannot fit: fewer than three positive values in the window");

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const int k0 = ks[i], k1 = ks[i + 1];
        const double g = k1 - k0;
        const double y = (log_rational(seq.values[static_cast<std::size_t>(k1)]) -
                          log_rational(seq.values[static_cast<std::size_t>(k0)])) /
                         g;
        double x = 0;
        for (int j = k0; j < k1; ++j) x += std::log(static_cast<double>(j + 1));
        xs.push_back(x / g);
        ys.push_back(y);
    }
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-300) throw numeric_error("degenerate fit window");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (slope * xs[i] + intercept);
        ss += r * r;
    }
    GevreyEstimate est;
    est.s_hat = 1.0 + slope;
    est.r_hat = std::exp(intercept);
    est.window = w;
    est.residual = std::sqrt(ss / n);
    est.npoints = static_cast<int>(xs.size());
    // C from the mean offset ln a_k - (s-1) ln k! - k ln R over positive entries
    double off = 0;
    for (int k : ks) {
        double lf = 0;
        for (int j = 2; j <= k; ++j) lf += std::log(static_cast<double>(j));
        off += log_rational(seq.values[static_cast<std::size_t>(k)]) - slope * lf -
               k * intercept;
    }
    est.c_hat = std::exp(off / static_cast<double>(ks.size()));
    return est;
}

/// Result of the minimal-R search for a_k <= (k!)^(s-1) R^k over a window.
struct MinRResult {
    Rational r;                                  // max over k of the per-k requirement
    bool divergent = false;                      // heuristic flag, see below
    double growth_rate = 0;                      // log-log slope of R_req(k) vs k
    std::vector<std::pair<int, Rational>> per_k; // positive entries only
};

namespace detail {

// upper bound on x^(1/k), within 1e-6 of the true root, by rational bisection
// seeded from a double estimate
inline Rational kth_root_upper(const Rational& x, int k) {
    if (x == 0) return 0;
    if (x < 0) throw numeric_error("k-th root of a negative value");
    const Rational tol(1, 1000000);
    const double guess = std::exp(log_rational(x) / k);
    Rational lo = Rational(guess) - 2 * tol;
    Rational hi = Rational(guess) + 2 * tol;
    if (lo < 0) lo = 0;
    // widen until the bracket is certain
    while (pow_rational(lo, static_cast<unsigned>(k)) > x) lo = lo * Rational(9, 10) - tol;
    if (lo < 0) lo = 0;
    while (pow_rational(hi, static_cast<unsigned>(k)) < x) hi = hi * Rational(11, 10) + tol;
    while (hi - lo > tol) {
        const Rational mid = (lo + hi) / 2;
        if (pow_rational(mid, static_cast<unsigned>(k)) <= x)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

} // namespace detail

/// Minimal R with a_k <= (k!)^(s-1) R^k for every k in the window (computed to
/// 1e-6 via exact rational k-th-root bracketing; zero entries impose nothing).
///
/// The divergence flag is a heuristic: it is raised when the per-k required R
/// is strictly increasing across all positive entries of the window AND grows
/// like a positive power of k (log-log slope > 1/2). Plain monotonicity is not
/// enough: feasible sequences approach their true R from below, slowly.
inline MinRResult min_R_for_s(const NormSeq& seq, int s, Window w) {
    if (s < 1) throw structure_error("min_R_for_s needs s >= 1");
    if (w.lo < 1 || w.hi > seq.order() || w.lo > w.hi)
        throw structure_error("bad window for min_R_for_s");
    MinRResult out;
    for (int k = w.lo; k <= w.hi; ++k) {
        const Rational a = abs(seq.values[static_cast<std::size_t>(k)]);
        if (a == 0) continue;
        Rational x = a;
        if (s > 1) x /= pow_rational(Rational(factorial(static_cast<unsigned>(k))),
                                     static_cast<unsigned>(s - 1));
        out.per_k.emplace_back(k, detail::kth_root_upper(x, k));
    }
    if (out.per_k.empty()) {
        out.r = 0;
        return out;
    }
    out.r = out.per_k[0].second;
    bool strictly_increasing = out.per_k.size() >= 3;
    for (std::size_t i = 0; i + 1 < out.per_k.size(); ++i) {
        if (out.per_k[i + 1].second <= out.per_k[i].second) strictly_increasing = false;
    }
    for (const auto& [k, rk] : out.per_k) out.r = std::max(out.r, rk);

    if (out.per_k.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [k, rk] : out.per_k) {
            const double x = std::log(static_cast<double>(k));
            const double y = log_rational(rk);  // rk > 0 since a_k != 0
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(out.per_k.size());
        const double denom = n * sxx - sx * sx;
        if (std::fabs(denom) > 1e-300) out.growth_rate = (n * sxy - sx * sy) / denom;
    }
    out.divergent = strictly_increasing && out.growth_rate > 0.5;
    return out;
}

/// b_k = a_k / (k!)^(s-1), exact
inline NormSeq borel_transform(const NormSeq& seq, int s) {
    if (s < 1) throw structure_error("borel_transform needs s >= 1");
    NormSeq out{{}, seq.mode};
    out.values.reserve(seq.values.size());
    for (std::size_t k = 0; k < seq.values.size(); ++k) {
        Rational v = seq.values[k];
        if (s > 1)
            v /= pow_rational(Rational(factorial(static_cast<unsigned>(k))),
                              static_cast<unsigned>(s - 1));
        out.values.push_back(v);
    }
    return out;
}

struct CauchyMajorant {
    Rational a;
    Rational b;
};

/// Minimal A with |u_n| <= A B^{-(n+1)} for all n up to the truncation, so
/// that A/(B-z) dominates u at this order.
inline CauchyMajorant cauchy_majorant(const MSeries& u, const Rational& b) {
    if (u.nvars() != 1) throw structure_error("cauchy_majorant needs a univariate series");
    if (b <= 0) throw structure_error("cauchy_majorant needs B > 0");
    Rational a = 0;
    for (const auto& [idx, c] : u.terms())
        a = std::max(a, abs(c) * pow_rational(b, idx[0] + 1));
    return CauchyMajorant{a, b};
}

/// Truncated expansion of A/(B-z) = A sum_n z^n / B^{n+1}
inline MSeries cauchy_majorant_series(const CauchyMajorant& m, int trunc_deg) {
    MSeries r(1, trunc_deg);
    for (int n = 0; n <= trunc_deg; ++n)
        r.set(MIndex{static_cast<unsigned>(n)},
              m.a / pow_rational(m.b, static_cast<unsigned>(n) + 1));
    return r;
}

} // namespace gevrey
