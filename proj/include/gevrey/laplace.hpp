#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gevrey/rational.hpp"

namespace gevrey {

using Complex = std::complex<double>;

struct QuadParams {
    double rel_tol = 1e-10;
    int max_subdiv = 1 << 16;
    double cutoff_T = 0;  // 0: choose from rel_tol so the dropped tail is negligible
};

struct PathSpec {
    enum Kind { ray, real_cut, winding } kind = ray;
    double angle = 0;  // for ray
    int index = 0;     // for winding
};

struct LaplaceValue {
    Complex value;
    double est_error = 0;
};

namespace quad {

// Gauss 7 / Kronrod 15 on [-1, 1]
inline constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, Complex& kron, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Complex g = gWeights[3] * f(c);
    Complex k = kWeights[7] * f(c);
    for (int i = 0; i < 7; ++i) {
        const Complex fl = f(c - h * kNodes[i]);
        const Complex fr = f(c + h * kNodes[i]);
        k += kWeights[i] * (fl + fr);
        if (i % 2 == 1) g += gWeights[i / 2] * (fl + fr);
    }
    kron = k * h;
    err = std::abs(k - g) * std::fabs(h);
}

/// Adaptive integration of a complex-valued function over [a, b]; the returned
/// error is the sum of the accepted per-interval Kronrod-Gauss differences.
template <class F>
inline LaplaceValue integrate(const F& f, double a, double b, double abs_tol, int max_subdiv) {
    struct Seg {
        double a, b;
        Complex v;
        double e;
    };
    std::vector<Seg> work;
    Complex v0;
    double e0;
    gk15(f, a, b, v0, e0);
    work.push_back({a, b, v0, e0});
    int used = 1;
    // repeatedly split the worst segment until the total error is acceptable
    while (true) {
        double total_err = 0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < work.size(); ++i) {
            total_err += work[i].e;
            if (work[i].e > work[worst].e) worst = i;
        }
        if (total_err <= abs_tol) break;
        if (used >= max_subdiv)
            throw numeric_error("quadrature subdivision limit exceeded (error " +
                                std::to_string(total_err) + " above " + std::to_string(abs_tol) +
                                ")");
        const Seg s = work[worst];
        const double m = 0.5 * (s.a + s.b);
        Seg l{s.a, m, 0, 0}, r{m, s.b, 0, 0};
        gk15(f, l.a, l.b, l.v, l.e);
        gk15(f, r.a, r.b, r.v, r.e);
        work[worst] = l;
        work.push_back(r);
        used += 2;
    }
    // compensated summation of the segment values
    Complex sum = 0, comp = 0;
    double err = 0;
    for (const auto& s : work) {
        const Complex y = s.v - comp;
        const Complex t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        err += s.e;
    }
    return {sum, err};
}

} // namespace quad

/// true iff the exact coefficients (2k)!/(k!)^2 of the order-2 Borel transform
/// of the heat sequence match the binomial expansion of (1-4 xi)^(-1/2),
/// generated independently by c_{k+1} = c_k (4k+2)/(k+1), for all k <= K.
inline bool borel_series_check(int K) {
    if (K < 0) throw structure_error("borel_series_check needs K >= 0");
    Rational c = 1;
    for (int k = 0; k <= K; ++k) {
        const Rational direct(factorial(2 * static_cast<unsigned>(k)),
                              factorial(static_cast<unsigned>(k)) *
                                  factorial(static_cast<unsigned>(k)));
        if (c != direct) return false;
        c *= Rational(4 * k + 2, k + 1);
    }
    return true;
}

namespace detail {

// principal branch of (1 - 4 xi)^(-1/2), cut on [1/4, +inf)
inline Complex borel_kernel(Complex xi) { return 1.0 / std::sqrt(Complex(1.0) - 4.0 * xi); }

inline double ray_cutoff(double decay, const QuadParams& q) {
    if (q.cutoff_T > 0) return q.cutoff_T;
    // e^{-T decay} below rel_tol * 1e-3, and keep the singularity bump inside
    return std::max(2.0, -std::log(q.rel_tol * 1e-3) / decay);
}

} // namespace detail

/// Laplace integral of the heat Borel function along the ray arg(xi) = theta:
///   f(w) = int_0^{T e^{i theta}} e^{-xi w} (1 - 4 xi)^(-1/2) d xi,
/// principal branch. Requires decay Re(w e^{i theta}) > 0 and theta != 0 (the
/// ray must avoid the cut [1/4, inf)).
inline LaplaceValue laplace_ray(Complex w, double theta, const QuadParams& q = {}) {
    if (!(theta > -1.5707963267948966 && theta < 1.5707963267948966))
        throw structure_error("ray angle must lie in (-pi/2, pi/2)");
    if (theta == 0.0)
        throw structure_error("theta = 0 runs along the branch cut; use flat_difference");
    const Complex dir = std::polar(1.0, theta);
    const double decay = (w * dir).real();
    if (!(decay > 0)) throw numeric_error("non-decaying direction: Re(w e^{i theta}) <= 0");

    const double T = detail::ray_cutoff(decay, q);
    const auto f = [&](double r) -> Complex {
        const Complex xi = r * dir;
        return std::exp(-xi * w) * detail::borel_kernel(xi) * dir;
    };
    // rough scale for the absolute tolerance
    const double scale = std::max(1.0 / std::abs(w), 1e-12);
    LaplaceValue v = quad::integrate(f, 0.0, T, q.rel_tol * scale, q.max_subdiv);
    // certified tail: |1-4xi|^{-1/2} <= (4T-1)^{-1/2} for r >= T >= 1
    v.est_error += std::exp(-T * decay) / (decay * std::sqrt(4.0 * T - 1.0));
    if (!std::isfinite(v.value.real()) || !std::isfinite(v.value.imag()))
        throw numeric_error("quadrature produced a non-finite value");
    return v;
}

/// The flat one-sided cut integral
///   a(w) = int_{1/4}^inf e^{-xi w} (-i)(4 xi - 1)^(-1/2) d xi
///        = -i int_0^inf e^{-w(1/4 + sigma^2)} d sigma          (xi = 1/4 + sigma^2)
/// with the branch declared by the -i factor. Requires Re(w) > 0.
inline LaplaceValue flat_difference(Complex w, const QuadParams& q = {}) {
    const double rw = w.real();
    if (!(rw > 0)) throw numeric_error("flat_difference needs Re(w) > 0");
    const double S = std::sqrt(std::max(1.0, -std::log(q.rel_tol * 1e-3)) / rw) + 1.0;
    const Complex pref = Complex(0, -1) * std::exp(-w / 4.0);
    const auto f = [&](double s) -> Complex { return pref * std::exp(-w * s * s); };
    const double scale = std::max(std::abs(pref) / std::sqrt(rw), 1e-300);
    LaplaceValue v = quad::integrate(f, 0.0, S, q.rel_tol * scale, q.max_subdiv);
    v.est_error += std::abs(pref) * std::exp(-rw * S * S) / (2.0 * S * rw);
    return v;
}

/// Direct quadrature over an explicit path that winds once around xi = 1/4:
/// the theta = pi/4 ray with a circle of radius 1/8 spliced in. The integrand
/// is continued analytically along the path; each crossing of the cut flips
/// the sign of the square root. Orientation of the loop does not matter: one
/// loop moves the value to the other sheet either way.
inline LaplaceValue winding_direct(Complex w, bool counterclockwise, const QuadParams& q = {}) {
    const double theta = 0.78539816339744831;  // pi/4
    const Complex dir = std::polar(1.0, theta);
    const double decay = (w * dir).real();
    if (!(decay > 0)) throw numeric_error("non-decaying direction for the winding path");
    const double T = detail::ray_cutoff(decay, q);
    const double rP = 0.35;            // splice point on the ray
    const Complex P = rP * dir;
    const Complex C(0.25, 0.125);      // top of the circle around 1/4
    const double scale = std::max(1.0 / std::abs(w), 1e-12);
    const double tol = q.rel_tol * scale / 6.0;

    LaplaceValue total{0.0, 0.0};
    const auto accumulate = [&](const LaplaceValue& p) {
        total.value += p.value;
        total.est_error += p.est_error;
    };
    const auto g = [&](Complex xi) { return std::exp(-xi * w) * detail::borel_kernel(xi); };

    // 1: 0 -> P on the ray
    accumulate(quad::integrate([&](double r) { return g(r * dir) * dir; }, 0.0, rP, tol,
                               q.max_subdiv));
    // 2: P -> C
    accumulate(quad::integrate([&](double t) { return g(P + t * (C - P)) * (C - P); }, 0.0, 1.0,
                               tol, q.max_subdiv));
    // 3: the circle, split at the cut crossing (phi = 0 mod 2pi); sign flips there
    const double pi = 3.14159265358979324;
    const auto arc = [&](double p0, double p1, double sign) {
        const auto f = [&](double phi) -> Complex {
            const Complex e = std::polar(1.0, phi);
            return sign * g(Complex(0.25, 0) + 0.125 * e) * Complex(0, 0.125) * e;
        };
        accumulate(quad::integrate(f, p0, p1, tol, q.max_subdiv));
    };
    if (counterclockwise) {
        arc(pi / 2, 2 * pi, +1.0);
        arc(2 * pi, 2 * pi + pi / 2, -1.0);
    } else {
        arc(pi / 2, 0.0, +1.0);
        arc(0.0, -2 * pi + pi / 2, -1.0);
    }
    // 4: C -> P on the flipped branch
    accumulate(quad::integrate([&](double t) { return -g(C + t * (P - C)) * (P - C); }, 0.0, 1.0,
                               tol, q.max_subdiv));
    // 5: P -> T on the flipped branch
    accumulate(quad::integrate([&](double r) { return -g(r * dir) * dir; }, rP, T, tol,
                               q.max_subdiv));
    total.est_error += std::exp(-T * decay) / (decay * std::sqrt(4.0 * T - 1.0));
    return total;
}

inline std::string describe(const PathSpec& p) {
    switch (p.kind) {
        case PathSpec::ray: return "ray theta=" + std::to_string(p.angle);
        case PathSpec::real_cut: return "real cut, sigma substitution";
        default: return "winding k=" + std::to_string(p.index) + " around xi=1/4";
    }
}

/// Value reached after winding k times around xi = 1/4 starting from the
/// theta = +pi/4 ray. The branch point is a square root, so the continuation
/// has period two: odd k lands on the second sheet,
///   f_k = f_+ + (k odd) * 2 a(w),
/// which is the theta = -pi/4 lateral value. For |k| = 1 the result is
/// verified against the direct spliced-circle quadrature.
inline LaplaceValue winding_value(Complex w, int k, const QuadParams& q = {}) {
    const LaplaceValue fp = laplace_ray(w, 0.78539816339744831, q);
    if (k % 2 == 0) return fp;
    const LaplaceValue a = flat_difference(w, q);
    LaplaceValue v{fp.value + 2.0 * a.value, fp.est_error + 2.0 * a.est_error};
    if (k == 1 || k == -1) {
        const LaplaceValue direct = winding_direct(w, k > 0, q);
        const double dev = std::abs(direct.value - v.value);
        const double allow = q.rel_tol * 10.0 * std::max(std::abs(v.value), 1.0 / std::abs(w));
        if (dev > allow + direct.est_error + v.est_error)
            throw numeric_error("winding self-check failed: direct quadrature deviates by " +
                                std::to_string(dev));
    }
    return v;
}

inline LaplaceValue evaluate_path(Complex w, const PathSpec& p, const QuadParams& q = {}) {
    switch (p.kind) {
        case PathSpec::ray: return laplace_ray(w, p.angle, q);
        case PathSpec::real_cut: return flat_difference(w, q);
        default: return winding_value(w, p.index, q);
    }
}

} // namespace gevrey
