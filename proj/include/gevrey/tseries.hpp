#pragma once

#include <vector>

#include "gevrey/mseries.hpp"

namespace gevrey {

/// Truncated series in t whose coefficients are vector-valued space series:
/// sum_{k<=K} v_k t^k. Component count and nvars are shared by all coefficients;
/// the space truncation of each v_k may shrink with k (validity loss under d/dz).
struct TSeries {
    std::vector<VSeries> coeffs;  // index = power of t

    explicit TSeries(std::vector<VSeries> cs) : coeffs(std::move(cs)) {
        if (coeffs.empty()) throw structure_error("TSeries needs at least the order-0 coefficient");
        for (const auto& v : coeffs) {
            if (v.size() != coeffs[0].size() || v.nvars() != coeffs[0].nvars())
                throw structure_error("TSeries coefficients disagree on shape");
        }
    }

    int order_t() const { return static_cast<int>(coeffs.size()) - 1; }
    int nvars() const { return coeffs[0].nvars(); }
    int components() const { return coeffs[0].size(); }

    // guaranteed valid z-degree of each t-coefficient (min across components)
    std::vector<int> valid_degrees() const {
        std::vector<int> d;
        d.reserve(coeffs.size());
        for (const auto& v : coeffs) {
            int m = v.components[0].trunc_deg();
            for (const auto& c : v.components) m = std::min(m, c.trunc_deg());
            d.push_back(m);
        }
        return d;
    }

    bool operator==(const TSeries& o) const { return coeffs == o.coeffs; }
};

/// Scalar polynomial in t with MSeries coefficients, truncated at a fixed
/// t-order. This is the ring in which field expressions are evaluated when t
/// is carried formally; all z-truncations follow the MSeries min rule.
class TScalar {
public:
    TScalar(std::vector<MSeries> coeffs, int order_cap)
        : coeffs_(std::move(coeffs)), cap_(order_cap) {
        if (coeffs_.empty()) throw structure_error("TScalar needs at least one coefficient");
        if (static_cast<int>(coeffs_.size()) > cap_ + 1)
            throw structure_error("TScalar exceeds its t-order cap");
    }

    static TScalar from_const(const MSeries& c, int cap) { return TScalar({c}, cap); }

    const std::vector<MSeries>& coeffs() const { return coeffs_; }
    int cap() const { return cap_; }
    int nvars() const { return coeffs_[0].nvars(); }

    // coefficient of t^k; structural zeros get the full z-truncation of slot 0
    MSeries at(int k, int zero_trunc) const {
        if (k < static_cast<int>(coeffs_.size())) return coeffs_[static_cast<std::size_t>(k)];
        return MSeries::zero(nvars(), zero_trunc);
    }

private:
    std::vector<MSeries> coeffs_;
    int cap_;
};

inline TScalar add(const TScalar& a, const TScalar& b) {
    const int n = std::max(a.coeffs().size(), b.coeffs().size());
    std::vector<MSeries> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const bool ia = k < static_cast<int>(a.coeffs().size());
        const bool ib = k < static_cast<int>(b.coeffs().size());
        if (ia && ib)
            out.push_back(add(a.coeffs()[static_cast<std::size_t>(k)],
                              b.coeffs()[static_cast<std::size_t>(k)]));
        else
            out.push_back(ia ? a.coeffs()[static_cast<std::size_t>(k)]
                             : b.coeffs()[static_cast<std::size_t>(k)]);
    }
    return TScalar(std::move(out), std::min(a.cap(), b.cap()));
}

inline TScalar negate(const TScalar& a) {
    std::vector<MSeries> out;
    out.reserve(a.coeffs().size());
    for (const auto& c : a.coeffs()) out.push_back(negate(c));
    return TScalar(std::move(out), a.cap());
}

inline TScalar mul(const TScalar& a, const TScalar& b) {
    const int cap = std::min(a.cap(), b.cap());
    const int na = static_cast<int>(a.coeffs().size());
    const int nb = static_cast<int>(b.coeffs().size());
    const int n = std::min(na + nb - 1, cap + 1);
    std::vector<MSeries> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        bool first = true;
        MSeries acc = MSeries::zero(a.nvars(), 0);
        for (int i = std::max(0, k - nb + 1); i <= std::min(k, na - 1); ++i) {
            MSeries term = mul(a.coeffs()[static_cast<std::size_t>(i)],
                               b.coeffs()[static_cast<std::size_t>(k - i)]);
            acc = first ? std::move(term) : add(acc, term);
            first = false;
        }
        out.push_back(std::move(acc));
    }
    return TScalar(std::move(out), cap);
}

inline TScalar derive(const TScalar& a, const MIndex& order) {
    std::vector<MSeries> out;
    out.reserve(a.coeffs().size());
    for (const auto& c : a.coeffs()) out.push_back(derive(c, order));
    return TScalar(std::move(out), a.cap());
}

inline TScalar scale(const TScalar& a, const Rational& c) {
    std::vector<MSeries> out;
    out.reserve(a.coeffs().size());
    for (const auto& s : a.coeffs()) out.push_back(scale(s, c));
    return TScalar(std::move(out), a.cap());
}

/// inverse in the t-truncated ring: the order-0 coefficient must be invertible
inline TScalar invert(const TScalar& a) {
    const MSeries b0 = invert(a.coeffs()[0]);
    std::vector<MSeries> out{b0};
    for (int k = 1; k <= a.cap(); ++k) {
        // b_k = -b_0 * sum_{i=1..k} a_i b_{k-i}
        bool first = true;
        MSeries acc = MSeries::zero(a.nvars(), 0);
        for (int i = 1; i <= k && i < static_cast<int>(a.coeffs().size()); ++i) {
            MSeries term = mul(a.coeffs()[static_cast<std::size_t>(i)],
                               out[static_cast<std::size_t>(k - i)]);
            acc = first ? std::move(term) : add(acc, term);
            first = false;
        }
        if (first) acc = MSeries::zero(a.nvars(), a.coeffs()[0].trunc_deg());
        out.push_back(negate(mul(b0, acc)));
    }
    return TScalar(std::move(out), a.cap());
}

inline TScalar pow(const TScalar& a, unsigned e) {
    TScalar r = TScalar::from_const(MSeries::constant(a.nvars(), a.coeffs()[0].trunc_deg(), 1),
                                    a.cap());
    TScalar b = a;
    while (e) {
        if (e & 1u) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

} // namespace gevrey
