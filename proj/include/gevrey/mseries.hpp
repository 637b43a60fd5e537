#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "gevrey/rational.hpp"

namespace gevrey {

// multi-index of exponents, one entry per space variable
using MIndex = std::vector<unsigned>;

inline unsigned total_degree(const MIndex& idx) {
    return std::accumulate(idx.begin(), idx.end(), 0u);
}

/// Sparse truncated multivariate power series over exact rationals.
///
/// Terms of total degree > trunc_deg are unknown, not zero: the truncation
/// degree is part of the value, every operation propagates the tightest
/// truncation of its result (min rule), and equality is structural.
class MSeries {
public:
    MSeries(int nvars, int trunc_deg) : nvars_(nvars), trunc_deg_(trunc_deg) {
        if (nvars < 1) throw structure_error("MSeries needs at least one variable");
        if (trunc_deg < 0) throw structure_error("negative truncation degree");
    }

    static MSeries zero(int nvars, int trunc_deg) { return MSeries(nvars, trunc_deg); }

    static MSeries constant(int nvars, int trunc_deg, const Rational& c) {
        MSeries s(nvars, trunc_deg);
        s.set(MIndex(static_cast<std::size_t>(nvars), 0u), c);
        return s;
    }

    static MSeries monomial(int nvars, int trunc_deg, const MIndex& idx, const Rational& c) {
        MSeries s(nvars, trunc_deg);
        s.set(idx, c);
        return s;
    }

    static MSeries variable(int nvars, int trunc_deg, int var) {
        if (var < 0 || var >= nvars) throw structure_error("variable index out of range");
        MIndex idx(static_cast<std::size_t>(nvars), 0u);
        if (trunc_deg < 1)
            return zero(nvars, trunc_deg);  // z_i is unknown below degree 1
        idx[static_cast<std::size_t>(var)] = 1;
        return monomial(nvars, trunc_deg, idx, 1);
    }

    int nvars() const { return nvars_; }
    int trunc_deg() const { return trunc_deg_; }
    const std::map<MIndex, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void set(const MIndex& idx, const Rational& c) {
        check_index(idx);
        if (c == 0)
            terms_.erase(idx);
        else
            terms_[idx] = c;
    }

    void add_to(const MIndex& idx, const Rational& c) {
        check_index(idx);
        auto it = terms_.find(idx);
        if (it == terms_.end()) {
            if (c != 0) terms_.emplace(idx, c);
            return;
        }
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }

    bool operator==(const MSeries& o) const {
        return nvars_ == o.nvars_ && trunc_deg_ == o.trunc_deg_ && terms_ == o.terms_;
    }
    bool operator!=(const MSeries& o) const { return !(*this == o); }

private:
    void check_index(const MIndex& idx) const {
        if (static_cast<int>(idx.size()) != nvars_)
            throw structure_error("multi-index length does not match variable count");
        if (static_cast<int>(total_degree(idx)) > trunc_deg_)
            throw structure_error("term beyond truncation degree");
    }

    int nvars_;
    int trunc_deg_;
    std::map<MIndex, Rational> terms_;
};

inline void require_same_vars(const MSeries& a, const MSeries& b) {
    if (a.nvars() != b.nvars())
        throw structure_error("variable counts differ: " + std::to_string(a.nvars()) + " vs " +
                              std::to_string(b.nvars()));
}

inline MSeries add(const MSeries& a, const MSeries& b) {
    require_same_vars(a, b);
    const int deg = std::min(a.trunc_deg(), b.trunc_deg());
    MSeries r(a.nvars(), deg);
    for (const auto& [idx, c] : a.terms())
        if (static_cast<int>(total_degree(idx)) <= deg) r.add_to(idx, c);
    for (const auto& [idx, c] : b.terms())
        if (static_cast<int>(total_degree(idx)) <= deg) r.add_to(idx, c);
    return r;
}

inline MSeries negate(const MSeries& a) {
    MSeries r(a.nvars(), a.trunc_deg());
    for (const auto& [idx, c] : a.terms()) r.set(idx, -c);
    return r;
}

inline MSeries sub(const MSeries& a, const MSeries& b) { return add(a, negate(b)); }

inline MSeries scale(const MSeries& a, const Rational& c) {
    MSeries r(a.nvars(), a.trunc_deg());
    if (c == 0) return r;
    for (const auto& [idx, coeff] : a.terms()) r.set(idx, coeff * c);
    return r;
}

inline MSeries mul(const MSeries& a, const MSeries& b) {
    require_same_vars(a, b);
    const int deg = std::min(a.trunc_deg(), b.trunc_deg());
    MSeries r(a.nvars(), deg);
    MIndex sum(static_cast<std::size_t>(a.nvars()), 0u);
    for (const auto& [ia, ca] : a.terms()) {
        const int da = static_cast<int>(total_degree(ia));
        if (da > deg) continue;
        for (const auto& [ib, cb] : b.terms()) {
            if (da + static_cast<int>(total_degree(ib)) > deg) continue;
            for (std::size_t v = 0; v < sum.size(); ++v) sum[v] = ia[v] + ib[v];
            r.add_to(sum, ca * cb);
        }
    }
    return r;
}

inline MSeries derive(const MSeries& a, int var) {
    if (var < 0 || var >= a.nvars()) throw structure_error("derivation variable out of range");
    const int deg = a.trunc_deg() == 0 ? 0 : a.trunc_deg() - 1;
    MSeries r(a.nvars(), deg);
    if (a.trunc_deg() == 0) return r;
    for (const auto& [idx, c] : a.terms()) {
        const unsigned e = idx[static_cast<std::size_t>(var)];
        if (e == 0) continue;
        MIndex down = idx;
        down[static_cast<std::size_t>(var)] = e - 1;
        r.add_to(down, c * e);
    }
    return r;
}

// partial derivative by a whole multi-index
inline MSeries derive(const MSeries& a, const MIndex& order) {
    if (static_cast<int>(order.size()) != a.nvars())
        throw structure_error("derivative multi-index length does not match variable count");
    MSeries r = a;
    for (std::size_t v = 0; v < order.size(); ++v)
        for (unsigned i = 0; i < order[v]; ++i) r = derive(r, static_cast<int>(v));
    return r;
}

// shrink the truncation degree, dropping terms that fall outside
inline MSeries truncate_to(const MSeries& a, int deg) {
    if (deg >= a.trunc_deg()) return a;
    MSeries r(a.nvars(), deg);
    for (const auto& [idx, c] : a.terms())
        if (static_cast<int>(total_degree(idx)) <= deg) r.set(idx, c);
    return r;
}

inline Rational coeff_at(const MSeries& a, const MIndex& idx) {
    if (static_cast<int>(idx.size()) != a.nvars())
        throw structure_error("multi-index length does not match variable count");
    if (static_cast<int>(total_degree(idx)) > a.trunc_deg())
        throw truncation_error("coefficient lies beyond the truncation degree (unknown, not zero)");
    auto it = a.terms().find(idx);
    return it == a.terms().end() ? Rational(0) : it->second;
}

/// Multiplicative inverse up to the truncation degree (geometric recurrence).
inline MSeries invert(const MSeries& a) {
    const MIndex zero_idx(static_cast<std::size_t>(a.nvars()), 0u);
    auto it = a.terms().find(zero_idx);
    if (it == a.terms().end())
        throw numeric_error("series with zero constant term is not invertible");
    const Rational c0 = it->second;
    // a = c0 (1 + p), val(p) >= 1  =>  1/a = (1/c0) sum (-p)^k, k <= trunc_deg
    MSeries p(a.nvars(), a.trunc_deg());
    for (const auto& [idx, c] : a.terms())
        if (total_degree(idx) > 0) p.set(idx, -c / c0);
    MSeries acc = MSeries::constant(a.nvars(), a.trunc_deg(), 1);
    MSeries pk = MSeries::constant(a.nvars(), a.trunc_deg(), 1);
    for (int k = 1; k <= a.trunc_deg(); ++k) {
        pk = mul(pk, p);
        if (pk.is_zero()) break;
        acc = add(acc, pk);
    }
    return scale(acc, Rational(1) / c0);
}

inline MSeries abs_series(const MSeries& a) {
    MSeries r(a.nvars(), a.trunc_deg());
    for (const auto& [idx, c] : a.terms()) r.set(idx, abs(c));
    return r;
}

/// true iff |a_idx| <= b_idx for every multi-index up to the shared truncation,
/// i.e. b dominates a (a << b), checked at finite order only.
inline bool majorizes(const MSeries& a, const MSeries& b) {
    require_same_vars(a, b);
    const int deg = std::min(a.trunc_deg(), b.trunc_deg());
    for (const auto& [idx, c] : a.terms()) {
        if (static_cast<int>(total_degree(idx)) > deg) continue;
        auto it = b.terms().find(idx);
        const Rational bv = it == b.terms().end() ? Rational(0) : it->second;
        if (abs(c) > bv) return false;
    }
    // indices present only in b need b_idx >= 0
    for (const auto& [idx, c] : b.terms()) {
        if (static_cast<int>(total_degree(idx)) > deg) continue;
        if (c < 0 && a.terms().find(idx) == a.terms().end()) return false;
    }
    return true;
}

/// substitute z_i := z for all i, collating by degree (restriction to the diagonal)
inline MSeries diagonal_restrict(const MSeries& a) {
    MSeries r(1, a.trunc_deg());
    for (const auto& [idx, c] : a.terms()) r.add_to(MIndex{total_degree(idx)}, c);
    return r;
}

// truncated expansion of 1/(1-z_var)^p embedded in nvars variables
inline MSeries geometric_pow_in(int nvars, int trunc_deg, int var, unsigned p) {
    if (p == 0) return MSeries::constant(nvars, trunc_deg, 1);
    MSeries r(nvars, trunc_deg);
    for (int n = 0; n <= trunc_deg; ++n) {
        MIndex idx(static_cast<std::size_t>(nvars), 0u);
        idx[static_cast<std::size_t>(var)] = static_cast<unsigned>(n);
        r.set(idx, Rational(binomial(static_cast<unsigned>(n) + p - 1, p - 1)));
    }
    return r;
}

// truncated expansion of 1/(1-z)^p in one variable
inline MSeries geometric_pow(int trunc_deg, unsigned p) {
    return geometric_pow_in(1, trunc_deg, 0, p);
}

inline MSeries geometric(int trunc_deg) { return geometric_pow(trunc_deg, 1); }

inline MSeries pow(const MSeries& a, unsigned e) {
    MSeries r = MSeries::constant(a.nvars(), a.trunc_deg(), 1);
    MSeries b = a;
    while (e) {
        if (e & 1u) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

/// Ordered list of m component series sharing nvars and trunc_deg.
struct VSeries {
    std::vector<MSeries> components;

    explicit VSeries(std::vector<MSeries> comps) : components(std::move(comps)) {
        if (components.empty()) throw structure_error("VSeries needs at least one component");
        for (const auto& c : components) {
            if (c.nvars() != components[0].nvars() || c.trunc_deg() != components[0].trunc_deg())
                throw structure_error("VSeries components disagree on nvars or trunc_deg");
        }
    }

    int nvars() const { return components[0].nvars(); }
    int trunc_deg() const { return components[0].trunc_deg(); }
    int size() const { return static_cast<int>(components.size()); }

    bool operator==(const VSeries& o) const { return components == o.components; }
};

/// psi: (u_1, ..., u_m) -> u_1 + ... + u_m
inline MSeries component_sum(const VSeries& u) {
    MSeries r = u.components[0];
    for (std::size_t i = 1; i < u.components.size(); ++i) r = add(r, u.components[i]);
    return r;
}

inline bool majorizes(const VSeries& a, const VSeries& b) {
    if (a.size() != b.size()) throw structure_error("component counts differ");
    for (int i = 0; i < a.size(); ++i)
        if (!majorizes(a.components[i], b.components[i])) return false;
    return true;
}

} // namespace gevrey
