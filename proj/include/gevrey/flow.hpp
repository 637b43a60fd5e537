#pragma once

#include <string>
#include <vector>

#include "gevrey/problem.hpp"

namespace gevrey {

enum class FlowMethod { recurrence, linear_exp };

inline const char* to_string(FlowMethod m) {
    return m == FlowMethod::recurrence ? "recurrence" : "linear_exp";
}

struct FlowResult {
    TSeries series;
    ProblemSpec problem;
    FlowMethod method;
    unsigned order_s;

    std::vector<int> valid_degrees() const { return series.valid_degrees(); }
};

/// Formal flow to order K in t by the degree-by-degree recurrence
///   v_0 = u_0,   (k+1) v_{k+1} = [t^k] field(sum_{i<=k} v_i t^i).
/// Works for any polynomial-in-jets field; t is carried formally and the
/// coefficient extraction is exact. The _at variant takes explicit initial
/// series instead of evaluating the problem's initial expressions.
inline FlowResult flow_recurrence_at(const ProblemSpec& p, const VSeries& u0) {
    validate(p);
    const unsigned s = jet_order(p);
    const int m = p.ncomponents();
    if (u0.size() != m || u0.nvars() != p.nvars())
        throw structure_error("initial data shape does not match the problem");

    // partial[l][k] = v_{l,k}
    std::vector<std::vector<MSeries>> partial(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l)
        partial[static_cast<std::size_t>(l)].push_back(u0.components[static_cast<std::size_t>(l)]);

    for (int k = 0; k < p.order_t; ++k) {
        TScalarEnv env{partial, p.nvars(), p.trunc_deg, k};
        std::vector<MSeries> next;
        next.reserve(static_cast<std::size_t>(m));
        int common = p.trunc_deg;
        for (int l = 0; l < m; ++l) {
            const TScalar rhs = eval_expr<TScalar>(*p.field[static_cast<std::size_t>(l)], env);
            // [t^k] rhs; a structurally missing coefficient is the zero series
            MSeries ck = rhs.at(k, p.trunc_deg - static_cast<int>(s) * (k + 1));
            common = std::min(common, ck.trunc_deg());
            next.push_back(scale(ck, Rational(1, k + 1)));
        }
        // components of one t-order share a truncation degree
        for (int l = 0; l < m; ++l)
            partial[static_cast<std::size_t>(l)].push_back(
                truncate_to(next[static_cast<std::size_t>(l)], common));
    }

    std::vector<VSeries> coeffs;
    coeffs.reserve(static_cast<std::size_t>(p.order_t) + 1);
    for (int k = 0; k <= p.order_t; ++k) {
        std::vector<MSeries> comps;
        comps.reserve(static_cast<std::size_t>(m));
        for (int l = 0; l < m; ++l)
            comps.push_back(partial[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)]);
        coeffs.push_back(VSeries(std::move(comps)));
    }
    return FlowResult{TSeries(std::move(coeffs)), p, FlowMethod::recurrence, s};
}

inline FlowResult flow_recurrence(const ProblemSpec& p) {
    return flow_recurrence_at(p, initial_data(p));
}

/// Exponential form for linear homogeneous fields: v_k = X^k(u_0) / k!.
/// The field must be linear in the jets, with every additive term of jet
/// degree exactly one; affine fields are rejected (the exponential formula
/// does not integrate them).
inline FlowResult flow_linear_exp(const ProblemSpec& p) {
    validate(p);
    for (const auto& e : p.field) {
        const auto d = jet_degree(*e);
        if (!d || *d != 1)
            throw structure_error(
                "flow_linear_exp requires a field linear and homogeneous in the jets; '" +
                print_expr(e, p.names()) + "' is not");
    }
    const unsigned s = jet_order(p);
    VSeries w = initial_data(p);
    std::vector<VSeries> coeffs{w};
    Rational kfact = 1;
    for (int k = 1; k <= p.order_t; ++k) {
        std::vector<MSeries> next;
        next.reserve(p.field.size());
        int common = p.trunc_deg;
        for (const auto& e : p.field) {
            next.push_back(eval_field(*e, w));
            common = std::min(common, next.back().trunc_deg());
        }
        for (auto& c : next) c = truncate_to(c, common);
        w = VSeries(std::move(next));
        kfact *= k;
        std::vector<MSeries> scaled;
        scaled.reserve(w.components.size());
        for (const auto& c : w.components) scaled.push_back(scale(c, Rational(1) / kfact));
        coeffs.push_back(VSeries(std::move(scaled)));
    }
    return FlowResult{TSeries(std::move(coeffs)), p, FlowMethod::linear_exp, s};
}

/// Exact coefficient u_j of the model flow of (1-z)^{-1} d^s/dz^s at 1/(1-z):
///   u(t) = sum_j u_j t^j / (1-z)^{js+j+1},
///   u_j  = j ((s+1)j - 1)! / ((s+1)^{j-1} (j!)^2).
inline Rational closed_form_coeff(unsigned s, unsigned j) {
    if (s < 1 || j < 1) throw structure_error("closed_form_coeff needs s >= 1 and j >= 1");
    const Integer num = Integer(j) * factorial((s + 1) * j - 1);
    const Integer den = boost::multiprecision::pow(Integer(s + 1), j - 1) * factorial(j) * factorial(j);
    return Rational(num, den);
}

/// Flow coefficients L^k u_0 / k!, k = 0..K, of the model operator
/// L = z^alpha d^j with u_0 = z^N prod_i (1 - z_i)^{-p_i}, all exact.
/// The pole orders p default to j (the compactly-holomorphic model data);
/// pass p = (1,...,1) to start from 1/prod(1 - z_i) instead.
inline std::vector<MSeries> model_growth_coeffs(const MIndex& alpha, const MIndex& j,
                                                const MIndex& N, int K, int trunc_deg,
                                                const MIndex& u0_pole_orders = {}) {
    const auto n = alpha.size();
    if (j.size() != n || N.size() != n)
        throw structure_error("model operator multi-indices must share the variable count");
    if (total_degree(j) < 1) throw structure_error("model operator needs |j| >= 1");
    const MIndex poles = u0_pole_orders.empty() ? j : u0_pole_orders;
    if (poles.size() != n)
        throw structure_error("initial-data pole orders must share the variable count");
    const int nv = static_cast<int>(n);

    MSeries u0 = MSeries::monomial(nv, trunc_deg, N, 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (poles[i] == 0) continue;
        u0 = mul(u0, geometric_pow_in(nv, trunc_deg, static_cast<int>(i), poles[i]));
    }

    std::vector<MSeries> out{u0};
    MSeries w = u0;
    Rational kfact = 1;
    for (int k = 1; k <= K; ++k) {
        if (static_cast<int>(total_degree(j)) > w.trunc_deg())
            throw truncation_error("truncation exhausted after " + std::to_string(k - 1) +
                                   " applications of the model operator");
        w = derive(w, j);
        if (total_degree(alpha) > 0) {
            if (static_cast<int>(total_degree(alpha)) > w.trunc_deg())
                throw truncation_error("truncation exhausted by the z^alpha factor");
            w = mul(w, MSeries::monomial(nv, w.trunc_deg(), alpha, 1));
        }
        kfact *= k;
        out.push_back(scale(w, Rational(1) / kfact));
    }
    return out;
}

} // namespace gevrey
