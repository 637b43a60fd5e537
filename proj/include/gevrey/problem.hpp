#pragma once

#include <string>
#include <vector>

#include "gevrey/expr.hpp"

namespace gevrey {

/// An initial value problem d/dt u_l = field_l(z, u, du/dz, ...) with
/// u(t=0) = initial, to be solved to order K in t at space truncation D.
struct ProblemSpec {
    std::vector<std::string> space_vars;
    std::vector<std::string> components;
    std::vector<ExprPtr> field;    // one per component
    std::vector<ExprPtr> initial;  // one per component, jet-free
    int order_t = 0;
    int trunc_deg = 0;

    int nvars() const { return static_cast<int>(space_vars.size()); }
    int ncomponents() const { return static_cast<int>(components.size()); }

    NameContext names() const { return NameContext{space_vars, components}; }
};

/// order s of the problem: max |j| over jet nodes in the field
inline unsigned jet_order(const ProblemSpec& p) {
    unsigned s = 0;
    for (const auto& e : p.field) s = std::max(s, max_jet_order(*e));
    return s;
}

inline bool contains_jet(const JetExpr& e) {
    bool found = false;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, JetExpr::Jet>) {
                found = true;
            } else if constexpr (std::is_same_v<T, JetExpr::Add> ||
                                 std::is_same_v<T, JetExpr::Mul>) {
                for (const auto& c : n.children)
                    if (contains_jet(*c)) found = true;
            } else if constexpr (std::is_same_v<T, JetExpr::Pow>) {
                found = contains_jet(*n.base);
            } else if constexpr (std::is_same_v<T, JetExpr::Inv> ||
                                 std::is_same_v<T, JetExpr::Neg>) {
                found = contains_jet(*n.child);
            }
        },
        e.node);
    return found;
}

/// Structural checks plus the truncation budget rule trunc_deg >= s * order_t.
inline void validate(const ProblemSpec& p) {
    if (p.space_vars.empty()) throw structure_error("problem needs at least one space variable");
    if (p.components.empty()) throw structure_error("problem needs at least one component");
    if (p.field.size() != p.components.size())
        throw structure_error("field expression count does not match component count");
    if (p.initial.size() != p.components.size())
        throw structure_error("initial expression count does not match component count");
    if (p.order_t < 0) throw structure_error("negative t order");
    if (p.trunc_deg < 0) throw structure_error("negative truncation degree");
    for (const auto& e : p.initial)
        if (contains_jet(*e))
            throw structure_error("initial data must not contain jet nodes");
    const unsigned s = jet_order(p);
    if (p.trunc_deg < static_cast<int>(s) * p.order_t)
        throw structure_error("truncation budget violated: trunc_deg " +
                              std::to_string(p.trunc_deg) + " < s*order_t = " +
                              std::to_string(s * static_cast<unsigned>(p.order_t)));
}

/// Evaluate the initial data expressions into a VSeries at the problem truncation.
inline VSeries initial_data(const ProblemSpec& p) {
    // a jet-free evaluation; use a dummy zero component vector of the right shape
    std::vector<MSeries> dummy(p.components.size(), MSeries::zero(p.nvars(), p.trunc_deg));
    VSeries shape(std::move(dummy));
    std::vector<MSeries> out;
    out.reserve(p.initial.size());
    for (const auto& e : p.initial) out.push_back(eval_field(*e, shape));
    return VSeries(std::move(out));
}

} // namespace gevrey
