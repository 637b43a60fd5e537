#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gevrey/analysis.hpp"
#include "gevrey/flow.hpp"
#include "gevrey/laplace.hpp"

namespace gevrey {

using Json = nlohmann::json;

// --- series ---------------------------------------------------------------
// MSeries: {"nvars": n, "trunc_deg": D, "terms": [[[e1..en], "p/q"], ...]}
// terms sorted lexicographically by exponent; rationals in canonical form.

inline Json to_json(const MSeries& s) {
    Json terms = Json::array();
    for (const auto& [idx, c] : s.terms()) {
        Json e = Json::array();
        for (unsigned x : idx) e.push_back(x);
        terms.push_back(Json::array({e, to_string(c)}));
    }
    return Json{{"nvars", s.nvars()}, {"trunc_deg", s.trunc_deg()}, {"terms", terms}};
}

inline MSeries mseries_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("nvars") || !j.contains("trunc_deg"))
        throw structure_error("series JSON needs nvars and trunc_deg");
    MSeries s(j.at("nvars").get<int>(), j.at("trunc_deg").get<int>());
    if (j.contains("terms")) {
        for (const auto& t : j.at("terms")) {
            if (!t.is_array() || t.size() != 2)
                throw structure_error("series term must be [[exponents], \"p/q\"]");
            MIndex idx;
            for (const auto& e : t.at(0)) idx.push_back(e.get<unsigned>());
            s.set(idx, rational_from_string(t.at(1).get<std::string>()));
        }
    }
    return s;
}

// TSeries: {"nvars", "trunc_deg", "order_t", "components",
//           "coeffs": [k][l] = {"trunc_deg": d_kl, "terms": [...]}}
// Each coefficient keeps its own (possibly smaller) valid truncation degree.

inline Json to_json(const TSeries& ts, int declared_trunc_deg) {
    Json coeffs = Json::array();
    for (const auto& v : ts.coeffs) {
        Json comps = Json::array();
        for (const auto& c : v.components) {
            Json terms = Json::array();
            for (const auto& [idx, q] : c.terms()) {
                Json e = Json::array();
                for (unsigned x : idx) e.push_back(x);
                terms.push_back(Json::array({e, to_string(q)}));
            }
            comps.push_back(Json{{"trunc_deg", c.trunc_deg()}, {"terms", terms}});
        }
        coeffs.push_back(comps);
    }
    return Json{{"nvars", ts.nvars()},
                {"trunc_deg", declared_trunc_deg},
                {"order_t", ts.order_t()},
                {"components", ts.components()},
                {"coeffs", coeffs}};
}

inline TSeries tseries_from_json(const Json& j) {
    const int nvars = j.at("nvars").get<int>();
    std::vector<VSeries> out;
    for (const auto& comps : j.at("coeffs")) {
        std::vector<MSeries> v;
        for (const auto& cj : comps) {
            MSeries c(nvars, cj.at("trunc_deg").get<int>());
            for (const auto& t : cj.at("terms")) {
                MIndex idx;
                for (const auto& e : t.at(0)) idx.push_back(e.get<unsigned>());
                c.set(idx, rational_from_string(t.at(1).get<std::string>()));
            }
            v.push_back(std::move(c));
        }
        out.push_back(VSeries(std::move(v)));
    }
    if (out.empty()) throw structure_error("empty t-coefficient list");
    return TSeries(std::move(out));
}

// --- problems ---------------------------------------------------------------

inline Json to_json(const ProblemSpec& p) {
    Json field = Json::array(), initial = Json::array();
    const NameContext ctx = p.names();
    for (const auto& e : p.field) field.push_back(print_expr(e, ctx));
    for (const auto& e : p.initial) initial.push_back(print_expr(e, ctx));
    return Json{{"space_vars", p.space_vars}, {"components", p.components},
                {"field", field},             {"initial", initial},
                {"order_t", p.order_t},       {"trunc_deg", p.trunc_deg}};
}

inline ProblemSpec problem_from_json(const Json& j) {
    ProblemSpec p;
    p.space_vars = j.at("space_vars").get<std::vector<std::string>>();
    p.components = j.at("components").get<std::vector<std::string>>();
    p.order_t = j.at("order_t").get<int>();
    p.trunc_deg = j.at("trunc_deg").get<int>();
    const NameContext ctx = p.names();
    for (const auto& s : j.at("field")) p.field.push_back(parse_expr(s.get<std::string>(), ctx));
    for (const auto& s : j.at("initial"))
        p.initial.push_back(parse_expr(s.get<std::string>(), ctx));
    validate(p);
    return p;
}

// --- reports ----------------------------------------------------------------

inline Json to_json(const FlowResult& fr) {
    Json vd = Json::array();
    for (int d : fr.valid_degrees()) vd.push_back(d);
    return Json{{"method", to_string(fr.method)},
                {"s", fr.order_s},
                {"order_t", fr.series.order_t()},
                {"valid_degrees", vd},
                {"series", to_json(fr.series, fr.problem.trunc_deg)}};
}

inline Json to_json(const NormSeq& seq) {
    Json vals = Json::array();
    for (const auto& v : seq.values) vals.push_back(to_string(v));
    return Json{{"mode", to_string(seq.mode.kind)}, {"values", vals}};
}

inline Json gevrey_report(const NormSeq& seq, const GevreyEstimate& est,
                          const std::vector<std::pair<int, MinRResult>>& min_r_table) {
    Json table = Json::array();
    for (const auto& [s, res] : min_r_table) {
        if (res.divergent)
            table.push_back(Json::array({s, "divergent"}));
        else
            table.push_back(Json::array({s, to_string(res.r)}));
    }
    Json details = Json::array();
    for (const auto& [s, res] : min_r_table) {
        Json per_k = Json::array();
        for (const auto& [k, rk] : res.per_k) per_k.push_back(Json::array({k, to_string(rk)}));
        details.push_back(Json{{"s", s},
                               {"divergent", res.divergent},
                               {"growth_rate", res.growth_rate},
                               {"required_R", per_k}});
    }
    return Json{{"mode", to_string(seq.mode.kind)},
                {"window", Json::array({est.window.lo, est.window.hi})},
                {"s_hat", est.s_hat},
                {"R_hat", est.r_hat},
                {"c_hat", est.c_hat},
                {"residual", est.residual},
                {"npoints", est.npoints},
                {"minR_table", table},
                {"minR_details", details},
                {"sequence", to_json(seq)["values"]}};
}

inline Json laplace_report(const LaplaceValue& v, const std::string& path_desc) {
    return Json{{"value", Json::array({v.value.real(), v.value.imag()})},
                {"est_error", v.est_error},
                {"branch", "-i(4xi-1)^(-1/2) on (1/4,inf)"},
                {"path", path_desc}};
}

} // namespace gevrey
