// gevreylab: exact truncated power-series flows of characteristic Cauchy
// problems, Gevrey-order diagnostics, and the Laplace lab for the heat kernel.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gevrey/json_io.hpp"

namespace {

using namespace gevrey;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

void write_output(const Json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw structure_error("cannot open output file " + out_path);
    f << text;
}

Json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw structure_error("cannot open " + path);
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw structure_error("invalid JSON in " + path + ": " + e.what());
    }
}

ProblemSpec load_problem(const std::string& path, int order_t_override, int trunc_deg_override) {
    Json j = read_json_file(path);
    if (order_t_override >= 0) j["order_t"] = order_t_override;
    if (trunc_deg_override >= 0) j["trunc_deg"] = trunc_deg_override;
    return problem_from_json(j);
}

Window parse_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw structure_error("window must look like a:b, got " + text);
    try {
        return Window{std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw structure_error("window must look like a:b, got " + text);
    }
}

Complex parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) return Complex(std::stod(text), 0.0);
        return Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
    } catch (const std::exception&) {
        throw structure_error("complex value must look like re or re,im, got " + text);
    }
}

// --- embedded demo problems --------------------------------------------------

struct Demo {
    const char* name;
    const char* problem;  // JSON; empty for non-flow demos
    const char* note;
};

constexpr const char* kHeatProblem = R"json({
  "space_vars": ["z"], "components": ["u"],
  "field": ["D(u,[2])"], "initial": ["inv(1-z)"],
  "order_t": 12, "trunc_deg": 30})json";

constexpr const char* kKdvProblem = R"json({
  "space_vars": ["z"], "components": ["u"],
  "field": ["D(u,[3]) + u*D(u,[1])"], "initial": ["inv(1-z^2)"],
  "order_t": 12, "trunc_deg": 50})json";

constexpr Demo kDemos[] = {
    {"constant", R"json({"space_vars":["z"],"components":["x"],"field":["1"],
       "initial":["1/2"],"order_t":4,"trunc_deg":2})json",
     "dx/dt = 1: the flow is x0 + t"},
    {"exponential", R"json({"space_vars":["z"],"components":["x"],"field":["x"],
       "initial":["1"],"order_t":12,"trunc_deg":2})json",
     "dx/dt = x: coefficients 1/k!"},
    {"taylor-shift", R"json({"space_vars":["z"],"components":["u"],"field":["D(u,[1])"],
       "initial":["z^3"],"order_t":3,"trunc_deg":3})json",
     "du/dt = du/dz: the flow is u0(z+t)"},
    {"burgers", R"json({"space_vars":["z"],"components":["u"],"field":["u*D(u,[1])"],
       "initial":["inv(1-z)"],"order_t":2,"trunc_deg":10})json",
     "du/dt = u du/dz to second order"},
    {"closed-form", R"json({"space_vars":["z"],"components":["u"],"field":["inv(1-z)*D(u,[2])"],
       "initial":["inv(1-z)"],"order_t":8,"trunc_deg":25})json",
     "flow of (1-z)^{-1} d^s/dz^s at 1/(1-z): coefficients j((s+1)j-1)!/((s+1)^{j-1}(j!)^2)"},
    {"kovalevskaia", kHeatProblem,
     "heat equation at 1/(1-z): sequence (2k)!/k!, order-2 Borel transform, flat term a(w)"},
    {"kdv", kKdvProblem,
     "KdV at 1/(1-z^2): Gevrey order near 3, order-2 bound divergent"},
    {"model-growth", "", "growth of L^k u0 / k! for L = z^alpha d^j"},
};

Json run_named_demo(const std::string& name) {
    const Demo* demo = nullptr;
    for (const auto& d : kDemos)
        if (name == d.name) demo = &d;
    if (!demo) {
        std::string known;
        for (const auto& d : kDemos) known += std::string(" ") + d.name;
        throw structure_error("unknown demo '" + name + "'; available:" + known);
    }

    Json out{{"demo", demo->name}, {"note", demo->note}};
    if (name == "model-growth") {
        // L = d^2/dz^2 at 1/(1-z): constant terms (2k)!/k! again
        const auto coeffs = model_growth_coeffs(MIndex{0}, MIndex{2}, MIndex{0}, 6, 20, MIndex{1});
        Json seq = Json::array();
        for (const auto& c : coeffs) seq.push_back(to_string(coeff_at(c, MIndex{0})));
        out["constant_terms"] = seq;
        // default model data (1-z)^{-2}: the faster-growing (2k+1)!/k! family
        const auto model = model_growth_coeffs(MIndex{0}, MIndex{2}, MIndex{0}, 6, 20);
        Json seq2 = Json::array();
        for (const auto& c : model) seq2.push_back(to_string(coeff_at(c, MIndex{0})));
        out["model_constant_terms"] = seq2;
        return out;
    }

    const ProblemSpec p = problem_from_json(Json::parse(demo->problem));
    const FlowResult fr = flow_recurrence(p);
    out["problem"] = to_json(p);
    out["s"] = jet_order(p);

    if (name == "kovalevskaia") {
        const NormSeq seq = norm_sequence(fr, NormMode::abs_origin());
        out["sequence"] = to_json(seq)["values"];
        out["borel_check_k20"] = borel_series_check(20);
        const auto r2 = min_R_for_s(seq, 2, Window{6, 12});
        const auto r1 = min_R_for_s(seq, 1, Window{6, 12});
        out["minR_s2"] = r2.divergent ? Json("divergent") : Json(to_string(r2.r));
        out["minR_s1"] = r1.divergent ? Json("divergent") : Json(to_string(r1.r));
        const LaplaceValue a = flat_difference(Complex(10, 0));
        out["a_at_w10"] = Json::array({a.value.real(), a.value.imag()});
        return out;
    }
    if (name == "kdv") {
        const NormSeq seq = norm_sequence(fr, NormMode::abs_origin());
        out["sequence"] = to_json(seq)["values"];
        const GevreyEstimate est = estimate_order(seq, Window{5, 12});
        out["s_hat"] = est.s_hat;
        const auto r3 = min_R_for_s(seq, 3, Window{5, 12});
        const auto r2 = min_R_for_s(seq, 2, Window{5, 12});
        out["minR_s3"] = r3.divergent ? Json("divergent") : Json(to_string(r3.r));
        out["minR_s2"] = r2.divergent ? Json("divergent") : Json(to_string(r2.r));
        return out;
    }
    if (name == "closed-form") {
        Json table = Json::array();
        for (unsigned j = 1; j <= 4; ++j)
            table.push_back(Json::array({j, to_string(closed_form_coeff(2, j))}));
        out["u_j_s2"] = table;
    }
    out["flow"] = to_json(fr);
    return out;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"exact formal flows, Gevrey-order diagnostics, Borel-Laplace lab"};
    app.require_subcommand(1);

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "compute a formal flow from a problem file");
    std::string problem_path, out_path, method = "recurrence";
    int order_t_override = -1, trunc_deg_override = -1;
    flow_cmd->add_option("--problem", problem_path, "problem JSON file")->required();
    flow_cmd->add_option("--order-t", order_t_override, "override order in t");
    flow_cmd->add_option("--trunc-deg", trunc_deg_override, "override space truncation degree");
    flow_cmd->add_option("--method", method, "recurrence | linear");
    flow_cmd->add_option("--out", out_path, "output path (default stdout)");

    // gevrey
    auto* gevrey_cmd = app.add_subcommand("gevrey", "growth diagnostics of a computed flow");
    std::string coeffs_path, mode_name = "abs_at_origin", window_text;
    int s_max = 3, max_degree = 0;
    bool strict = false;
    gevrey_cmd->add_option("--coeffs", coeffs_path, "flow JSON file")->required();
    gevrey_cmd->add_option("--mode", mode_name, "at_origin | abs_at_origin | max_coeff");
    gevrey_cmd->add_option("--max-degree", max_degree, "degree cap for max_coeff mode");
    gevrey_cmd->add_option("--window", window_text, "fit window a:b")->required();
    gevrey_cmd->add_option("--s", s_max, "largest s for the minimal-R table");
    gevrey_cmd->add_flag("--strict", strict, "exit 3 when a divergence flag is raised");
    gevrey_cmd->add_option("--out", out_path, "output path");

    // borel-check
    auto* borel_cmd = app.add_subcommand("borel-check",
                                         "check (2k)!/(k!)^2 against the (1-4xi)^(-1/2) series");
    int borel_k = 20;
    borel_cmd->add_option("--order", borel_k, "largest k checked");
    borel_cmd->add_option("--out", out_path, "output path");

    // laplace
    auto* laplace_cmd = app.add_subcommand("laplace", "Laplace integrals of the heat Borel sum");
    std::string w_text, path_kind = "ray";
    double angle = 0.78539816339744831, rel_tol = 1e-10;
    int winding_k = 0;
    laplace_cmd->add_option("--w", w_text, "evaluation point re,im")->required();
    laplace_cmd->add_option("--path", path_kind, "ray | cut | winding");
    laplace_cmd->add_option("--angle", angle, "ray angle in radians");
    laplace_cmd->add_option("--winding", winding_k, "winding index around xi = 1/4");
    laplace_cmd->add_option("--rel-tol", rel_tol, "relative quadrature tolerance");
    laplace_cmd->add_option("--out", out_path, "output path");

    // demo
    auto* demo_cmd = app.add_subcommand("demo", "run a named built-in example");
    std::string demo_name;
    demo_cmd->add_option("name", demo_name, "demo name")->required();
    demo_cmd->add_option("--out", out_path, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    if (flow_cmd->parsed()) {
        const ProblemSpec p = load_problem(problem_path, order_t_override, trunc_deg_override);
        FlowResult fr = method == "linear" ? flow_linear_exp(p) : flow_recurrence(p);
        write_output(to_json(fr), out_path);
        return kExitOk;
    }
    if (gevrey_cmd->parsed()) {
        Json j = read_json_file(coeffs_path);
        const Json& series_json = j.contains("series") ? j.at("series") : j;
        TSeries ts = tseries_from_json(series_json);
        ProblemSpec dummy;  // mode extraction does not need the problem
        FlowResult fr{std::move(ts), std::move(dummy), FlowMethod::recurrence,
                      j.contains("s") ? j.at("s").get<unsigned>() : 0u};
        NormMode mode = NormMode::abs_origin();
        if (mode_name == "at_origin") mode = NormMode::origin();
        else if (mode_name == "abs_at_origin") mode = NormMode::abs_origin();
        else if (mode_name == "max_coeff") mode = NormMode::max_up_to(max_degree);
        else throw structure_error("unknown mode " + mode_name);
        const NormSeq seq = norm_sequence(fr, mode);
        const Window w = parse_window(window_text);
        const GevreyEstimate est = estimate_order(seq, w);
        std::vector<std::pair<int, MinRResult>> table;
        bool any_divergent = false;
        for (int s = 1; s <= std::max(s_max, 1); ++s) {
            table.emplace_back(s, min_R_for_s(seq, s, w));
            any_divergent = any_divergent || table.back().second.divergent;
        }
        write_output(gevrey_report(seq, est, table), out_path);
        return strict && any_divergent ? kExitNumeric : kExitOk;
    }
    if (borel_cmd->parsed()) {
        const bool ok = borel_series_check(borel_k);
        write_output(Json{{"order", borel_k}, {"match", ok}}, out_path);
        return ok ? kExitOk : kExitNumeric;
    }
    if (laplace_cmd->parsed()) {
        const Complex w = parse_complex(w_text);
        QuadParams q;
        q.rel_tol = rel_tol;
        PathSpec path;
        if (path_kind == "ray") {
            path = PathSpec{PathSpec::ray, angle, 0};
        } else if (path_kind == "cut") {
            path = PathSpec{PathSpec::real_cut, 0.0, 0};
        } else if (path_kind == "winding") {
            path = PathSpec{PathSpec::winding, angle, winding_k};
        } else {
            throw structure_error("unknown path kind " + path_kind);
        }
        const LaplaceValue v = evaluate_path(w, path, q);
        write_output(laplace_report(v, describe(path)), out_path);
        return kExitOk;
    }
    if (demo_cmd->parsed()) {
        write_output(run_named_demo(demo_name), out_path);
        return kExitOk;
    }
    return kExitInput;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const gevrey::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const gevrey::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
