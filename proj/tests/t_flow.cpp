#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "gevrey/flow.hpp"
#include "test_support.hpp"

using namespace gevrey;
using testsupport::SeriesGen;

namespace {

ProblemSpec scalar_problem(const std::string& field, const std::string& initial, int K, int D) {
    ProblemSpec p;
    p.space_vars = {"z"};
    p.components = {"u"};
    p.field = {parse_expr(field, p.names())};
    p.initial = {parse_expr(initial, p.names())};
    p.order_t = K;
    p.trunc_deg = D;
    return p;
}

// [t^k] field(u) for the computed flow must equal (k+1) v_{k+1}
void check_flow_consistency(const FlowResult& fr) {
    const int K = fr.series.order_t();
    const int m = fr.series.components();
    std::vector<std::vector<MSeries>> partial(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l)
        for (int k = 0; k <= K; ++k)
            partial[static_cast<std::size_t>(l)].push_back(
                fr.series.coeffs[static_cast<std::size_t>(k)]
                    .components[static_cast<std::size_t>(l)]);
    for (int k = 0; k + 1 <= K; ++k) {
        TScalarEnv env{partial, fr.problem.nvars(), fr.problem.trunc_deg, k};
        for (int l = 0; l < m; ++l) {
            const TScalar rhs =
                eval_expr<TScalar>(*fr.problem.field[static_cast<std::size_t>(l)], env);
            const MSeries want = scale(fr.series.coeffs[static_cast<std::size_t>(k + 1)]
                                           .components[static_cast<std::size_t>(l)],
                                       Rational(k + 1));
            const MSeries got = rhs.at(k, want.trunc_deg());
            INFO("component " << l << " at t^" << k);
            CHECK(got == want);
        }
    }
}

} // namespace

TEST_CASE("Taylor shift: flow of d/dz at z^3 is (z+t)^3") {
    const FlowResult fr = flow_recurrence(scalar_problem("D(u,[1])", "z^3", 3, 3));
    for (int k = 0; k <= 3; ++k) {
        const MSeries& vk = fr.series.coeffs[static_cast<std::size_t>(k)].components[0];
        MSeries expect(1, 3 - k);
        expect.set(MIndex{static_cast<unsigned>(3 - k)},
                   Rational(binomial(3, static_cast<unsigned>(k))));
        CHECK(vk == expect);
    }
    CHECK(fr.valid_degrees() == std::vector<int>{3, 2, 1, 0});
}

TEST_CASE("transport at second order: t^2 coefficient of u du/dz") {
    const int D = 10;
    const FlowResult fr = flow_recurrence(scalar_problem("u*D(u,[1])", "inv(1-z)", 2, D));
    const MSeries u0 = geometric(D);
    const MSeries du = derive(u0, 0);
    const MSeries ddu = derive(du, 0);
    CHECK(fr.series.coeffs[1].components[0] == mul(u0, du));
    // v_2 = (1/2)(2 u0 (u0')^2 + u0^2 u0'')
    const MSeries expect =
        scale(add(scale(mul(u0, mul(du, du)), 2), mul(mul(u0, u0), ddu)), Rational(1, 2));
    CHECK(fr.series.coeffs[2].components[0] == expect);
}

TEST_CASE("heat flow at 1/(1-z): constant terms are (2k)!/k!") {
    const FlowResult fr = flow_recurrence(scalar_problem("D(u,[2])", "inv(1-z)", 4, 10));
    std::vector<Rational> got;
    for (const auto& v : fr.series.coeffs) got.push_back(coeff_at(v.components[0], MIndex{0}));
    CHECK(got == std::vector<Rational>{1, 2, 12, 120, 1680});
}

TEST_CASE("flow of dx/dt = x at 1 is the exponential series") {
    const FlowResult fr = flow_linear_exp(scalar_problem("u", "1", 8, 2));
    for (unsigned k = 0; k <= 8; ++k)
        CHECK(fr.series.coeffs[k].components[0] ==
              MSeries::constant(1, 2, Rational(1, factorial(k))));
}

TEST_CASE("dx/dt = 1 integrates to x0 + t; affine fields rejected by the exp form") {
    const ProblemSpec p = scalar_problem("1", "1/2", 3, 2);
    const FlowResult fr = flow_recurrence(p);
    CHECK(fr.series.coeffs[0].components[0] == MSeries::constant(1, 2, Rational(1, 2)));
    CHECK(fr.series.coeffs[1].components[0] == MSeries::constant(1, 2, 1));
    CHECK(fr.series.coeffs[2].components[0].is_zero());
    CHECK(fr.series.coeffs[3].components[0].is_zero());
    CHECK_THROWS_AS(flow_linear_exp(p), structure_error);
    CHECK_THROWS_AS(flow_linear_exp(scalar_problem("u*D(u,[1])", "inv(1-z)", 2, 10)),
                    structure_error);
    CHECK_THROWS_AS(flow_linear_exp(scalar_problem("1 + u", "1", 2, 2)), structure_error);
}

TEST_CASE("cross-method equality on linear problems") {
    const char* linear_fields[] = {"D(u,[1])", "u", "D(u,[2])", "inv(1-z)*D(u,[1])",
                                   "z*u + D(u,[1])"};
    for (const char* f : linear_fields) {
        const ProblemSpec p = scalar_problem(f, "inv(1-z)", 5, 12);
        INFO(f);
        CHECK(flow_recurrence(p).series == flow_linear_exp(p).series);
    }
}

TEST_CASE("substituting the flow back: residual consistency") {
    check_flow_consistency(flow_recurrence(scalar_problem("D(u,[2])", "inv(1-z)", 5, 12)));
    check_flow_consistency(flow_recurrence(scalar_problem("u*D(u,[1])", "inv(1-z)", 4, 8)));
    check_flow_consistency(
        flow_recurrence(scalar_problem("D(u,[3]) + u*D(u,[1])", "inv(1-z^2)", 4, 14)));
    check_flow_consistency(flow_recurrence(scalar_problem("inv(1-z)*D(u,[2]) + u^2",
                                                          "1 + z", 3, 9)));
}

TEST_CASE("closed-form coefficients of the model flow") {
    CHECK(closed_form_coeff(1, 1) == 1);
    CHECK(closed_form_coeff(2, 1) == 2);
    CHECK(closed_form_coeff(3, 1) == 6);  // u_1 = s!
    CHECK(closed_form_coeff(1, 2) == Rational(3, 2));
    CHECK(closed_form_coeff(2, 2) == 20);

    // oracle: the recurrence flow of (1-z)^{-1} d^s/dz^s at 1/(1-z) equals
    // u_j t^j (1-z)^{-(js+j+1)} term by term
    for (unsigned s = 1; s <= 2; ++s) {
        const int K = 4;
        const int D = static_cast<int>(s) * K + 6;
        const ProblemSpec p = scalar_problem(
            "inv(1-z)*D(u,[" + std::to_string(s) + "])", "inv(1-z)", K, D);
        const FlowResult fr = flow_recurrence(p);
        for (unsigned j = 1; j <= static_cast<unsigned>(K); ++j) {
            const MSeries& vj = fr.series.coeffs[j].components[0];
            const MSeries expect =
                scale(geometric_pow(vj.trunc_deg(), j * s + j + 1), closed_form_coeff(s, j));
            INFO("s=" << s << " j=" << j);
            CHECK(vj == expect);
        }
    }
}

TEST_CASE("model growth coefficients") {
    // j=[1], u0 = geom: L^k u0/k! = (1-z)^{-(k+1)}, constant term 1
    // oracle: repeated derivative of the geometric series
    const auto first = model_growth_coeffs(MIndex{0}, MIndex{1}, MIndex{0}, 5, 12);
    MSeries w = geometric(12);
    Rational kfact = 1;
    for (int k = 0; k <= 5; ++k) {
        CHECK(coeff_at(first[static_cast<std::size_t>(k)], MIndex{0}) == 1);
        CHECK(first[static_cast<std::size_t>(k)] == scale(w, Rational(1) / kfact));
        w = derive(w, 0);
        kfact *= k + 1;
    }

    // j=[2] with pole order 1: constant terms (2k)!/k!, matching the heat flow
    const auto heat = model_growth_coeffs(MIndex{0}, MIndex{2}, MIndex{0}, 4, 10, MIndex{1});
    for (unsigned k = 0; k <= 4; ++k)
        CHECK(coeff_at(heat[k], MIndex{0}) == Rational(factorial(2 * k), factorial(k)));

    // default model data for j=[2] is (1-z)^{-2}: d^{2k} gives (2k+1)!/k!
    // oracle: repeated derivative of (1-z)^{-2}
    const auto model = model_growth_coeffs(MIndex{0}, MIndex{2}, MIndex{0}, 3, 10);
    MSeries w2 = geometric_pow(10, 2);
    kfact = 1;
    for (int k = 0; k <= 3; ++k) {
        CHECK(model[static_cast<std::size_t>(k)] == scale(w2, Rational(1) / kfact));
        CHECK(coeff_at(model[static_cast<std::size_t>(k)], MIndex{0}) ==
              Rational(factorial(2 * static_cast<unsigned>(k) + 1),
                       factorial(static_cast<unsigned>(k))));
        w2 = derive(derive(w2, 0), 0);
        kfact *= k + 1;
    }

    // k=0 yields u0 itself
    const auto u0 = model_growth_coeffs(MIndex{0, 0}, MIndex{1, 1}, MIndex{1, 0}, 0, 4)[0];
    MSeries z1(2, 4);
    z1.set(MIndex{1, 0}, 1);
    const MSeries expect = mul(z1, mul(geometric_pow_in(2, 4, 0, 1), geometric_pow_in(2, 4, 1, 1)));
    CHECK(u0 == expect);

    CHECK_THROWS_AS(model_growth_coeffs(MIndex{0}, MIndex{2}, MIndex{0}, 5, 6),
                    truncation_error);
}

TEST_CASE("model growth lower bound: L^k u0 >> z^{k(N+alpha)} (kj)! (1-z)^{-(kj+1)}") {
    // univariate instance of the growth estimate behind the divergence result
    const MIndex alpha{1}, j{2}, N{1};
    const int D = 16, K = 3;
    const auto coeffs = model_growth_coeffs(alpha, j, N, K, D);
    for (int k = 1; k <= K; ++k) {
        const MSeries lk = scale(coeffs[static_cast<std::size_t>(k)],
                                 Rational(factorial(static_cast<unsigned>(k))));
        const unsigned kj = static_cast<unsigned>(k) * j[0];
        const unsigned shift = static_cast<unsigned>(k) * (N[0] + alpha[0]);
        MSeries bound(1, lk.trunc_deg());
        for (int e = 0; static_cast<int>(e + shift) <= lk.trunc_deg(); ++e)
            bound.set(MIndex{static_cast<unsigned>(e) + shift},
                      Rational(factorial(kj)) * Rational(binomial(static_cast<unsigned>(e) + kj,
                                                                  kj)));
        INFO("k=" << k);
        CHECK(majorizes(bound, lk));
    }

    // two-variable instance: alpha=(0,0), j=(1,1), N=(0,0)
    const auto coeffs2 = model_growth_coeffs(MIndex{0, 0}, MIndex{1, 1}, MIndex{0, 0}, 2, 8);
    for (int k = 1; k <= 2; ++k) {
        const MSeries lk = scale(coeffs2[static_cast<std::size_t>(k)],
                                 Rational(factorial(static_cast<unsigned>(k))));
        const unsigned kk = static_cast<unsigned>(k);
        MSeries bound = scale(mul(geometric_pow_in(2, lk.trunc_deg(), 0, kk + 1),
                                  geometric_pow_in(2, lk.trunc_deg(), 1, kk + 1)),
                              Rational(factorial(kk)) * Rational(factorial(kk)));
        CHECK(majorizes(bound, lk));
    }
}

TEST_CASE("majorant monotonicity of flows (randomized, exact)") {
    SeriesGen gen(60902);
    const char* base_fields[] = {"D(u,[1])", "z*D(u,[2])", "u*D(u,[1])", "u^2", "D(u,[1])*u"};
    for (int trial = 0; trial < 25; ++trial) {
        const std::string fx = base_fields[gen.uniform(0, 4)];
        const std::string extra = base_fields[gen.uniform(0, 4)];
        const int K = gen.uniform(1, 4);
        const int D = 2 * K + gen.uniform(0, 3);

        const ProblemSpec p1 = scalar_problem(fx, "0", K, D);
        const ProblemSpec p2 = scalar_problem(fx + " + " + extra, "0", K, D);
        const MSeries u0 = gen.series(1, D, 4, true);

        // clause 1: X << Y, same u0 >> 0 => flow(X) << flow(Y)
        const FlowResult f1 = flow_recurrence_at(p1, VSeries({u0}));
        const FlowResult f2 = flow_recurrence_at(p2, VSeries({u0}));
        for (int k = 0; k <= K; ++k)
            CHECK(majorizes(f1.series.coeffs[static_cast<std::size_t>(k)],
                            f2.series.coeffs[static_cast<std::size_t>(k)]));

        // clause 2: X >> 0, u0 << v0 (both >> 0) => flow at u0 << flow at v0
        const MSeries v0 = add(u0, gen.series(1, D, 3, true));
        const FlowResult f3 = flow_recurrence_at(p1, VSeries({v0}));
        for (int k = 0; k <= K; ++k)
            CHECK(majorizes(f1.series.coeffs[static_cast<std::size_t>(k)],
                            f3.series.coeffs[static_cast<std::size_t>(k)]));
    }
}

TEST_CASE("component-sum reduction majorizes the system flow") {
    // decoupled system: du/dt = (1+z) u' + u, dv/dt = z v' + 2 v
    ProblemSpec sys;
    sys.space_vars = {"z"};
    sys.components = {"u", "v"};
    sys.field = {parse_expr("(1+z)*D(u,[1]) + u", sys.names()),
                 parse_expr("z*D(v,[1]) + 2*v", sys.names())};
    sys.initial = {parse_expr("inv(1-z)", sys.names()), parse_expr("1+z^2", sys.names())};
    sys.order_t = 4;
    sys.trunc_deg = 8;
    const FlowResult sys_flow = flow_recurrence(sys);

    // summed scalar problem: dw/dt = (1+2z) w' + 3 w at w0 = u0 + v0
    ProblemSpec red;
    red.space_vars = {"z"};
    red.components = {"w"};
    red.field = {parse_expr("(1+2*z)*D(w,[1]) + 3*w", red.names())};
    red.initial = {parse_expr("inv(1-z) + 1 + z^2", red.names())};
    red.order_t = 4;
    red.trunc_deg = 8;
    const FlowResult red_flow = flow_recurrence(red);

    for (int k = 0; k <= 4; ++k) {
        const MSeries lhs = component_sum(sys_flow.series.coeffs[static_cast<std::size_t>(k)]);
        const MSeries rhs = red_flow.series.coeffs[static_cast<std::size_t>(k)].components[0];
        CHECK(majorizes(lhs, rhs));
    }
}

TEST_CASE("diagonal reduction majorizes the restricted flow") {
    ProblemSpec p;
    p.space_vars = {"z1", "z2"};
    p.components = {"u"};
    p.field = {parse_expr("(z1 + z2)*D(u,[1,0]) + D(u,[0,1])", p.names())};
    p.initial = {parse_expr("(1 + z1 + z1^2)*(1 + z2 + z2^2)", p.names())};
    p.order_t = 3;
    p.trunc_deg = 7;
    const FlowResult full = flow_recurrence(p);

    // reduction: dw/dt = (R*(z1+z2) + R*(1)) dw/dz = (2z + 1) w' at R* u0
    ProblemSpec red;
    red.space_vars = {"z"};
    red.components = {"w"};
    red.field = {parse_expr("(2*z + 1)*D(w,[1])", red.names())};
    red.initial = {parse_expr("(1 + z + z^2)^2", red.names())};
    red.order_t = 3;
    red.trunc_deg = 7;
    const FlowResult reduced = flow_recurrence(red);

    for (int k = 0; k <= 3; ++k) {
        const MSeries lhs =
            diagonal_restrict(full.series.coeffs[static_cast<std::size_t>(k)].components[0]);
        const MSeries rhs = reduced.series.coeffs[static_cast<std::size_t>(k)].components[0];
        CHECK(majorizes(lhs, rhs));
    }
}
