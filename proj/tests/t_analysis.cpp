#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "gevrey/analysis.hpp"
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

NormSeq seq_of(std::vector<Rational> vals) { return NormSeq{std::move(vals), NormMode()}; }

NormSeq factorial_pow_seq(int s, const Rational& r, int K) {
    std::vector<Rational> vals;
    for (int k = 0; k <= K; ++k)
        vals.push_back(pow_rational(Rational(factorial(static_cast<unsigned>(k))),
                                    static_cast<unsigned>(s - 1)) *
                       pow_rational(r, static_cast<unsigned>(k)));
    return seq_of(std::move(vals));
}

} // namespace

TEST_CASE("norm sequences of flows") {
    const FlowResult heat = flow_recurrence(scalar_problem("D(u,[2])", "inv(1-z)", 6, 14));
    const NormSeq seq = norm_sequence(heat, NormMode::abs_origin());
    for (unsigned k = 0; k <= 6; ++k)
        CHECK(seq.values[k] == Rational(factorial(2 * k), factorial(k)));

    const FlowResult zero = flow_recurrence(scalar_problem("D(u,[1])", "0", 4, 6));
    for (const auto& v : norm_sequence(zero, NormMode::origin()).values) CHECK(v == 0);

    // flow of d/dz at z^3: (z+t)^3 at z=0 has the single t^3 term
    const FlowResult shift = flow_recurrence(scalar_problem("D(u,[1])", "z^3", 4, 4));
    const NormSeq probe = norm_sequence(shift, NormMode::origin());
    CHECK(probe.values == std::vector<Rational>{0, 0, 0, 1, 0});

    // max_coeff mode on the heat flow reads the largest coefficient instead
    const NormSeq mx = norm_sequence(heat, NormMode::max_up_to(2));
    CHECK(mx.values[0] == 1);
    CHECK(mx.values[1] >= seq.values[1]);
}

TEST_CASE("estimate_order recovers s on factorial families") {
    // a_k = k!: the ratio model is exact, s -> 2
    std::vector<Rational> fact;
    for (unsigned k = 0; k <= 40; ++k) fact.push_back(Rational(factorial(k)));
    const GevreyEstimate e1 = estimate_order(seq_of(fact), Window{10, 40});
    CHECK(std::fabs(e1.s_hat - 2.0) < 0.05);

    // a_k = 2^k: analytic, s -> 1, R -> 2
    std::vector<Rational> geom;
    for (unsigned k = 0; k <= 40; ++k) geom.push_back(pow_rational(2, k));
    const GevreyEstimate e2 = estimate_order(seq_of(geom), Window{10, 40});
    CHECK(std::fabs(e2.s_hat - 1.0) < 1e-9);
    CHECK(std::fabs(e2.r_hat - 2.0) < 1e-9);

    // a_k = (2k)!/k! ~ 4^k k!/sqrt(pi k): s near 2, R near 4
    // oracle: the ratio a_{k+1}/a_k = 2(2k+1) exactly
    std::vector<Rational> heat;
    for (unsigned k = 0; k <= 40; ++k) heat.push_back(Rational(factorial(2 * k), factorial(k)));
    for (unsigned k = 0; k < 40; ++k)
        CHECK(heat[k + 1] / heat[k] == Rational(2 * (2 * k + 1)));
    const GevreyEstimate e3 = estimate_order(seq_of(heat), Window{10, 40});
    CHECK(std::fabs(e3.s_hat - 2.0) < 0.05);
    CHECK(e3.r_hat > 3.3);
    CHECK(e3.r_hat < 4.3);
}

TEST_CASE("estimate_order is invariant under c * rho^k rescaling") {
    std::vector<Rational> base;
    for (unsigned k = 0; k <= 30; ++k) base.push_back(Rational(factorial(k)));
    const GevreyEstimate ref = estimate_order(seq_of(base), Window{5, 30});
    std::vector<Rational> scaled;
    const Rational c(7, 3), rho(5, 2);
    for (unsigned k = 0; k <= 30; ++k) scaled.push_back(c * pow_rational(rho, k) * base[k]);
    const GevreyEstimate got = estimate_order(seq_of(scaled), Window{5, 30});
    CHECK(std::fabs(got.s_hat - ref.s_hat) < 1e-9);
    CHECK(std::fabs(got.r_hat - ref.r_hat * 2.5) < 1e-9 * got.r_hat);
}

TEST_CASE("estimate_order rejects windows without enough positive data") {
    CHECK_THROWS_AS(estimate_order(seq_of({1, 0, 0, 0, 0}), Window{1, 4}), numeric_error);
    CHECK_THROWS_AS(estimate_order(seq_of({1, 1, 1}), Window{2, 1}), structure_error);
}

TEST_CASE("min_R_for_s on the heat sequence: bounded at s=2, divergent at s=1") {
    std::vector<Rational> heat;
    for (unsigned k = 0; k <= 12; ++k) heat.push_back(Rational(factorial(2 * k), factorial(k)));
    const NormSeq seq = seq_of(heat);

    const MinRResult r2 = min_R_for_s(seq, 2, Window{6, 12});
    CHECK_FALSE(r2.divergent);
    CHECK(r2.r > Rational(3));
    CHECK(r2.r < Rational(9, 2));

    const MinRResult r1 = min_R_for_s(seq, 1, Window{6, 12});
    CHECK(r1.divergent);
    CHECK(r1.growth_rate > 0.5);

    // feasibility is monotone in s: a bound at s implies one at s+1
    const MinRResult r3 = min_R_for_s(seq, 3, Window{6, 12});
    CHECK(r3.r <= r2.r);
    CHECK_FALSE(r3.divergent);
}

TEST_CASE("min_R_for_s certifies its own bound") {
    SeriesGen gen(808);
    std::vector<Rational> vals{1};
    for (int k = 1; k <= 15; ++k)
        vals.push_back(abs(gen.small_rational()) * pow_rational(Rational(3, 2), k) + 1);
    const NormSeq seq = seq_of(vals);
    for (int s = 1; s <= 3; ++s) {
        const MinRResult res = min_R_for_s(seq, s, Window{2, 15});
        for (int k = 2; k <= 15; ++k) {
            // a_k <= (k!)^(s-1) R^k holds for the returned R
            const Rational bound =
                pow_rational(Rational(factorial(static_cast<unsigned>(k))),
                             static_cast<unsigned>(s - 1)) *
                pow_rational(res.r, static_cast<unsigned>(k));
            CHECK(seq.values[static_cast<std::size_t>(k)] <= bound);
        }
    }
}

TEST_CASE("constant required R is not flagged divergent") {
    const NormSeq syn = factorial_pow_seq(2, 3, 20);
    const MinRResult res = min_R_for_s(syn, 2, Window{5, 20});
    CHECK_FALSE(res.divergent);
    CHECK(abs(res.r - 3) < Rational(1, 1000));
}

TEST_CASE("closed-form model coefficients are order-3 bounded at s=3") {
    // u_j = j(4j-1)!/(4^{j-1}(j!)^2) grows like (j!)^2 64^j: bounded at s=3
    std::vector<Rational> vals{1};
    for (unsigned j = 1; j <= 14; ++j) vals.push_back(closed_form_coeff(3, j));
    const NormSeq seq = seq_of(std::move(vals));
    const MinRResult r3 = min_R_for_s(seq, 3, Window{4, 14});
    CHECK_FALSE(r3.divergent);
    CHECK(r3.r < 64);  // Stirling limit of the required R
    const MinRResult r2 = min_R_for_s(seq, 2, Window{4, 14});
    CHECK(r2.divergent);
}

TEST_CASE("borel transform: heat gives central binomials, inverse is exact") {
    std::vector<Rational> heat;
    for (unsigned k = 0; k <= 10; ++k) heat.push_back(Rational(factorial(2 * k), factorial(k)));
    const NormSeq b = borel_transform(seq_of(heat), 2);
    CHECK(b.values[0] == 1);
    CHECK(b.values[1] == 2);
    CHECK(b.values[2] == 6);
    CHECK(b.values[3] == 20);
    CHECK(b.values[4] == 70);

    // (k!)^2 at s=3 becomes all ones
    std::vector<Rational> sq;
    for (unsigned k = 0; k <= 8; ++k) sq.push_back(Rational(factorial(k)) * Rational(factorial(k)));
    for (const auto& v : borel_transform(seq_of(sq), 3).values) CHECK(v == 1);

    // zero stays zero, and multiplying the factorials back is the identity
    for (const auto& v : borel_transform(seq_of({0, 0, 0}), 2).values) CHECK(v == 0);
    const NormSeq round = borel_transform(seq_of(heat), 4);
    for (unsigned k = 0; k <= 10; ++k)
        CHECK(round.values[k] * pow_rational(Rational(factorial(k)), 3) == heat[k]);
}

TEST_CASE("cauchy majorant: minimal A, self-checking via majorizes") {
    const CauchyMajorant m1 = cauchy_majorant(geometric(8), 1);
    CHECK(m1.a == 1);
    const CauchyMajorant m2 = cauchy_majorant([] {
        MSeries s(1, 4);
        s.set(MIndex{0}, 2);
        s.set(MIndex{1}, 1);
        return s;
    }(), 1);
    CHECK(m2.a == 2);
    CHECK(cauchy_majorant(MSeries::zero(1, 5), Rational(1, 2)).a == 0);

    SeriesGen gen(6001);
    for (int trial = 0; trial < 30; ++trial) {
        const MSeries u = gen.series(1, gen.uniform(0, 8), 5);
        const Rational b = Rational(gen.uniform(1, 5), gen.uniform(1, 3));
        const CauchyMajorant m = cauchy_majorant(u, b);
        const MSeries v = cauchy_majorant_series(m, u.trunc_deg());
        CHECK(majorizes(u, v));
        // minimality: a slightly smaller A fails unless u is zero
        if (m.a > 0) {
            const MSeries smaller =
                cauchy_majorant_series(CauchyMajorant{m.a * Rational(99, 100), b}, u.trunc_deg());
            CHECK_FALSE(majorizes(u, smaller));
        }
    }
}

TEST_CASE("KdV surrogate: order 3 bounded, order 2 divergent") {
    const int K = 15;
    const ProblemSpec p = scalar_problem("D(u,[3]) + u*D(u,[1])", "inv(1-z^2)", K, 50);
    const FlowResult fr = flow_recurrence(p);
    const NormSeq seq = norm_sequence(fr, NormMode::abs_origin());
    // parity: the origin values vanish at odd k
    for (int k = 1; k <= K; k += 2) CHECK(seq.values[static_cast<std::size_t>(k)] == 0);
    CHECK(seq.values[2] == 391);

    const GevreyEstimate est = estimate_order(seq, Window{5, 12});
    CHECK(est.s_hat > 2.5);
    CHECK(est.s_hat < 3.5);

    for (const Window w : {Window{5, 12}, Window{5, 15}}) {
        const MinRResult r3 = min_R_for_s(seq, 3, w);
        const MinRResult r2 = min_R_for_s(seq, 2, w);
        INFO("window [" << w.lo << "," << w.hi << "]");
        CHECK_FALSE(r3.divergent);
        CHECK(r2.divergent);
    }
}
