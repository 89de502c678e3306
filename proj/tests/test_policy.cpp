#include "capflow/policy.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace capflow;
using namespace testsupport;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("zero spreads give zero fractions") {
    ModelParams p;
    ShockMoments s;
    auto in = make_policy_inputs(p, s, 0.16, 10, 10);
    in.lender.Z = 0;
    in.borrower.A = 0;
    CHECK(mu_star(p, in) == 0);
    CHECK(lambda_star(p, s, in) == 0);
}

TEST_CASE("baseline policies at R* = 0.14") {
    ModelParams p;
    ShockMoments s;
    const auto in = make_policy_inputs(p, s, 0.14, 10, 10);
    CHECK_THAT(in.lender.Z, WithinAbs(0.0216, 1e-12));
    CHECK_THAT(in.borrower.A, WithinAbs(0.1012, 1e-12));

    const double lam = lambda_star(p, s, in);
    CHECK(lam > 0);
    CHECK(lam < 1);
    CHECK_THAT(lam, WithinAbs(0.0761, 1e-4));
    const double grid_l = grid_argmax([&](double x) { return borrower_objective(p, s, in, x); });
    CHECK_THAT(grid_l, WithinAbs(lam, 1e-3));

    // F = 10 lies below the funds level at which lending abroad pays at this rate:
    // the interior formula is negative and the grid optimum is the corner 0.
    const double mu = mu_star_raw(p, in);
    CHECK_THAT(mu, WithinAbs(-0.0144, 1e-4));
    CHECK_THROWS_AS(mu_star(p, in), OutOfUnitInterval);
    try {
        mu_star(p, in);
    } catch (const OutOfUnitInterval& e) {
        CHECK(e.side() == OutOfUnitInterval::Side::Lender);
        CHECK(e.value() == mu);
    }
    CHECK(grid_argmax([&](double x) { return lender_objective(p, s, in, x); }) == 0);
}

TEST_CASE("interior lender policy matches the grid optimum") {
    ModelParams p;
    ShockMoments s;
    const auto in = make_policy_inputs(p, s, 0.16, 10, 10);
    const double mu = mu_star(p, in);
    CHECK(mu > 0);
    CHECK(mu < 1);
    CHECK_THAT(grid_argmax([&](double x) { return lender_objective(p, s, in, x); }), WithinAbs(mu, 1e-3));
}

TEST_CASE("grid oracle and first-order conditions on random states") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        const auto st = random_interior_state(rng);
        const auto& p = st.d.p;
        const auto& s = st.d.s;
        INFO("state " << i);
        CHECK_THAT(grid_argmax([&](double x) { return lender_objective(p, s, st.in, x); }), WithinAbs(st.mu, 1e-3));
        CHECK_THAT(grid_argmax([&](double x) { return borrower_objective(p, s, st.in, x); }), WithinAbs(st.lambda, 1e-3));
        CHECK(std::fabs(lender_foc(p, s, st.in, st.mu)) / (st.in.F * st.in.F) < 1e-8);
        CHECK(std::fabs(borrower_foc(p, s, st.in, st.lambda)) / (p.K_U * p.K_U) < 1e-8);
    }
}

TEST_CASE("sign follows the spread") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        const auto st = random_interior_state(rng);
        auto in = st.in;
        CHECK(mu_star_raw(st.d.p, in) > 0);
        CHECK(lambda_star_raw(st.d.p, st.d.s, in) > 0);
        in.lender.Z = -in.lender.Z;
        in.borrower.A = -in.borrower.A;
        CHECK(mu_star_raw(st.d.p, in) < 0);
        CHECK(lambda_star_raw(st.d.p, st.d.s, in) < 0);
    }
}

TEST_CASE("monotone in the spread with coefficients frozen") {
    ModelParams p;
    ShockMoments s;
    const double R = 0.16;
    auto in = make_policy_inputs(p, s, R, 10, 10);
    const double P = (1 + R) * (1 + R) * s.eps_var;
    const double Pu = (1 + R) * (1 + R) * s.e_ratio_var;
    const double Z0 = in.lender.Z, A0 = in.borrower.A;
    double prev_mu = -1, prev_lam = -1;
    for (int i = -10; i <= 10; ++i) {
        const double Z = Z0 * (1 + 0.02 * i), A = A0 * (1 + 0.02 * i);
        auto k = in;
        k.lender.Z = Z;
        k.lender.mu_denom = (p.gamma - 2 * p.B_D * k.lender.c) * P - 2 * p.B_D * k.lender.c * Z * Z;
        k.borrower.A = A;
        k.borrower.lambda_denom = Pu * (p.beta - 2 * p.B_U * k.borrower.z) - 2 * p.B_U * k.borrower.z * A * A;
        const double mu = mu_star_raw(p, k), lam = lambda_star_raw(p, s, k);
        CHECK(mu > prev_mu);
        CHECK(lam > prev_lam);
        prev_mu = mu;
        prev_lam = lam;
    }
}

TEST_CASE("large risk aversion drives fractions to zero") {
    ShockMoments s;
    const ModelParams base;
    const double R = 0.2, P = (1 + R) * (1 + R) * s.eps_var;
    const auto frozen = make_policy_inputs(base, s, R, 10, 10);
    double prev = mu_star_raw(base, frozen);
    CHECK(prev > 0);
    for (double g : {1e2, 1e3, 1e4, 1e5}) {
        ModelParams p;
        p.gamma = g;
        auto in = frozen;
        in.lender.mu_denom = (g - 2 * p.B_D * in.lender.c) * P - 2 * p.B_D * in.lender.c * in.lender.Z * in.lender.Z;
        const double mu = mu_star_raw(p, in);
        CHECK(mu > 0);
        CHECK(mu < prev);
        prev = mu;
    }
    CHECK(prev < 1e-3);

    const double Pb = (1 + R) * (1 + R) * s.e_ratio_var;
    prev = lambda_star_raw(base, s, frozen);
    CHECK(prev > 0);
    for (double b : {1e2, 1e3, 1e4, 1e5}) {
        ModelParams p;
        p.beta = b;
        auto in = frozen;
        const auto& k = in.borrower;
        in.borrower.lambda_denom = Pb * (b - 2 * p.B_U * k.z) - 2 * p.B_U * k.z * k.A * k.A;
        const double lam = lambda_star_raw(p, s, in);
        CHECK(lam > 0);
        CHECK(lam < prev);
        prev = lam;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("re-solved curvatures scale with risk aversion") {
    ShockMoments s;
    const ModelParams base;
    const double c0 = solve_c(base, s, 0.2) / base.gamma;
    const double z0 = solve_z(base, s, 0.2) / base.beta;
    // The fractions then tend to finite limits rather than to zero.
    double mu_gap = 1, mu_prev = 0, lam_gap = 1, lam_prev = 0;
    for (double g : {1e2, 1e3, 1e4, 1e5, 1e6}) {
        ModelParams p;
        p.gamma = g;
        p.beta = g;
        CHECK_THAT(solve_c(p, s, 0.2) / g, WithinRel(c0, 1e-9));
        CHECK_THAT(solve_z(p, s, 0.2) / g, WithinRel(z0, 1e-9));
        const auto in = make_policy_inputs(p, s, 0.2, 10, 10);
        const double mu = mu_star_raw(p, in), lam = lambda_star_raw(p, s, in);
        if (g > 1e2) {
            CHECK(std::fabs(mu - mu_prev) < mu_gap);
            CHECK(std::fabs(lam - lam_prev) < lam_gap);
            mu_gap = std::fabs(mu - mu_prev);
            lam_gap = std::fabs(lam - lam_prev);
        }
        mu_prev = mu;
        lam_prev = lam;
    }
    CHECK(mu_gap < 1e-4);
    CHECK(lam_gap < 1e-4);
    CHECK(std::fabs(lam_prev) > 1e-2);
}

TEST_CASE("projection") {
    CHECK(project_unit(-0.2) == 0);
    CHECK(project_unit(0.3) == 0.3);
    CHECK(project_unit(1.7) == 1);
}
