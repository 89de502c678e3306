#include "capflow/value_function.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace capflow;
using namespace testsupport;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
Errc code_of(auto fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::EmptySeries;
}
} // namespace

TEST_CASE("lender curvature at the baseline") {
    ModelParams p;
    ShockMoments s;
    const auto q = lender_quadratic(p, s, 0.14);
    CHECK_THAT(q.T, WithinAbs(1.003275, 1e-6));
    CHECK_THAT(q.Z, WithinAbs(0.0216, 1e-12));
    const double c = solve_c(p, s, 0.14);
    CHECK(c < 0);
    CHECK_THAT(c, WithinRel(-10.0821, 1e-4));
    CHECK(poly::relative_residual(q.coeffs, c) < 1e-10);
}

TEST_CASE("lender curvature closes the Bellman equation") {
    ModelParams p;
    ShockMoments s;
    for (double R : {0.14, 0.16, 0.2, 0.24}) {
        const auto k = solve_lender(p, s, R);
        // F^2 coefficient of max_mu M^D equals c.
        const double fitted = quadratic_coefficient([&](double F) { return lender_bellman_rhs(p, s, R, k, F); }, 10, 1);
        CHECK_THAT(fitted, WithinRel(k.c, 1e-7));
        // Fixed-point form of the same identity.
        const double T = p.B_D * (1 + p.R_D) * (1 + p.R_D);
        const double rhs = T * k.c + 2 * p.B_D * p.B_D * k.c * k.c * (1 + p.R_D) * (1 + p.R_D) * k.Z * k.Z / k.mu_denom;
        CHECK_THAT(rhs, WithinRel(k.c, 1e-10));
    }
}

TEST_CASE("lender curvature preconditions") {
    ModelParams p;
    ShockMoments s;
    p.B_D = 0.9;  // T < 1
    CHECK(code_of([&] { solve_c(p, s, 0.2); }) == Errc::NoNegativeRoot);
    p = {};
    CHECK(code_of([&] { solve_c(p, s, 0.1); }) == Errc::NoNegativeRoot);  // Z < 0
    // Below the concavity threshold the value function is convex.
    const double Rs = lender_concavity_threshold(p, s);
    CHECK_THAT(Rs, WithinAbs(1.05 / (0.94 - std::sqrt((0.91 * 1.1025 - 1) * 0.09)) - 1, 1e-14));
    CHECK_THAT(Rs, WithinAbs(0.137802, 5e-7));
    CHECK(code_of([&] { solve_c(p, s, Rs - 1e-4); }) == Errc::NoNegativeRoot);
    CHECK(solve_c(p, s, Rs + 1e-4) < 0);
}

TEST_CASE("lender quadratic is continuous as Z vanishes") {
    ModelParams p;
    ShockMoments s;
    auto roots_at = [&](double Z) {
        const double R = (1 + p.R_D + Z) / s.eps_mean - 1;
        return poly::quadratic_real_roots(lender_quadratic(p, s, R).coeffs);
    };
    const auto a = roots_at(1e-6), b = roots_at(1e-8);
    REQUIRE(a.size() == 2);
    REQUIRE(b.size() == 2);
    for (int i = 0; i < 2; ++i) CHECK(std::fabs(a[i] - b[i]) / std::fabs(b[i]) < 1e-4);
}

TEST_CASE("lender coefficients") {
    ModelParams p;
    ShockMoments s;
    const auto k = solve_lender(p, s, 0.16);
    CHECK(p.B_D * k.L < 1);
    CHECK(k.mu_denom > 0);
    CHECK(k.carry == Catch::Approx(0.4));
    const double lhs = 1 + p.B_D * k.b;
    const double rhs = (1 - 2 * p.B_D * k.c * k.carry * (p.B_D * k.L)) / (1 - p.B_D * k.L);
    CHECK_THAT(lhs, WithinRel(rhs, 1e-10));
    // The concave root gives B_D L = 1/(1+R_D).
    CHECK_THAT(p.B_D * k.L, WithinRel(1 / (1 + p.R_D), 1e-10));

    const auto k0 = lender_coeffs_from_c(p, s, 0.16, 0.0);
    CHECK(k0.L == 1 + p.R_D);
    CHECK_THAT(k0.b, WithinRel(k0.L / (1 - p.B_D * k0.L), 1e-15));
}

TEST_CASE("borrower curvature at the baseline") {
    ModelParams p;
    ShockMoments s;
    const auto cub = borrower_cubic(p, s, 0.14);
    CHECK_THAT(cub.A, WithinAbs(0.1012, 1e-12));
    const double z = solve_z(p, s, 0.14);
    CHECK(z < 0);
    CHECK(poly::relative_residual(cub.coeffs, z) < 1e-10);
    int negatives = 0;
    for (double r : poly::cubic_real_roots(cub.coeffs)) negatives += r < 0;
    CHECK(negatives == 1);
}

TEST_CASE("borrower curvature closes the Bellman equation") {
    ModelParams p;
    ShockMoments s;
    for (double R : {0.14, 0.17, 0.22}) {
        const auto k = solve_borrower(p, s, R);
        const double fitted = quadratic_coefficient([&](double G) { return borrower_bellman_rhs(p, s, R, k, G); }, 0, 1);
        CHECK_THAT(fitted, WithinRel(k.z, 1e-8));
    }
}

TEST_CASE("borrower cubic coefficients") {
    ModelParams p;
    ShockMoments s;
    const auto base = borrower_cubic(p, s, 0.14);
    // a0 = (beta/2) Qv (P beta)^2.
    CHECK_THAT(base.coeffs[0], WithinRel(0.5 * base.Qv * base.P * base.P, 1e-14));
    ModelParams p2 = p;
    p2.beta = 2;
    const auto doubled = borrower_cubic(p2, s, 0.14);
    CHECK_THAT(doubled.coeffs[0], WithinRel(8 * base.coeffs[0], 1e-14));

    // Leading coefficient vanishes at B_U = H / (H S - Qe A^2), S = (1+R_U)^2 E(eta^2).
    const double S = (base.Qv + base.Qe);
    const double B_edge = base.H / (base.H * S - base.Qe * base.A * base.A);
    ModelParams pe = p;
    pe.B_U = B_edge;
    const auto edge = borrower_cubic(pe, s, 0.14);
    CHECK(std::fabs(edge.coeffs[3]) < 1e-12 * std::fabs(edge.coeffs[1]));

    ModelParams beyond = p;
    beyond.B_U = B_edge + 0.02;
    CHECK(code_of([&] { solve_z(beyond, s, 0.14); }) == Errc::RootCountViolation);
}

TEST_CASE("borrower coefficients") {
    ModelParams p;
    ShockMoments s;
    const auto k = solve_borrower(p, s, 0.14);
    CHECK(p.B_U * k.J < 1);
    CHECK(k.lambda_denom > 0);
    CHECK(k.carry == Catch::Approx(3.0));
    const double lhs = 1 + p.B_U * k.y;
    const double rhs = (1 - 2 * p.B_U * k.z * k.carry * (p.B_U * k.J)) / (1 - p.B_U * k.J);
    CHECK_THAT(lhs, WithinRel(rhs, 1e-10));

    const auto k0 = borrower_coeffs_from_z(p, s, 0.14, 0.0);
    CHECK_THAT(k0.J, WithinRel((1 + p.R_U) * s.eta_mean, 1e-15));
    CHECK_THAT(k0.y, WithinRel(k0.J / (1 - p.B_U * k0.J), 1e-15));
}

TEST_CASE("roots agree with a dense scanning oracle") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 100; ++i) {
        const auto d = random_feasible(rng);
        INFO("draw " << i << " R=" << d.R << " B_U=" << d.p.B_U);
        const double c = solve_c(d.p, d.s, d.R);
        const auto cq = negative_roots_by_scan(lender_quadratic(d.p, d.s, d.R).coeffs);
        REQUIRE(cq.size() == 1);
        CHECK(std::fabs(c - cq[0]) <= 1e-8 * std::max(1.0, std::fabs(c)));

        const double z = solve_z(d.p, d.s, d.R);
        const auto zc = negative_roots_by_scan(borrower_cubic(d.p, d.s, d.R).coeffs);
        REQUIRE(zc.size() == 1);
        CHECK(std::fabs(z - zc[0]) <= 1e-8 * std::max(1.0, std::fabs(z)));
    }
}
