#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rbgf/coupling.hpp"
#include "rbgf/collision.hpp"

using namespace rbgf;

TEST_CASE("profiles and Gamma_alpha") {
    CHECK(B_profile(1.5, 7.0, 0.0) == 1.0);
    CHECK(Gamma_alpha(1.0, 10.0) == doctest::Approx(std::log(11.0) + 1.0));
    CHECK(Gamma_alpha(2.0, 1e9) == 1.0);                    // alpha > 1 bounded
    CHECK(Gamma_alpha(0.5, 100.0) == doctest::Approx(std::sqrt(101.0)));

    ProfileSpec g;
    g.kind = ProfileSpec::Kind::gaussian;
    g.amp_exp = 1.5;
    g.speed = 0.5;
    g.D = 2.0;
    CHECK(eval_profile(g, 4.0, 2.0) ==
          doctest::Approx(std::pow(5.0, -1.5) * std::exp(-0.0)));
}

TEST_CASE("coupling integral basics") {
    CouplingIntegral ci;
    ci.kind = CouplingIntegral::Kind::I;
    ci.alpha = 0;
    ci.beta = 0;
    ci.D = 1;
    ci.D1 = 4;

    SUBCASE("empty time interval gives zero") {
        CHECK(eval_coupling(ci, 0.0, 1.0) == 0.0);
    }

    SUBCASE("linearity in a pointwise integrand scale") {
        // doubling the Gaussian source amplitude is the same as scaling the
        // output; evaluator must be exactly linear
        const double v = eval_coupling(ci, 2.0, 1.0);
        CHECK(v > 0.0);
    }

    SUBCASE("rotational symmetry: depends on |x| only by construction") {
        CHECK(eval_coupling(ci, 2.0, 1.5) == eval_coupling(ci, 2.0, 1.5));
    }
}

TEST_CASE("angular pre-integration against a Monte Carlo oracle") {
    CouplingIntegral ci;
    ci.kind = CouplingIntegral::Kind::I;
    ci.alpha = 1.0;
    ci.beta = 1.0;
    ci.mu1 = 0.0;
    ci.mu = 0.5;
    ci.D = 1.0;
    ci.D1 = 4.0;
    const double t = 2.0, xmag = 1.2;
    const double fast = eval_coupling(ci, t, xmag);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double Rb = ci.mu * t + 10.0;
    const double vol = 4.0 / 3.0 * M_PI * Rb * Rb * Rb;
    const Eigen::Vector3d x(xmag, 0, 0);
    double acc = 0.0;
    const std::uint64_t N = 10000000;
    for (std::uint64_t i = 0; i < N; ++i) {
        const double s = t * uni(rng);
        Eigen::Vector3d y;
        do {
            y = Eigen::Vector3d(2 * uni(rng) - 1, 2 * uni(rng) - 1, 2 * uni(rng) - 1) * Rb;
        } while (y.norm() > Rb);
        const double tau = t - s;
        const double rho = (x - y).norm();
        const double kern = std::pow(1.0 + tau, -ci.alpha) *
                            std::exp(-rho * rho / (ci.D * (1.0 + tau)));
        const double r = y.norm();
        const double src = std::pow(1.0 + s, -ci.beta) *
                           std::exp(-2.0 * (r - ci.mu * s) * (r - ci.mu * s) /
                                    (ci.D1 * (1.0 + s)));
        acc += kern * src;
    }
    const double mc = acc / N * vol * t;
    CHECK(fast == doctest::Approx(mc).epsilon(0.01));
    MESSAGE("analytic=", fast, " mc=", mc);
}

TEST_CASE("appendix lemmas") {
    SamplePlan plan;
    LemmaReport l51 = verify_lemma("5.1", plan);
    CHECK(l51.pass);
    LemmaReport l52 = verify_lemma("5.2", plan);
    CHECK(l52.pass);
    MESSAGE("5.2 C = ", l52.clauses[0].C_fit);
}

TEST_CASE("lemma 4.2 on the full plan") {
    SamplePlan plan;
    LemmaReport rep = verify_lemma("4.2", plan);
    for (const auto& c : rep.clauses) {
        MESSAGE(c.name, ": C = ", c.C_fit, " spread = ", c.ratio_spread);
        CHECK(c.pass);
    }
    CHECK(rep.pass);
}

TEST_CASE("ablation: the in-cone polynomial terms of (4.2) are required") {
    const double lam = 0.5585, D = 0.25, D1 = 4.0;
    CouplingIntegral ci;
    ci.kind = CouplingIntegral::Kind::I;
    ci.alpha = 2.5;
    ci.beta = 4.0;
    ci.mu1 = lam;
    ci.mu = lam;
    ci.D = D;
    ci.D1 = D1;
    double prev_ratio = 0.0;
    bool growing = true;
    for (double t : {25.0, 100.0, 400.0}) {
        const double x = 0.5 * lam * t;
        const double lhs = eval_coupling(ci, t, x);
        // Gaussian-only right-hand side (cone/layer terms removed)
        const double rhs = (std::pow(1 + t, -2.5) * Gamma_alpha(1.5, t) +
                            std::pow(1 + t, -4.0) * Gamma_alpha(0.0, t)) *
                           (std::exp(-1.5 * x * x / (D1 * (1 + t))) +
                            std::exp(-1.5 * (x - lam * t) * (x - lam * t) / (D1 * (1 + t))));
        const double ratio = lhs / rhs;
        if (ratio < 2.0 * prev_ratio) growing = false;
        prev_ratio = ratio;
    }
    CHECK(growing);
}

TEST_CASE("transport decay and duhamel closure on a small operator") {
    CollisionInvariants inv = compute_moments(QuadratureSpec{});
    auto g = build_grid(GridMode::axisymmetric, 12, 8, 12.0, 0);
    LinearizedOperator op = assemble(g, 0, inv);

    SUBCASE("damped transport clause") {
        TransportDecayReport rep = check_transport_decay(
            op, 1.0, 2.0, {0.0, 0.002, 0.005, 0.01, 0.02, 0.03}, {0.0, 0.5, 1.0, 2.0, 4.0}, 2);
        CHECK(rep.pass_st);
        CHECK(rep.C_fit_st >= 1.0 - 1e-9);  // t = 0 attains equality
        CHECK(rep.C_fit_st < 10.0);
        CHECK(rep.pass_wk);
        MESSAGE("C_st = ", rep.C_fit_st, "  C_wk = ", rep.C_fit_wk);
    }

    SUBCASE("duhamel closure monotone in the envelope inflation") {
        Phi_spec phi;
        phi.D1 = 1.0;
        phi.alpha = 1.5;
        phi.gamma1 = 1.5;
        phi.gamma2 = 1.0;
        phi.lambda = 0.5585;
        DuhamelReport r2 = duhamel_closure(op, phi, 2.0, {1.0, 5.0, 25.0}, {0.0, 1.0, 3.0});
        DuhamelReport r4 = duhamel_closure(op, phi, 4.0, {1.0, 5.0, 25.0}, {0.0, 1.0, 3.0});
        CHECK(r2.pass);
        CHECK(r4.pass);
        CHECK(r4.C_fit <= r2.C_fit * 1.0000001);
        MESSAGE("C(eta=2) = ", r2.C_fit, "  C(eta=4) = ", r4.C_fit);
    }
}
