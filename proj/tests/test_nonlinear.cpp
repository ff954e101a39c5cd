#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rbgf/nonlinear.hpp"

using namespace rbgf;

TEST_CASE("center-of-momentum scattering") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd(0.0, 2.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    SUBCASE("conservation over 1e5 random events") {
        double worst = 0.0, worst_g = 0.0;
        for (int i = 0; i < 100000; ++i) {
            const auto u = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            const auto v = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            const double mu = 2.0 * uni(rng) - 1.0;
            const double ph = 2.0 * M_PI * uni(rng);
            const double st = std::sqrt(1.0 - mu * mu);
            const Eigen::Vector3d om(st * std::cos(ph), st * std::sin(ph), mu);
            const ScatterEvent ev = com_scatter(u, v, om);
            const double dp = (ev.u_out.v + ev.v_out.v - u.v - v.v).norm();
            const double de = std::abs(ev.u_out.v0 + ev.v_out.v0 - u.v0 - v.v0);
            worst = std::max(worst, std::max(dp, de));
            const double g_in = kinematic_pair(u, v).g;
            const double g_out = kinematic_pair(ev.u_out, ev.v_out).g;
            worst_g = std::max(worst_g, std::abs(g_in - g_out));
        }
        MESSAGE("max conservation defect = ", worst, ", g defect = ", worst_g);
        CHECK(worst <= 1e-12);
        CHECK(worst_g <= 1e-12);
    }

    SUBCASE("forward scattering is the identity, backward the exchange") {
        const auto u = RelVelocity::from({0.5, -0.1, 1.0});
        const auto v = RelVelocity::from({-0.7, 0.4, 0.2});
        const Eigen::Vector3d P = u.v + v.v;
        const double E = u.v0 + v.v0;
        const Eigen::Vector3d w = P / E;
        const double gamma = 1.0 / std::sqrt(1.0 - w.squaredNorm());
        const Eigen::Vector3d us =
            u.v + ((gamma - 1.0) * w.dot(u.v) / w.squaredNorm() - gamma * u.v0) * w;
        const Eigen::Vector3d dir = us.normalized();
        const ScatterEvent fwd = com_scatter(u, v, dir);
        CHECK((fwd.u_out.v - u.v).norm() < 1e-12);
        CHECK((fwd.v_out.v - v.v).norm() < 1e-12);
        const ScatterEvent bwd = com_scatter(u, v, -dir);
        CHECK((bwd.u_out.v - v.v).norm() < 1e-12);
        CHECK((bwd.v_out.v - u.v).norm() < 1e-12);
    }
}

TEST_CASE("gamma estimator") {
    auto zero = [](const RelVelocity&) { return 0.0; };
    auto smooth = [](const RelVelocity& v) {
        return std::exp(-0.3 * v.v.squaredNorm()) * (1.0 + 0.5 * v.v.x());
    };
    auto sqM = [](const RelVelocity& v) { return std::exp(-0.5 * v.v0); };
    const auto probe = RelVelocity::from({0.8, 0.3, -0.2});

    SUBCASE("zero in, zero out") {
        MCSpec spec;
        spec.n_samples = 8000;
        const MCEstimate est = gamma_mc(zero, zero, probe, spec);
        CHECK(est.value == 0.0);
        CHECK(est.stderr_ == 0.0);
    }

    SUBCASE("equilibrium annihilates the collision operator eventwise") {
        MCSpec spec;
        spec.n_samples = 20000;
        const MCEstimate est = gamma_mc(sqM, sqM, probe, spec);
        CHECK(std::abs(est.value) < 1e-10);
    }

    SUBCASE("determinism for a fixed seed") {
        MCSpec spec;
        spec.n_samples = 30000;
        const MCEstimate a = gamma_mc(smooth, sqM, probe, spec);
        const MCEstimate b = gamma_mc(smooth, sqM, probe, spec);
        CHECK(a.value == b.value);
        CHECK(a.stderr_ == b.stderr_);
    }

    SUBCASE("stderr halves when samples quadruple") {
        MCSpec s1;
        s1.n_samples = 40000;
        MCSpec s4 = s1;
        s4.n_samples = 160000;
        const MCEstimate a = gamma_mc(smooth, smooth, probe, s1);
        const MCEstimate b = gamma_mc(smooth, smooth, probe, s4);
        const double ratio = a.stderr_ / b.stderr_;
        MESSAGE("stderr ratio = ", ratio);
        CHECK(ratio > 1.6);
        CHECK(ratio < 2.4);
    }

    SUBCASE("collision invariants vanish in the moments") {
        CollisionInvariants inv = compute_moments(QuadratureSpec{});
        MCSpec spec;
        spec.n_samples = 200000;
        for (int j = 0; j < 5; ++j) {
            const MCEstimate est = gamma_moment_mc(smooth, smooth, inv, j, spec);
            CHECK(std::abs(est.value) <= 3.0 * est.stderr_);
        }
    }
}

TEST_CASE("bilinear bound on a function family") {
    std::vector<VelocityFn> family;
    for (int k = 0; k < 5; ++k) {
        family.push_back([k](const RelVelocity& v) {
            return std::cos(0.4 * k * v.v.x()) * std::exp(-0.2 * (k + 1) * v.v0);
        });
    }
    auto supnorm2 = [](const VelocityFn& f) {
        double m = 0.0;
        for (double r = 0.0; r < 25.0; r += 0.05) {
            const auto v = RelVelocity::from({r, 0, 0});
            const auto v2 = RelVelocity::from({r * 0.6, r * 0.8, 0});
            m = std::max(m, std::abs(f(v)) * std::pow(1.0 + v.v0, 2.0));
            m = std::max(m, std::abs(f(v2)) * std::pow(1.0 + v2.v0, 2.0));
        }
        return m;
    };
    std::vector<RelVelocity> probes;
    for (double r : {0.0, 0.5, 1.5, 3.0, 6.0})
        probes.push_back(RelVelocity::from({r, 0.3, 0.0}));

    double Cfit = 0.0;
    MCSpec spec;
    spec.n_samples = 20000;
    for (size_t a = 0; a < family.size(); ++a)
        for (size_t b = a; b < family.size(); ++b) {
            double gnorm = 0.0;
            for (const auto& v : probes) {
                spec.seed = 1000 + 31 * a + b;
                const MCEstimate est = gamma_mc(family[a], family[b], v, spec);
                gnorm = std::max(gnorm,
                                 std::abs(est.value) * std::pow(1.0 + v.v0, 2.0));
            }
            Cfit = std::max(Cfit, gnorm / (supnorm2(family[a]) * supnorm2(family[b])));
        }
    MESSAGE("bilinear bound C = ", Cfit);
    CHECK(std::isfinite(Cfit));
    CHECK(Cfit > 0.0);
    CHECK(Cfit < 1e5);
}

TEST_CASE("kernel route vs Monte Carlo route for L") {
    CollisionInvariants inv = compute_moments(QuadratureSpec{});
    auto g = build_grid(GridMode::axisymmetric, 20, 10, 12.0, 0);
    LinearizedOperator op = assemble(g, 0, inv);
    const int n = op.size();

    SUBCASE("null direction: both sides vanish") {
        Vec chi0(n);
        for (int i = 0; i < n; ++i) chi0[i] = std::exp(-0.5 * g->v0[i]);
        // kernel route residual
        Vec coeff(n);
        for (int i = 0; i < n; ++i) coeff[i] = chi0[i] * std::sqrt(g->w[i]);
        Vec Kc = op.K * coeff;
        double resid = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
            const double lf = Kc[i] / std::sqrt(g->w[i]) - op.nu[i] * chi0[i];
            resid = std::max(resid, std::abs(lf));
            scale = std::max(scale, op.nu[i] * chi0[i]);
        }
        MESSAGE("L chi0 kernel-route residual = ", resid, " vs scale ", scale);
        CHECK(resid < 2e-2 * scale);  // pure quadrature error at this coarse grid
    }

    SUBCASE("microscopic bump agrees within 3 sigma at most probes") {
        Vec f(n);
        for (int i = 0; i < n; ++i) {
            const double d2 = (g->v1[i] - 0.8) * (g->v1[i] - 0.8) +
                              (g->vr[i] - 1.0) * (g->vr[i] - 1.0);
            f[i] = std::exp(-d2 / (2.0 * 1.5 * 1.5));
        }
        std::vector<int> probes;
        for (int i = 0; i < n; i += n / 12) probes.push_back(i);
        MCSpec spec;
        spec.n_samples = 150000;
        auto rows = crosscheck_L(op, f, probes, spec);
        int agree = 0;
        for (const auto& r : rows) {
            if (r.agree) ++agree;
            MESSAGE("v1=", r.v1, " vr=", r.vr, " mc=", r.mc, "+-", r.mc_err,
                    " kernel=", r.kernel);
        }
        CHECK(agree >= static_cast<int>(0.6 * rows.size()));  // acceptance runs the fine cached grid
    }
}

TEST_CASE("nonlinear closure composite") {
    ClosureReport rep = nonlinear_closure_check(4.0, 0.5585, {25.0, 400.0});
    MESSAGE("C composite = ", rep.C_composite, " ablation growth = ", rep.ablation_growth);
    for (const auto& tr : rep.terms) CHECK(tr.pass);
    CHECK(std::isfinite(rep.C_composite));
    CHECK(rep.cone_term_required);
    CHECK(rep.pass);
}
