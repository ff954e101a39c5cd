#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rbgf/collision.hpp"
#include "rbgf/quadrature.hpp"

using namespace rbgf;

namespace {

CollisionInvariants default_inv() { return compute_moments(QuadratureSpec{}); }

/// 3-D oracle for int (k1+k2)(v,u)(1+u0)^gamma du with v on the axis:
/// spherical coordinates centered at v, the 1/|u-v| singularity is killed
/// by the rho^2 Jacobian.
double abs_kernel_moment(double vmag, double gamma) {
    RelVelocity v = RelVelocity::from({vmag, 0.0, 0.0});
    auto inner = [&](double rho) {
        auto fmu = [&](double mu) {
            const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            RelVelocity u = RelVelocity::from({vmag + rho * mu, rho * st, 0.0});
            const double kk = kernel_k1(v, u) + kernel_k2(v, u);
            return kk * std::pow(1.0 + u.v0, gamma);
        };
        return gl_integrate(fmu, -1.0, 1.0, 32) * rho * rho;
    };
    double s = 0.0;
    s += gl_integrate(inner, 1e-8, 0.5, 32);
    s += gl_integrate(inner, 0.5, 4.0, 48);
    s += gl_integrate(inner, 4.0, 40.0, 64);
    return 2.0 * M_PI * s;
}

}  // namespace

TEST_CASE("collision frequency") {
    SUBCASE("closed form at v = 0: 128 pi^2 / e") {
        const double exact = 128.0 * M_PI * M_PI / std::exp(1.0);
        CHECK(collision_frequency(0.0) == doctest::Approx(exact).epsilon(1e-9));
        CHECK(exact == doctest::Approx(464.745542611963).epsilon(1e-12));
    }
    SUBCASE("frozen oracle values") {
        CHECK(collision_frequency(1.0) == doctest::Approx(485.876998075032).epsilon(1e-8));
        CHECK(collision_frequency(2.0) == doctest::Approx(501.060412418313).epsilon(1e-8));
    }
    SUBCASE("upper and lower bounds") {
        CollisionInvariants inv = default_inv();
        const double nu1 = 16.0 * M_PI * inv.p0;
        for (double r : {0.0, 0.3, 1.0, 2.5, 6.0, 12.0, 17.0}) {
            const double nu = collision_frequency(r);
            CHECK(nu > 0.0);
            CHECK(nu <= nu1);
        }
    }
    SUBCASE("derivative bound |d nu / dv| <= C / v0") {
        double Cfit = 0.0;
        for (double r : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            const double h = 1e-4;
            const double d = (collision_frequency(r + h) - collision_frequency(r - h)) / (2 * h);
            const double v0 = std::sqrt(1.0 + r * r);
            Cfit = std::max(Cfit, std::abs(d) * v0);
        }
        CHECK(Cfit > 0.0);
        CHECK(Cfit < 1000.0);  // same scale as nu itself; finiteness is the claim
    }
}

TEST_CASE("pointwise kernels") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd(0.0, 1.5);

    SUBCASE("k1 vanishes on the diagonal and obeys the exact bound 16 pi e^{-(u0+v0)/2}") {
        auto v = RelVelocity::from({0.4, -0.2, 1.0});
        CHECK(kernel_k1(v, v) == 0.0);
        for (int i = 0; i < 200; ++i) {
            auto a = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            auto b = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            CHECK(kernel_k1(a, b) <= 16.0 * M_PI * std::exp(-0.5 * (a.v0 + b.v0)) * (1 + 1e-12));
            CHECK(kernel_k1(a, b) >= 0.0);
        }
    }

    SUBCASE("k2 singularity is exactly 1/|u-v|: rho * k2 converges along rays") {
        auto v = RelVelocity::from({0.8, 0.0, 0.0});
        Eigen::Vector3d dir(0.3, 0.9, 0.2);
        dir.normalize();
        double prev = 0.0;
        for (int k = 1; k <= 6; ++k) {
            const double rho = std::pow(10.0, -k);
            auto u = RelVelocity::from(v.v + rho * dir);
            const double val = rho * kernel_k2(v, u);
            CHECK(std::isfinite(val));
            CHECK(val > 0.0);
            if (k > 3) CHECK(val == doctest::Approx(prev).epsilon(1e-2));
            prev = val;
        }
    }

    SUBCASE("k2 envelope C e^{-|u-v|/4}/(max(u0,v0)|u-v|) with a finite fitted C") {
        double Cfit = 0.0;
        for (int i = 0; i < 400; ++i) {
            auto a = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            auto b = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            const double d = (a.v - b.v).norm();
            if (d < 1e-10) continue;
            const double env = std::exp(-d / 4.0) / (std::max(a.v0, b.v0) * d);
            Cfit = std::max(Cfit, kernel_k2(a, b) / env);
        }
        CHECK(Cfit > 0.0);
        CHECK(Cfit < 5000.0);
        MESSAGE("k2 envelope fitted C = ", Cfit);
    }

    SUBCASE("kernel moment bound int |k|(1+u0)^gamma du <= C (1+v0)^{gamma-1}") {
        for (double gamma : {0.0, 1.0, 2.0}) {
            double Cfit = 0.0;
            std::vector<double> ratios;
            for (double r : {0.0, 1.0, 3.0, 7.0, 12.0}) {
                const double lhs = abs_kernel_moment(r, gamma);
                const double v0 = std::sqrt(1.0 + r * r);
                ratios.push_back(lhs / std::pow(1.0 + v0, gamma - 1.0));
                Cfit = std::max(Cfit, ratios.back());
            }
            CHECK(std::isfinite(Cfit));
            // boundedness proxy: the ratio does not blow up toward large |v|
            CHECK(ratios.back() < 2.0 * Cfit);
            MESSAGE("gamma=", gamma, " fitted C=", Cfit);
        }
    }
}

TEST_CASE("azimuthal kernel reduction") {
    SUBCASE("symmetric under node swap") {
        const double a = azimuthal_kernel(0, 0.5, 1.2, -0.3, 0.9);
        const double b = azimuthal_kernel(0, -0.3, 0.9, 0.5, 1.2);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        const double a1 = azimuthal_kernel(1, 0.5, 1.2, -0.3, 0.9);
        const double b1 = azimuthal_kernel(1, -0.3, 0.9, 0.5, 1.2);
        CHECK(a1 == doctest::Approx(b1).epsilon(1e-12));
    }

    SUBCASE("coincident nodes rejected") {
        CHECK_THROWS_AS(azimuthal_kernel(0, 0.5, 1.2, 0.5, 1.2), Error);
    }

    SUBCASE("close nodes agree with an adaptive psi-quadrature oracle") {
        const double v1 = 0.7, vr = 1.1, u1 = 0.7005, ur = 1.1004;
        for (int m : {0, 1}) {
            auto f = [&](double psi) {
                RelVelocity a = RelVelocity::from({v1, vr, 0.0});
                RelVelocity b =
                    RelVelocity::from({u1, ur * std::cos(psi), ur * std::sin(psi)});
                const double k = kernel_k2(a, b) - kernel_k1(a, b);
                return k * std::cos(m * psi);
            };
            const double oracle = 2.0 * adaptive_integrate(f, 1e-12, M_PI, 1e-11, 48);
            const double fast = azimuthal_kernel(m, v1, vr, u1, ur);
            CHECK(fast == doctest::Approx(oracle).epsilon(2e-6));
        }
    }
}

TEST_CASE("operator assembly") {
    CollisionInvariants inv = default_inv();
    auto g = build_grid(GridMode::axisymmetric, 24, 12, 12.0, 0);
    LinearizedOperator op = assemble(g, 0, inv);
    const int n = op.size();

    SUBCASE("kernel matrix is exactly symmetric") {
        CHECK((op.K - op.K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("null space annihilated to 1e-10") {
        for (int k = 0; k < op.X.cols(); ++k) {
            CHECK((op.L * op.X.col(k)).norm() <= 1e-10);
        }
    }

    SUBCASE("projections: P0 + P1 = identity, idempotent, mutually orthogonal") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> nd;
        CVec f(n);
        for (int i = 0; i < n; ++i) f[i] = cplx(nd(rng), nd(rng));
        auto pr = op.apply_projections(f);
        CHECK((pr.P0_1 + pr.P0_2 + pr.P0_3 + pr.P1 - f).norm() < 1e-12 * f.norm());
        auto pr2 = op.apply_projections(pr.P1);
        CHECK((pr2.P1 - pr.P1).norm() <= 1e-12 * f.norm());
        // chi_4 projects onto P0^3 only
        CVec x4 = op.X.col(2).cast<cplx>();
        auto pr4 = op.apply_projections(x4);
        CHECK((pr4.P0_3 - x4).norm() < 1e-12);
        CHECK(pr4.P0_1.norm() < 1e-12);
        CHECK(pr4.P1.norm() < 1e-12);
    }

    SUBCASE("nonpositivity and coercivity") {
        CHECK(op.mu > 0.0);
        std::mt19937_64 rng(11);
        std::normal_distribution<double> nd;
        for (int it = 0; it < 100; ++it) {
            Vec f(n);
            for (int i = 0; i < n; ++i) f[i] = nd(rng);
            f /= f.norm();
            const double rq = f.dot(op.L * f);
            CHECK(rq <= 1e-8);
            // coercive below -mu on the microscopic part
            Vec p1f = f - op.X * (op.X.transpose() * f);
            CHECK(rq <= -op.mu * p1f.squaredNorm() + 1e-6);
        }
        MESSAGE("mu = ", op.mu, "  nu0 = ", op.nu0, "  nu1 = ", op.nu1);
        CHECK(op.nu0 > 0.0);
        CHECK(op.nu.maxCoeff() <= op.nu1);
    }

    SUBCASE("compactness proxy: singular values of K decay") {
        SymEig e = sym_eig(op.K);
        std::vector<double> sv;
        for (int i = 0; i < n; ++i) sv.push_back(std::abs(e.values[i]));
        std::sort(sv.rbegin(), sv.rend());
        CHECK(sv[n / 2] / sv[0] < 5e-2);
        CHECK(sv[(9 * n) / 10] / sv[0] < 1e-2);
        // resolution-dependent rank beyond which the tail is below 1e-3
        int rank = n;
        for (int k = 0; k < n; ++k)
            if (sv[k] / sv[0] < 1e-3) {
                rank = k;
                break;
            }
        MESSAGE("1e-3 rank = ", rank, " of ", n);
        CHECK(rank < n);
    }

    SUBCASE("m = 1 sector has the single momentum null vector") {
        LinearizedOperator op1 = assemble(g, 1, inv);
        CHECK(op1.X.cols() == 1);
        CHECK((op1.L * op1.X.col(0)).norm() <= 1e-10);
        CHECK(op1.mu > 0.0);
    }
}

TEST_CASE("parallel assembly matches the serial reference") {
    CollisionInvariants inv = default_inv();
    auto g = build_grid(GridMode::axisymmetric, 12, 8, 10.0, 0);
    KernelTable a = assemble_kernel(*g, 0);
    KernelTable b = assemble_kernel_serial(*g, 0);
    CHECK((a.K - b.K).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.nu - b.nu).cwiseAbs().maxCoeff() == 0.0);
}
