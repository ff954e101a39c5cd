#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rbgf/kinematics.hpp"
#include "rbgf/quadrature.hpp"

using namespace rbgf;

namespace {

// Independent oracle for the radial moments: adaptive quadrature in the
// energy variable z = v0 (r^2 dr = z sqrt(z^2-1) dz), cross-checked against
// modified Bessel functions below.
double z_moment(const std::function<double(double)>& f_z) {
    return 4.0 * M_PI *
           adaptive_integrate(
               [&](double z) { return f_z(z) * z * std::sqrt(std::max(z * z - 1.0, 0.0)) * std::exp(-z); },
               1.0, 80.0, 1e-14);
}

}  // namespace

TEST_CASE("kinematic_pair basic identities") {
    auto U = RelVelocity::from({0.3, -1.2, 0.7});
    auto V = RelVelocity::from({-0.4, 0.1, 2.0});

    SUBCASE("coincident velocities") {
        auto k = kinematic_pair(U, U);
        CHECK(k.g == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(k.s == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(k.vM == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("antipodal unit velocities: s = 8, g = 2") {
        auto P = RelVelocity::from({0.0, 0.0, 1.0});
        auto Q = RelVelocity::from({0.0, 0.0, -1.0});
        auto k = kinematic_pair(P, Q);
        CHECK(k.s == doctest::Approx(8.0));
        CHECK(k.g == doctest::Approx(2.0));
    }

    SUBCASE("symmetry and paper bounds on random pairs") {
        std::mt19937_64 rng(42);
        std::normal_distribution<double> nd(0.0, 2.0);
        for (int it = 0; it < 500; ++it) {
            auto A = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            auto B = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
            auto k1 = kinematic_pair(A, B);
            auto k2 = kinematic_pair(B, A);
            CHECK(k1.g == k2.g);
            CHECK(k1.s == k2.s);
            CHECK(k1.vM == k2.vM);
            CHECK(k1.s >= 4.0 - 1e-12);
            CHECK(k1.vM <= 4.0 + 1e-12);
            const double dist = (A.v - B.v).norm();
            const double cross = A.v.cross(B.v).norm();
            CHECK(k1.g <= dist * (1 + 1e-12));
            CHECK(k1.g >= std::sqrt(dist * dist + cross * cross) / std::sqrt(A.v0 * B.v0) *
                              (1 - 1e-12));
        }
    }

    SUBCASE("energy-momentum invariants of nodes") {
        CHECK(U.v0 * U.v0 - U.v.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(U.vtilde.norm() < 1.0);
        CHECK(V.v0 >= 1.0);
    }
}

TEST_CASE("compute_moments against the z-substitution oracle") {
    CollisionInvariants inv = compute_moments(QuadratureSpec{});

    // oracle values (adaptive quadrature in z)
    const double p0_o = z_moment([](double) { return 1.0; });
    const double p1_o = z_moment([](double z) { return (z * z - 1.0) / 3.0; });
    const double Ev0_o = z_moment([](double z) { return z; });
    const double p2_o = Ev0_o / p0_o;
    const double p3_o = z_moment([&](double z) { return (z - p2_o) * (z - p2_o); });

    CHECK(std::abs(inv.p0 / p0_o - 1.0) < 1e-10);
    CHECK(std::abs(inv.p1 / p1_o - 1.0) < 1e-10);
    CHECK(std::abs(inv.p2 / p2_o - 1.0) < 1e-10);
    CHECK(std::abs(inv.p3 / p3_o - 1.0) < 1e-10);

    // cross-check against the independent Bessel-function route:
    // p0 = 4 pi K2(1), p1 = 4 pi K3(1)
    const double K2 = std::cyl_bessel_k(2.0, 1.0);
    const double K3 = std::cyl_bessel_k(3.0, 1.0);
    CHECK(inv.p0 == doctest::Approx(4.0 * M_PI * K2).epsilon(1e-10));
    CHECK(inv.p1 == doctest::Approx(4.0 * M_PI * K3).epsilon(1e-10));

    // frozen values from the oracle
    CHECK(inv.p0 == doctest::Approx(20.418327788876817).epsilon(1e-12));
    CHECK(inv.p1 == doctest::Approx(89.237100485628120).epsilon(1e-12));
    CHECK(inv.p2 == doctest::Approx(3.3704411746314179).epsilon(1e-12));
    CHECK(inv.p3 == doctest::Approx(56.180004161030163).epsilon(1e-12));

    CHECK(inv.p3 > 0.0);
    CHECK(inv.orthonormality_residual < 1e-12);

    // isotropy: 3 p1 = int |v|^2 M dv
    const double vsq_moment = z_moment([](double z) { return z * z - 1.0; });
    CHECK(3.0 * inv.p1 == doctest::Approx(vsq_moment).epsilon(1e-12));
}

TEST_CASE("cutoff too small raises the config error") {
    QuadratureSpec spec;
    spec.V_max = 8.0;
    CHECK_THROWS_AS(compute_moments(spec), Error);
}

TEST_CASE("transport scalars") {
    CollisionInvariants inv = compute_moments(QuadratureSpec{});
    TransportScalars ts = transport_scalars(inv);

    SUBCASE("frozen oracle values and closed forms") {
        // b = sqrt(p0/p1) and a = p0/sqrt(p1 p3) via K3 - K1 = 4 K2
        CHECK(ts.b == doctest::Approx(std::sqrt(inv.p0 / inv.p1)).epsilon(1e-12));
        CHECK(ts.a == doctest::Approx(inv.p0 / std::sqrt(inv.p1 * inv.p3)).epsilon(1e-10));
        CHECK(ts.a == doctest::Approx(0.28837430623750963).epsilon(1e-11));
        CHECK(ts.b == doctest::Approx(0.47834072833006712).epsilon(1e-11));
        CHECK(ts.c == doctest::Approx(0.55854238234650024).epsilon(1e-11));
    }

    SUBCASE("sound speed below light speed") {
        CHECK(ts.c > 0.0);
        CHECK(ts.c < 1.0);
    }

    SUBCASE("stability under radial refinement") {
        QuadratureSpec s2;
        s2.n_radial = 512;
        TransportScalars t2 = transport_scalars(compute_moments(s2));
        CHECK(std::abs(t2.c / ts.c - 1.0) < 1e-12);
    }
}

TEST_CASE("odd integrand sanity probe: (vtilde_1 chi_0, chi_0) = 0") {
    // angular pre-integration kills odd moments identically; probe with an
    // explicit 3-D-style spherical sum
    CollisionInvariants inv = compute_moments(QuadratureSpec{});
    const GaussRule& gr = gauss_legendre(64);
    double s = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double r = 6.0 * (gr.x[i] + 1.0);
        for (int j = 0; j < 64; ++j) {
            const double mu = gr.x[j];
            RelVelocity u = RelVelocity::from({r * mu, r * std::sqrt(1 - mu * mu), 0.0});
            s += gr.w[i] * gr.w[j] * u.vtilde.x() * inv.chi(0, u) * inv.chi(0, u) * r * r;
        }
    }
    CHECK(std::abs(s) < 1e-14);
}
