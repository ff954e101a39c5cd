#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rbgf/spectral.hpp"

using namespace rbgf;

namespace {

struct Setup {
    CollisionInvariants inv;
    GridPtr g0, g1;
    LinearizedOperator op0, op1;
    Spectral sp;
    Setup()
        : inv(compute_moments(QuadratureSpec{})),
          g0(build_grid(GridMode::axisymmetric, 20, 10, 12.0, 0)),
          g1(build_grid(GridMode::axisymmetric, 20, 10, 12.0, 1)),
          op0(assemble(g0, 0, inv)),
          op1(assemble(g1, 1, inv)),
          sp(&op0, &op1) {}
};

Setup& setup() {
    static Setup s;
    return s;
}

}  // namespace

TEST_CASE("macro basis diagonalizes P0 vt1 P0") {
    auto& s = setup();
    const MacroBasis& mb = s.sp.macro();

    // orthonormal
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(mb.F0.col(i).dot(mb.F0.col(j)) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));

    // P0 vt1 P0 F_j = u_j F_j with u_{-1} = +c, u_0 = 0, u_{+1} = -c
    const Mat X = s.op0.X;
    auto apply = [&](const Vec& f) -> Vec {
        Vec p0f = X * (X.transpose() * f);
        Vec vp = s.op0.vt1.asDiagonal() * p0f;
        return X * (X.transpose() * vp);
    };
    const double us[3] = {mb.c, 0.0, -mb.c};
    for (int j = 0; j < 3; ++j) {
        Vec lhs = apply(mb.F0.col(j));
        CHECK((lhs - us[j] * mb.F0.col(j)).norm() < 1e-10);
    }

    // grid transport scalars close to the quadrature values
    TransportScalars ts = transport_scalars(s.inv);
    CHECK(std::abs(mb.c - ts.c) / ts.c < 1e-3);
    CHECK(mb.a > 0.0);
    CHECK(mb.b > 0.0);
}

TEST_CASE("B symbol basics") {
    auto& s = setup();
    SUBCASE("B(0) = L has the macro kernel") {
        CMat B0 = build_B(s.op0, 0.0);
        CHECK((B0 - s.op0.L.cast<cplx>()).norm() == 0.0);
    }
    SUBCASE("B(-eta) is the entrywise conjugate of B(eta)") {
        CMat Bp = build_B(s.op0, 0.4);
        CMat Bm = build_B(s.op0, -0.4);
        CHECK((Bm - Bp.conjugate()).norm() == 0.0);
    }
}

TEST_CASE("resolvent R_kj") {
    auto& s = setup();
    SUBCASE("R_jj(0,0) = -A_j by the direct formula") {
        for (int j : {-1, 0, 1}) {
            const cplx r = s.sp.resolvent_Rkj(cplx(0, 0), 0.0, j + 1, j + 1);
            const double Aj = s.sp.A_direct(j);
            CHECK(r.real() == doctest::Approx(-Aj).epsilon(1e-10));
            CHECK(std::abs(r.imag()) < 1e-12);
            CHECK(Aj > 0.0);
        }
        const cplx r33 = s.sp.resolvent_Rkj(cplx(0, 0), 0.0, 3, 3);
        CHECK(r33.real() == doctest::Approx(-s.sp.A_direct(2)).epsilon(1e-10));
    }
    SUBCASE("cross-sector entries vanish") {
        CHECK(std::abs(s.sp.resolvent_Rkj(cplx(0.01, 0.02), 0.1, 1, 3)) == 0.0);
        CHECK(std::abs(s.sp.resolvent_Rkj(cplx(0.01, 0.02), 0.1, 3, 0)) == 0.0);
    }
    SUBCASE("symmetry R_kj = R_jk") {
        const cplx a = s.sp.resolvent_Rkj(cplx(0.02, 0.05), 0.3, 0, 2);
        const cplx b = s.sp.resolvent_Rkj(cplx(0.02, 0.05), 0.3, 2, 0);
        CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
    }
    SUBCASE("gamma-derivative matches finite differences") {
        // the Newton path uses d R/d gamma = eta (M^-2 r, r); check by FD
        const double eta = 0.25;
        const cplx g0(0.01, 0.3);
        const double h = 1e-5;
        const cplx d_fd =
            (s.sp.dispersion_D0(g0 + h, eta) - s.sp.dispersion_D0(g0 - h, eta)) / (2.0 * h);
        // recompute via one Newton-style evaluation: D0(g + d) ~ D0(g) + d D0'
        const cplx D 	= s.sp.dispersion_D0(g0, eta);
        const cplx Dp = s.sp.dispersion_D0(g0 + cplx(0, h), eta);
        const cplx d_im = (Dp - D) / cplx(0, h);
        CHECK(std::abs(d_fd - d_im) < 1e-6 * std::max(1.0, std::abs(d_fd)));
    }
}

TEST_CASE("dispersion functions at eta = 0") {
    auto& s = setup();
    const MacroBasis& mb = s.sp.macro();
    SUBCASE("D0(gamma, 0) = gamma") {
        for (cplx g : {cplx(0.1, 0.0), cplx(-0.05, 0.2), cplx(0.0, -0.3)}) {
            CHECK(std::abs(s.sp.dispersion_D0(g, 0.0) - g) < 1e-12);
        }
    }
    SUBCASE("D1(gamma, 0) = (gamma + ic) gamma (gamma - ic)") {
        for (cplx g : {cplx(0.1, 0.02), cplx(-0.07, -0.1)}) {
            const cplx expect = (g + cplx(0, mb.c)) * g * (g - cplx(0, mb.c));
            CHECK(std::abs(s.sp.dispersion_D1(g, 0.0) - expect) < 1e-10);
        }
    }
    SUBCASE("Newton on D0 from eta = 0.01 lands near -A_2") {
        const cplx g = s.sp.newton_root(true, cplx(0, 0), 0.01);
        CHECK(g.real() == doctest::Approx(-s.sp.A_direct(2) * 0.01).epsilon(0.05));
        CHECK(std::abs(g.imag()) < 1e-10);
    }
}

TEST_CASE("branch tracking") {
    auto& s = setup();
    const MacroBasis& mb = s.sp.macro();
    EigenBranch bp = s.sp.track_branch(1, 1.2, 0.05);
    EigenBranch bm = s.sp.track_branch(-1, 1.2, 0.05);
    EigenBranch b0 = s.sp.track_branch(0, 1.2, 0.05);
    EigenBranch b2 = s.sp.track_branch(2, 1.2, 0.05);

    SUBCASE("acoustic branches carry the sound speed") {
        CHECK(!bp.diverged);
        CHECK(bp.c_fit == doctest::Approx(mb.c).epsilon(1e-6));
        CHECK(bm.c_fit == doctest::Approx(mb.c).epsilon(1e-6));
        TransportScalars ts = transport_scalars(s.inv);
        CHECK(std::abs(bp.c_fit - ts.c) / ts.c < 1e-3);
    }

    SUBCASE("decay coefficients match the direct formula") {
        for (const EigenBranch* b : {&bp, &bm, &b0, &b2}) {
            CHECK(b->A_direct > 0.0);
            CHECK(b->A_fit == doctest::Approx(b->A_direct).epsilon(1e-4));
        }
        CHECK(bp.A_direct == doctest::Approx(bm.A_direct).epsilon(1e-10));
    }

    SUBCASE("real branches, conjugation symmetry, nonpositive real parts") {
        for (const auto& smp : b0.samples) {
            CHECK(std::abs(smp.beta.imag()) < 1e-8);
            CHECK(smp.beta.real() <= 1e-12);
        }
        for (const auto& smp : b2.samples) CHECK(std::abs(smp.beta.imag()) < 1e-8);
        // beta_{-1}(eta) = conj(beta_1(eta))
        for (size_t i = 0; i < std::min(bp.samples.size(), bm.samples.size()); ++i) {
            if (bp.samples[i].eta != bm.samples[i].eta) continue;
            CHECK(std::abs(bm.samples[i].beta - std::conj(bp.samples[i].beta)) < 1e-8);
        }
    }

    SUBCASE("cubic remainder order") {
        CHECK(bp.richardson_order >= 2.7);
        MESSAGE("richardson order acoustic = ", bp.richardson_order);
    }

    SUBCASE("argmax consistency with the dense eigensolve oracle") {
        for (double eta : {0.2, 0.6}) {
            ComplexEig e0 = complex_eig(build_B(s.op0, eta));
            std::vector<cplx> top;
            std::vector<int> idx(e0.values.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) {
                return e0.values[a].real() > e0.values[b].real();
            });
            for (int k = 0; k < 3; ++k) top.push_back(e0.values[idx[k]]);
            for (const EigenBranch* b : {&bp, &bm, &b0}) {
                cplx beta;
                for (const auto& smp : b->samples)
                    if (std::abs(smp.eta - eta) < 1e-12) beta = smp.beta;
                double best = 1e300;
                for (const cplx& t : top) best = std::min(best, std::abs(t - beta));
                CHECK(best < 1e-6);
            }
            // m=1 twin: continuation beta_2 equals the rightmost m=1 eigenvalue
            ComplexEig e1 = complex_eig(build_B(s.op1, eta));
            double right = -1e300;
            for (int i = 0; i < e1.values.size(); ++i)
                right = std::max(right, e1.values[i].real());
            cplx beta2;
            for (const auto& smp : b2.samples)
                if (std::abs(smp.eta - eta) < 1e-12) beta2 = smp.beta;
            CHECK(std::abs(beta2.real() - right) < 1e-8);
        }
    }
}

TEST_CASE("eigenfunctions") {
    auto& s = setup();
    const MacroBasis& mb = s.sp.macro();

    SUBCASE("eta = 0 limits: e_2 = F_2, e_1 = F_1") {
        CVec e2 = s.sp.eigenfunction_at(2, 0.0);
        CHECK((e2 - mb.F2.cast<cplx>()).norm() < 1e-12);
        CVec e1 = s.sp.eigenfunction_at(1, 0.0);
        CHECK((e1 - mb.F0.col(2).cast<cplx>()).norm() < 1e-10);
    }

    SUBCASE("chi_1 coefficient of P0 e_1: real part -sqrt(1/2) + O(eta^2)") {
        // the imaginary part carries the odd coefficient eta b_{1,1}
        const CVec x1 = s.op0.X.col(1).cast<cplx>();
        double re_dev[2], im_part[2];
        int k = 0;
        for (double eta : {0.1, 0.05}) {
            CVec e1 = s.sp.eigenfunction_at(1, eta);
            const cplx coef = (e1.transpose() * x1).value();
            re_dev[k] = std::abs(coef.real() + std::sqrt(0.5));
            im_part[k] = coef.imag();
            ++k;
        }
        CHECK(re_dev[0] < 0.01);
        CHECK(re_dev[1] < 0.35 * re_dev[0]);  // ~ eta^2
        // b_{1,1} slope consistent between the two eta
        CHECK(im_part[1] == doctest::Approx(0.5 * im_part[0]).epsilon(0.05));
    }

    SUBCASE("residual of the eigen equation") {
        for (int j : {-1, 0, 1, 2}) {
            const double eta = 0.5;
            const bool use_D0 = (j == 2);
            cplx g = (j == 1) ? cplx(0, mb.c) : (j == -1 ? cplx(0, -mb.c) : cplx(0, 0));
            for (int k = 1; k <= 5; ++k) g = s.sp.newton_root(use_D0, g, eta * k / 5.0, 20);
            CVec e = s.sp.eigenfunction_at(j, eta, eta * g);
            CHECK(s.sp.branch_residual(j, eta, eta * g, e) < 1e-6);
        }
    }
}

TEST_CASE("gap scan") {
    auto& s = setup();
    auto rows = gap_scan(s.sp, {0.05, 0.3, 5.0});
    SUBCASE("five fluid modes at small eta") {
        CHECK(rows[0].count_above == 5);
        CHECK(rows[1].count_above == 5);
    }
    SUBCASE("strictly negative spectrum at eta = 5") {
        CHECK(rows[2].rightmost_re < 0.0);
    }
    SUBCASE("rightmost eigenvalue matches the tracked branch at small eta") {
        EigenBranch bp = s.sp.track_branch(1, 0.3, 0.05);
        const cplx beta = bp.samples.back().beta;
        CHECK(rows[1].rightmost_re == doctest::Approx(beta.real()).epsilon(1e-6));
    }
}
