#pragma once

#include <vector>

#include "rbgf/collision.hpp"

namespace rbgf {

/// Eigenvectors F_{-1}..F_3 of P0 vtilde_1 P0 in the scaled basis, split by
/// sector: the longitudinal triple lives in m=0, the shear pair in m=|1|.
/// u_{+-1} = -+ sqrt(a^2+b^2), the other eigenvalues vanish.
struct MacroBasis {
    Mat F0;      // n0 x 3 columns: F_{-1}, F_0, F_1 (m=0 sector)
    Vec F2;      // m=1 sector vector (either of the degenerate shear pair)
    double a = 0, b = 0, c = 0;  // grid transport scalars
};

MacroBasis build_macro_basis(const LinearizedOperator& op0, const LinearizedOperator& op1);

/// Fourier symbol B(eta) = L - i eta vtilde_1 of one sector.
CMat build_B(const LinearizedOperator& op, double eta);

struct BranchSample {
    double eta;
    cplx gamma;  // beta = eta gamma
    cplx beta;
};

struct EigenBranch {
    int j = 0;  // -1, 0, 1 (m=0) or 2 (m=1, doubly degenerate with 3)
    std::vector<BranchSample> samples;
    double eta_max_tracked = 0;
    bool diverged = false;       // continuation stopped early
    double c_fit = 0;            // acoustic branches: lim Im beta / eta
    double A_fit = 0;            // quadratic decay coefficient from the curve
    double A_direct = 0;         // -(L^-1 P1 vt1 F_j, vt1 F_j) by direct solve
    double fit_residual = 0;
    double richardson_order = 0;  // cubic remainder order from eta, eta/2, eta/4
};

/// Shared state for the reduced 1-D eigenproblem: both sector operators,
/// their macro basis, and the P1 vtilde_1 P1 blocks.
class Spectral {
  public:
    Spectral(const LinearizedOperator* op0, const LinearizedOperator* op1);

    const LinearizedOperator& op(int m) const { return m == 0 ? *op0_ : *op1_; }
    const MacroBasis& macro() const { return mb_; }

    /// R_kj(gamma, eta) for k,j in 0..3 (index 3 pairs F_2 with itself in the
    /// m=1 sector; mixed (<=2, 3) entries vanish by sector orthogonality).
    cplx resolvent_Rkj(cplx gamma, double eta, int k, int j) const;

    cplx dispersion_D0(cplx gamma, double eta) const;
    cplx dispersion_D1(cplx gamma, double eta) const;

    /// Newton iteration on D0 or D1 from an initial guess; throws a numeric
    /// error when it fails to converge within max_iter.
    cplx newton_root(bool use_D0, cplx gamma0, double eta, int max_iter = 8,
                     double tol = 1e-13) const;

    EigenBranch track_branch(int j, double eta_max, double step) const;

    /// Eigenfunction of branch j at eta in the sector's scaled coordinates,
    /// normalized by the bilinear square (e, e-bar) = 1. Requires beta_j(eta).
    CVec eigenfunction_at(int j, double eta, cplx beta) const;

    /// Convenience: track to eta then return the eigenfunction.
    CVec eigenfunction_at(int j, double eta) const;

    /// Residual ||(B - beta) e|| / ||e|| in the branch's sector.
    double branch_residual(int j, double eta, cplx beta, const CVec& e) const;

    double A_direct(int j) const;  // -(L^-1 P1 vt1 F_j, vt1 F_j)

    /// P1 resolvent solve x = (L - eta gamma - i eta P1 vt1 P1)^{-1} rhs in
    /// sector m for rhs orthogonal to the sector null space.
    CVec p1_resolve(int m, cplx gamma, double eta, const CVec& rhs) const;

  private:
    struct Sector {
        const LinearizedOperator* op;
        Mat T;       // P1 diag(vt1) P1
        double tau;  // penalty shifting the macro block away from zero
    };
    const Sector& sector(int m) const { return m == 0 ? s0_ : s1_; }
    CMat resolvent_matrix(int m, cplx gamma, double eta) const;

    const LinearizedOperator* op0_;
    const LinearizedOperator* op1_;
    Sector s0_, s1_;
    MacroBasis mb_;
    Mat rhs0_;  // P1(vt1 F_{k-1}) for the m=0 triple
    Vec rhs1_;  // P1(vt1 F_2)
};

struct GapScanRow {
    double eta;
    double rightmost_re;       // max over both sectors (m=1 counted once)
    int count_above;           // eigenvalues with Re >= -mu/2, m=1 doubled
};

/// Dense eigensolve sweep over the supplied eta values.
std::vector<GapScanRow> gap_scan(const Spectral& sp, const std::vector<double>& etas);

}  // namespace rbgf
