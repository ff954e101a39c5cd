#pragma once

#include "rbgf/spectral.hpp"

namespace rbgf {

/// Spectral data of one sector symbol B(eta): eigenpairs sorted by descending
/// real part, with the bilinear projectors P_j = v_j v_j^T / (v_j^T v_j) that
/// diagonalize a complex symmetric matrix.
struct SectorEig {
    double eta = 0;
    int m = 0;
    CVec values;           // sorted, descending real part
    CMat vectors;          // matching columns, bilinear-normalized v^T v = 1
    int n_fluid = 0;       // eigenvalues with Re >= -mu/2

    /// log ||sum_{j in [lo, n)} e^{lambda_j t} P_j||, evaluated stably by
    /// factoring out the leading exponential. Returns -inf when empty.
    double log_norm_tail(double t, int lo) const;

    /// Dense reconstruction sum_{j in [lo, hi)} e^{lambda_j t} P_j.
    CMat propagator(double t, int lo, int hi) const;
};

SectorEig sector_eig(const LinearizedOperator& op, double eta);

struct SemigroupSnapshot {
    double eta = 0, t = 0;
    int m = 0;
    CMat S;    // exp(t B) by scaling and squaring
    CMat S1;   // fluid eigenprojector part (rank n_fluid)
    CMat S2;   // S - S1
};

/// Snapshot via expm; S1 from the fluid eigenpairs of `eig` (must match eta/m).
SemigroupSnapshot semigroup_snapshot(const LinearizedOperator& op, const SectorEig& eig,
                                     double t);

struct Kappa0Fit {
    double eta = 0;
    double kappa0 = 0;  // decay rate of ||S2(t)||
    double r2 = 0;      // fit quality of log||S2|| vs t
};

/// Least-squares fit of log||S2(t)|| over t in [t_lo, t_hi] (eigen route,
/// stable for arbitrarily large t).
Kappa0Fit fit_kappa0(const SectorEig& eig, double t_lo = 1.0, double t_hi = 50.0,
                     int n_samples = 12);

}  // namespace rbgf
