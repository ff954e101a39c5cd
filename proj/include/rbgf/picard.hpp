#pragma once

#include "rbgf/collision.hpp"

namespace rbgf {

/// March options for the approximate sequence J_k(t, xi) at xi = (u + ib) e1.
/// The recursion is integrated with the frequency shift sigma: the stored
/// objects are Jt_k = e^{sigma t} J_k, which stay representable for all t
/// because nu(v) - sigma >= nu0 - sigma > -inf; true norms are recovered as
/// log||J_k|| = log||Jt_k|| - sigma t.
struct PicardOptions {
    int k_max = 12;
    double t_max = 0.2;
    double dt = 1e-3;      // capped internally so (|u| + dnu) dt <= 0.2
    double shift = 0.0;
    double b_imag = 0.0;   // analyticity probe: requires 2|b| <= nu0
    int norm_stride = 5;   // record norms every this many steps
    std::vector<double> snapshot_times;
};

struct PicardResult {
    double u_re = 0, b_imag = 0, shift = 0;
    std::vector<double> t_checks;
    Mat log_norms;                              // [check][k], log of true ||J_k||
    std::vector<double> t_snapshots;            // snapped to the step grid
    std::vector<std::vector<CMat>> J_snapshots;  // shifted matrices per time
};

/// Full matrix march of the recursion d/dt J_k = -(nu + i vt xi) J_k + K J_{k-1},
/// J_0 = exp(-(nu + i vt xi) t) exactly, with an exponential-trapezoidal rule.
PicardResult picard_march(const LinearizedOperator& op, double u_re, PicardOptions opt);

struct PicardApplyResult {
    double u_re = 0, b_imag = 0, shift = 0;
    std::vector<double> t_checks;
    Mat log_norms;  // [check][k], log of true ||J_k g0||
    std::vector<double> t_snapshots;
    std::vector<std::vector<CVec>> vec_snapshots;  // shifted J_k g0
};

/// Vector march of the same recursion applied to a fixed g0 (much cheaper).
PicardApplyResult picard_apply(const LinearizedOperator& op, double u_re, PicardOptions opt,
                               const CVec& g0);

/// Raw shifted generator e^{shift} (K - nu - i vt1 (u + i b)) of the sector.
CMat raw_symbol_generator(const LinearizedOperator& op, double u_re, double b_imag,
                          double shift);

/// log || e^{t B(xi)} - sum_{i<=3k} J_i(t, xi) || from a snapshot index.
double remainder_log_norm(const LinearizedOperator& op, const PicardResult& pr,
                          int snapshot_index, int k);

/// log || G_H-style difference || = log || e^{tB} - W_k || (same quantity; the
/// high-frequency indicator is moot at fixed xi).
inline double gh_minus_w_log_norm(const LinearizedOperator& op, const PicardResult& pr,
                                  int snapshot_index, int k) {
    return remainder_log_norm(op, pr, snapshot_index, k);
}

/// chi0-moment of the remainder symbol R_k(t, xi), bilinear in the scaled
/// basis (q^T R q), true unshifted value.
cplx remainder_moment(const LinearizedOperator& op, const PicardResult& pr, int snapshot_index,
                      int k, const CVec& q_out, const CVec& q_in);

/// Radial inverse transform (2pi)^{-3/2} int e^{ix.xi} m(|xi|) dxi of a
/// symbol sampled on a uniform eta grid [0, eta_max], with an algebraic
/// (1+eta)^{-p} tail model appended beyond the grid.
double radial_field_from_symbol(const std::vector<cplx>& m, double eta_max, double x,
                                double tail_power);

}  // namespace rbgf
