#pragma once

#include <cstdint>
#include <functional>

#include "rbgf/collision.hpp"
#include "rbgf/coupling.hpp"

namespace rbgf {

/// One hard-ball scattering event in the center-of-momentum parametrization:
/// boost to the frame with zero total momentum, rotate the relative momentum
/// onto Omega at fixed magnitude, boost back. Conserves u+v and u0+v0 to
/// round-off and leaves g invariant.
struct ScatterEvent {
    RelVelocity u_in, v_in;
    Eigen::Vector3d omega;
    RelVelocity u_out, v_out;
};

ScatterEvent com_scatter(const RelVelocity& u, const RelVelocity& v,
                         const Eigen::Vector3d& omega);

struct MCEstimate {
    double value = 0;
    double stderr_ = 0;
    std::uint64_t samples = 0;
};

using VelocityFn = std::function<double(const RelVelocity&)>;

struct MCSpec {
    std::uint64_t seed = 2024;
    std::uint64_t n_samples = 200000;
    int n_chunks = 256;  // fixed chunk count keeps results thread-count independent
};

/// Gamma(f,g)(v) = (1/sqrt(M)) Q(sqrt(M) f, sqrt(M) g) by importance-sampled
/// Monte Carlo: u ~ sqrt(M)/Z, Omega stratified over octants.
MCEstimate gamma_mc(const VelocityFn& f, const VelocityFn& g, const RelVelocity& v,
                    const MCSpec& spec);

/// (Gamma(f,g), chi_j) with both velocities importance-sampled.
MCEstimate gamma_moment_mc(const VelocityFn& f, const VelocityFn& g,
                           const CollisionInvariants& inv, int j, const MCSpec& spec);

/// Interpolates an m=0 grid function to arbitrary velocities (bilinear in the
/// polar chart, zero outside the ball). extrapolation_count reports clipped
/// probes.
class GridInterpolant {
  public:
    GridInterpolant(GridPtr grid, Vec nodal_values);
    double operator()(const RelVelocity& u) const;
    mutable std::uint64_t extrapolation_count = 0;

  private:
    GridPtr g_;
    Mat vals_;  // n1 x n2 nodal table
};

struct CrosscheckRow {
    double v1 = 0, vr = 0;
    double mc = 0, mc_err = 0, kernel = 0;
    bool agree = false;  // |mc - kernel| <= 3 sigma
};

/// L f = Gamma(sqrt(M), f) + Gamma(f, sqrt(M)) against the kernel-matrix
/// route, at a set of probe nodes.
std::vector<CrosscheckRow> crosscheck_L(const LinearizedOperator& op, const Vec& nodal_f,
                                        const std::vector<int>& probe_nodes,
                                        const MCSpec& spec);

struct ClosureTermReport {
    std::string name;
    double C_fit = 0;
    bool pass = false;
};

struct ClosureReport {
    std::vector<ClosureTermReport> terms;
    double C_composite = 0;
    double ablation_growth = 0;  // C-growth factor when the B_1 cone wave is removed
    bool cone_term_required = false;
    bool pass = false;
};

/// Composite nonlinear-closure check: pushes the squared solution ansatz
/// through the Green-envelope convolutions and fits the composite constant
/// against Psi(t, x; 2/3 D2); the ablation confirms the extra
/// (1+t)^{-2} B_1(t,|x|-ct) cone wave is genuinely needed.
ClosureReport nonlinear_closure_check(double D2, double sound_speed,
                                      const std::vector<double>& ts);

/// Psi solution-space envelope of the nonlinear theorem.
double eval_Psi(double t, double x, double D2, double c);

}  // namespace rbgf
