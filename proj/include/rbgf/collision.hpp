#pragma once

#include <optional>
#include <vector>

#include "rbgf/dense.hpp"
#include "rbgf/velocity_grid.hpp"

namespace rbgf {

/// nu(v) = 4 pi int v_M(u,v) M(u) du. Depends on |v| only.
double collision_frequency(double vmag);
inline double collision_frequency(const RelVelocity& v) { return collision_frequency(v.v.norm()); }

/// Loss kernel k1 and gain kernel k2 of K = K2 - K1; both nonnegative and
/// symmetric in (u,v). k2 has the 1/|u-v| integrable singularity at u = v.
double kernel_k1(const RelVelocity& v, const RelVelocity& u);
double kernel_k2(const RelVelocity& v, const RelVelocity& u);

/// Azimuthally reduced kernel k_m((v1,vr),(u1,ur)) = int_0^{2pi} k cos(m psi) dpsi
/// with k = k2 - k1. Logarithmically singular as the plane points coincide;
/// the psi quadrature is graded toward psi = 0 at small plane separation.
double azimuthal_kernel(int m, double v1, double vr, double u1, double ur);

/// Dense azimuthal kernel matrix with assembly metadata (cacheable payload).
struct KernelTable {
    int m = 0;
    int n1 = 0, n2 = 0;
    double V_max = 0;
    int format_version = 1;
    Mat K;                          // sqrt(w)-scaled symmetric matrix, includes weights
    Vec nu;                         // collision frequency at the nodes
    double mu_cached = -1;          // coercivity constant, filled when known
    std::vector<int> corrected;     // node pairs (i*n+j) with product-integration entries
};

/// Discrete linearized operator in the sqrt(w)-scaled basis: L = K - diag(nu)
/// with the null space forced onto the sampled collision invariants.
struct LinearizedOperator {
    GridPtr grid;
    int m = 0;
    Mat K;        // scaled symmetric kernel matrix
    Vec nu;       // multiplication part
    Vec vt1;      // vtilde_1 at the nodes (diagonal streaming symbol)
    Mat X;        // orthonormal basis of the sector null space (columns)
    Mat L;        // P1 (K - diag nu) P1, exactly annihilates the columns of X
    double mu = 0;        // coercivity constant: -max nonzero eigenvalue of L
    double nu0 = 0, nu1 = 0;  // min nu over nodes, 16 pi p0 upper bound

    int size() const { return static_cast<int>(nu.size()); }
    Mat projector_P0() const { return X * X.transpose(); }

    /// Splits a scaled coefficient vector into the P0^1, P0^2, P0^3 pieces and
    /// the microscopic remainder (m=0 sector: chi0 / chi1 / chi4 directions).
    struct Projections {
        CVec P0_1, P0_2, P0_3, P1;
    };
    Projections apply_projections(const CVec& f) const;
};

struct AssemblyOptions {
    int psi_points = 24;          // base GL order of the psi integral
    double near_cell_factor = 0.75;  // near-field ring, in units of the cell diagonal
    int subcell_points = 6;       // GL order per axis of the cell average
    bool parallel = true;         // row-parallel OpenMP assembly
};

/// Builds the azimuthal kernel matrix for sector m on an axisymmetric grid.
KernelTable assemble_kernel(const VelocityGrid& grid, int m, const AssemblyOptions& opt = {});

/// Serial reference assembly, kept for testing the parallel path.
KernelTable assemble_kernel_serial(const VelocityGrid& grid, int m, AssemblyOptions opt = {});

/// Assembles the full linearized operator (optionally from a prebuilt table).
LinearizedOperator assemble(const GridPtr& grid, int m, const CollisionInvariants& inv,
                            const AssemblyOptions& opt = {},
                            std::optional<KernelTable> table = std::nullopt);

}  // namespace rbgf
