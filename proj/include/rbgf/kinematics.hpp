#pragma once

#include <Eigen/Dense>
#include <functional>

#include "rbgf/dense.hpp"

namespace rbgf {

/// Relativistic velocity: momentum v (units of mc), energy v0 = sqrt(1+|v|^2),
/// physical velocity vtilde = v/v0 (|vtilde| < 1).
struct RelVelocity {
    Eigen::Vector3d v;
    double v0;
    Eigen::Vector3d vtilde;

    static RelVelocity from(const Eigen::Vector3d& p) {
        RelVelocity r;
        r.v = p;
        r.v0 = std::sqrt(1.0 + p.squaredNorm());
        r.vtilde = p / r.v0;
        return r;
    }
};

/// Global Maxwellian M(v) = exp(-v0).
inline double maxwellian(const RelVelocity& u) { return std::exp(-u.v0); }
inline double maxwellian_v0(double v0) { return std::exp(-v0); }

struct KinematicPair {
    double g;   // relative momentum, g^2 = s - 4
    double s;   // s = 2(u0 v0 - u.v + 1)
    double vM;  // Moller velocity g sqrt(4+g^2)/(u0 v0), <= 4
};

/// Invariants g, s and the Moller velocity of a velocity pair. Total function,
/// symmetric in (u,v); s >= 4 and g >= 0 up to round-off (clamped).
KinematicPair kinematic_pair(const RelVelocity& u, const RelVelocity& v);

struct QuadratureSpec {
    int n_radial = 256;
    double V_max = 12.0;
    double tail_tol = 1e-3;  // relative bound on 4 pi int_{V_max}^inf r^2 e^{-r} dr / p0
};

/// The five collision invariants chi_0..chi_4 with their normalization
/// constants. p2 is the Maxwellian mean of v0 and p3 the corresponding
/// variance-type integral so that (chi_i, chi_j) = delta_ij holds.
struct CollisionInvariants {
    double p0 = 0, p1 = 0, p2 = 0, p3 = 0;
    double V_max = 12.0;
    int n_radial = 256;
    double orthonormality_residual = 0;

    /// chi_j at a velocity; j in 0..4 (chi_j = v_j sqrt(M)/sqrt(p1) for j=1,2,3).
    double chi(int j, const RelVelocity& u) const;
};

/// Computes p0..p3 by angular pre-integration and radial Gauss-Legendre on
/// [0, V_max]. Throws config error when the Maxwellian tail beyond V_max
/// exceeds spec.tail_tol relative to p0.
CollisionInvariants compute_moments(const QuadratureSpec& spec);

struct TransportScalars {
    double a = 0;  // (vtilde_1 chi_1, chi_4)
    double b = 0;  // (vtilde_1 chi_0, chi_1)
    double c = 0;  // sqrt(a^2 + b^2), the sound speed
};

/// Reduces a and b to radial integrals over M; c < 1 always.
TransportScalars transport_scalars(const CollisionInvariants& inv);

}  // namespace rbgf
