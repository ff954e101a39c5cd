#include "rbgf/kinematics.hpp"

#include <cmath>

#include "rbgf/quadrature.hpp"

namespace rbgf {

KinematicPair kinematic_pair(const RelVelocity& u, const RelVelocity& v) {
    KinematicPair k;
    k.s = 2.0 * (u.v0 * v.v0 - u.v.dot(v.v) + 1.0);
    k.g = std::sqrt(std::max(0.0, k.s - 4.0));
    k.vM = k.g * std::sqrt(4.0 + k.g * k.g) / (u.v0 * v.v0);
    return k;
}

namespace {

/// 4 pi int_0^inf f(r) r^2 M dr: GL rule on [0, V_max] plus adaptive tail.
/// The 1-D reductions are cheap, so the moments are not truncated; V_max
/// only bounds the velocity grids.
double radial_moment(const std::function<double(double, double)>& f_r_v0, int n, double V_max) {
    const GaussRule& gr = gauss_legendre(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = 0.5 * V_max * (gr.x[i] + 1.0);
        const double w = 0.5 * V_max * gr.w[i];
        const double v0 = std::sqrt(1.0 + r * r);
        s += w * f_r_v0(r, v0) * r * r * std::exp(-v0);
    }
    auto tail = [&](double r) {
        const double v0 = std::sqrt(1.0 + r * r);
        return f_r_v0(r, v0) * r * r * std::exp(-v0);
    };
    s += adaptive_integrate(tail, V_max, V_max + 60.0, 1e-14);
    return 4.0 * M_PI * s;
}

}  // namespace

double CollisionInvariants::chi(int j, const RelVelocity& u) const {
    const double sqM = std::exp(-0.5 * u.v0);
    switch (j) {
        case 0: return sqM / std::sqrt(p0);
        case 1: return u.v.x() * sqM / std::sqrt(p1);
        case 2: return u.v.y() * sqM / std::sqrt(p1);
        case 3: return u.v.z() * sqM / std::sqrt(p1);
        case 4: return (u.v0 - p2) * sqM / std::sqrt(p3);
        default: throw config_error("chi index out of range");
    }
}

CollisionInvariants compute_moments(const QuadratureSpec& spec) {
    if (spec.n_radial < 8 || spec.V_max <= 0)
        throw config_error("compute_moments: invalid quadrature spec");

    CollisionInvariants inv;
    inv.V_max = spec.V_max;
    inv.n_radial = spec.n_radial;
    const int n = spec.n_radial;
    const double V = spec.V_max;

    inv.p0 = radial_moment([](double, double) { return 1.0; }, n, V);

    // Tail estimate 4 pi int_{V_max}^inf r^2 e^{-r} dr = 4 pi e^{-V}(V^2+2V+2).
    const double tail = 4.0 * M_PI * std::exp(-V) * (V * V + 2.0 * V + 2.0);
    if (tail > spec.tail_tol * inv.p0)
        throw config_error("compute_moments: V_max too small, Maxwellian tail " +
                           std::to_string(tail / inv.p0) + " exceeds tolerance");

    inv.p1 = radial_moment([](double r, double) { return r * r / 3.0; }, n, V);
    inv.p2 = radial_moment([](double, double v0) { return v0; }, n, V) / inv.p0;
    const double p2 = inv.p2;
    inv.p3 = radial_moment([p2](double, double v0) { return (v0 - p2) * (v0 - p2); }, n, V);

    // Orthonormality residual of {chi_j}: all pairs reduce to radial integrals,
    // the off-diagonal odd pairs vanish identically after angular integration.
    const double p0 = inv.p0, p1 = inv.p1, p3 = inv.p3;
    double res = 0.0;
    res = std::max(res, std::abs(radial_moment([](double, double) { return 1.0; }, n, V) / p0 - 1.0));
    res = std::max(res, std::abs(radial_moment([](double r, double) { return r * r / 3.0; }, n, V) / p1 - 1.0));
    res = std::max(res, std::abs(radial_moment([p2](double, double v0) { return (v0 - p2) * (v0 - p2); }, n, V) / p3 - 1.0));
    res = std::max(res, std::abs(radial_moment([p2](double, double v0) { return v0 - p2; }, n, V)) / std::sqrt(p0 * p3));
    inv.orthonormality_residual = res;
    return inv;
}

TransportScalars transport_scalars(const CollisionInvariants& inv) {
    if (inv.orthonormality_residual > 1e-6)
        throw numeric_error("transport_scalars: invariants fail orthonormality check");
    const int n = inv.n_radial;
    const double V = inv.V_max, p2 = inv.p2;

    TransportScalars ts;
    // b = int (v1^2/v0) M / sqrt(p0 p1); angular average of v1^2 is r^2/3.
    const double I_b = radial_moment([](double r, double v0) { return r * r / (3.0 * v0); }, n, V);
    ts.b = I_b / std::sqrt(inv.p0 * inv.p1);
    const double I_a =
        radial_moment([p2](double r, double v0) { return r * r / (3.0 * v0) * (v0 - p2); }, n, V);
    ts.a = I_a / std::sqrt(inv.p1 * inv.p3);
    ts.c = std::hypot(ts.a, ts.b);
    return ts;
}

}  // namespace rbgf
