#pragma once

#include <memory>
#include <vector>

#include "rbgf/dense.hpp"
#include "rbgf/kinematics.hpp"

namespace rbgf {

enum class GridMode { full3d, axisymmetric };

/// Quadrature grid on the truncated velocity ball |v| <= V_max.
///
/// Axisymmetric mode m in {0,1}: nodes are (v1, vr) pairs from a polar
/// Gauss-Legendre product (rho in (0,V], theta in (0,pi)); the weight carries
/// the full cylindrical measure 2 pi vr dv1 dvr so that sums of same-mode
/// functions reproduce 3-D inner products. Full 3-D mode: spherical product
/// grid (r, theta, phi), used as a cross-check oracle.
class VelocityGrid {
  public:
    GridMode mode;
    int m = 0;       // azimuthal index, axisymmetric only
    int n1 = 0;      // rho (or r) count
    int n2 = 0;      // theta count
    double V_max = 12.0;

    std::vector<double> v1;      // axial component per node
    std::vector<double> vr;      // perpendicular magnitude per node (axisym) or unused
    std::vector<Eigen::Vector3d> v3;  // full3d node vectors
    std::vector<double> w;       // quadrature weights including all Jacobians
    std::vector<double> v0;      // energies
    std::vector<double> vt1;     // vtilde_1 = v1/v0 per node

    // polar cell bounds per node, for near-diagonal sub-quadrature
    std::vector<double> rho, theta;
    std::vector<double> rho_lo, rho_hi, th_lo, th_hi;

    int size() const { return static_cast<int>(w.size()); }
    RelVelocity node(int i) const;
};

using GridPtr = std::shared_ptr<const VelocityGrid>;

/// Deterministic node layout for identical inputs. resolution >= 8 per axis.
GridPtr build_grid(GridMode mode, int n1, int n2, double V_max, int m = 0);

/// Complex-valued function sampled on a grid.
struct GridFunction {
    GridPtr grid;
    CVec values;

    GridFunction() = default;
    GridFunction(GridPtr g, CVec v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid->size()) throw config_error("GridFunction: length mismatch");
    }
};

/// Samples f(v) at the grid nodes.
GridFunction sample(const GridPtr& g, const std::function<cplx(const RelVelocity&)>& f);

/// (f,g) = int f conj(g) dv. Throws on grid mismatch.
cplx inner_product(const GridFunction& f, const GridFunction& g);

/// sup_v |f(v)| (1+v0)^gamma over the grid nodes.
double weighted_supnorm(const GridFunction& f, double gamma);

/// Scaled coefficient vector c_i = f_i sqrt(w_i); Euclidean dot products of
/// coefficient vectors equal grid inner products. Operators are stored in
/// this basis, where L is a genuinely symmetric matrix.
CVec to_coeff(const GridFunction& f);
Vec coeff_weights_sqrt(const VelocityGrid& g);

}  // namespace rbgf
