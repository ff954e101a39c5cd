#include "rbgf/velocity_grid.hpp"

#include <cmath>

#include "rbgf/quadrature.hpp"

namespace rbgf {

RelVelocity VelocityGrid::node(int i) const {
    if (mode == GridMode::full3d) return RelVelocity::from(v3[i]);
    return RelVelocity::from(Eigen::Vector3d(v1[i], vr[i], 0.0));
}

GridPtr build_grid(GridMode mode, int n1, int n2, double V_max, int m) {
    if (n1 < 8 || n2 < 8) throw config_error("build_grid: resolution must be >= 8 per axis");
    if (V_max <= 0) throw config_error("build_grid: V_max must be positive");
    if (m != 0 && m != 1) throw config_error("build_grid: azimuthal index must be 0 or 1");

    auto g = std::make_shared<VelocityGrid>();
    g->mode = mode;
    g->m = (mode == GridMode::axisymmetric) ? m : 0;
    g->n1 = n1;
    g->n2 = n2;
    g->V_max = V_max;

    const GaussRule& r1 = gauss_legendre(n1);
    const GaussRule& r2 = gauss_legendre(n2);

    if (mode == GridMode::axisymmetric) {
        const int n = n1 * n2;
        g->v1.reserve(n);
        g->vr.reserve(n);
        g->w.reserve(n);
        // midpoints between neighbouring nodes bound each polar cell
        std::vector<double> rho(n1), th(n2), rlo(n1), rhi(n1), tlo(n2), thi(n2);
        for (int i = 0; i < n1; ++i) rho[i] = 0.5 * V_max * (r1.x[i] + 1.0);
        for (int j = 0; j < n2; ++j) th[j] = 0.5 * M_PI * (r2.x[j] + 1.0);
        for (int i = 0; i < n1; ++i) {
            rlo[i] = (i == 0) ? 0.0 : 0.5 * (rho[i - 1] + rho[i]);
            rhi[i] = (i == n1 - 1) ? V_max : 0.5 * (rho[i] + rho[i + 1]);
        }
        for (int j = 0; j < n2; ++j) {
            tlo[j] = (j == 0) ? 0.0 : 0.5 * (th[j - 1] + th[j]);
            thi[j] = (j == n2 - 1) ? M_PI : 0.5 * (th[j] + th[j + 1]);
        }
        for (int i = 0; i < n1; ++i) {
            const double wr = 0.5 * V_max * r1.w[i];
            for (int j = 0; j < n2; ++j) {
                const double wt = 0.5 * M_PI * r2.w[j];
                const double st = std::sin(th[j]);
                g->v1.push_back(rho[i] * std::cos(th[j]));
                g->vr.push_back(rho[i] * st);
                g->w.push_back(2.0 * M_PI * rho[i] * rho[i] * st * wr * wt);
                g->rho.push_back(rho[i]);
                g->theta.push_back(th[j]);
                g->rho_lo.push_back(rlo[i]);
                g->rho_hi.push_back(rhi[i]);
                g->th_lo.push_back(tlo[j]);
                g->th_hi.push_back(thi[j]);
            }
        }
    } else {
        // spherical product grid: r x theta Gauss-Legendre, phi uniform
        const int nphi = n2;
        for (int i = 0; i < n1; ++i) {
            const double r = 0.5 * V_max * (r1.x[i] + 1.0);
            const double wr = 0.5 * V_max * r1.w[i];
            for (int j = 0; j < n2; ++j) {
                const double t = 0.5 * M_PI * (r2.x[j] + 1.0);
                const double wt = 0.5 * M_PI * r2.w[j];
                for (int k = 0; k < nphi; ++k) {
                    const double phi = 2.0 * M_PI * (k + 0.5) / nphi;
                    const double wp = 2.0 * M_PI / nphi;
                    Eigen::Vector3d p(r * std::cos(t), r * std::sin(t) * std::cos(phi),
                                      r * std::sin(t) * std::sin(phi));
                    g->v3.push_back(p);
                    g->v1.push_back(p.x());
                    g->vr.push_back(std::hypot(p.y(), p.z()));
                    g->w.push_back(r * r * std::sin(t) * wr * wt * wp);
                }
            }
        }
    }

    const int n = g->size();
    g->v0.resize(n);
    g->vt1.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r2n = g->v1[i] * g->v1[i] + g->vr[i] * g->vr[i];
        g->v0[i] = std::sqrt(1.0 + r2n);
        g->vt1[i] = g->v1[i] / g->v0[i];
    }
    return g;
}

GridFunction sample(const GridPtr& g, const std::function<cplx(const RelVelocity&)>& f) {
    CVec v(g->size());
    for (int i = 0; i < g->size(); ++i) v[i] = f(g->node(i));
    return GridFunction(g, std::move(v));
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
    if (f.grid.get() != g.grid.get()) throw config_error("inner_product: grid mismatch");
    cplx s = 0.0;
    for (int i = 0; i < f.grid->size(); ++i)
        s += f.values[i] * std::conj(g.values[i]) * f.grid->w[i];
    return s;
}

double weighted_supnorm(const GridFunction& f, double gamma) {
    if (gamma < 0) throw config_error("weighted_supnorm: gamma must be >= 0");
    double m = 0.0;
    for (int i = 0; i < f.grid->size(); ++i)
        m = std::max(m, std::abs(f.values[i]) * std::pow(1.0 + f.grid->v0[i], gamma));
    return m;
}

CVec to_coeff(const GridFunction& f) {
    CVec c(f.values.size());
    for (int i = 0; i < f.values.size(); ++i) c[i] = f.values[i] * std::sqrt(f.grid->w[i]);
    return c;
}

Vec coeff_weights_sqrt(const VelocityGrid& g) {
    Vec s(g.size());
    for (int i = 0; i < g.size(); ++i) s[i] = std::sqrt(g.w[i]);
    return s;
}

}  // namespace rbgf
