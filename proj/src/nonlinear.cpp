#include "rbgf/nonlinear.hpp"

#include <cmath>
#include <random>

#include "rbgf/quadrature.hpp"

namespace rbgf {

namespace {

Eigen::Vector3d boost(const Eigen::Vector3d& p, double p0, const Eigen::Vector3d& w,
                      double* p0_out) {
    const double w2 = w.squaredNorm();
    if (w2 < 1e-28) {
        if (p0_out) *p0_out = p0;
        return p;
    }
    const double gamma = 1.0 / std::sqrt(1.0 - w2);
    const double wp = w.dot(p);
    if (p0_out) *p0_out = gamma * (p0 - wp);
    return p + ((gamma - 1.0) * wp / w2 - gamma * p0) * w;
}

}  // namespace

ScatterEvent com_scatter(const RelVelocity& u, const RelVelocity& v,
                         const Eigen::Vector3d& omega) {
    // Boost to the zero-momentum frame, rotate the relative momentum onto
    // omega at fixed magnitude (per-particle energies are unchanged there),
    // boost back. With the hard-ball rate v_M this unit-sphere measure
    // reproduces the explicit gain kernel k2 at the probes.
    ScatterEvent ev;
    ev.u_in = u;
    ev.v_in = v;
    ev.omega = omega;

    const Eigen::Vector3d P = u.v + v.v;
    const double E = u.v0 + v.v0;
    const Eigen::Vector3d w = P / E;

    double us0, vs0;
    const Eigen::Vector3d us = boost(u.v, u.v0, w, &us0);
    boost(v.v, v.v0, w, &vs0);
    const double pstar = us.norm();

    const Eigen::Vector3d us_out = pstar * omega;
    const Eigen::Vector3d vs_out = -us_out;

    double uo0, vo0;
    const Eigen::Vector3d uo = boost(us_out, us0, -w, &uo0);
    const Eigen::Vector3d vo = boost(vs_out, vs0, -w, &vo0);
    ev.u_out = RelVelocity::from(uo);
    ev.v_out = RelVelocity::from(vo);
    return ev;
}

namespace {

double sqrtM_mass() {
    static const double Z = 4.0 * M_PI *
                            adaptive_integrate(
                                [](double r) {
                                    return r * r * std::exp(-0.5 * std::sqrt(1.0 + r * r));
                                },
                                0.0, 120.0, 1e-13);
    return Z;
}

RelVelocity sample_sqrtM(std::mt19937_64& rng) {
    std::gamma_distribution<double> gd(3.0, 2.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double r = 0.0;
    for (;;) {
        r = gd(rng);
        // acceptance e^{-(sqrt(1+r^2)-r)/2} <= 1
        if (uni(rng) <= std::exp(-0.5 * (std::sqrt(1.0 + r * r) - r))) break;
    }
    const double mu = 2.0 * uni(rng) - 1.0;
    const double ph = 2.0 * M_PI * uni(rng);
    const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    return RelVelocity::from(
        Eigen::Vector3d(r * mu, r * st * std::cos(ph), r * st * std::sin(ph)));
}

Eigen::Vector3d sample_octant_dir(std::mt19937_64& rng, int octant) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double mu = uni(rng);
    const double ph = 0.5 * M_PI * uni(rng);
    const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    Eigen::Vector3d d(st * std::cos(ph), st * std::sin(ph), mu);
    if (octant & 1) d.x() = -d.x();
    if (octant & 2) d.y() = -d.y();
    if (octant & 4) d.z() = -d.z();
    return d;
}

std::uint64_t chunk_seed(std::uint64_t seed, int chunk) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (chunk + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

MCEstimate chunked_mc(const MCSpec& spec,
                      const std::function<double(std::mt19937_64&, int)>& one_sample) {
    const int nchunks = spec.n_chunks;
    std::uint64_t per = std::max<std::uint64_t>(8, spec.n_samples / nchunks);
    per = (per / 8) * 8;  // balanced octant stratification
    std::vector<double> chunk_mean(nchunks, 0.0);

#pragma omp parallel for schedule(static)
    for (int c = 0; c < nchunks; ++c) {
        std::mt19937_64 rng(chunk_seed(spec.seed, c));
        double acc = 0.0;
        for (std::uint64_t i = 0; i < per; ++i)
            acc += one_sample(rng, static_cast<int>(i % 8));
        chunk_mean[c] = acc / per;
    }
    MCEstimate est;
    double m = 0.0;
    for (double v : chunk_mean) m += v;
    m /= nchunks;
    double var = 0.0;
    for (double v : chunk_mean) var += (v - m) * (v - m);
    var /= (nchunks - 1.0);
    est.value = m;
    est.stderr_ = std::sqrt(var / nchunks);
    est.samples = per * static_cast<std::uint64_t>(nchunks);
    return est;
}

}  // namespace

MCEstimate gamma_mc(const VelocityFn& f, const VelocityFn& g, const RelVelocity& v,
                    const MCSpec& spec) {
    const double Z = sqrtM_mass();
    return chunked_mc(spec, [&](std::mt19937_64& rng, int oct) {
        const RelVelocity u = sample_sqrtM(rng);
        const Eigen::Vector3d omega = sample_octant_dir(rng, oct);
        const ScatterEvent ev = com_scatter(u, v, omega);
        const KinematicPair kp = kinematic_pair(u, v);
        return 4.0 * M_PI * Z * kp.vM * (f(ev.v_out) * g(ev.u_out) - f(v) * g(u));
    });
}

MCEstimate gamma_moment_mc(const VelocityFn& f, const VelocityFn& g,
                           const CollisionInvariants& inv, int j, const MCSpec& spec) {
    const double Z = sqrtM_mass();
    auto weight = [&](const RelVelocity& v) {
        // chi_j(v) e^{v0/2}: the polynomial part of the invariant
        switch (j) {
            case 0: return 1.0 / std::sqrt(inv.p0);
            case 1: return v.v.x() / std::sqrt(inv.p1);
            case 2: return v.v.y() / std::sqrt(inv.p1);
            case 3: return v.v.z() / std::sqrt(inv.p1);
            case 4: return (v.v0 - inv.p2) / std::sqrt(inv.p3);
            default: throw config_error("gamma_moment_mc: invariant index");
        }
    };
    return chunked_mc(spec, [&](std::mt19937_64& rng, int oct) {
        const RelVelocity v = sample_sqrtM(rng);
        const RelVelocity u = sample_sqrtM(rng);
        const Eigen::Vector3d omega = sample_octant_dir(rng, oct);
        const ScatterEvent ev = com_scatter(u, v, omega);
        const KinematicPair kp = kinematic_pair(u, v);
        return 4.0 * M_PI * Z * Z * weight(v) * kp.vM *
               (f(ev.v_out) * g(ev.u_out) - f(v) * g(u));
    });
}

GridInterpolant::GridInterpolant(GridPtr grid, Vec nodal_values) : g_(std::move(grid)) {
    if (g_->mode != GridMode::axisymmetric || g_->m != 0)
        throw config_error("GridInterpolant: m=0 axisymmetric grid required");
    vals_.resize(g_->n1, g_->n2);
    for (int i = 0; i < g_->n1; ++i)
        for (int j = 0; j < g_->n2; ++j) vals_(i, j) = nodal_values[i * g_->n2 + j];
}

namespace {

/// Neville polynomial through four non-uniform points, evaluated at x.
double cubic4(const double* xs, const double* ys, double x) {
    double p[4] = {ys[0], ys[1], ys[2], ys[3]};
    for (int lvl = 1; lvl < 4; ++lvl)
        for (int i = 0; i < 4 - lvl; ++i)
            p[i] = ((x - xs[i + lvl]) * p[i] + (xs[i] - x) * p[i + 1]) / (xs[i] - xs[i + lvl]);
    return p[0];
}

}  // namespace

double GridInterpolant::operator()(const RelVelocity& u) const {
    const double rho = u.v.norm();
    if (rho > g_->V_max) {
        ++extrapolation_count;
        return 0.0;
    }
    const double ur = std::hypot(u.v.y(), u.v.z());
    const double th = std::atan2(ur, u.v.x());
    // four-point stencils in the rho and theta node lists (rho-major layout)
    auto stencil = [](const std::vector<double>& xs, int stride, int count, double x) {
        int lo = 0, hi = count - 1;
        if (x > xs[0]) {
            if (x >= xs[static_cast<size_t>(stride) * (count - 1)]) lo = count - 2;
            else {
                while (hi - lo > 1) {
                    const int mid = (lo + hi) / 2;
                    if (xs[static_cast<size_t>(stride) * mid] <= x) lo = mid;
                    else hi = mid;
                }
            }
        }
        return std::max(0, std::min(lo - 1, count - 4));
    };
    const int i0 = stencil(g_->rho, g_->n2, g_->n1, rho);
    const int j0 = stencil(g_->theta, 1, g_->n2, th);
    double xs_r[4], xs_t[4], col[4], row[4];
    for (int a = 0; a < 4; ++a) {
        xs_r[a] = g_->rho[static_cast<size_t>(g_->n2) * (i0 + a)];
        xs_t[a] = g_->theta[j0 + a];
    }
    for (int b = 0; b < 4; ++b) {
        for (int a = 0; a < 4; ++a) col[a] = vals_(i0 + a, j0 + b);
        row[b] = cubic4(xs_r, col, rho);
    }
    return cubic4(xs_t, row, th);
}

std::vector<CrosscheckRow> crosscheck_L(const LinearizedOperator& op, const Vec& nodal_f,
                                        const std::vector<int>& probe_nodes,
                                        const MCSpec& spec) {
    const VelocityGrid& g = *op.grid;
    const int n = op.size();

    // kernel-matrix route on the raw operator K - nu
    Vec coeff(n);
    for (int i = 0; i < n; ++i) coeff[i] = nodal_f[i] * std::sqrt(g.w[i]);
    const Vec Kc = op.K * coeff;
    Vec Lf(n);
    for (int i = 0; i < n; ++i) Lf[i] = Kc[i] / std::sqrt(g.w[i]) - op.nu[i] * nodal_f[i];

    GridInterpolant interp(op.grid, nodal_f);
    auto fI = [&](const RelVelocity& u) { return interp(u); };
    auto sqM = [](const RelVelocity& u) { return std::exp(-0.5 * u.v0); };

    std::vector<CrosscheckRow> rows;
    for (int idx : probe_nodes) {
        const RelVelocity v = g.node(idx);
        MCSpec s1 = spec;
        s1.seed = spec.seed + 17 * idx + 1;
        MCSpec s2 = spec;
        s2.seed = spec.seed + 17 * idx + 9;
        const MCEstimate a = gamma_mc(sqM, fI, v, s1);
        const MCEstimate b = gamma_mc(fI, sqM, v, s2);
        CrosscheckRow row;
        row.v1 = g.v1[idx];
        row.vr = g.vr[idx];
        row.mc = a.value + b.value;
        row.mc_err = std::hypot(a.stderr_, b.stderr_);
        row.kernel = Lf[idx];
        row.agree = std::abs(row.mc - row.kernel) <= 3.0 * row.mc_err;
        rows.push_back(row);
    }
    return rows;
}

double eval_Psi(double t, double x, double D2, double c) {
    const double op = 1.0 + t;
    double v = std::pow(op, -1.5) *
               (std::exp(-x * x / (D2 * op)) +
                std::pow(op, -0.5) * std::exp(-(x - c * t) * (x - c * t) / (D2 * op)));
    v += std::exp(-(x + t) / D2);
    if (x <= c * t)
        v += std::pow(op, -1.5) *
             (B_profile(1.5, t, x) + std::pow(op, -0.5) * B_profile(1.0, t, x - c * t));
    return v;
}

namespace {

/// Psi with the (1+t)^{-2} B_1(t, |x|-ct) cone wave removed (ablation target).
double eval_Psi_no_cone_ridge(double t, double x, double D2, double c) {
    const double op = 1.0 + t;
    double v = std::pow(op, -1.5) *
               (std::exp(-x * x / (D2 * op)) +
                std::pow(op, -0.5) * std::exp(-(x - c * t) * (x - c * t) / (D2 * op)));
    v += std::exp(-(x + t) / D2);
    if (x <= c * t) v += std::pow(op, -1.5) * B_profile(1.5, t, x);
    return v;
}

}  // namespace

ClosureReport nonlinear_closure_check(double D2, double c, const std::vector<double>& ts) {
    ClosureReport rep;
    const double D = D2;

    struct KernelSpec {
        std::string name;
        double alpha;
        int type;  // 0 Gauss(0), 1 Gauss(c), 2 exp-cone, 3 B_{3/2} cone
    };
    struct SourceSpec {
        std::string name;
        double beta;
        int type;  // 0 Gauss2(0), 1 Gauss2(c), 2 exp, 3 B3 cone(0), 4 B2 cone(c)
    };
    const std::vector<KernelSpec> kernels = {
        {"g0", 2.0, 0}, {"gc", 2.5, 1}, {"exp", 0.0, 2}, {"cone", 2.0, 3}};
    const std::vector<SourceSpec> sources = {
        {"s0", 3.0, 0}, {"sc", 4.0, 1}, {"sexp", 0.0, 2}, {"b3", 3.0, 3}, {"b2c", 4.0, 4}};

    auto term_value = [&](const KernelSpec& ks, const SourceSpec& ss, double t,
                          double x) -> double {
        CouplingIntegral ci;
        ci.alpha = ks.alpha;
        ci.beta = ss.beta;
        ci.D = D;
        ci.D1 = D2;
        ci.lambda = c;
        switch (ss.type) {
            case 0: ci.mu = 0; break;
            case 1: ci.mu = c; break;
            case 3: ci.mu = 0; ci.k_source = 3.0; break;
            case 4: ci.mu = c; ci.k_source = 2.0; break;
            default: break;
        }
        const bool src_cone = (ss.type == 3 || ss.type == 4);
        if (ss.type == 2) ci.exp_source_D = D2;
        using Kind = CouplingIntegral::Kind;
        switch (ks.type) {
            case 0: ci.kind = Kind::I; ci.mu1 = 0; break;
            case 1: ci.kind = Kind::I; ci.mu1 = c; break;
            case 2: ci.kind = Kind::M; break;
            case 3: ci.kind = Kind::J; break;
        }
        if (src_cone) {
            if (ks.type == 0 || ks.type == 1) {
                ci.kind = Kind::L;
                ci.mu1 = (ks.type == 1 ? c : 0.0);
            } else if (ks.type == 2) {
                ci.kind = Kind::N;
            } else {
                ci.kind = Kind::K;
            }
        }
        if (ci.kind == Kind::M || ci.kind == Kind::N) ci.alpha = ss.beta;
        return eval_coupling(ci, t, x, 1e-5);
    };

    double C_comp = 0.0, C_abl_min = 1e300, C_abl_max = 0.0;
    const std::vector<double> fracs = {0, 0.25, 0.5, 0.75, 1.0, 1.25};
    std::vector<double> per_term_C(kernels.size() * sources.size(), 0.0);
    for (double t : ts) {
        double C_abl_t = 0.0;
        for (double fx : fracs) {
            const double x = fx * c * t;
            double comp = 0.0;
            size_t ti = 0;
            const double psi = eval_Psi(t, x, 2.0 / 3.0 * D2, c);
            for (const auto& ks : kernels)
                for (const auto& ss : sources) {
                    const double v = term_value(ks, ss, t, x);
                    comp += v;
                    if (psi > 0) per_term_C[ti] = std::max(per_term_C[ti], v / psi);
                    ++ti;
                }
            if (psi > 0) C_comp = std::max(C_comp, comp / psi);
            const double psi_abl = eval_Psi_no_cone_ridge(t, x, 2.0 / 3.0 * D2, c);
            if (psi_abl > 0) C_abl_t = std::max(C_abl_t, comp / psi_abl);
        }
        C_abl_min = std::min(C_abl_min, C_abl_t);
        C_abl_max = std::max(C_abl_max, C_abl_t);
    }
    size_t ti = 0;
    for (const auto& ks : kernels)
        for (const auto& ss : sources) {
            ClosureTermReport tr;
            tr.name = ks.name + "*" + ss.name;
            tr.C_fit = per_term_C[ti++];
            tr.pass = std::isfinite(tr.C_fit);
            rep.terms.push_back(tr);
        }
    rep.C_composite = C_comp;
    rep.ablation_growth = (C_abl_min > 0) ? C_abl_max / C_abl_min : 1e300;
    rep.cone_term_required = rep.ablation_growth > 2.0;
    rep.pass = std::isfinite(C_comp) && rep.cone_term_required;
    return rep;
}

}  // namespace rbgf
