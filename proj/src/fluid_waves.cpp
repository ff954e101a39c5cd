#include "rbgf/fluid_waves.hpp"

#include <cmath>

#include "rbgf/quadrature.hpp"

namespace rbgf {

FluidAmplitudes::FluidAmplitudes(const Spectral* sp, double eta_max, int n_samples)
    : sp_(sp), eta_max_(eta_max) {
    if (n_samples < 4) throw config_error("FluidAmplitudes: need at least 4 samples");
    const MacroBasis& mb = sp->macro();
    const LinearizedOperator& op0 = sp->op(0);
    const Vec chi1 = op0.X.col(1);
    Vec vchi1 = op0.vt1.asDiagonal() * chi1;
    vchi1 -= op0.X * (op0.X.transpose() * vchi1);

    cplx g_m1(0, -mb.c), g_0(0, 0), g_p1(0, mb.c), g_2(0, 0);
    for (int k = 0; k < n_samples; ++k) {
        const double eta = eta_max * k / (n_samples - 1.0);
        FluidSample s;
        s.eta = eta;
        if (k > 0) {
            g_m1 = sp->newton_root(false, g_m1, eta, 20);
            g_0 = sp->newton_root(false, g_0, eta, 20);
            g_p1 = sp->newton_root(false, g_p1, eta, 20);
            g_2 = sp->newton_root(true, g_2, eta, 20);
        }
        s.beta_m1 = eta * g_m1;
        s.beta_0 = eta * g_0;
        s.beta_p1 = eta * g_p1;
        s.beta_2 = eta * g_2;
        s.e_m1 = sp->eigenfunction_at(-1, eta, s.beta_m1);
        s.e_0 = sp->eigenfunction_at(0, eta, s.beta_0);
        s.e_p1 = sp->eigenfunction_at(1, eta, s.beta_p1);
        s.e2 = sp->eigenfunction_at(2, eta, s.beta_2);

        // psi*_{+-1} = (chi1 coefficient of P0 e_j)(chi1 + i eta resolvent P1 vt1 chi1)
        auto star = [&](const CVec& e, cplx gamma) -> CVec {
            const cplx coef = (e.transpose() * chi1.cast<cplx>()).value();
            CVec w = chi1.cast<cplx>();
            if (eta != 0.0)
                w += cplx(0, 1) * eta * sp->p1_resolve(0, gamma, eta, vchi1.cast<cplx>());
            return coef * w;
        };
        s.estar_m1 = star(s.e_m1, g_m1);
        s.estar_p1 = star(s.e_p1, g_p1);
        samples_.push_back(std::move(s));
    }
}

namespace {

/// Catmull-Rom interpolation on a uniform sample grid.
template <typename Getter>
cplx interp_uniform(double x, double x_max, int n, const Getter& get) {
    const double h = x_max / (n - 1.0);
    double u = x / h;
    int i = static_cast<int>(std::floor(u));
    i = std::max(0, std::min(i, n - 2));
    const double f = u - i;
    const cplx p0 = get(std::max(i - 1, 0));
    const cplx p1 = get(i);
    const cplx p2 = get(i + 1);
    const cplx p3 = get(std::min(i + 2, n - 1));
    const cplx a = 2.0 * p1;
    const cplx b = p2 - p0;
    const cplx c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
    const cplx d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
    return 0.5 * (a + (b + (c + d * f) * f) * f);
}

struct MomentTable {
    std::vector<cplx> bm1, b0, bp1, b2;  // branch exponents beta_j(eta)
    std::vector<cplx> pm1, p0, pp1;      // (qo^T e_j)(e_j^T qi)
    std::vector<cplx> sm1, sp1;          // psi* pairings
    int n = 0;
    double eta_max = 0;

    cplx eval(WavePart part, double t, double eta) const {
        auto ip = [&](const std::vector<cplx>& v) {
            return interp_uniform(eta, eta_max, n, [&](int i) { return v[i]; });
        };
        switch (part) {
            case WavePart::all:
                return std::exp(ip(bm1) * t) * ip(pm1) + std::exp(ip(b0) * t) * ip(p0) +
                       std::exp(ip(bp1) * t) * ip(pp1);
            case WavePart::acoustic:
                return std::exp(ip(bm1) * t) * (ip(pm1) - ip(sm1)) +
                       std::exp(ip(bp1) * t) * (ip(pp1) - ip(sp1));
            case WavePart::entropy:
                return std::exp(ip(b0) * t) * ip(p0);
            case WavePart::shear:
                return std::exp(ip(b2) * t) * (ip(sm1) + ip(sp1));
            case WavePart::star_diff:
                return (std::exp(ip(bm1) * t) - std::exp(ip(b2) * t)) * ip(sm1) +
                       (std::exp(ip(bp1) * t) - std::exp(ip(b2) * t)) * ip(sp1);
        }
        return cplx(0, 0);
    }
};

MomentTable make_table(const FluidAmplitudes& fa, const CVec& q_out, const CVec& q_in) {
    MomentTable tb;
    const auto& ss = fa.samples();
    tb.n = static_cast<int>(ss.size());
    tb.eta_max = fa.eta_max();
    auto pair = [&](const CVec& e) {
        return (q_out.transpose() * e).value() * (e.transpose() * q_in).value();
    };
    for (const auto& s : ss) {
        tb.bm1.push_back(s.beta_m1);
        tb.b0.push_back(s.beta_0);
        tb.bp1.push_back(s.beta_p1);
        tb.b2.push_back(s.beta_2);
        tb.pm1.push_back(pair(s.e_m1));
        tb.p0.push_back(pair(s.e_0));
        tb.pp1.push_back(pair(s.e_p1));
        tb.sm1.push_back(pair(s.estar_m1));
        tb.sp1.push_back(pair(s.estar_p1));
    }
    return tb;
}

}  // namespace

cplx FluidAmplitudes::symbol_moment(WavePart part, const CVec& q_out, const CVec& q_in,
                                    double t, double eta) const {
    MomentTable tb = make_table(*this, q_out, q_in);
    return tb.eval(part, t, eta);
}

AmplitudeMatrices FluidAmplitudes::amplitude_matrices(int i) const {
    const FluidSample& s = samples_.at(i);
    const MacroBasis& mb = sp_->macro();
    AmplitudeMatrices am;
    using M5 = Eigen::Matrix<cplx, 5, 5>;

    auto fvec = [&](const CVec& e) {
        Eigen::Vector3cd f;
        for (int k = 0; k < 3; ++k)
            f[k] = (mb.F0.col(k).transpose().cast<cplx>() * e).value();
        return f;
    };
    auto outer5_m0 = [&](const CVec& e) {
        const Eigen::Vector3cd f = fvec(e);
        M5 out = M5::Zero();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) out(a, b) = f[a] * f[b];
        return out;
    };
    const M5 Qp = outer5_m0(s.e_p1), Qm = outer5_m0(s.e_m1);
    const M5 Sp = outer5_m0(s.estar_p1), Sm = outer5_m0(s.estar_m1);

    am.B1 = (Qp - Sp) + (Qm - Sm);
    am.B2 = (s.eta == 0.0) ? M5(M5::Zero())
                           : M5(cplx(0, 1) * s.eta * ((Qp - Sp) - (Qm - Sm)));
    am.B3 = outer5_m0(s.e_0);
    am.B4 = Sp + Sm;
    const cplx f2 = (mb.F2.transpose().cast<cplx>() * s.e2).value();
    am.B4(3, 3) += f2 * f2;
    am.B4(4, 4) += f2 * f2;  // degenerate twin
    am.B5_11 = Sp + Sm;
    am.B6_11 = (s.eta == 0.0) ? M5(M5::Zero()) : M5(cplx(0, 1) / s.eta * (Sp - Sm));
    return am;
}

CMat FluidAmplitudes::sector_matrix(WavePart part, int i, double t) const {
    const FluidSample& s = samples_.at(i);
    auto outer = [](const CVec& e) { return CMat(e * e.transpose()); };
    const CMat Qp = outer(s.e_p1), Qm = outer(s.e_m1), Q0 = outer(s.e_0);
    const CMat Sp = outer(s.estar_p1), Sm = outer(s.estar_m1);
    const cplx ep = std::exp(s.beta_p1 * t), em = std::exp(s.beta_m1 * t),
               e0 = std::exp(s.beta_0 * t), e2 = std::exp(s.beta_2 * t);
    switch (part) {
        case WavePart::all: return em * Qm + e0 * Q0 + ep * Qp;
        case WavePart::acoustic: return em * (Qm - Sm) + ep * (Qp - Sp);
        case WavePart::entropy: return e0 * Q0;
        case WavePart::shear: return e2 * (Sp + Sm);
        case WavePart::star_diff: return (em - e2) * Sm + (ep - e2) * Sp;
    }
    throw config_error("sector_matrix: part");
}

double kirchhoff_convolve(const std::function<double(double)>& g, double t, double c,
                          double xmag) {
    if (t <= 0.0) return 0.0;
    const double R = c * t;
    if (xmag < 1e-12) return t * g(R);
    auto rho_g = [&](double rho) { return rho * g(rho); };
    const double lo = std::abs(xmag - R), hi = xmag + R;
    return t / (2.0 * xmag * R) * adaptive_integrate(rho_g, lo, hi, 1e-12);
}

double kirchhoff_convolve_dt(const std::function<double(double)>& g, double t, double c,
                             double xmag) {
    if (t <= 0.0) return g(xmag);
    if (xmag < 1e-12) {
        const double R = c * t;
        // limit of the boundary form: g(R) + R g'(R), by central difference
        const double h = 1e-6 * std::max(1.0, R);
        return g(R) + R * (g(R + h) - g(R - h)) / (2.0 * h);
    }
    return ((xmag + c * t) * g(xmag + c * t) + (xmag - c * t) * g(std::abs(xmag - c * t))) /
           (2.0 * xmag);
}

double RieszWave::value(double xmag) const {
    const double w = std::sqrt(D1 * t);
    auto Phi = [&](double z) { return 0.5 * std::sqrt(M_PI) * w * std::erf(z / w); };
    const double pref = D1 / (4.0 * c * c) / std::sqrt(t);
    if (xmag < 1e-9) {
        const double bracket_dx = 2.0 - 2.0 * std::exp(-c * t * c * t / (w * w));
        return pref * bracket_dx;
    }
    const double bracket = 2.0 * Phi(xmag) + Phi(c * t - xmag) - Phi(c * t + xmag);
    return pref * bracket / xmag;
}

double RieszWave::d2_11(double xmag) const {
    const double h = std::max(1e-5, 1e-4 * std::max(xmag, std::sqrt(D1 * t)));
    auto f = [&](double x) { return value(std::abs(x)); };
    return (-f(xmag + 2 * h) + 16 * f(xmag + h) - 30 * f(xmag) + 16 * f(xmag - h) -
            f(xmag - 2 * h)) /
           (12.0 * h * h);
}

double RieszWave::oracle_value(double xmag) const {
    auto integrand = [&](double s) {
        auto fmu = [&](double mu) {
            const double r2 = xmag * xmag + c * c * s * s + 2.0 * xmag * c * s * mu;
            return std::exp(-r2 / (D1 * t));
        };
        return 0.5 * s * gl_integrate(fmu, -1.0, 1.0, 64);
    };
    return std::pow(t, -1.5) * adaptive_integrate(integrand, 0.0, t, 1e-12);
}

WaveComponent synthesize_moment_field(const FluidAmplitudes& fa, WavePart part,
                                      const CVec& q_out, const CVec& q_in, double sigma_x,
                                      const std::vector<double>& ts,
                                      const std::vector<double>& xs,
                                      const std::string& label) {
    WaveComponent wc;
    wc.label = label;
    const MomentTable tb = make_table(fa, q_out, q_in);
    const double ampl = 4.0 * M_PI / std::pow(2.0 * M_PI, 1.5);
    const double c_est = fa.spectral().macro().c;
    const GaussRule& gr = gauss_legendre(8);

    for (double t : ts) {
        for (double x : xs) {
            // panel density tied to the fastest phase: sin(eta x) times the
            // acoustic factor e^{i c eta t}
            const double rate = x + c_est * t + 1.0;
            const int panels =
                std::max(16, 2 * static_cast<int>(std::ceil(fa.eta_max() * rate / M_PI)));
            const double h = fa.eta_max() / panels;
            double acc = 0.0;
            for (int p = 0; p < panels; ++p) {
                const double a = p * h;
                for (int q = 0; q < 8; ++q) {
                    const double eta = a + 0.5 * h * (gr.x[q] + 1.0);
                    const double wq = 0.5 * h * gr.w[q];
                    const cplx m = tb.eval(part, t, eta);
                    const double fhat =
                        std::pow(sigma_x, 3.0) * std::exp(-0.5 * sigma_x * sigma_x * eta * eta);
                    const double sinc = (x * eta < 1e-8) ? 1.0 : std::sin(eta * x) / (eta * x);
                    acc += wq * eta * eta * sinc * fhat * m.real();
                }
            }
            wc.points.push_back({t, x, ampl * acc});
        }
    }
    return wc;
}

double EnvelopeFamily::evaluate(double t, double x, double D) const {
    const double op = 1.0 + t;
    double v = std::exp(-x * x / (D * op));
    if (c > 0)
        v += std::pow(op, -0.5) * std::exp(-(x - c * t) * (x - c * t) / (D * op));
    v *= std::pow(op, -p);
    v += std::exp(-(x + t) / D);
    if (cone && c > 0 && x <= c * t) v += std::pow(op, -p) * std::pow(1.0 + x * x / op, -1.5);
    return v;
}

EnvelopeFit envelope_fit(const WaveComponent& wc, const EnvelopeFamily& fam,
                         const std::vector<double>& D_grid) {
    EnvelopeFit fit;
    fit.D_grid = D_grid;
    double C_min = std::numeric_limits<double>::infinity();
    for (double D : D_grid) {
        double C = 0.0;
        bool ok = true;
        for (const auto& p : wc.points) {
            const double env = fam.evaluate(p.t, p.x, D);
            if (env <= 0.0) {
                if (std::abs(p.value) > 0) ok = false;
                continue;
            }
            C = std::max(C, std::abs(p.value) / env);
        }
        fit.C_of_D.push_back(ok ? C : std::numeric_limits<double>::infinity());
        if (ok) C_min = std::min(C_min, C);
    }
    // pick the tightest width: the smallest D whose constant is within 5% of
    // the minimum (larger D always loosens the Gaussian factors)
    fit.C_fit = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < D_grid.size(); ++i) {
        if (fit.C_of_D[i] <= C_min * 1.05) {
            fit.C_fit = fit.C_of_D[i];
            fit.D_fit = D_grid[i];
            break;
        }
    }
    fit.finite = std::isfinite(fit.C_fit);
    if (fit.finite) {
        for (const auto& p : wc.points) {
            const double env = fam.evaluate(p.t, p.x, fit.D_fit);
            if (env > 0 && std::abs(p.value) / env >= 0.9 * fit.C_fit) ++fit.tight_count;
        }
    }
    return fit;
}

}  // namespace rbgf
