#include "rbgf/picard.hpp"

#include <cmath>

#include "rbgf/quadrature.hpp"

namespace rbgf {

namespace {

/// phi1(z) = (1 - e^{-z})/z and phi2(z) = (phi1(z) - e^{-z})/z, stable near 0.
void phi_functions(cplx z, cplx& phi1, cplx& phi2) {
    if (std::abs(z) < 1e-3) {
        const cplx z2 = z * z;
        phi1 = 1.0 - z / 2.0 + z2 / 6.0 - z2 * z / 24.0;
        phi2 = 0.5 - z / 3.0 + z2 / 8.0 - z2 * z / 30.0;
        return;
    }
    const cplx ez = std::exp(-z);
    phi1 = (1.0 - ez) / z;
    phi2 = (phi1 - ez) / z;
}

struct StepCoeffs {
    CVec E;      // e^{-a dt}
    CVec w_new;  // dt (phi1 - phi2)
    CVec w_old;  // dt phi2
};

StepCoeffs step_coeffs(const CVec& a, double dt) {
    StepCoeffs sc;
    const int n = static_cast<int>(a.size());
    sc.E.resize(n);
    sc.w_new.resize(n);
    sc.w_old.resize(n);
    for (int i = 0; i < n; ++i) {
        const cplx z = a[i] * dt;
        cplx p1, p2;
        phi_functions(z, p1, p2);
        sc.E[i] = std::exp(-z);
        sc.w_new[i] = dt * (p1 - p2);
        sc.w_old[i] = dt * p2;
    }
    return sc;
}

CVec shifted_rates(const LinearizedOperator& op, double u_re, double b_imag, double shift) {
    const int n = op.size();
    CVec a(n);
    for (int i = 0; i < n; ++i)
        a[i] = cplx(op.nu[i] - shift - b_imag * op.vt1[i], u_re * op.vt1[i]);
    return a;
}

double cap_dt(const LinearizedOperator& op, double u_re, double b_imag, double shift,
              double dt) {
    // the fastest scale the trapezoidal interpolation must resolve is the
    // residual decay max|nu - shift| plus the streaming phase
    const double dnu = std::max(std::abs(op.nu.maxCoeff() - shift),
                                std::abs(op.nu.minCoeff() - shift));
    const double rate = std::abs(u_re) + std::abs(b_imag) + dnu + 1.0;
    return std::min(dt, 0.2 / rate);
}

}  // namespace

CMat raw_symbol_generator(const LinearizedOperator& op, double u_re, double b_imag,
                          double shift) {
    const int n = op.size();
    CMat B = op.K.cast<cplx>();
    for (int i = 0; i < n; ++i)
        B(i, i) += cplx(-op.nu[i] + shift + b_imag * op.vt1[i], -u_re * op.vt1[i]);
    return B;
}

PicardResult picard_march(const LinearizedOperator& op, double u_re, PicardOptions opt) {
    if (2.0 * std::abs(opt.b_imag) > op.nu0)
        throw config_error("picard_march: imaginary shift exceeds nu0/2");
    const int n = op.size();
    const int K = opt.k_max;
    PicardResult out;
    out.u_re = u_re;
    out.b_imag = opt.b_imag;
    out.shift = opt.shift;

    const double dt = cap_dt(op, u_re, opt.b_imag, opt.shift, opt.dt);
    const int n_steps = static_cast<int>(std::ceil(opt.t_max / dt));
    const CVec a = shifted_rates(op, u_re, opt.b_imag, opt.shift);
    const StepCoeffs sc = step_coeffs(a, dt);

    CVec J0 = CVec::Ones(n);                     // diagonal of J_0, exact
    std::vector<CMat> J(K + 1), Gprev(K);        // Gprev[k] = K J_k(t)
    for (int k = 1; k <= K; ++k) J[k] = CMat::Zero(n, n);
    for (int k = 0; k < K; ++k) Gprev[k] = CMat::Zero(n, n);
    Gprev[0] = op.K.cast<cplx>();  // K J_0(0) = K

    std::vector<int> snap_steps;
    for (double ts : opt.snapshot_times)
        snap_steps.push_back(std::max(0, std::min(n_steps, static_cast<int>(std::round(ts / dt)))));

    auto record_norms = [&](double t) {
        std::vector<double> row(K + 1);
        double j0max = 0.0;
        for (int i = 0; i < n; ++i) j0max = std::max(j0max, std::abs(J0[i]));
        row[0] = (j0max > 0 ? std::log(j0max) : -1e300) - opt.shift * t;
        for (int k = 1; k <= K; ++k) {
            const double nn = norm2_est(J[k], 25);
            row[k] = (nn > 0 ? std::log(nn) : -1e300) - opt.shift * t;
        }
        out.t_checks.push_back(t);
        const int r = static_cast<int>(out.t_checks.size());
        out.log_norms.conservativeResize(r, K + 1);
        for (int k = 0; k <= K; ++k) out.log_norms(r - 1, k) = row[k];
    };

    auto maybe_snapshot = [&](int step, double t) {
        for (size_t si = 0; si < snap_steps.size(); ++si) {
            if (snap_steps[si] != step) continue;
            std::vector<CMat> mats;
            mats.push_back(CMat(J0.asDiagonal()));
            for (int k = 1; k <= K; ++k) mats.push_back(J[k]);
            out.t_snapshots.push_back(t);
            out.J_snapshots.push_back(std::move(mats));
        }
    };

    record_norms(0.0);
    maybe_snapshot(0, 0.0);
    for (int step = 1; step <= n_steps; ++step) {
        const double t = step * dt;
        // update top-down in k so J_{k-1} is refreshed first
        for (int k = 1; k <= K; ++k) {
            CMat Gnew;
            if (k == 1) {
                // J_0 at the new time, diagonal
                CVec J0n = sc.E.cwiseProduct(J0);
                Gnew = op.K.cast<cplx>() * J0n.asDiagonal();
                J[1] = sc.E.asDiagonal() * J[1];
                J[1].noalias() += sc.w_new.asDiagonal() * Gnew;
                J[1].noalias() += sc.w_old.asDiagonal() * Gprev[0];
                J0 = J0n;
                Gprev[0] = std::move(Gnew);
            } else {
                Gnew.noalias() = op.K.cast<cplx>() * J[k - 1];  // J_{k-1} already updated
                J[k] = sc.E.asDiagonal() * J[k];
                J[k].noalias() += sc.w_new.asDiagonal() * Gnew;
                J[k].noalias() += sc.w_old.asDiagonal() * Gprev[k - 1];
                Gprev[k - 1] = std::move(Gnew);
            }
        }
        if (step % opt.norm_stride == 0 || step == n_steps) record_norms(t);
        maybe_snapshot(step, t);
    }
    return out;
}

PicardApplyResult picard_apply(const LinearizedOperator& op, double u_re, PicardOptions opt,
                               const CVec& g0) {
    if (2.0 * std::abs(opt.b_imag) > op.nu0)
        throw config_error("picard_apply: imaginary shift exceeds nu0/2");
    const int n = op.size();
    const int K = opt.k_max;
    PicardApplyResult out;
    out.u_re = u_re;
    out.b_imag = opt.b_imag;
    out.shift = opt.shift;

    const double dt = cap_dt(op, u_re, opt.b_imag, opt.shift, opt.dt);
    const int n_steps = static_cast<int>(std::ceil(opt.t_max / dt));
    const CVec a = shifted_rates(op, u_re, opt.b_imag, opt.shift);
    const StepCoeffs sc = step_coeffs(a, dt);

    std::vector<CVec> u(K + 1), gprev(K);
    u[0] = g0;
    for (int k = 1; k <= K; ++k) u[k] = CVec::Zero(n);
    for (int k = 0; k < K; ++k) gprev[k] = CVec::Zero(n);
    gprev[0] = op.K.cast<cplx>() * g0;

    std::vector<int> snap_steps;
    for (double ts : opt.snapshot_times)
        snap_steps.push_back(std::max(0, std::min(n_steps, static_cast<int>(std::round(ts / dt)))));

    auto record = [&](double t) {
        out.t_checks.push_back(t);
        const int r = static_cast<int>(out.t_checks.size());
        out.log_norms.conservativeResize(r, K + 1);
        for (int k = 0; k <= K; ++k) {
            const double nn = u[k].norm();
            out.log_norms(r - 1, k) = (nn > 0 ? std::log(nn) : -1e300) - opt.shift * t;
        }
    };
    auto maybe_snapshot = [&](int step, double t) {
        for (size_t si = 0; si < snap_steps.size(); ++si) {
            if (snap_steps[si] != step) continue;
            out.t_snapshots.push_back(t);
            out.vec_snapshots.push_back(u);
        }
    };

    record(0.0);
    maybe_snapshot(0, 0.0);
    const CMat Kc = op.K.cast<cplx>();
    for (int step = 1; step <= n_steps; ++step) {
        const double t = step * dt;
        for (int k = 1; k <= K; ++k) {
            CVec gnew;
            if (k == 1) {
                u[0] = sc.E.cwiseProduct(u[0]);
                gnew.noalias() = Kc * u[0];
            } else {
                gnew.noalias() = Kc * u[k - 1];
            }
            u[k] = sc.E.cwiseProduct(u[k]) + sc.w_new.cwiseProduct(gnew) +
                   sc.w_old.cwiseProduct(gprev[k - 1]);
            gprev[k - 1] = std::move(gnew);
        }
        if (step % opt.norm_stride == 0 || step == n_steps) record(t);
        maybe_snapshot(step, t);
    }
    return out;
}

double remainder_log_norm(const LinearizedOperator& op, const PicardResult& pr,
                          int snapshot_index, int k) {
    const double t = pr.t_snapshots.at(snapshot_index);
    const CMat B = raw_symbol_generator(op, pr.u_re, pr.b_imag, pr.shift);
    CMat R = expm(CMat(t * B));
    const auto& mats = pr.J_snapshots[snapshot_index];
    for (int i = 0; i <= 3 * k && i < static_cast<int>(mats.size()); ++i) R -= mats[i];
    const double nn = norm2_est(R);
    return (nn > 0 ? std::log(nn) : -1e300) - pr.shift * t;
}

cplx remainder_moment(const LinearizedOperator& op, const PicardResult& pr, int snapshot_index,
                      int k, const CVec& q_out, const CVec& q_in) {
    const double t = pr.t_snapshots.at(snapshot_index);
    const CMat B = raw_symbol_generator(op, pr.u_re, pr.b_imag, pr.shift);
    CMat R = expm(CMat(t * B));
    const auto& mats = pr.J_snapshots[snapshot_index];
    for (int i = 0; i <= 3 * k && i < static_cast<int>(mats.size()); ++i) R -= mats[i];
    const cplx val = (q_out.transpose() * R * q_in).value();
    return val * std::exp(-pr.shift * t);
}

double radial_field_from_symbol(const std::vector<cplx>& m, double eta_max, double x,
                                double tail_power) {
    const int n = static_cast<int>(m.size());
    if (n < 4) throw config_error("radial_field_from_symbol: too few samples");
    auto interp = [&](double eta) -> cplx {
        const double h = eta_max / (n - 1.0);
        double u = eta / h;
        int i = static_cast<int>(std::floor(u));
        i = std::max(0, std::min(i, n - 2));
        const double f = u - i;
        const cplx p0 = m[std::max(i - 1, 0)], p1 = m[i], p2 = m[i + 1],
                   p3 = m[std::min(i + 2, n - 1)];
        const cplx A = 2.0 * p1, Bc = p2 - p0, C = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3,
                   D = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
        return 0.5 * (A + (Bc + (C + D * f) * f) * f);
    };
    const double ampl = 4.0 * M_PI / std::pow(2.0 * M_PI, 1.5);
    auto integrand = [&](double eta, const cplx& mv) {
        const double z = eta * x;
        const double sinc = (z < 1e-8) ? 1.0 : std::sin(z) / z;
        return eta * eta * sinc * mv.real();
    };
    // resolved panels over the sampled band
    const double period = (x > 1e-9) ? M_PI / x : eta_max;
    const double hpanel = std::min(eta_max / (n - 1.0) * 2.0, period / 4.0);
    const int panels = std::max(8, static_cast<int>(std::ceil(eta_max / hpanel)));
    const GaussRule& gr = gauss_legendre(8);
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = eta_max * p / panels, b = eta_max * (p + 1) / panels;
        for (int q = 0; q < 8; ++q) {
            const double eta = 0.5 * (a + b) + 0.5 * (b - a) * gr.x[q];
            acc += 0.5 * (b - a) * gr.w[q] * integrand(eta, interp(eta));
        }
    }
    // algebraic tail model A (1+eta)^{-p} matched at the band edge
    const cplx A_tail = m[n - 1] * std::pow(1.0 + eta_max, tail_power);
    const double eta_far = eta_max + ((x > 1e-9) ? 60.0 * M_PI / x : 20.0 * eta_max);
    const int tpanels = std::max(16, static_cast<int>(std::ceil((eta_far - eta_max) / hpanel)));
    for (int p = 0; p < tpanels; ++p) {
        const double a = eta_max + (eta_far - eta_max) * p / tpanels;
        const double b = eta_max + (eta_far - eta_max) * (p + 1) / tpanels;
        for (int q = 0; q < 8; ++q) {
            const double eta = 0.5 * (a + b) + 0.5 * (b - a) * gr.x[q];
            const cplx mv = A_tail * std::pow(1.0 + eta, -tail_power);
            acc += 0.5 * (b - a) * gr.w[q] * integrand(eta, mv);
        }
    }
    return ampl * acc;
}

}  // namespace rbgf
