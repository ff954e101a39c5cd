#include "rbgf/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rbgf {

SectorEig sector_eig(const LinearizedOperator& op, double eta) {
    SectorEig se;
    se.eta = eta;
    se.m = op.m;
    ComplexEig e = complex_eig(build_B(op, eta));
    const int n = static_cast<int>(e.values.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return e.values[a].real() > e.values[b].real(); });
    se.values.resize(n);
    se.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
        se.values[i] = e.values[idx[i]];
        CVec v = e.vectors.col(idx[i]);
        const cplx q = (v.transpose() * v).value();
        if (std::abs(q) < 1e-12)
            throw numeric_error("sector_eig: defective bilinear normalization");
        se.vectors.col(i) = v / std::sqrt(q);
    }
    se.n_fluid = 0;
    for (int i = 0; i < n; ++i)
        if (se.values[i].real() >= -0.5 * op.mu) ++se.n_fluid;
    return se;
}

double SectorEig::log_norm_tail(double t, int lo) const {
    const int n = static_cast<int>(values.size());
    if (lo >= n) return -std::numeric_limits<double>::infinity();
    const double re0 = values[lo].real();
    CMat acc = CMat::Zero(n, n);
    for (int j = lo; j < n; ++j) {
        const cplx w = std::exp((values[j] - re0) * t);
        if (std::abs(w) < 1e-280) continue;
        acc.noalias() += w * (vectors.col(j) * vectors.col(j).transpose());
    }
    const double nn = norm2_est(acc);
    if (nn <= 0.0) return -std::numeric_limits<double>::infinity();
    return re0 * t + std::log(nn);
}

CMat SectorEig::propagator(double t, int lo, int hi) const {
    const int n = static_cast<int>(values.size());
    CMat acc = CMat::Zero(n, n);
    for (int j = lo; j < std::min(hi, n); ++j) {
        const cplx w = std::exp(values[j] * t);
        acc.noalias() += w * (vectors.col(j) * vectors.col(j).transpose());
    }
    return acc;
}

SemigroupSnapshot semigroup_snapshot(const LinearizedOperator& op, const SectorEig& eig,
                                     double t) {
    if (t < 0) throw config_error("semigroup_snapshot: t must be >= 0");
    if (op.m != eig.m) throw config_error("semigroup_snapshot: sector mismatch");
    SemigroupSnapshot snap;
    snap.eta = eig.eta;
    snap.t = t;
    snap.m = op.m;
    snap.S = expm(CMat(t * build_B(op, eig.eta)));
    snap.S1 = eig.propagator(t, 0, eig.n_fluid);
    snap.S2 = snap.S - snap.S1;
    return snap;
}

Kappa0Fit fit_kappa0(const SectorEig& eig, double t_lo, double t_hi, int n_samples) {
    Kappa0Fit fit;
    fit.eta = eig.eta;
    std::vector<double> ts, logs;
    for (int i = 0; i < n_samples; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (n_samples - 1.0);
        const double ln = eig.log_norm_tail(t, eig.n_fluid);
        if (!std::isfinite(ln)) continue;
        ts.push_back(t);
        logs.push_back(ln);
    }
    if (ts.size() < 3) throw numeric_error("fit_kappa0: not enough finite samples");
    LineFit lf = fit_line(ts, logs);
    fit.kappa0 = -lf.slope;
    fit.r2 = lf.r2;
    return fit;
}

}  // namespace rbgf
