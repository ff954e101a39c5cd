#include "rbgf/spectral.hpp"

#include <cmath>

namespace rbgf {

MacroBasis build_macro_basis(const LinearizedOperator& op0, const LinearizedOperator& op1) {
    MacroBasis mb;
    const Mat& X = op0.X;  // columns chi_0, chi_1, chi_4 (orthonormalized on the grid)
    const Vec vchi0 = op0.vt1.asDiagonal() * X.col(0);
    const Vec vchi1 = op0.vt1.asDiagonal() * X.col(1);
    mb.b = X.col(1).dot(vchi0);
    mb.a = X.col(2).dot(vchi1);
    mb.c = std::hypot(mb.a, mb.b);

    const double q = mb.a * mb.a + mb.b * mb.b;
    const double ca = std::sqrt(mb.b * mb.b / (2.0 * q));
    const double cc = std::sqrt(mb.a * mb.a / (2.0 * q));
    const double ch = std::sqrt(0.5);
    mb.F0.resize(X.rows(), 3);
    mb.F0.col(0) = ca * X.col(0) + ch * X.col(1) + cc * X.col(2);  // F_{-1}
    mb.F0.col(1) =
        -std::sqrt(mb.a * mb.a / q) * X.col(0) + std::sqrt(mb.b * mb.b / q) * X.col(2);  // F_0
    mb.F0.col(2) = ca * X.col(0) - ch * X.col(1) + cc * X.col(2);  // F_{+1}
    mb.F2 = op1.X.col(0);
    return mb;
}

CMat build_B(const LinearizedOperator& op, double eta) {
    CMat B = op.L.cast<cplx>();
    for (int i = 0; i < op.size(); ++i) B(i, i) -= cplx(0.0, eta * op.vt1[i]);
    return B;
}

namespace {

Mat projected_streaming(const LinearizedOperator& op) {
    const Mat V = op.vt1.asDiagonal();
    const Mat VX = V * op.X;
    const Mat XtVX = op.X.transpose() * VX;
    Mat T = V - VX * op.X.transpose() - op.X * VX.transpose() + op.X * XtVX * op.X.transpose();
    return 0.5 * (T + T.transpose());
}

Eigen::Matrix3cd adjugate3(const Eigen::Matrix3cd& A) {
    Eigen::Matrix3cd adj;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const int r1 = (r + 1) % 3, r2 = (r + 2) % 3;
            const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
            adj(c, r) = A(r1, c1) * A(r2, c2) - A(r1, c2) * A(r2, c1);
        }
    return adj;
}

}  // namespace

Spectral::Spectral(const LinearizedOperator* op0, const LinearizedOperator* op1)
    : op0_(op0), op1_(op1) {
    if (op0->m != 0 || op1->m != 1) throw config_error("Spectral: sector mismatch");
    s0_ = {op0_, projected_streaming(*op0_), 10.0};
    s1_ = {op1_, projected_streaming(*op1_), 10.0};
    mb_ = build_macro_basis(*op0_, *op1_);

    auto p1 = [](const LinearizedOperator& op, const Vec& x) -> Vec {
        return x - op.X * (op.X.transpose() * x);
    };
    rhs0_.resize(op0->size(), 3);
    for (int k = 0; k < 3; ++k)
        rhs0_.col(k) = p1(*op0_, op0_->vt1.asDiagonal() * mb_.F0.col(k));
    rhs1_ = p1(*op1_, op1_->vt1.asDiagonal() * mb_.F2);
}

CMat Spectral::resolvent_matrix(int m, cplx gamma, double eta) const {
    const Sector& s = sector(m);
    const int n = s.op->size();
    const cplx z = eta * gamma;
    CMat M = s.op->L.cast<cplx>();
    M.noalias() -= cplx(0, 1) * eta * s.T.cast<cplx>();
    // penalty keeps the macro block invertible; the solution there stays zero
    // because every right-hand side is P1-projected
    M.noalias() +=
        (s.tau + 2.0 * std::abs(z)) * (s.op->X * s.op->X.transpose()).cast<cplx>();
    M.diagonal().array() -= z;
    return M;
}

cplx Spectral::resolvent_Rkj(cplx gamma, double eta, int k, int j) const {
    if (k < 0 || k > 3 || j < 0 || j > 3) throw config_error("resolvent_Rkj: bad index");
    if ((k == 3) != (j == 3)) return cplx(0.0, 0.0);  // sector orthogonality
    const int m = (k == 3) ? 1 : 0;
    CSymSolver solver(resolvent_matrix(m, gamma, eta));
    if (m == 1) {
        const CVec r = rhs1_.cast<cplx>();
        const CVec sol = solver.solve(r);
        return sol.transpose() * r;
    }
    const CVec rk = rhs0_.col(k).cast<cplx>();
    const CVec rj = rhs0_.col(j).cast<cplx>();
    const CVec sol = solver.solve(rk);
    return sol.transpose() * rj;
}

cplx Spectral::dispersion_D0(cplx gamma, double eta) const {
    const CVec r = rhs1_.cast<cplx>();
    CSymSolver solver(resolvent_matrix(1, gamma, eta));
    const CVec sol = solver.solve(r);
    const cplx R33 = sol.transpose() * r;
    return gamma - eta * R33;
}

cplx Spectral::dispersion_D1(cplx gamma, double eta) const {
    CSymSolver solver(resolvent_matrix(0, gamma, eta));
    const CMat rhs = rhs0_.cast<cplx>();
    const CMat sol = solver.solve(rhs);
    const CMat R = sol.transpose() * rhs;
    Eigen::Matrix3cd A;
    for (int jj = 0; jj < 3; ++jj)
        for (int kk = 0; kk < 3; ++kk) A(jj, kk) = -eta * R(kk, jj);
    A(0, 0) += gamma + cplx(0, mb_.c);
    A(1, 1) += gamma;
    A(2, 2) += gamma - cplx(0, mb_.c);
    return A.determinant();
}

cplx Spectral::newton_root(bool use_D0, cplx gamma0, double eta, int max_iter, double tol) const {
    cplx gamma = gamma0;
    const double scale = std::max(1.0, std::abs(gamma0));
    for (int it = 0; it < max_iter; ++it) {
        const int m = use_D0 ? 1 : 0;
        CSymSolver solver(resolvent_matrix(m, gamma, eta));
        cplx D, dD;
        if (use_D0) {
            const CVec r = rhs1_.cast<cplx>();
            const CVec sol = solver.solve(r);
            const CVec sol2 = solver.solve(sol);  // d(M^{-1}r)/dgamma = eta M^{-2} r
            const cplx R33 = sol.transpose() * r;
            const cplx dR33 = eta * (sol2.transpose() * r).value();
            D = gamma - eta * R33;
            dD = 1.0 - eta * dR33;
        } else {
            const CMat rhs = rhs0_.cast<cplx>();
            const CMat sol = solver.solve(rhs);
            const CMat sol2 = solver.solve(CMat(sol));
            const CMat R = sol.transpose() * rhs;
            const CMat dR = eta * (sol2.transpose() * rhs);
            Eigen::Matrix3cd A, dA;
            for (int jj = 0; jj < 3; ++jj)
                for (int kk = 0; kk < 3; ++kk) {
                    A(jj, kk) = -eta * R(kk, jj);
                    dA(jj, kk) = -eta * dR(kk, jj);
                }
            A(0, 0) += gamma + cplx(0, mb_.c);
            A(1, 1) += gamma;
            A(2, 2) += gamma - cplx(0, mb_.c);
            dA(0, 0) += 1.0;
            dA(1, 1) += 1.0;
            dA(2, 2) += 1.0;
            D = A.determinant();
            dD = (adjugate3(A) * dA).trace();
        }
        if (std::abs(dD) < 1e-300) throw numeric_error("newton_root: singular derivative");
        const cplx step = D / dD;
        gamma -= step;
        if (std::abs(step) < tol * scale) return gamma;
    }
    throw numeric_error("newton_root: no convergence at eta=" + std::to_string(eta));
}

EigenBranch Spectral::track_branch(int j, double eta_max, double step) const {
    if (step <= 0) throw config_error("track_branch: step must be positive");
    EigenBranch br;
    br.j = j;
    const bool use_D0 = (j == 2 || j == 3);
    cplx gamma0;
    switch (j) {
        case -1: gamma0 = cplx(0.0, -mb_.c); break;  // gamma_j(0) = -i u_j with u_{-1} = +c
        case 0: gamma0 = cplx(0.0, 0.0); break;
        case 1: gamma0 = cplx(0.0, mb_.c); break;
        case 2:
        case 3: gamma0 = cplx(0.0, 0.0); break;
        default: throw config_error("track_branch: branch index");
    }
    br.samples.push_back({0.0, gamma0, cplx(0.0, 0.0)});

    double eta = 0.0;
    double h = step;
    int halvings = 0;
    while (eta < eta_max - 1e-12) {
        const double eta_next = std::min(eta + h, eta_max);
        cplx guess = br.samples.back().gamma;
        if (br.samples.size() >= 2) {
            const auto& s2 = br.samples[br.samples.size() - 2];
            const auto& s1 = br.samples[br.samples.size() - 1];
            if (s1.eta > s2.eta)
                guess = s1.gamma +
                        (s1.gamma - s2.gamma) * ((eta_next - s1.eta) / (s1.eta - s2.eta));
        }
        try {
            const cplx g = newton_root(use_D0, guess, eta_next);
            eta = eta_next;
            br.samples.push_back({eta, g, eta * g});
            halvings = 0;
            h = std::min(step, 2.0 * h);
        } catch (const Error&) {
            h *= 0.5;
            if (++halvings > 6) {
                br.diverged = true;
                break;
            }
        }
    }
    br.eta_max_tracked = eta;
    br.A_direct = A_direct(j);

    // leading coefficients from the small-eta samples:
    // Im beta/eta = c + O(eta^2), -Re beta/eta^2 = A_j + O(eta^2)
    std::vector<double> e2, imslope, redecay;
    for (const auto& s : br.samples) {
        if (s.eta <= 0.0 || s.eta > std::min(0.5, 0.5 * br.eta_max_tracked)) continue;
        e2.push_back(s.eta * s.eta);
        imslope.push_back(s.beta.imag() / s.eta);
        redecay.push_back(-s.beta.real() / (s.eta * s.eta));
    }
    if (e2.size() >= 3) {
        LineFit fi = fit_line(e2, imslope);
        LineFit fr = fit_line(e2, redecay);
        br.c_fit = std::abs(fi.intercept);
        br.A_fit = fr.intercept;
        br.fit_residual = std::max(1.0 - fi.r2, 1.0 - fr.r2);
    }

    // cubic remainder order by Richardson on eta, eta/2, eta/4
    const double e0 = std::min(0.4, 0.8 * br.eta_max_tracked);
    if (e0 > 0) {
        const double sgn = (j == 1) ? 1.0 : (j == -1 ? -1.0 : 0.0);
        auto rem = [&](double et) {
            const cplx g = newton_root(use_D0, gamma0, et, 20);
            const cplx beta = et * g;
            const cplx model = cplx(-br.A_direct * et * et, sgn * mb_.c * et);
            return std::abs(beta - model);
        };
        const double r1 = rem(e0), r2 = rem(0.5 * e0), r4 = rem(0.25 * e0);
        if (r2 > 0 && r4 > 0)
            br.richardson_order = std::min(std::log2(r1 / r2), std::log2(r2 / r4));
    }
    return br;
}

double Spectral::A_direct(int j) const {
    const int m = (j == 2 || j == 3) ? 1 : 0;
    const LinearizedOperator& op = this->op(m);
    const Vec rhs = (m == 1) ? rhs1_ : Vec(rhs0_.col(j + 1));
    const Mat Lreg = op.L + sector(m).tau * op.X * op.X.transpose();
    Eigen::LDLT<Mat> ldlt(Lreg);
    const Vec y = ldlt.solve(rhs);
    return -y.dot(rhs);
}

CVec Spectral::p1_resolve(int m, cplx gamma, double eta, const CVec& rhs) const {
    CSymSolver solver(resolvent_matrix(m, gamma, eta));
    return solver.solve(rhs);
}

CVec Spectral::eigenfunction_at(int j, double eta, cplx beta) const {
    if (j == 2 || j == 3) {
        const CVec r = rhs1_.cast<cplx>();
        CVec e = mb_.F2.cast<cplx>();
        if (eta != 0.0) {
            const cplx gamma = beta / eta;
            e += cplx(0, 1) * eta * p1_resolve(1, gamma, eta, r);
        }
        const cplx q = (e.transpose() * e).value();
        cplx scale = 1.0 / std::sqrt(q);
        const cplx proj = (e.transpose() * mb_.F2.cast<cplx>()).value() * scale;
        if (proj.real() < 0) scale = -scale;
        return e * scale;
    }
    if (j < -1 || j > 1) throw config_error("eigenfunction_at: branch index");

    const cplx gamma = (eta != 0.0) ? beta / eta : cplx(0, 0);
    CSymSolver solver(resolvent_matrix(0, gamma, eta));
    const CMat rhs = rhs0_.cast<cplx>();
    const CMat sol = solver.solve(rhs);
    const CMat R = sol.transpose() * rhs;
    Eigen::Matrix3cd A;
    for (int jj = 0; jj < 3; ++jj)
        for (int kk = 0; kk < 3; ++kk) A(jj, kk) = -eta * eta * R(kk, jj);
    A(0, 0) += beta + cplx(0, mb_.c * eta);
    A(1, 1) += beta;
    A(2, 2) += beta - cplx(0, mb_.c * eta);
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(A, Eigen::ComputeFullV);
    const Eigen::Vector3cd C = svd.matrixV().col(2);

    // e = sum C_k F_{k-1} + i eta (resolvent) P1 vt1 (macro part); the
    // resolvent solve reuses the factorization above
    CVec e = mb_.F0.cast<cplx>() * C;
    if (eta != 0.0) {
        CVec r = sol * (cplx(0, 1) * eta * C);  // = i eta M^{-1} P1 vt1 g0
        e += r;
    }
    const cplx q = (e.transpose() * e).value();
    cplx scale = 1.0 / std::sqrt(q);
    const cplx proj = (e.transpose() * mb_.F0.col(j + 1).cast<cplx>()).value() * scale;
    if (proj.real() < 0) scale = -scale;
    return e * scale;
}

CVec Spectral::eigenfunction_at(int j, double eta) const {
    const bool use_D0 = (j == 2 || j == 3);
    cplx g = (j == 1) ? cplx(0, mb_.c) : (j == -1 ? cplx(0, -mb_.c) : cplx(0, 0));
    if (eta == 0.0) return eigenfunction_at(j, 0.0, cplx(0, 0));
    const int steps = std::max(1, static_cast<int>(std::ceil(eta / 0.1)));
    for (int k = 1; k <= steps; ++k) g = newton_root(use_D0, g, eta * k / steps, 20);
    return eigenfunction_at(j, eta, eta * g);
}

double Spectral::branch_residual(int j, double eta, cplx beta, const CVec& e) const {
    const int m = (j == 2 || j == 3) ? 1 : 0;
    const CMat B = build_B(op(m), eta);
    return (B * e - beta * e).norm() / e.norm();
}

std::vector<GapScanRow> gap_scan(const Spectral& sp, const std::vector<double>& etas) {
    std::vector<GapScanRow> rows;
    const double mu = std::min(sp.op(0).mu, sp.op(1).mu);
    for (double eta : etas) {
        GapScanRow row;
        row.eta = eta;
        row.rightmost_re = -1e300;
        row.count_above = 0;
        for (int m : {0, 1}) {
            ComplexEig e = complex_eig(build_B(sp.op(m), eta));
            for (int i = 0; i < e.values.size(); ++i) {
                const double re = e.values[i].real();
                row.rightmost_re = std::max(row.rightmost_re, re);
                if (re >= -0.5 * mu) row.count_above += (m == 0) ? 1 : 2;  // m = -1 twin
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rbgf
