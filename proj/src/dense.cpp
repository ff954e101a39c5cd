#include "rbgf/dense.hpp"

#include <lapacke.h>

#include <cmath>

namespace rbgf {

SymEig sym_eig(const Mat& A) {
    SymEig out;
    out.vectors = A;
    const int n = static_cast<int>(A.rows());
    out.values.resize(n);
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                              out.values.data());
    if (info != 0) throw numeric_error("dsyevd failed, info=" + std::to_string(info));
    return out;
}

ComplexEig complex_eig(const CMat& A) {
    ComplexEig out;
    const int n = static_cast<int>(A.rows());
    CMat work = A;
    out.values.resize(n);
    out.vectors.resize(n, n);
    int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n,
                             reinterpret_cast<lapack_complex_double*>(work.data()), n,
                             reinterpret_cast<lapack_complex_double*>(out.values.data()), nullptr,
                             1, reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n);
    if (info != 0) throw numeric_error("zgeev failed, info=" + std::to_string(info));
    return out;
}

CSymSolver::CSymSolver(CMat A) : f_(std::move(A)), ipiv_(f_.rows()) {
    const int n = static_cast<int>(f_.rows());
    int info = LAPACKE_zsytrf(LAPACK_COL_MAJOR, 'L', n,
                              reinterpret_cast<lapack_complex_double*>(f_.data()), n,
                              ipiv_.data());
    if (info != 0) throw numeric_error("zsytrf failed, info=" + std::to_string(info));
}

CVec CSymSolver::solve(const CVec& rhs) const {
    CVec x = rhs;
    const int n = static_cast<int>(f_.rows());
    int info = LAPACKE_zsytrs(LAPACK_COL_MAJOR, 'L', n, 1,
                              reinterpret_cast<const lapack_complex_double*>(f_.data()), n,
                              ipiv_.data(), reinterpret_cast<lapack_complex_double*>(x.data()), n);
    if (info != 0) throw numeric_error("zsytrs failed");
    return x;
}

CMat CSymSolver::solve(const CMat& rhs) const {
    CMat x = rhs;
    const int n = static_cast<int>(f_.rows());
    int info = LAPACKE_zsytrs(LAPACK_COL_MAJOR, 'L', n, static_cast<int>(rhs.cols()),
                              reinterpret_cast<const lapack_complex_double*>(f_.data()), n,
                              ipiv_.data(), reinterpret_cast<lapack_complex_double*>(x.data()), n);
    if (info != 0) throw numeric_error("zsytrs failed");
    return x;
}

CluSolver::CluSolver(CMat A) : f_(std::move(A)), ipiv_(f_.rows()) {
    const int n = static_cast<int>(f_.rows());
    int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n,
                              reinterpret_cast<lapack_complex_double*>(f_.data()), n,
                              ipiv_.data());
    if (info != 0) throw numeric_error("zgetrf failed, info=" + std::to_string(info));
}

CVec CluSolver::solve(const CVec& rhs) const {
    CVec x = rhs;
    const int n = static_cast<int>(f_.rows());
    int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1,
                              reinterpret_cast<const lapack_complex_double*>(f_.data()), n,
                              ipiv_.data(), reinterpret_cast<lapack_complex_double*>(x.data()), n);
    if (info != 0) throw numeric_error("zgetrs failed");
    return x;
}

CMat CluSolver::solve(const CMat& rhs) const {
    CMat x = rhs;
    const int n = static_cast<int>(f_.rows());
    int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, static_cast<int>(rhs.cols()),
                              reinterpret_cast<const lapack_complex_double*>(f_.data()), n,
                              ipiv_.data(), reinterpret_cast<lapack_complex_double*>(x.data()), n);
    if (info != 0) throw numeric_error("zgetrs failed");
    return x;
}

CMat expm(const CMat& A) {
    // Higham's Pade-13 scaling and squaring (same scheme as expm in standard libraries).
    static const double theta13 = 5.371920351148152;
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const int n = static_cast<int>(A.rows());
    const double nrm = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    CMat As = A / std::pow(2.0, s);

    CMat A2 = As * As;
    CMat A4 = A2 * A2;
    CMat A6 = A2 * A4;
    CMat I = CMat::Identity(n, n);
    CMat U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
                   b[3] * A2 + b[1] * I);
    CMat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 +
             b[0] * I;
    CluSolver lu(V - U);
    CMat F = lu.solve(CMat(V + U));
    for (int i = 0; i < s; ++i) F = F * F;
    return F;
}

double norm2_est(const CMat& A, int iters) {
    if (A.size() == 0) return 0.0;
    CVec x = CVec::Ones(A.cols());
    x /= x.norm();
    double prev = 0.0, cur = 0.0;
    for (int i = 0; i < iters; ++i) {
        CVec y = A * x;
        CVec z = A.adjoint() * y;
        double zn = z.norm();
        if (zn == 0.0) return 0.0;
        cur = std::sqrt(zn);
        x = z / zn;
        if (i > 3 && std::abs(cur - prev) < 1e-9 * cur) break;
        prev = cur;
    }
    return cur;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit out;
    const size_t n = x.size();
    if (n < 2) throw numeric_error("fit_line needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (size_t i = 0; i < n; ++i) {
        const double fit = out.intercept + out.slope * x[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

}  // namespace rbgf
