#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace rbgf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

/// Error categories; the CLI maps them to exit codes.
struct Error : std::runtime_error {
    enum class Kind { config, numeric, verification };
    Kind kind;
    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

inline Error numeric_error(const std::string& msg) { return Error(Error::Kind::numeric, msg); }
inline Error config_error(const std::string& msg) { return Error(Error::Kind::config, msg); }

/// Eigendecomposition of a real symmetric matrix (LAPACK dsyevd).
/// Eigenvalues ascending, columns of vectors are orthonormal eigenvectors.
struct SymEig {
    Vec values;
    Mat vectors;
};
SymEig sym_eig(const Mat& A);

/// Eigendecomposition of a general complex matrix (LAPACK zgeev).
struct ComplexEig {
    CVec values;
    CMat vectors;  // right eigenvectors, column j for values[j]
};
ComplexEig complex_eig(const CMat& A);

/// Factored complex symmetric solver (LAPACK zsytrf/zsytrs). The matrix must
/// satisfy A == A^T (no conjugation); this holds for L - z - i eta T blocks.
class CSymSolver {
  public:
    explicit CSymSolver(CMat A);  // takes ownership, factors in place
    CVec solve(const CVec& rhs) const;
    CMat solve(const CMat& rhs) const;

  private:
    CMat f_;
    std::vector<int> ipiv_;
};

/// General complex LU solver (zgesv-style via zgetrf/zgetrs).
class CluSolver {
  public:
    explicit CluSolver(CMat A);
    CVec solve(const CVec& rhs) const;
    CMat solve(const CMat& rhs) const;

  private:
    CMat f_;
    std::vector<int> ipiv_;
};

/// Matrix exponential by Pade-13 scaling and squaring.
CMat expm(const CMat& A);

/// Matrix 2-norm estimate by power iteration on A^H A (relative accuracy ~1e-6).
double norm2_est(const CMat& A, int iters = 60);

/// Least squares line fit y ~ a + b x; returns {a, b, R^2}.
struct LineFit {
    double intercept = 0, slope = 0, r2 = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rbgf
