#pragma once

#include <functional>
#include <vector>

namespace rbgf {

/// Gauss-Legendre rule on [-1,1]. Nodes ascending, weights positive.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Returns the n-point Gauss-Legendre rule (cached per n, thread-safe after first use).
const GaussRule& gauss_legendre(int n);

/// Integrate f over [a,b] with an n-point Gauss-Legendre rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b, int n = 32);

/// Adaptive integration over [a,b] by bisection with embedded GL7/GL15 error
/// estimate. Absolute target tol scaled by the running magnitude.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 40);

/// Integral over [a, inf) via the map s -> a + s/(1-s).
double adaptive_integrate_to_inf(const std::function<double(double)>& f, double a,
                                 double tol = 1e-12);

}  // namespace rbgf
