#include "rbgf/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rbgf {

static GaussRule make_rule(int n) {
    // Newton iteration on Legendre polynomials, nodes from Chebyshev initial guess.
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(m + h * r.x[i]);
    return s * h;
}

namespace {

struct AdaptState {
    const std::function<double(double)>* f;
    double tol;
    double total_scale;
};

double adapt_rec(AdaptState& st, double a, double b, int depth, int max_depth) {
    const double c = 0.5 * (a + b);
    double coarse = gl_integrate(*st.f, a, b, 7);
    double fine = gl_integrate(*st.f, a, c, 15) + gl_integrate(*st.f, c, b, 15);
    double err = std::abs(fine - coarse);
    if (depth >= max_depth || err < st.tol * (1.0 + std::abs(st.total_scale))) return fine;
    return adapt_rec(st, a, c, depth + 1, max_depth) + adapt_rec(st, c, b, depth + 1, max_depth);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth) {
    if (!(a < b)) return 0.0;
    AdaptState st{&f, tol, 0.0};
    st.total_scale = std::abs(gl_integrate(f, a, b, 15));
    return adapt_rec(st, a, b, 0, max_depth);
}

double adaptive_integrate_to_inf(const std::function<double(double)>& f, double a, double tol) {
    auto mapped = [&](double s) {
        const double t = a + s / (1.0 - s);
        const double jac = 1.0 / ((1.0 - s) * (1.0 - s));
        return f(t) * jac;
    };
    return adaptive_integrate(mapped, 0.0, 1.0 - 1e-14, tol);
}

}  // namespace rbgf
