// Benchmark of the OpenMP kernels against their serial references: operator
// assembly, Monte-Carlo collision sampling, and the coupling-lattice sweep.
#include <omp.h>

#include <cstdio>

#include "rbgf/collision.hpp"
#include "rbgf/coupling.hpp"
#include "rbgf/nonlinear.hpp"

using namespace rbgf;

int main(int argc, char** argv) {
    int n1 = 24, n2 = 12;
    if (argc > 2) {
        n1 = std::atoi(argv[1]);
        n2 = std::atoi(argv[2]);
    }
    std::printf("threads available: %d\n", omp_get_max_threads());
    CollisionInvariants inv = compute_moments(QuadratureSpec{});
    auto g = build_grid(GridMode::axisymmetric, n1, n2, 12.0, 0);

    double t0 = omp_get_wtime();
    KernelTable serial = assemble_kernel_serial(*g, 0);
    double t1 = omp_get_wtime();
    KernelTable parallel = assemble_kernel(*g, 0);
    double t2 = omp_get_wtime();
    const double dev = (serial.K - parallel.K).cwiseAbs().maxCoeff();
    std::printf("assembly %dx%d:   serial %.2f s | parallel %.2f s | speedup %.2fx | max dev %.1e\n",
                n1, n2, t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), dev);

    auto smooth = [](const RelVelocity& v) {
        return std::exp(-0.3 * v.v.squaredNorm()) * (1.0 + 0.5 * v.v.x());
    };
    const auto probe = RelVelocity::from({0.8, 0.3, -0.2});
    MCSpec spec;
    spec.n_samples = 2000000;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    t0 = omp_get_wtime();
    MCEstimate ser = gamma_mc(smooth, smooth, probe, spec);
    t1 = omp_get_wtime();
    omp_set_num_threads(saved);
    MCEstimate par = gamma_mc(smooth, smooth, probe, spec);
    t2 = omp_get_wtime();
    std::printf("monte carlo 2e6:  serial %.2f s | parallel %.2f s | speedup %.2fx | identical %s\n",
                t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), ser.value == par.value ? "yes" : "NO");

    CouplingIntegral ci;
    ci.kind = CouplingIntegral::Kind::I;
    ci.alpha = 2;
    ci.beta = 3;
    ci.mu = 0.5585;
    ci.D = 1;
    ci.D1 = 16;
    t0 = omp_get_wtime();
    double acc = 0;
#pragma omp parallel for reduction(+ : acc) schedule(dynamic)
    for (int i = 0; i < 64; ++i) acc += eval_coupling(ci, 50.0, i * 0.5);
    t1 = omp_get_wtime();
    double acc2 = 0;
    for (int i = 0; i < 64; ++i) acc2 += eval_coupling(ci, 50.0, i * 0.5);
    t2 = omp_get_wtime();
    std::printf("coupling lattice: parallel %.2f s | serial %.2f s | speedup %.2fx | dev %.1e\n",
                t1 - t0, t2 - t1, (t2 - t1) / (t1 - t0), std::abs(acc - acc2));
    return 0;
}
