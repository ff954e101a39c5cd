#pragma once

#include <cstdint>
#include <string>

namespace rbgf {

/// Flat key = value configuration with [section] headers, diff-friendly.
struct RunConfig {
    // [grid]
    int res1 = 32, res2 = 16;            // operator resolution (rho x theta)
    int singular_res1 = 16, singular_res2 = 8;
    double V_max = 12.0;
    // [quadrature]
    int n_radial = 256;
    double tail_tol = 1e-3;
    // [spectral]
    double eta_max = 12.0;
    double eta_step = 0.1;
    int amplitude_samples = 81;
    // [picard]
    double picard_tmax = 0.2;
    double picard_dt = 1e-3;
    int k_max = 12;
    double xi_max = 50.0;
    int n_xi = 8;
    // [mc]
    std::uint64_t seed = 2024;
    std::uint64_t mc_samples = 200000;
    // [run]
    std::string cache_dir = "cache";
    std::string out_dir = "out";
    int threads = 0;

    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
    std::string serialize() const;
    std::uint64_t hash() const;
    void validate() const;  // throws config errors on nonpositive fields
};

std::uint64_t fnv1a(const void* data, size_t n);

}  // namespace rbgf
