#include "rbgf/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "rbgf/dense.hpp"

namespace rbgf {

std::uint64_t fnv1a(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "[grid]\n";
    os << "res1 = " << res1 << "\n";
    os << "res2 = " << res2 << "\n";
    os << "singular_res1 = " << singular_res1 << "\n";
    os << "singular_res2 = " << singular_res2 << "\n";
    os << "V_max = " << V_max << "\n";
    os << "[quadrature]\n";
    os << "n_radial = " << n_radial << "\n";
    os << "tail_tol = " << tail_tol << "\n";
    os << "[spectral]\n";
    os << "eta_max = " << eta_max << "\n";
    os << "eta_step = " << eta_step << "\n";
    os << "amplitude_samples = " << amplitude_samples << "\n";
    os << "[picard]\n";
    os << "picard_tmax = " << picard_tmax << "\n";
    os << "picard_dt = " << picard_dt << "\n";
    os << "k_max = " << k_max << "\n";
    os << "xi_max = " << xi_max << "\n";
    os << "n_xi = " << n_xi << "\n";
    os << "[mc]\n";
    os << "seed = " << seed << "\n";
    os << "mc_samples = " << mc_samples << "\n";
    os << "[run]\n";
    os << "cache_dir = " << cache_dir << "\n";
    os << "out_dir = " << out_dir << "\n";
    os << "threads = " << threads << "\n";
    return os.str();
}

void RunConfig::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw config_error("cannot write config: " + path);
    f << serialize();
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config: " + path);
    RunConfig cfg;
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        const size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto geti = [&](const char* k, int& out) {
        if (kv.count(k)) out = std::stoi(kv[k]);
    };
    auto getd = [&](const char* k, double& out) {
        if (kv.count(k)) out = std::stod(kv[k]);
    };
    auto getu = [&](const char* k, std::uint64_t& out) {
        if (kv.count(k)) out = std::stoull(kv[k]);
    };
    auto gets = [&](const char* k, std::string& out) {
        if (kv.count(k)) out = kv[k];
    };
    geti("res1", cfg.res1);
    geti("res2", cfg.res2);
    geti("singular_res1", cfg.singular_res1);
    geti("singular_res2", cfg.singular_res2);
    getd("V_max", cfg.V_max);
    geti("n_radial", cfg.n_radial);
    getd("tail_tol", cfg.tail_tol);
    getd("eta_max", cfg.eta_max);
    getd("eta_step", cfg.eta_step);
    geti("amplitude_samples", cfg.amplitude_samples);
    getd("picard_tmax", cfg.picard_tmax);
    getd("picard_dt", cfg.picard_dt);
    geti("k_max", cfg.k_max);
    getd("xi_max", cfg.xi_max);
    geti("n_xi", cfg.n_xi);
    getu("seed", cfg.seed);
    getu("mc_samples", cfg.mc_samples);
    gets("cache_dir", cfg.cache_dir);
    gets("out_dir", cfg.out_dir);
    geti("threads", cfg.threads);
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    auto pos = [](double v, const char* name) {
        if (!(v > 0)) throw config_error(std::string("config: ") + name + " must be positive");
    };
    pos(res1, "res1");
    pos(res2, "res2");
    pos(singular_res1, "singular_res1");
    pos(singular_res2, "singular_res2");
    pos(V_max, "V_max");
    pos(n_radial, "n_radial");
    pos(tail_tol, "tail_tol");
    pos(eta_max, "eta_max");
    pos(eta_step, "eta_step");
    pos(amplitude_samples, "amplitude_samples");
    pos(picard_tmax, "picard_tmax");
    pos(picard_dt, "picard_dt");
    pos(k_max, "k_max");
    pos(xi_max, "xi_max");
    pos(n_xi, "n_xi");
    pos(static_cast<double>(mc_samples), "mc_samples");
}

std::uint64_t RunConfig::hash() const {
    const std::string s = serialize();
    return fnv1a(s.data(), s.size());
}

}  // namespace rbgf
