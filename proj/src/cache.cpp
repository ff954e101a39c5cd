#include "rbgf/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rbgf/config.hpp"

namespace rbgf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string base_name(int m, int n1, int n2, double V_max) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "kernel_m%d_%dx%d_V%g", m, n1, n2, V_max);
    return buf;
}

}  // namespace

void save_kernel_table(const std::string& dir, const KernelTable& t) {
    fs::create_directories(dir);
    const std::string base = base_name(t.m, t.n1, t.n2, t.V_max);
    const int n = static_cast<int>(t.nu.size());

    // row-major payload: K then nu
    std::vector<double> payload;
    payload.reserve(static_cast<size_t>(n) * n + n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) payload.push_back(t.K(i, j));
    for (int i = 0; i < n; ++i) payload.push_back(t.nu[i]);
    const std::uint64_t checksum = fnv1a(payload.data(), payload.size() * sizeof(double));

    const fs::path bin = fs::path(dir) / (base + ".bin");
    const fs::path tmp = fs::path(dir) / (base + ".bin.tmp");
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw config_error("cache: cannot write " + tmp.string());
        f.write(reinterpret_cast<const char*>(payload.data()),
                static_cast<std::streamsize>(payload.size() * sizeof(double)));
    }
    fs::rename(tmp, bin);

    json side;
    side["mode"] = t.m;
    side["resolution"] = {t.n1, t.n2};
    side["V_max"] = t.V_max;
    side["checksum"] = checksum;
    side["format_version"] = t.format_version;
    if (t.mu_cached > 0) side["mu"] = t.mu_cached;
    const fs::path js = fs::path(dir) / (base + ".json");
    const fs::path jtmp = fs::path(dir) / (base + ".json.tmp");
    {
        std::ofstream f(jtmp);
        f << side.dump(2) << "\n";
    }
    fs::rename(jtmp, js);
}

std::optional<KernelTable> load_kernel_table(const std::string& dir, int m, int n1, int n2,
                                             double V_max, int format_version) {
    const std::string base = base_name(m, n1, n2, V_max);
    const fs::path bin = fs::path(dir) / (base + ".bin");
    const fs::path js = fs::path(dir) / (base + ".json");
    if (!fs::exists(bin) || !fs::exists(js)) return std::nullopt;

    json side;
    try {
        std::ifstream f(js);
        f >> side;
    } catch (...) {
        return std::nullopt;
    }
    if (side.value("format_version", -1) != format_version) return std::nullopt;
    if (side.value("mode", -1) != m) return std::nullopt;

    const int n = n1 * n2;
    std::vector<double> payload(static_cast<size_t>(n) * n + n);
    {
        std::ifstream f(bin, std::ios::binary);
        f.read(reinterpret_cast<char*>(payload.data()),
               static_cast<std::streamsize>(payload.size() * sizeof(double)));
        if (f.gcount() != static_cast<std::streamsize>(payload.size() * sizeof(double)))
            return std::nullopt;
    }
    const std::uint64_t checksum = fnv1a(payload.data(), payload.size() * sizeof(double));
    if (side.value("checksum", std::uint64_t(0)) != checksum) return std::nullopt;

    KernelTable t;
    t.m = m;
    t.n1 = n1;
    t.n2 = n2;
    t.V_max = V_max;
    t.format_version = format_version;
    t.K.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.K(i, j) = payload[static_cast<size_t>(i) * n + j];
    t.nu.resize(n);
    for (int i = 0; i < n; ++i) t.nu[i] = payload[static_cast<size_t>(n) * n + i];
    t.mu_cached = side.value("mu", -1.0);
    return t;
}

LinearizedOperator cached_assemble(const std::string& dir, const GridPtr& grid, int m,
                                   const CollisionInvariants& inv, const AssemblyOptions& opt) {
    auto table = load_kernel_table(dir, m, grid->n1, grid->n2, grid->V_max);
    if (table) return assemble(grid, m, inv, opt, std::move(table));
    KernelTable fresh = assemble_kernel(*grid, m, opt);
    LinearizedOperator op = assemble(grid, m, inv, opt, fresh);
    fresh.mu_cached = op.mu;
    save_kernel_table(dir, fresh);
    return op;
}

}  // namespace rbgf
