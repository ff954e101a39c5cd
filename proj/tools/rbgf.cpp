// Command-line front end: transport constants, spectrum branches, Green's
// function fields, singular-wave tables, coupling-lemma verification, and the
// nonlinear collision checks. Outputs CSV/JSON under --out, kernel matrices
// cached under --cache.
#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <filesystem>
#include <random>
#include <iostream>

#include "rbgf/cache.hpp"
#include "rbgf/config.hpp"
#include "rbgf/coupling.hpp"
#include "rbgf/fluid_waves.hpp"
#include "rbgf/nonlinear.hpp"
#include "rbgf/picard.hpp"
#include "rbgf/report.hpp"

using namespace rbgf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Ctx {
    RunConfig cfg;
    CollisionInvariants inv;
    Ctx(const RunConfig& c) : cfg(c), inv(compute_moments({c.n_radial, c.V_max, c.tail_tol})) {}

    LinearizedOperator op(int m, int r1, int r2) const {
        auto g = build_grid(GridMode::axisymmetric, r1, r2, cfg.V_max, m);
        return cached_assemble(cfg.cache_dir, g, m, inv);
    }
    LinearizedOperator op(int m) const { return op(m, cfg.res1, cfg.res2); }
};

void write_json(const RunConfig& cfg, const std::string& name, json j) {
    j["config_hash"] = cfg.hash();
    j["tool_version"] = tool_version();
    write_text_atomic((fs::path(cfg.out_dir) / name).string(), j.dump(2) + "\n");
}

int cmd_transport(const Ctx& ctx, bool doubling) {
    const RunConfig& cfg = ctx.cfg;
    TransportScalars ts = transport_scalars(ctx.inv);
    LinearizedOperator op0 = ctx.op(0);
    LinearizedOperator op1 = ctx.op(1);
    Spectral sp(&op0, &op1);

    json j;
    j["p0"] = ctx.inv.p0;
    j["p1"] = ctx.inv.p1;
    j["p2"] = ctx.inv.p2;
    j["p3"] = ctx.inv.p3;
    j["a"] = ts.a;
    j["b"] = ts.b;
    j["c"] = ts.c;
    j["nu0"] = op0.nu0;
    j["nu1"] = op0.nu1;
    j["mu_m0"] = op0.mu;
    j["mu_m1"] = op1.mu;
    j["A"] = {{"-1", sp.A_direct(-1)}, {"0", sp.A_direct(0)}, {"1", sp.A_direct(1)},
              {"2", sp.A_direct(2)}};
    bool pass = ts.c > 0 && sp.A_direct(-1) > 0 && sp.A_direct(0) > 0 && sp.A_direct(1) > 0 &&
                sp.A_direct(2) > 0;
    if (doubling) {
        LinearizedOperator f0 = ctx.op(0, 2 * cfg.res1, 2 * cfg.res2);
        LinearizedOperator f1 = ctx.op(1, 2 * cfg.res1, 2 * cfg.res2);
        Spectral spf(&f0, &f1);
        json d;
        d["mu_m0_fine"] = f0.mu;
        d["mu_rel_change"] = std::abs(f0.mu / op0.mu - 1.0);
        for (int b : {-1, 0, 1, 2}) {
            const double coarse = sp.A_direct(b), fine = spf.A_direct(b);
            d["A_rel_change"][std::to_string(b)] = std::abs(fine / coarse - 1.0);
            pass = pass && std::abs(fine / coarse - 1.0) < 0.01;
        }
        j["doubling"] = d;
    }
    j["pass"] = pass;
    write_json(cfg, "transport.json", j);
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 4;
}

int cmd_spectrum(const Ctx& ctx, double eta_max_arg) {
    const RunConfig& cfg = ctx.cfg;
    LinearizedOperator op0 = ctx.op(0);
    LinearizedOperator op1 = ctx.op(1);
    Spectral sp(&op0, &op1);
    const double eta_max = eta_max_arg > 0 ? eta_max_arg : cfg.eta_max;

    std::vector<EigenBranch> brs;
    for (int b : {-1, 0, 1, 2}) brs.push_back(sp.track_branch(b, eta_max, cfg.eta_step));
    bool truncated = false;
    double common = eta_max;
    for (const auto& br : brs) {
        truncated = truncated || br.diverged;
        common = std::min(common, br.eta_max_tracked);
    }
    if (truncated)
        std::cerr << "warning: continuation stopped at eta = " << common
                  << " (branch collision or validity region), CSV truncated\n";

    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < brs[0].samples.size(); ++i) {
        const double eta = brs[0].samples[i].eta;
        if (eta > common + 1e-12) break;
        std::vector<double> row{eta};
        for (const auto& br : brs) {
            cplx beta(0, 0);
            for (const auto& s : br.samples)
                if (std::abs(s.eta - eta) < 1e-12) beta = s.beta;
            row.push_back(beta.real());
            row.push_back(beta.imag());
        }
        rows.push_back(row);
    }
    write_csv((fs::path(cfg.out_dir) / "branches.csv").string(),
              {"eta", "re_beta_m1", "im_beta_m1", "re_beta_0", "im_beta_0", "re_beta_p1",
               "im_beta_p1", "re_beta_2", "im_beta_2"},
              rows);

    json j;
    j["c_fit"] = brs[2].c_fit;
    j["eta_max_tracked"] = common;
    for (size_t k = 0; k < brs.size(); ++k) {
        json b;
        b["A_fit"] = brs[k].A_fit;
        b["A_direct"] = brs[k].A_direct;
        b["richardson_order"] = brs[k].richardson_order;
        j["branches"][std::to_string(brs[k].j)] = b;
    }
    // kappa0 fits over a small eta sample
    for (double eta : {0.1, 0.3, 1.0}) {
        SectorEig eig = sector_eig(op0, eta);
        Kappa0Fit fit = fit_kappa0(eig);
        j["kappa0"][std::to_string(eta)] = {{"value", fit.kappa0}, {"r2", fit.r2}};
    }
    auto rows_gap = gap_scan(sp, {0.05, 0.3, 1.0, 5.0, 10.0});
    for (const auto& r : rows_gap)
        j["gap_scan"][std::to_string(r.eta)] = {{"rightmost_re", r.rightmost_re},
                                                {"count_above", r.count_above}};
    write_json(cfg, "spectrum.json", j);
    std::cout << "spectrum written; c_fit = " << brs[2].c_fit << "\n";
    return 0;
}

int cmd_green(const Ctx& ctx, const std::string& observable) {
    const RunConfig& cfg = ctx.cfg;
    LinearizedOperator op0 = ctx.op(0);
    LinearizedOperator op1 = ctx.op(1);
    Spectral sp(&op0, &op1);
    FluidAmplitudes fa(&sp, cfg.eta_max, cfg.amplitude_samples);

    CVec q;
    if (observable == "chi0") q = op0.X.col(0).cast<cplx>();
    else if (observable == "chi4") q = op0.X.col(2).cast<cplx>();
    else if (observable == "p1") {
        Vec r = op0.vt1.asDiagonal() * op0.X.col(0);
        r -= op0.X * (op0.X.transpose() * r);
        q = (r / r.norm()).cast<cplx>();
    } else {
        throw config_error("green: unknown observable " + observable);
    }

    const double c = sp.macro().c;
    std::vector<double> ts = {10, 25, 50, 100, 200, 400};
    std::vector<double> xs;
    for (double f : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.25, 1.5, 2.0}) xs.push_back(f * c * 100);
    WaveComponent wc = synthesize_moment_field(fa, WavePart::all, q, q, 1.0, ts, xs,
                                               observable + "-field");

    EnvelopeFamily fam;
    fam.p = (observable == "p1") ? 2.5 : 1.5;
    fam.c = c;
    fam.cone = true;
    EnvelopeFit fit = envelope_fit(wc, fam, {0.5, 1, 2, 4, 8, 16});

    std::vector<std::vector<double>> rows;
    for (const auto& p : wc.points)
        rows.push_back({p.t, p.x, p.value, fit.finite ? fit.C_fit * fam.evaluate(p.t, p.x, fit.D_fit)
                                                      : 0.0});
    write_csv((fs::path(cfg.out_dir) / ("field_" + observable + ".csv")).string(),
              {"t", "x", "value", "envelope_value"}, rows);

    json j;
    j["observable"] = observable;
    j["C_fit"] = fit.C_fit;
    j["D_fit"] = fit.D_fit;
    j["finite"] = fit.finite;
    j["pass"] = fit.finite;
    write_json(cfg, "green_" + observable + ".json", j);
    std::cout << "green: C_fit = " << fit.C_fit << " D_fit = " << fit.D_fit << "\n";
    return fit.finite ? 0 : 4;
}

int cmd_singular(const Ctx& ctx) {
    const RunConfig& cfg = ctx.cfg;
    auto g = build_grid(GridMode::axisymmetric, cfg.singular_res1, cfg.singular_res2, cfg.V_max, 0);
    LinearizedOperator op = cached_assemble(cfg.cache_dir, g, 0, ctx.inv);

    std::vector<std::vector<double>> rows;
    double sup_j3 = 0.0;
    for (int i = 0; i < cfg.n_xi; ++i) {
        const double xi = cfg.xi_max * i / std::max(1, cfg.n_xi - 1);
        PicardOptions po;
        po.k_max = cfg.k_max;
        po.t_max = cfg.picard_tmax;
        po.dt = cfg.picard_dt;
        po.shift = op.nu0;
        PicardResult pr = picard_march(op, xi, po);
        for (int r = 0; r < pr.log_norms.rows(); ++r)
            for (int k = 0; k <= cfg.k_max; k += 3)
                rows.push_back({xi, pr.t_checks[r], double(k), pr.log_norms(r, k)});
        for (int r = 0; r < pr.log_norms.rows(); ++r) {
            const double q = pr.log_norms(r, 3) + std::log1p(xi) +
                             op.nu0 * pr.t_checks[r] / 4.0;
            sup_j3 = std::max(sup_j3, std::exp(q));
        }
    }
    write_csv((fs::path(cfg.out_dir) / "singular_decay.csv").string(),
              {"xi", "t", "k", "log_norm"}, rows);
    json j;
    j["sup_J3_weighted"] = sup_j3;
    j["pass"] = std::isfinite(sup_j3);
    write_json(cfg, "singular.json", j);
    std::cout << "singular: sup ||J3||(1+xi)e^{nu0 t/4} = " << sup_j3 << "\n";
    return std::isfinite(sup_j3) ? 0 : 4;
}

int cmd_lemmas(const Ctx& ctx, std::vector<std::string> which) {
    const RunConfig& cfg = ctx.cfg;
    if (which.empty() || (which.size() == 1 && which[0] == "all"))
        which = {"4.1", "4.2", "4.3", "4.4", "4.5", "4.6", "5.1", "5.2"};
    SamplePlan plan;
    bool all_pass = true;
    for (const std::string& id : which) {
        LemmaReport rep = verify_lemma(id, plan, cfg.seed);
        all_pass = all_pass && rep.pass;
        write_text_atomic(
            (fs::path(cfg.out_dir) / ("lemma_" + id + ".json")).string(),
            lemma_report_json(rep, cfg.hash()) + "\n");
        std::cout << "lemma " << id << ": " << (rep.pass ? "pass" : "FAIL") << "\n";
    }
    return all_pass ? 0 : 4;
}

int cmd_nonlinear(const Ctx& ctx) {
    const RunConfig& cfg = ctx.cfg;
    json j;
    j["seed"] = cfg.seed;

    // conservation sweep
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd(0.0, 2.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const auto u = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
        const auto v = RelVelocity::from({nd(rng), nd(rng), nd(rng)});
        const double mu = 2.0 * uni(rng) - 1.0, ph = 2.0 * M_PI * uni(rng);
        const double st = std::sqrt(1.0 - mu * mu);
        const ScatterEvent ev =
            com_scatter(u, v, {st * std::cos(ph), st * std::sin(ph), mu});
        worst = std::max(worst, (ev.u_out.v + ev.v_out.v - u.v - v.v).norm());
        worst = std::max(worst, std::abs(ev.u_out.v0 + ev.v_out.v0 - u.v0 - v.v0));
    }
    j["conservation_defect"] = worst;
    bool pass = worst <= 1e-12;

    // invariant moments of Gamma(f,f)
    auto smooth = [](const RelVelocity& v) {
        return std::exp(-0.3 * v.v.squaredNorm()) * (1.0 + 0.5 * v.v.x());
    };
    MCSpec spec;
    spec.seed = cfg.seed;
    spec.n_samples = cfg.mc_samples;
    for (int a = 0; a < 5; ++a) {
        const MCEstimate est = gamma_moment_mc(smooth, smooth, ctx.inv, a, spec);
        j["gamma_moments"][std::to_string(a)] = {{"value", est.value},
                                                 {"stderr", est.stderr_}};
        pass = pass && std::abs(est.value) <= 3.0 * est.stderr_;
    }

    // closure composite
    TransportScalars ts = transport_scalars(ctx.inv);
    ClosureReport cr = nonlinear_closure_check(4.0, ts.c, {25, 50, 100, 200});
    j["closure"] = {{"C_composite", cr.C_composite},
                    {"ablation_growth", cr.ablation_growth},
                    {"cone_term_required", cr.cone_term_required}};
    pass = pass && cr.pass;

    j["pass"] = pass;
    write_json(cfg, "nonlinear.json", j);
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relativistic Boltzmann Green's function toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, cache_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "configuration file (key = value)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--cache", cache_dir, "kernel cache directory");
    app.add_option("--seed", seed, "64-bit seed");
    app.add_option("--threads", threads, "worker threads (0 = library default)");

    auto* t_cmd = app.add_subcommand("transport", "transport constants and coercivity");
    bool doubling = false;
    t_cmd->add_flag("--doubling", doubling, "verify stability under grid doubling");

    auto* s_cmd = app.add_subcommand("spectrum", "branch continuation and gap scan");
    double eta_max = -1;
    s_cmd->add_option("--eta-max", eta_max, "continuation range override");

    auto* g_cmd = app.add_subcommand("green", "low-frequency moment fields and envelopes");
    std::string observable = "chi0";
    g_cmd->add_option("--observable", observable, "chi0 | chi4 | p1");

    auto* j_cmd = app.add_subcommand("singular", "singular-wave decay tables");
    auto* l_cmd = app.add_subcommand("lemmas", "coupling lemma verification");
    std::vector<std::string> lemmas;
    l_cmd->add_option("--lemma", lemmas, "lemma ids (default all)");
    auto* n_cmd = app.add_subcommand("nonlinear", "collision operator Monte Carlo checks");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        if (seed != 0) cfg.seed = seed;
        if (threads != 0) cfg.threads = threads;
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
        fs::create_directories(cfg.out_dir);
        cfg.validate();
        Ctx ctx(cfg);

        if (t_cmd->parsed()) return cmd_transport(ctx, doubling);
        if (s_cmd->parsed()) return cmd_spectrum(ctx, eta_max);
        if (g_cmd->parsed()) return cmd_green(ctx, observable);
        if (j_cmd->parsed()) return cmd_singular(ctx);
        if (l_cmd->parsed()) return cmd_lemmas(ctx, lemmas);
        if (n_cmd->parsed()) return cmd_nonlinear(ctx);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind) {
            case Error::Kind::config: return 2;
            case Error::Kind::numeric: return 3;
            case Error::Kind::verification: return 4;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
