// Batch front end: synth -> check -> evolve -> converge -> report.
//
// Exit codes: 0 success/pass, 1 usage or I/O error, 2 condition-check
// failure.  Every artifact embeds the hash of the effective configuration
// plus the tool version; downstream stages refuse inputs whose hash differs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "limitnls/hierarchy.hpp"
#include "limitnls/io.hpp"
#include "limitnls/parallel.hpp"

namespace {

using namespace limitnls;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string levels;
    double horizon = -1.0;  // <0: keep config value
    bool horizon_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string mode;
};

RunConfig effective_config(const CliOptions& opt) {
    RunConfig cfg = opt.config_path.empty() ? default_run_config() : load_run_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (!opt.levels.empty()) {
        int a = 0, b = 0;
        char tail = '\0';
        if (std::sscanf(opt.levels.c_str(), "%d..%d%c", &a, &b, &tail) != 2)
            throw std::runtime_error("invalid --levels '" + opt.levels + "': expected a..b");
        cfg.j_min = a;
        cfg.j_max = b;
    }
    if (opt.horizon_set) cfg.T = opt.horizon;
    if (opt.seed_set) cfg.generator.seed = opt.seed;
    if (!opt.mode.empty()) cfg.generator.mode = flow_from_name(opt.mode);
    cfg.validate();
    return cfg;
}

int effective_threads(const RunConfig& cfg) {
    const int cap = thread_cap();
    return cfg.threads > 0 ? std::min(cfg.threads, cap) : cap;
}

void require_hash(const std::string& got, const std::string& want, const std::string& artifact) {
    if (got != want)
        throw std::runtime_error(artifact + ": config hash mismatch (artifact " + got +
                                 ", config " + want + ") — refusing mixed inputs");
}

std::string level_traj_name(int j) { return "level_" + std::to_string(j) + ".traj"; }
std::string level_csv_name(int j) { return "level_" + std::to_string(j) + ".csv"; }

int cmd_synth(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string hash = config_hash(cfg);
    save_run_config(cfg.out_dir + "/config.json", cfg);
    save_generator(cfg.out_dir + "/generator.json", cfg.generator, hash);
    std::cout << "synth: wrote " << cfg.out_dir << "/generator.json (cfg " << hash << ")\n";
    return 0;
}

int cmd_check(const RunConfig& cfg) {
    const std::string hash = config_hash(cfg);
    std::string file_hash;
    const GeneratorSpec spec = load_generator(cfg.out_dir + "/generator.json", &file_hash);
    require_hash(file_hash, hash, cfg.out_dir + "/generator.json");
    const SeriesGenerator gen(spec);
    const ConditionParams params = cfg.condition_params();
    const ConditionReport tail = check_tail_budget(gen, params);
    const BlockEnvelopeReport env = check_block_envelope(gen, params);
    const ConditionReport nec = check_necessary_bound(gen, params);
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/verdict.json", verdict_to_json(tail, env, nec, hash));
    std::cout << "check: tail budget " << (tail.pass ? "PASS" : "FAIL") << ", block envelope "
              << (env.pass_line ? "PASS" : "FAIL") << " (torus "
              << (env.pass_torus ? "PASS" : "FAIL") << "), necessary "
              << (nec.pass ? "PASS" : "FAIL") << "\n";
    std::cout << "check: wrote " << cfg.out_dir << "/verdict.json\n";
    return tail.pass ? 0 : 2;
}

int cmd_evolve(const RunConfig& cfg) {
    const std::string hash = config_hash(cfg);
    std::string file_hash;
    const GeneratorSpec spec = load_generator(cfg.out_dir + "/generator.json", &file_hash);
    require_hash(file_hash, hash, cfg.out_dir + "/generator.json");
    const SeriesGenerator gen(spec);
    const HierarchyRun run = build_hierarchy(gen, cfg.condition_params(), cfg.solver_config(),
                                             cfg.T, cfg.resolution, effective_threads(cfg));
    std::filesystem::create_directories(cfg.out_dir);
    Manifest manifest;
    manifest.cfg_hash = hash;
    manifest.tool_version = kToolVersion;
    for (const auto& level : run.levels) {
        write_trajectory(cfg.out_dir + "/" + level_traj_name(level.j), level.traj);
        write_diagnostics_csv(cfg.out_dir + "/" + level_csv_name(level.j),
                              level.traj.diagnostics);
        manifest.levels.push_back(ManifestLevel{level.j, level.lambda, level.data.modes(),
                                                level_traj_name(level.j),
                                                level_csv_name(level.j)});
        std::cout << "evolve: level " << level.j << " lambda " << level.lambda << " modes "
                  << level.data.modes() << " snapshots " << level.traj.snapshots.size() << "\n";
    }
    save_manifest(cfg.out_dir + "/manifest.json", manifest);
    std::cout << "evolve: wrote " << cfg.out_dir << "/manifest.json\n";
    return 0;
}

// Rebuilds the in-memory hierarchy from the persisted artifacts: the series
// and exact data placement are pure functions of the generator, and the
// trajectories come from the evolve stage's files.
HierarchyRun load_run(const RunConfig& cfg, const std::string& hash) {
    std::string file_hash;
    const GeneratorSpec spec = load_generator(cfg.out_dir + "/generator.json", &file_hash);
    require_hash(file_hash, hash, cfg.out_dir + "/generator.json");
    const Manifest manifest = load_manifest(cfg.out_dir + "/manifest.json");
    require_hash(manifest.cfg_hash, hash, cfg.out_dir + "/manifest.json");

    const SeriesGenerator gen(spec);
    const ConditionParams params = cfg.condition_params();
    const LimitPeriodicSeries trunc = truncate(gen, params.depth);
    HierarchyRun run{spec, params, cfg.solver_config(), cfg.T, {}};
    for (const auto& ml : manifest.levels) {
        PeriodizationLevel per = periodize(trunc, ml.j);
        SpectralField data(per.period, ml.n_modes);
        const std::int64_t fact = factorial_checked(ml.j);
        for (const auto& t : per.series.terms())
            data.set_coeff(static_cast<int>(exact_mode(t.freq, fact)), t.amp);
        Trajectory traj = read_trajectory(cfg.out_dir + "/" + ml.trajectory);
        if (traj.lambda != per.period || traj.snapshots.front().u.modes() != ml.n_modes)
            throw std::runtime_error(ml.trajectory + ": geometry disagrees with the manifest");
        traj.config = cfg.solver_config();
        run.levels.push_back(
            HierarchyLevel{ml.j, per.period, std::move(per.series), std::move(data),
                           std::move(traj)});
    }
    return run;
}

int cmd_converge(const RunConfig& cfg) {
    const std::string hash = config_hash(cfg);
    const HierarchyRun run = load_run(cfg, hash);
    ConvergenceReport report;
    report.cauchy = cauchy_experiment(run);
    report.apriori = apriori_bound_check(run);
    report.leakage = leakage_check(run, cfg.leakage.t, cfg.leakage.proxies, cfg.leakage.ns);
    report.block_sums = a_omega_trace(run, cfg.leakage.t);
    if (cfg.continuity.enabled)
        report.continuity =
            continuity_experiment(run, cfg.continuity.t, cfg.continuity.delta0,
                                  cfg.continuity.halvings, cfg.continuity.block,
                                  cfg.continuity.mode_n);
    write_text_file(cfg.out_dir + "/report.json", report_to_json(report, hash));
    std::cout << "converge: cauchy d_line";
    for (const auto& p : report.cauchy.pairs) std::cout << " j" << p.j << "=" << p.d_line;
    std::cout << (report.cauchy.monotone_line ? " (decreasing)" : " (NOT decreasing)") << "\n";
    std::cout << "converge: wrote " << cfg.out_dir << "/report.json\n";
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    const std::string hash = config_hash(cfg);
    std::string file_hash;
    const ConvergenceReport report =
        report_from_json(read_text_file(cfg.out_dir + "/report.json"), &file_hash);
    require_hash(file_hash, hash, cfg.out_dir + "/report.json");
    write_report_csvs(cfg.out_dir, report);
    std::cout << "report: wrote cauchy.csv norms.csv leakage.csv block_sums.csv";
    if (report.continuity) std::cout << " continuity.csv";
    std::cout << " under " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"limit-periodic NLS pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "configuration file (JSON)");
    app.add_option("--out", opt.out_dir, "output directory override");
    app.add_option("--levels", opt.levels, "hierarchy range a..b");
    app.add_option("--horizon", opt.horizon, "time horizon T")->each([&](const std::string&) {
        opt.horizon_set = true;
    });
    app.add_option("--seed", opt.seed, "generator seed")->each([&](const std::string&) {
        opt.seed_set = true;
    });
    app.add_option("--mode", opt.mode, "defocusing|focusing")
        ->check(CLI::IsMember({"defocusing", "focusing"}));

    app.add_subcommand("synth", "write the generator spec");
    app.add_subcommand("check", "run the decay-condition checkers");
    app.add_subcommand("evolve", "evolve every hierarchy level");
    app.add_subcommand("converge", "compute the convergence report");
    app.add_subcommand("report", "render the report as CSV tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const RunConfig cfg = effective_config(opt);
        const std::string stage = app.get_subcommands().front()->get_name();
        if (stage == "synth") return cmd_synth(cfg);
        if (stage == "check") return cmd_check(cfg);
        if (stage == "evolve") return cmd_evolve(cfg);
        if (stage == "converge") return cmd_converge(cfg);
        if (stage == "report") return cmd_report(cfg);
        std::cerr << "unknown stage " << stage << "\n";
        return 1;
    } catch (const ConditionFailure& e) {
        std::cerr << "condition check failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
