// SPDX-License-Identifier: Apache-2.0
//
// tandemq — equilibrium and sojourn-time analysis of a two-node tandem
// queue with balking under total-occupancy information.
//
//   solve     equilibrium threshold for one parameter set (JSON or CSV)
//   table     full-information sojourn-time grid (CSV)
//   simulate  seeded event simulation under a K-strategy (JSON)
//   sweep     threshold as one parameter varies (CSV)
//   validate  cross-oracle consistency suite
//
// Exit codes: 0 success, 1 validation-suite failure, 2 usage or parameter
// error, 3 resource limit or unresolved scan.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tandemq/json_io.hpp"
#include "tandemq/log.hpp"
#include "tandemq/tandemq.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Collects what one invocation produced and writes the run manifest
/// (<command>.manifest.json) next to the artifacts.
struct RunContext {
    explicit RunContext(std::string command_name, fs::path dir)
        : command(std::move(command_name)), outdir(std::move(dir)) {}

    std::string command;
    fs::path outdir;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
    json parameters = json::object();
    std::vector<std::string> outputs;
    std::optional<std::uint64_t> seed;

    void write_artifact(const std::string& name, const std::string& bytes) {
        fs::create_directories(outdir);
        const fs::path path = outdir / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        outputs.push_back(name);
        tandemq::log_info("wrote " + path.string());
    }

    void write_manifest() {
        const double duration =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        json manifest{{"command", command},
                      {"parameters", parameters},
                      {"outputs", outputs},
                      {"version", tandemq::version_string},
                      {"duration_seconds", duration}};
        if (seed) manifest["seed"] = *seed;
        fs::create_directories(outdir);
        std::ofstream os(outdir / (command + ".manifest.json"), std::ios::binary);
        os << manifest.dump(2) << '\n';
    }
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read config file " + path);
    json cfg;
    is >> cfg;
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    return cfg;
}

/// Flag value if given, else the config key, else the default; throws a
/// usage error when required and absent everywhere.
template <typename T>
T resolve_value(const json& cfg, const std::optional<T>& flag, const std::string& key,
                std::optional<T> fallback = std::nullopt) {
    if (flag) return *flag;
    if (cfg.contains(key)) return cfg.at(key).get<T>();
    if (fallback) return *fallback;
    throw UsageError("missing required parameter --" + key + " (flag or config key '" + key + "')");
}

/// The six model parameters, each settable by flag or config file.
struct ModelFlags {
    std::optional<double> lambda, mu1, mu2, reward, c1, c2;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "arrival rate (> 0)");
        cmd->add_option("--mu1", mu1, "node-1 service rate (> 0)");
        cmd->add_option("--mu2", mu2, "node-2 service rate (> 0)");
        cmd->add_option("--R", reward, "reward for completed service (>= 0)");
        cmd->add_option("--c1", c1, "node-1 sojourn cost per unit time (>= 0)");
        cmd->add_option("--c2", c2, "node-2 sojourn cost per unit time (>= 0)");
    }

    tandemq::ModelParams resolve(const json& cfg, const std::string& skip = {},
                                 bool economics_default_zero = false) const {
        tandemq::ModelParams p;
        const std::optional<double> placeholder = 1.0;
        const std::optional<double> zero = 0.0;
        auto pick = [&](const std::optional<double>& flag, const char* key,
                        bool economic) -> double {
            if (key == skip) return resolve_value<double>(cfg, flag, key, placeholder);
            return resolve_value<double>(cfg, flag, key,
                                         (economic && economics_default_zero) ? zero : std::nullopt);
        };
        p.lambda = pick(lambda, "lambda", false);
        p.mu1 = pick(mu1, "mu1", false);
        p.mu2 = pick(mu2, "mu2", false);
        p.reward = pick(reward, "R", true);
        p.cost1 = pick(c1, "c1", true);
        p.cost2 = pick(c2, "c2", true);
        return p;
    }
};

void require_valid_or_usage(const tandemq::ModelParams& p, bool allow_degenerate = false) {
    const tandemq::ValidationReport rep = tandemq::validate(p, allow_degenerate);
    if (rep.ok) return;
    std::string msg;
    for (const auto& c : rep.checks)
        if (!c.ok) {
            if (!msg.empty()) msg += "; ";
            msg += c.message;
        }
    throw UsageError(msg);
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    ModelFlags model;
    std::string config_path;
    std::optional<int> cap;
    std::string format = "json";
    std::string outdir = "out";
};

int run_solve(const SolveArgs& args) {
    const json cfg = load_config(args.config_path);
    const tandemq::ModelParams params = args.model.resolve(cfg);
    require_valid_or_usage(params);
    const int cap = resolve_value<int>(cfg, args.cap, "cap", 10000);
    if (cap < 1) throw UsageError("--cap must be >= 1");

    RunContext ctx("solve", args.outdir);
    ctx.parameters = tandemq::params_to_json(params);
    ctx.parameters["cap"] = cap;
    ctx.parameters["format"] = args.format;

    const tandemq::ThresholdResult res = tandemq::find_threshold(params, cap);

    if (args.format == "csv") {
        std::ostringstream os;
        tandemq::write_profile_csv(os, res.profile);
        ctx.write_artifact("solve.csv", os.str());
    } else {
        ctx.write_artifact("solve.json", tandemq::threshold_to_json(res).dump(2) + "\n");
    }
    ctx.write_manifest();

    std::cout << "outcome=" << tandemq::outcome_name(res.outcome);
    if (res.threshold) std::cout << " K=" << *res.threshold;
    std::cout << " cap=" << cap << " monotone=" << (res.conditions.any ? "true" : "false") << '\n';
    if (!res.note.empty()) std::cout << "note: " << res.note << '\n';
    return res.outcome == tandemq::ThresholdOutcome::unresolved_at_cap ? kExitResource : kExitOk;
}

// ---------------------------------------------------------------------------
// table

struct TableArgs {
    std::optional<double> mu1, mu2;
    std::string config_path;
    std::optional<int> n_max;
    std::optional<int> profile_kmax;
    int max_grid = 1500;
    std::string outdir = "out";
};

int run_table(const TableArgs& args) {
    const json cfg = load_config(args.config_path);
    const double mu1 = resolve_value<double>(cfg, args.mu1, "mu1");
    const double mu2 = resolve_value<double>(cfg, args.mu2, "mu2");
    const int n_max = resolve_value<int>(cfg, args.n_max, "nmax");
    if (n_max < 0) throw UsageError("--nmax must be >= 0");
    if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw UsageError("service rates must be > 0");
    if (args.profile_kmax && *args.profile_kmax + 1 > n_max)
        throw UsageError("--profile-kmax needs the grid to cover k+1; raise --nmax to at least " +
                         std::to_string(*args.profile_kmax + 1));

    RunContext ctx("table", args.outdir);
    ctx.parameters = json{{"mu1", mu1}, {"mu2", mu2}, {"nmax", n_max}};

    tandemq::TableOptions topt;
    topt.max_grid = args.max_grid;
    const tandemq::SojournTable table = tandemq::build_table(mu1, mu2, n_max, topt);

    std::ostringstream os;
    tandemq::write_table_csv(os, table);
    ctx.write_artifact("table.csv", os.str());

    if (args.profile_kmax) {
        ctx.parameters["profile_kmax"] = *args.profile_kmax;
        std::ostringstream ps;
        tandemq::write_cond_profile_csv(ps, table, mu1, mu2, *args.profile_kmax);
        ctx.write_artifact("profile.csv", ps.str());
    }
    ctx.write_manifest();

    std::cout << "table: n_max=" << n_max << " rows=" << tandemq::SojournTable::cell_count(n_max)
              << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    ModelFlags model;
    std::string config_path;
    std::optional<int> threshold;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> events;
    std::optional<std::uint64_t> warmup;
    std::optional<std::uint32_t> reps;
    std::uint32_t threads = 1;
    std::string outdir = "out";
};

int run_simulate(const SimulateArgs& args) {
    const json cfg = load_config(args.config_path);
    // Economics default to zero here: the event dynamics never look at
    // R, c1, c2, they are only echoed in the report.
    const tandemq::ModelParams params = args.model.resolve(cfg, {}, true);
    require_valid_or_usage(params, /*allow_degenerate=*/true);

    tandemq::SimConfig sim;
    const int K = resolve_value<int>(cfg, args.threshold, "K");
    if (K < 0) throw UsageError("--K must be >= 0");
    sim.seed = resolve_value<std::uint64_t>(cfg, args.seed, "seed");
    sim.measured_events = resolve_value<std::uint64_t>(cfg, args.events, "events");
    sim.warmup_events = resolve_value<std::uint64_t>(cfg, args.warmup, "warmup", 100000);
    sim.replications = resolve_value<std::uint32_t>(cfg, args.reps, "reps", 1);
    sim.threads = args.threads;
    if (sim.measured_events < 1) throw UsageError("--events must be >= 1");
    if (sim.replications < 1) throw UsageError("--reps must be >= 1");

    RunContext ctx("simulate", args.outdir);
    ctx.parameters = tandemq::params_to_json(params);
    ctx.parameters["K"] = K;
    ctx.parameters["events"] = sim.measured_events;
    ctx.parameters["warmup"] = sim.warmup_events;
    ctx.parameters["reps"] = sim.replications;
    ctx.seed = sim.seed;

    const tandemq::SimEstimate est = tandemq::simulate(params, K, sim);
    ctx.write_artifact("simulate.json", tandemq::estimate_to_json(est).dump(2) + "\n");
    ctx.write_manifest();

    std::cout << "simulate: K=" << K << " events=" << sim.measured_events
              << " reps=" << sim.replications << " acceptance="
              << tandemq::format_double(est.acceptance_fraction) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    ModelFlags model;
    std::string config_path;
    std::string param;
    std::optional<double> from, to, step;
    std::optional<int> cap;
    std::string outdir = "out";
};

int run_sweep(const SweepArgs& args) {
    const json cfg = load_config(args.config_path);
    const double from = resolve_value<double>(cfg, args.from, "from");
    const double to = resolve_value<double>(cfg, args.to, "to");
    const double step = resolve_value<double>(cfg, args.step, "step");
    const int cap = resolve_value<int>(cfg, args.cap, "cap", 10000);
    if (!(std::isfinite(from) && std::isfinite(to) && std::isfinite(step)) || step <= 0.0)
        throw UsageError("--step must be > 0 and the grid endpoints finite");
    if (from > to) throw UsageError("empty grid: --from exceeds --to");
    if (cap < 1) throw UsageError("--cap must be >= 1");

    tandemq::ModelParams base = args.model.resolve(cfg, args.param);
    auto set_field = [&](tandemq::ModelParams& p, double v) {
        if (args.param == "lambda") p.lambda = v;
        else if (args.param == "mu1") p.mu1 = v;
        else if (args.param == "mu2") p.mu2 = v;
        else if (args.param == "R") p.reward = v;
        else if (args.param == "c1") p.cost1 = v;
        else if (args.param == "c2") p.cost2 = v;
    };

    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = from + step * i;
        if (v > to + step * 1e-9) break;
        grid.push_back(v);
    }
    if (grid.empty()) throw UsageError("empty sweep grid");

    // The whole grid must be valid before any row is solved.
    for (double v : grid) {
        tandemq::ModelParams p = base;
        set_field(p, v);
        try {
            require_valid_or_usage(p);
        } catch (const UsageError& e) {
            throw UsageError("invalid grid point " + args.param + "=" + tandemq::format_double(v) +
                             ": " + e.what());
        }
    }

    RunContext ctx("sweep", args.outdir);
    ctx.parameters = tandemq::params_to_json(base);
    ctx.parameters["param"] = args.param;
    ctx.parameters["from"] = from;
    ctx.parameters["to"] = to;
    ctx.parameters["step"] = step;
    ctx.parameters["cap"] = cap;

    std::ostringstream os;
    os << "value,outcome,K,monotone\n";
    for (double v : grid) {
        tandemq::ModelParams p = base;
        set_field(p, v);
        const tandemq::ThresholdResult res = tandemq::find_threshold(p, cap);
        os << tandemq::format_double(v) << ',' << tandemq::outcome_name(res.outcome) << ',';
        if (res.threshold) os << *res.threshold;
        os << ',' << (res.conditions.any ? "true" : "false") << '\n';
    }
    ctx.write_artifact("sweep.csv", os.str());
    ctx.write_manifest();

    std::cout << "sweep: " << grid.size() << " rows over " << args.param << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
    bool quick = false;
    bool inject_fault = false;
    std::string outdir = "out";
};

int run_validate(const ValidateArgs& args) {
    RunContext ctx("validate", args.outdir);
    ctx.parameters = json{{"quick", args.quick}};

    tandemq::SuiteOptions opts;
    opts.quick = args.quick;
    opts.inject_fault = args.inject_fault;
    const std::vector<tandemq::CheckResult> results = tandemq::run_validation_suite(opts);

    bool all_pass = true;
    auto pad = [](const std::string& s, std::size_t width) {
        std::string out = s;
        while (out.size() < width) out.push_back(' ');
        return out;
    };
    std::cout << pad("check", 33) << pad("result", 8) << pad("max_err", 26) << "tolerance\n";
    for (const auto& c : results) {
        all_pass = all_pass && c.pass;
        std::cout << pad(c.name, 33) << pad(c.pass ? "PASS" : "FAIL", 8)
                  << pad(tandemq::format_double(c.max_err), 26)
                  << tandemq::format_double(c.tolerance) << '\n';
    }
    if (!all_pass) {
        for (const auto& c : results)
            if (!c.pass)
                std::cerr << "validate: FAIL " << c.name << " max_err="
                          << tandemq::format_double(c.max_err) << " tolerance="
                          << tandemq::format_double(c.tolerance)
                          << (c.detail.empty() ? "" : " at " + c.detail) << '\n';
    }
    ctx.write_manifest();
    return all_pass ? kExitOk : kExitSuiteFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tandemq: two-node tandem queue with balking under total-occupancy information"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "compute the equilibrium joining threshold");
    solve_args.model.attach(solve);
    solve->add_option("--config", solve_args.config_path, "JSON file with flag values")->check(CLI::ExistingFile);
    solve->add_option("--cap", solve_args.cap, "scan cap on k (default 10000)");
    solve->add_option("--format", solve_args.format, "artifact format")
        ->check(CLI::IsMember({"json", "csv"}));
    solve->add_option("--out", solve_args.outdir, "output directory (default ./out)");

    TableArgs table_args;
    CLI::App* table = app.add_subcommand("table", "emit the sojourn-time grid as CSV");
    table->add_option("--mu1", table_args.mu1, "node-1 service rate (> 0)");
    table->add_option("--mu2", table_args.mu2, "node-2 service rate (> 0)");
    table->add_option("--nmax", table_args.n_max, "grid size: fills n+m <= nmax")
        ->check(CLI::NonNegativeNumber);
    table->add_option("--config", table_args.config_path, "JSON file with flag values")->check(CLI::ExistingFile);
    table->add_option("--profile-kmax", table_args.profile_kmax,
                      "also emit the conditional sojourn profile for k = 0..N")
        ->check(CLI::NonNegativeNumber);
    table->add_option("--max-grid", table_args.max_grid, "grid budget (default 1500)");
    table->add_option("--out", table_args.outdir, "output directory (default ./out)");

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "run the seeded event simulation");
    sim_args.model.attach(simulate);
    simulate->add_option("--config", sim_args.config_path, "JSON file with flag values")->check(CLI::ExistingFile);
    simulate->add_option("--K", sim_args.threshold, "population threshold (>= 0)")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", sim_args.seed, "64-bit RNG seed");
    simulate->add_option("--events", sim_args.events, "measured events")->check(CLI::PositiveNumber);
    simulate->add_option("--warmup", sim_args.warmup, "warmup events discarded (default 100000)");
    simulate->add_option("--reps", sim_args.reps, "independent replications (default 1)");
    simulate->add_option("--threads", sim_args.threads, "worker threads for replications");
    simulate->add_option("--out", sim_args.outdir, "output directory (default ./out)");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "solve across a parameter grid");
    sweep_args.model.attach(sweep);
    sweep->add_option("--config", sweep_args.config_path, "JSON file with flag values")->check(CLI::ExistingFile);
    sweep->add_option("--param", sweep_args.param, "parameter to sweep")
        ->required()
        ->check(CLI::IsMember({"R", "c1", "c2", "mu1", "mu2", "lambda"}));
    sweep->add_option("--from", sweep_args.from, "grid start");
    sweep->add_option("--to", sweep_args.to, "grid end (inclusive)");
    sweep->add_option("--step", sweep_args.step, "grid step (> 0)");
    sweep->add_option("--cap", sweep_args.cap, "scan cap on k (default 10000)");
    sweep->add_option("--out", sweep_args.outdir, "output directory (default ./out)");

    ValidateArgs val_args;
    CLI::App* validate = app.add_subcommand("validate", "run the cross-oracle suite");
    validate->add_flag("--quick", val_args.quick, "small grids, finishes in seconds");
    validate->add_flag("--self-test-negative", val_args.inject_fault)->group("");
    validate->add_option("--out", val_args.outdir, "output directory (default ./out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (table->parsed()) return run_table(table_args);
        if (simulate->parsed()) return run_simulate(sim_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (validate->parsed()) return run_validate(val_args);
    } catch (const UsageError& e) {
        std::cerr << "tandemq: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "tandemq: config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tandemq: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "tandemq: " << e.what() << '\n';
        return kExitResource;
    } catch (const std::logic_error& e) {
        std::cerr << "tandemq: internal consistency failure: " << e.what() << '\n';
        return kExitSuiteFailure;
    } catch (const std::runtime_error& e) {
        std::cerr << "tandemq: " << e.what() << '\n';
        return kExitResource;
    }
    return kExitOk;
}
