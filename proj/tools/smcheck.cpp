#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smcheck/commands.hpp"
#include "smcheck/config.hpp"
#include "smcheck/models.hpp"
#include "smcheck/version.hpp"

namespace {

using namespace smcheck;

int with_config(const std::string& path, const std::function<int(const Config&)>& body)
{
    return cli::guarded([&] { return body(load_config(path)); }, std::cerr);
}

void list_models(std::ostream& out)
{
    for (const auto& m : models::model_registry()) {
        out << m.name << ": " << m.description << "\n  tick = " << m.time_unit
            << ", default resolution = " << m.default_resolution << '\n';
        for (const auto& p : m.params)
            out << "  param " << p.name << " (default " << p.default_value << "): " << p.description << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Statistical model checker for timed discrete-event models"};
    app.set_version_flag("--version", std::string(smcheck::version));
    app.require_subcommand(1);
    app.fallthrough();

    cli::Options opt;
    std::optional<std::uint64_t> seed;
    std::optional<double> delta, alpha, beta;
    std::optional<std::uint64_t> mean_runs;
    app.add_option("--seed", seed, "master seed (overrides SMCHECK_SEED and the config)");
    app.add_option("--jobs", opt.jobs, "concurrent simulation runs")->check(CLI::PositiveNumber);
    app.add_option("--delta", delta, "estimate half-width / half the indifference region");
    app.add_option("--alpha", alpha, "type-I error bound");
    app.add_option("--beta", beta, "type-II error bound");
    app.add_option("--mean-runs", mean_runs, "runs per mean query (default: Chernoff sample size)");
    app.add_option("--out", opt.out, "write the result to this file");

    std::string config_path;
    auto* check = app.add_subcommand("check", "run every query of a config file");
    check->add_option("config", config_path, "config file")->required();

    std::string var;
    std::vector<std::string> values;
    auto* sweep = app.add_subcommand("sweep", "rerun the queries for each value of a parameter or placeholder");
    sweep->add_option("config", config_path, "config file")->required();
    sweep->add_option("--var", var, "model parameter or {placeholder} name")->required();
    sweep->add_option("--values", values, "comma-separated values")->delimiter(',')->expected(0, -1);

    int example = 3;
    std::uint64_t runs = 216;
    std::uint64_t reps = 20;
    auto* coverage = app.add_subcommand("sched-coverage", "scheduler interleaving coverage experiment");
    coverage->add_option("--example", example, "scheduler example 1, 2 or 3")->check(CLI::Range(1, 3));
    coverage->add_option("--runs", runs, "runs per repetition");
    coverage->add_option("--reps", reps, "repetitions");

    std::uint64_t sim_runs = 1;
    std::string dump_dir;
    auto* simulate = app.add_subcommand("simulate", "simulate seeded runs and optionally dump their traces");
    simulate->add_option("config", config_path, "config file")->required();
    simulate->add_option("--runs", sim_runs, "number of runs");
    simulate->add_option("--dump-traces", dump_dir, "directory for run_<i>.jsonl traces");

    auto* list = app.add_subcommand("models", "list built-in models and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_config_error;
    }
    opt.seed = seed;
    opt.delta = delta;
    opt.alpha = alpha;
    opt.beta = beta;
    opt.mean_runs = mean_runs;
    // A bare --values arrives as one empty string; an empty list sweeps nothing.
    std::erase(values, std::string());

    if (*check)
        return with_config(config_path, [&](const Config& c) { return cli::cmd_check(c, opt, std::cout, std::cerr); });
    if (*sweep)
        return with_config(config_path,
                           [&](const Config& c) { return cli::cmd_sweep(c, var, values, opt, std::cout, std::cerr); });
    if (*coverage)
        return cli::cmd_sched_coverage(example, runs, reps, opt, std::cout, std::cerr);
    if (*simulate)
        return with_config(config_path, [&](const Config& c) {
            return cli::cmd_simulate(c, sim_runs, dump_dir, opt, std::cout, std::cerr);
        });
    if (*list)
        list_models(std::cout);
    return cli::exit_ok;
}
