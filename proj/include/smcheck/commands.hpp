#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smcheck/config.hpp"
#include "smcheck/stats.hpp"
#include "smcheck/verifier.hpp"

namespace smcheck::cli {

enum ExitCode : int { exit_ok = 0, exit_config_error = 1, exit_model_error = 2 };

/// Global command-line overrides; unset fields fall back to the config.
struct Options {
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::optional<double> delta;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<std::uint64_t> mean_runs;
    /// Output file; replaces the config's result_file / csv_file.
    std::string out;
};

inline constexpr std::uint64_t default_seed = 42;

/// Flag, then the SMCHECK_SEED environment variable, then the config, then 42.
[[nodiscard]] std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const Config& config);
[[nodiscard]] smc::StatParams resolve_stats(const Config& config, const Options& options);
[[nodiscard]] RunSetup make_setup(const Config& config);

/// Runs every query of the config. Each result ends with "wall_time_s", the
/// only field that differs between identical invocations.
[[nodiscard]] nlohmann::ordered_json run_check(const Config& config, const Options& options);

/// One CSV row per (value, query); header only for an empty value list.
/// `variable` names a model parameter or a `let` used as `{name}` in queries.
[[nodiscard]] std::string run_sweep(const Config& config, const std::string& variable,
                                    const std::vector<std::string>& values, const Options& options);

struct CoverageRep {
    std::uint64_t distinct = 0;        // distinct orders among the first `runs` runs
    std::uint64_t collector_runs = 0;  // runs until every order was seen
};

struct CoverageReport {
    int example = 0;
    std::uint64_t orders_total = 0;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<CoverageRep> reps;
    double distinct_mean = 0.0;
    double distinct_stddev = 0.0;
    double collector_mean = 0.0;
    double collector_stddev = 0.0;
};

/// Repetition r draws runs with seeds run_seed(run_seed(seed, r), j), j = 0, 1, ...
[[nodiscard]] CoverageReport sched_coverage(int example, std::uint64_t runs, std::uint64_t reps, std::uint64_t seed);
[[nodiscard]] nlohmann::ordered_json to_json(const CoverageReport& report);

/// Simulates `runs` seeded runs recording every bound variable; writes
/// run_<i>.jsonl into `dump_dir` when it is non-empty.
[[nodiscard]] nlohmann::ordered_json run_simulate(const Config& config, std::uint64_t runs,
                                                  const std::string& dump_dir, const Options& options);

// Command entry points: print results to `out`, diagnostics to `err`, and
// map failures onto the exit codes above.
int cmd_check(const Config& config, const Options& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const Config& config, const std::string& variable, const std::vector<std::string>& values,
              const Options& options, std::ostream& out, std::ostream& err);
int cmd_sched_coverage(int example, std::uint64_t runs, std::uint64_t reps, const Options& options,
                       std::ostream& out, std::ostream& err);
int cmd_simulate(const Config& config, std::uint64_t runs, const std::string& dump_dir, const Options& options,
                 std::ostream& out, std::ostream& err);

/// Runs `body`, translating exceptions into a message on `err` and an exit code.
int guarded(const std::function<int()>& body, std::ostream& err);

} // namespace smcheck::cli
