#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smcheck/bltl.hpp"
#include "smcheck/evaluator.hpp"
#include "smcheck/models.hpp"
#include "smcheck/monitor.hpp"
#include "smcheck/stats.hpp"
#include "smcheck/trace.hpp"

namespace smcheck {

/// Everything needed to build one monitored simulation, minus the seed.
struct RunSetup {
    const models::ModelSpec* model = nullptr;
    models::ParamValues params;
    std::vector<mon::Binding> bindings;
    /// Empty selects the model's default resolution.
    std::string resolution;
    /// Simulated-time cap for formulas with step bounds; reaching it ends the
    /// trace, which is then evaluated as complete.
    Tick max_ticks = 1'000'000;
    /// Stop a run as soon as every formula has a definite verdict.
    bool early_stop = true;
};

struct RunRecord {
    /// One verdict per formula, in order.
    std::vector<bltl::Verdict> verdicts;
    /// Trace of the first monitor (all bindings unless `project` was requested).
    Trace trace;
    Tick end_time = 0;
};

/// Simulated time a run needs to decide all `formulas`.
[[nodiscard]] Tick run_horizon(const RunSetup& setup, std::span<const bltl::FormulaPtr> formulas);

/// Builds the model and monitors without running, so unresolvable variables
/// and bad parameters surface before any sampling starts.
void validate_setup(const RunSetup& setup, std::span<const bltl::FormulaPtr> formulas,
                    std::span<const std::string> variables = {});

/// One run with kernel RNG fork(0) and model RNG fork(1) of `seed`.
/// With `project` the recorded trace holds only the variables the formulas use.
[[nodiscard]] RunRecord simulate(const RunSetup& setup, std::span<const bltl::FormulaPtr> formulas,
                                 std::uint64_t seed, bool project = true);

/// One Bernoulli sample: whether the run satisfies `formula`.
[[nodiscard]] bool sample_formula(const RunSetup& setup, const bltl::FormulaPtr& formula, std::uint64_t seed);

/// Value of `variable` at the last sample with time <= `time`.
[[nodiscard]] double sample_value(const RunSetup& setup, const std::string& variable, Tick time, std::uint64_t seed);

/// Runs the engine matching the query kind. Mean queries use `mean_runs`
/// runs, defaulting to the Chernoff sample size of (delta, alpha).
[[nodiscard]] smc::StatResult verify(const RunSetup& setup, const bltl::Query& query, const smc::StatParams& params,
                                     std::uint64_t master_seed, unsigned jobs = 1,
                                     std::optional<std::uint64_t> mean_runs = std::nullopt);

/// Probability estimates for several formulas from one shared set of runs:
/// run i evaluates every formula on the same simulation.
[[nodiscard]] std::vector<smc::StatResult> estimate_many(const RunSetup& setup,
                                                         std::span<const bltl::FormulaPtr> formulas,
                                                         const smc::StatParams& params, std::uint64_t master_seed,
                                                         unsigned jobs = 1);

} // namespace smcheck
