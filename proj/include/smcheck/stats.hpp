#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smcheck::smc {

/// Out-of-range statistical parameters.
class StatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A simulation run failed; carries the run index and its seed for replay.
class RunError : public std::runtime_error {
public:
    RunError(std::uint64_t index, std::uint64_t seed, const std::string& what);
    [[nodiscard]] std::uint64_t index() const noexcept { return index_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t index_;
    std::uint64_t seed_;
};

/// The sequential test hit its sample cap without crossing either boundary.
class InconclusiveTest : public std::runtime_error {
public:
    InconclusiveTest(std::uint64_t samples, std::uint64_t successes);
    [[nodiscard]] std::uint64_t samples() const noexcept { return samples_; }
    [[nodiscard]] std::uint64_t successes() const noexcept { return successes_; }

private:
    std::uint64_t samples_;
    std::uint64_t successes_;
};

struct StatParams {
    double delta = 0.02;  // half-width of the estimate, half the indifference region
    double alpha = 0.02;  // type-I error
    double beta = 0.02;   // type-II error
    double theta = 0.5;   // test threshold

    /// delta and alpha in (0, 1).
    void validate_estimate() const;
    /// Additionally beta in (0, 1) and 0 < theta - delta, theta + delta < 1.
    void validate_test() const;

    bool operator==(const StatParams&) const = default;
};

/// n = ceil(ln(2 / alpha) / (2 delta^2)): Pr[|p~ - p| >= delta] <= alpha.
[[nodiscard]] std::uint64_t chernoff_sample_size(double delta, double alpha);

/// Seed of run `index` under `master_seed`; runs are independent of each other.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t index);

using BernoulliRunner = std::function<bool(std::uint64_t seed)>;
using ValueRunner = std::function<double(std::uint64_t seed)>;

struct StatResult {
    enum class Kind { Estimate, Test, Mean };

    Kind kind = Kind::Estimate;
    std::uint64_t master_seed = 0;
    /// Runs performed (for tests, the samples used).
    std::uint64_t n = 0;
    std::uint64_t successes = 0;
    double p_hat = 0.0;
    bool accept_h0 = false;
    double mean = 0.0;
    double stddev = 0.0;
    /// Seed of every run in index order.
    std::vector<std::uint64_t> seeds;
};

[[nodiscard]] std::string to_string(StatResult::Kind k);

/// Executes `count` runs starting at index `first`, on up to `jobs` threads.
/// Results are stored by index, so the outcome does not depend on `jobs`.
/// A failing run raises RunError for the lowest failing index.
template <class T>
std::vector<T> run_batch(const std::function<T(std::uint64_t)>& runner, std::uint64_t master_seed,
                         std::uint64_t first, std::uint64_t count, unsigned jobs);

/// Two-sided Chernoff-Hoeffding estimate of Pr[runner returns true].
[[nodiscard]] StatResult estimate_probability(const BernoulliRunner& runner, const StatParams& params,
                                              std::uint64_t master_seed, unsigned jobs = 1);

/// Wald's sequential probability ratio test of H0: p >= theta + delta against
/// H1: p <= theta - delta. Throws InconclusiveTest after 100 times the
/// Chernoff sample size.
[[nodiscard]] StatResult sprt_test(const BernoulliRunner& runner, const StatParams& params,
                                   std::uint64_t master_seed, unsigned jobs = 1);

/// Mean and sample standard deviation of `n_runs` values.
[[nodiscard]] StatResult estimate_mean(const ValueRunner& runner, std::uint64_t n_runs, std::uint64_t master_seed,
                                       unsigned jobs = 1);

} // namespace smcheck::smc
