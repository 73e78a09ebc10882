#include "smcheck/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "smcheck/rng.hpp"

namespace smcheck::smc {

RunError::RunError(std::uint64_t index, std::uint64_t seed, const std::string& what)
    : std::runtime_error("run " + std::to_string(index) + " (seed " + std::to_string(seed) + ") failed: " + what),
      index_(index), seed_(seed)
{
}

InconclusiveTest::InconclusiveTest(std::uint64_t samples, std::uint64_t successes)
    : std::runtime_error("sequential test undecided after " + std::to_string(samples) + " samples ("
                         + std::to_string(successes) + " successes); the indifference region is too narrow"),
      samples_(samples), successes_(successes)
{
}

namespace {

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

} // namespace

void StatParams::validate_estimate() const
{
    if (!open_unit(delta))
        throw StatError("delta must lie in (0, 1)");
    if (!open_unit(alpha))
        throw StatError("alpha must lie in (0, 1)");
}

void StatParams::validate_test() const
{
    validate_estimate();
    if (!open_unit(beta))
        throw StatError("beta must lie in (0, 1)");
    if (!open_unit(theta))
        throw StatError("theta must lie in (0, 1)");
    if (!(theta - delta > 0.0 && theta + delta < 1.0))
        throw StatError("indifference region [theta - delta, theta + delta] must lie inside (0, 1)");
}

std::uint64_t chernoff_sample_size(double delta, double alpha)
{
    StatParams{delta, alpha}.validate_estimate();
    return static_cast<std::uint64_t>(std::ceil(std::log(2.0 / alpha) / (2.0 * delta * delta)));
}

std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t index)
{
    return RandomSource(master_seed).fork(index).seed();
}

std::string to_string(StatResult::Kind k)
{
    switch (k) {
    case StatResult::Kind::Estimate: return "estimate";
    case StatResult::Kind::Test: return "test";
    case StatResult::Kind::Mean: return "mean";
    }
    return "?";
}

template <class T>
std::vector<T> run_batch(const std::function<T(std::uint64_t)>& runner, std::uint64_t master_seed,
                         std::uint64_t first, std::uint64_t count, unsigned jobs)
{
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
            try {
                out[i] = runner(run_seed(master_seed, first + i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(std::max(jobs, 1u), count));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work);
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!errors[i])
            continue;
        const std::uint64_t index = first + i;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw RunError(index, run_seed(master_seed, index), e.what());
        } catch (...) {
            throw RunError(index, run_seed(master_seed, index), "unknown exception");
        }
    }
    return out;
}

template std::vector<char> run_batch(const std::function<char(std::uint64_t)>&, std::uint64_t, std::uint64_t,
                                     std::uint64_t, unsigned);
template std::vector<std::vector<char>> run_batch(const std::function<std::vector<char>(std::uint64_t)>&,
                                                  std::uint64_t, std::uint64_t, std::uint64_t, unsigned);
template std::vector<double> run_batch(const std::function<double(std::uint64_t)>&, std::uint64_t,
                                       std::uint64_t, std::uint64_t, unsigned);

namespace {

std::vector<std::uint64_t> seeds_of(std::uint64_t master_seed, std::uint64_t n)
{
    std::vector<std::uint64_t> seeds(n);
    for (std::uint64_t i = 0; i < n; ++i)
        seeds[i] = run_seed(master_seed, i);
    return seeds;
}

std::function<char(std::uint64_t)> as_char(const BernoulliRunner& runner)
{
    return [&runner](std::uint64_t seed) -> char { return runner(seed) ? 1 : 0; };
}

} // namespace

StatResult estimate_probability(const BernoulliRunner& runner, const StatParams& params, std::uint64_t master_seed,
                                unsigned jobs)
{
    params.validate_estimate();
    const std::uint64_t n = chernoff_sample_size(params.delta, params.alpha);
    const auto bits = run_batch(as_char(runner), master_seed, 0, n, jobs);
    StatResult r;
    r.kind = StatResult::Kind::Estimate;
    r.master_seed = master_seed;
    r.n = n;
    for (char b : bits)
        r.successes += static_cast<std::uint64_t>(b);
    r.p_hat = static_cast<double>(r.successes) / static_cast<double>(n);
    r.seeds = seeds_of(master_seed, n);
    return r;
}

// Samples are drawn in batches of `jobs` and consumed in index order, so the
// stopping point, and hence the result, is the same for any job count.
StatResult sprt_test(const BernoulliRunner& runner, const StatParams& params, std::uint64_t master_seed,
                     unsigned jobs)
{
    params.validate_test();
    const double p0 = params.theta + params.delta;
    const double p1 = params.theta - params.delta;
    const double step_success = std::log(p1 / p0);
    const double step_failure = std::log((1.0 - p1) / (1.0 - p0));
    const double accept_h1 = std::log((1.0 - params.beta) / params.alpha);
    const double accept_h0 = std::log(params.beta / (1.0 - params.alpha));
    const std::uint64_t cap = 100 * chernoff_sample_size(params.delta, params.alpha);
    const std::uint64_t batch = std::max(jobs, 1u);
    const auto fn = as_char(runner);

    StatResult r;
    r.kind = StatResult::Kind::Test;
    r.master_seed = master_seed;
    std::uint64_t m = 0;
    std::uint64_t d = 0;
    while (m < cap) {
        const auto bits = run_batch(fn, master_seed, m, std::min(batch, cap - m), jobs);
        for (char b : bits) {
            ++m;
            d += static_cast<std::uint64_t>(b);
            const double ratio = static_cast<double>(d) * step_success + static_cast<double>(m - d) * step_failure;
            if (ratio >= accept_h1 || ratio <= accept_h0) {
                r.n = m;
                r.successes = d;
                r.accept_h0 = ratio <= accept_h0;
                r.p_hat = static_cast<double>(d) / static_cast<double>(m);
                r.seeds = seeds_of(master_seed, m);
                return r;
            }
        }
    }
    throw InconclusiveTest(m, d);
}

StatResult estimate_mean(const ValueRunner& runner, std::uint64_t n_runs, std::uint64_t master_seed, unsigned jobs)
{
    if (n_runs == 0)
        throw StatError("mean estimation needs at least one run");
    const auto values = run_batch(runner, master_seed, 0, n_runs, jobs);
    StatResult r;
    r.kind = StatResult::Kind::Mean;
    r.master_seed = master_seed;
    r.n = n_runs;
    // Welford's update keeps the variance accurate for large counters.
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t k = 0;
    for (double v : values) {
        ++k;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
    }
    r.mean = mean;
    r.stddev = n_runs > 1 ? std::sqrt(m2 / static_cast<double>(n_runs - 1)) : 0.0;
    r.seeds = seeds_of(master_seed, n_runs);
    return r;
}

} // namespace smcheck::smc
