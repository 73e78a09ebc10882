#include <doctest.h>

#include <cmath>

#include "smcheck/rng.hpp"
#include "smcheck/stats.hpp"
#include "smcheck/verifier.hpp"

using namespace smcheck;
using namespace smcheck::smc;

namespace {

BernoulliRunner coin(double p)
{
    return [p](std::uint64_t seed) { return RandomSource(seed).bernoulli(p); };
}

} // namespace

TEST_CASE("chernoff sample sizes")
{
    CHECK(chernoff_sample_size(0.02, 0.02) == 5757);
    CHECK(chernoff_sample_size(0.05, 0.05) == 738);
    CHECK(chernoff_sample_size(0.5, 0.5) == 3);
    // Halving delta quadruples n up to the ceiling.
    for (double d : {0.1, 0.05, 0.02, 0.01}) {
        const auto n = chernoff_sample_size(d, 0.05);
        const auto n2 = chernoff_sample_size(d / 2, 0.05);
        CHECK(n2 >= 4 * n - 4);
        CHECK(n2 <= 4 * n);
    }
    CHECK_THROWS_AS((void)chernoff_sample_size(0, 0.1), StatError);
    CHECK_THROWS_AS((void)chernoff_sample_size(0.1, 1), StatError);
    CHECK_THROWS_AS((void)chernoff_sample_size(std::nan(""), 0.1), StatError);
}

TEST_CASE("parameter validation")
{
    StatParams p;
    CHECK_NOTHROW(p.validate_test());
    p.theta = 0.01;
    CHECK_THROWS_AS(p.validate_test(), StatError);
    p.theta = 0.99;
    CHECK_THROWS_AS(p.validate_test(), StatError);
    p.theta = 0.5;
    p.beta = 0;
    CHECK_THROWS_AS(p.validate_test(), StatError);
    CHECK_NOTHROW(p.validate_estimate());
}

TEST_CASE("estimates are reproducible and independent of the job count")
{
    const StatParams p{0.05, 0.05, 0.05, 0.5};
    const auto a = estimate_probability(coin(0.3), p, 11);
    const auto b = estimate_probability(coin(0.3), p, 11, 4);
    CHECK(a.n == 738);
    CHECK(a.successes == b.successes);
    CHECK(a.p_hat == b.p_hat);
    CHECK(a.seeds == b.seeds);
    CHECK(a.seeds.size() == 738);
    CHECK(a.seeds[5] == run_seed(11, 5));
    CHECK(std::abs(a.p_hat - 0.3) < 0.05);
    CHECK(estimate_probability([](std::uint64_t) { return true; }, p, 1).p_hat == 1.0);
}

TEST_CASE("estimator calibration")
{
    const StatParams p{0.05, 0.05, 0.05, 0.5};
    int misses = 0;
    for (std::uint64_t r = 0; r < 200; ++r)
        misses += std::abs(estimate_probability(coin(0.7), p, 1000 + r).p_hat - 0.7) >= p.delta;
    CHECK(misses <= 20);
}

TEST_CASE("failing runs report the lowest failing index")
{
    const BernoulliRunner bad = [](std::uint64_t seed) -> bool {
        if (seed == run_seed(3, 17) || seed == run_seed(3, 40))
            throw std::runtime_error("model exploded");
        return true;
    };
    for (unsigned jobs : {1u, 3u}) {
        try {
            (void)estimate_probability(bad, {0.1, 0.1, 0.1, 0.5}, 3, jobs);
            FAIL("expected a run error");
        } catch (const RunError& e) {
            CHECK(e.index() == 17);
            CHECK(e.seed() == run_seed(3, 17));
            CHECK(std::string(e.what()).find("model exploded") != std::string::npos);
        }
    }
}

TEST_CASE("sequential test decisions")
{
    const StatParams p{0.05, 0.01, 0.01, 0.5};
    const auto hi = sprt_test(coin(0.95), p, 1);
    CHECK(hi.kind == StatResult::Kind::Test);
    CHECK(hi.accept_h0);
    CHECK(hi.n < chernoff_sample_size(p.delta, p.alpha));
    const auto lo = sprt_test(coin(0.05), p, 1);
    CHECK_FALSE(lo.accept_h0);
    CHECK(sprt_test(coin(0.95), p, 1, 4).n == hi.n);

    StatParams bad = p;
    bad.theta = 0.03;
    CHECK_THROWS_AS((void)sprt_test(coin(0.5), bad, 1), StatError);

    // Strictly alternating outcomes keep the log ratio within one step of zero,
    // so the test runs into its cap of 100 * 150 samples.
    const StatParams loose{0.1, 0.1, 0.1, 0.5};
    std::uint64_t calls = 0;
    const BernoulliRunner alternating = [&calls](std::uint64_t) { return calls++ % 2 == 0; };
    try {
        (void)sprt_test(alternating, loose, 1);
        FAIL("expected an inconclusive test");
    } catch (const InconclusiveTest& e) {
        CHECK(e.samples() == 15000);
        CHECK(calls == 15000);
    }
}

TEST_CASE("sequential test strength")
{
    const StatParams p{0.05, 0.01, 0.01, 0.5};
    int right_hi = 0, right_lo = 0;
    for (std::uint64_t r = 0; r < 300; ++r) {
        right_hi += sprt_test(coin(0.95), p, r).accept_h0;
        right_lo += !sprt_test(coin(0.05), p, r).accept_h0;
    }
    CHECK(right_hi >= 297);
    CHECK(right_lo >= 297);
}

TEST_CASE("mean estimation")
{
    const auto c = estimate_mean([](std::uint64_t) { return 7.0; }, 50, 1);
    CHECK(c.mean == 7.0);
    CHECK(c.stddev == 0.0);
    CHECK(c.n == 50);
    const auto u = estimate_mean([](std::uint64_t s) { return double(RandomSource(s).uniform_int(2)); }, 4000, 2);
    CHECK(std::abs(u.mean - 0.5) < 0.03);
    CHECK(std::abs(u.stddev - 0.5) < 0.01);
    const auto one = estimate_mean([](std::uint64_t) { return 3.0; }, 1, 1);
    CHECK(one.stddev == 0.0);
    CHECK_THROWS_AS((void)estimate_mean([](std::uint64_t) { return 1.0; }, 0, 1), StatError);
}

TEST_CASE("early stopping never changes a run's outcome")
{
    RunSetup eager;
    eager.model = models::find_model("fifo");
    eager.params = {{"p1", "0.9"}, {"p2", "0.6"}};
    // The step-bounded formula runs to max_ticks when not stopped early.
    eager.max_ticks = 2000;
    RunSetup full = eager;
    full.early_stop = false;
    const auto f = bltl::parse_formula("G<=500 ((c_read = '&') => F<=25 (c_read = '@'))");
    const std::vector<bltl::FormulaPtr> fs{f, bltl::parse_formula("F<=#40 n_elements >= 4")};
    int decided_before_end = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const auto a = simulate(eager, fs, run_seed(5, i));
        const auto b = simulate(full, fs, run_seed(5, i));
        CHECK(a.verdicts == b.verdicts);
        decided_before_end += a.end_time < b.end_time;
    }
    CHECK(decided_before_end > 0);
}

TEST_CASE("verify dispatches on the query kind")
{
    RunSetup s;
    s.model = models::find_model("fifo");
    s.params = {{"p1", "0.9"}, {"p2", "0.9"}};
    const StatParams p{0.1, 0.1, 0.1, 0.5};
    const auto e = verify(s, bltl::parse_query("Pr(F<=20 c_read = '@')"), p, 1);
    CHECK(e.kind == StatResult::Kind::Estimate);
    CHECK(e.n == chernoff_sample_size(0.1, 0.1));
    const auto t = verify(s, bltl::parse_query("Pr>=0.5(G<=50 n_elements <= 10)"), p, 1);
    CHECK(t.kind == StatResult::Kind::Test);
    CHECK(t.accept_h0);
    const auto m = verify(s, bltl::parse_query("X<=100(n_elements)"), p, 1, 1, 20);
    CHECK(m.kind == StatResult::Kind::Mean);
    CHECK(m.n == 20);
    CHECK(m.mean >= 0);
    CHECK(m.mean <= 10);
}
