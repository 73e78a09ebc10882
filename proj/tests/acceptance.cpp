// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 2 7        run the listed criteria only
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smcheck/commands.hpp"
#include "smcheck/evaluator.hpp"
#include "smcheck/log.hpp"
#include "smcheck/models.hpp"
#include "smcheck/stats.hpp"
#include "smcheck/verifier.hpp"

#include "support.hpp"

using namespace smcheck;

namespace {

const std::string data_dir = SMCHECK_TEST_DATA;

// Tolerances and sizes, pinned.
constexpr double table_tolerance_fine = 0.05;    // delta = 0.02
constexpr double table_tolerance_coarse = 0.08;  // delta = 0.05
constexpr double latency_at_10_max = 0.1;
constexpr double latency_at_25_min = 0.95;
constexpr double distinct_lo = 120, distinct_hi = 152;
constexpr double collector_lo = 1100, collector_hi = 1700;
constexpr double ordering_margin = 0.1;
constexpr double doubling_tolerance = 0.10;
constexpr int oracle_pairs = 10000;
constexpr int sprt_reps = 1000;
constexpr double sprt_min_rate = 0.99;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double x, int digits = 4)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// 1 ------------------------------------------------------------------------

void chernoff(Outcome& o)
{
    const auto a = smc::chernoff_sample_size(0.02, 0.02);
    const auto b = smc::chernoff_sample_size(0.05, 0.05);
    // Independent recomputation from the closed form.
    const auto ref = [](double d, double al) { return std::uint64_t(std::ceil(std::log(2 / al) / (2 * d * d))); };
    o.detail << "n(0.02,0.02)=" << a << " n(0.05,0.05)=" << b;
    o.require(a == 5757 && ref(0.02, 0.02) == 5757, "n(0.02, 0.02) = 5757");
    o.require(b == 738 && ref(0.05, 0.05) == 738, "n(0.05, 0.05) = 738");
}

// 2 ------------------------------------------------------------------------

RunSetup fifo(double p1, double p2)
{
    RunSetup s;
    s.model = models::find_model("fifo");
    s.params = {{"p1", fmt(p1, 2)}, {"p2", fmt(p2, 2)}};
    return s;
}

// "Latency smaller than 25 ns": the '@' read strictly less than 25 ticks after the '&' read.
const char* const latency_formula = "G<=5000((c_read = '&') => (F<=24 (c_read = '@')))";

void table(Outcome& o)
{
    const double p1s[] = {0.6, 0.9};
    const double p2s[] = {0.3, 0.6, 0.9};
    const double reference[2][3] = {{0, 0.0194, 0.0720}, {0, 0.0835, 1}};
    const auto f = bltl::parse_formula(latency_formula);
    for (auto [delta, tol] : {std::pair{0.02, table_tolerance_fine}, std::pair{0.05, table_tolerance_coarse}}) {
        const smc::StatParams params{delta, delta, delta, 0.5};
        o.detail << (delta == 0.02 ? "" : " ") << "delta=" << delta << ":";
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 3; ++j) {
                const auto setup = fifo(p1s[i], p2s[j]);
                const auto r = smc::estimate_probability(
                    [&](std::uint64_t seed) { return sample_formula(setup, f, seed); }, params, 42);
                o.detail << " " << fmt(r.p_hat);
                o.require(std::abs(r.p_hat - reference[i][j]) <= tol,
                          "cell (" + fmt(p1s[i], 1) + ", " + fmt(p2s[j], 1) + ") within " + fmt(tol, 2));
            }
        }
    }
}

// 3 ------------------------------------------------------------------------

void latency(Outcome& o)
{
    const int t1s[] = {5, 10, 15, 20, 25, 30};
    std::vector<bltl::FormulaPtr> fs;
    for (int t1 : t1s)
        fs.push_back(bltl::parse_formula("G<=10000((c_read = '&') => (F<=" + std::to_string(t1) + " (c_read = '@')))"));
    const auto rs = estimate_many(fifo(0.9, 0.9), fs, {0.02, 0.02, 0.02, 0.5}, 42);
    double prev = -1;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        o.detail << (i ? " " : "") << "T1=" << t1s[i] << ":" << fmt(rs[i].p_hat);
        o.require(rs[i].p_hat >= prev, "non-decreasing at T1=" + std::to_string(t1s[i]));
        prev = rs[i].p_hat;
    }
    o.require(rs[1].p_hat <= latency_at_10_max, "p <= 0.1 at T1=10");
    o.require(rs[4].p_hat >= latency_at_25_min, "p >= 0.95 at T1=25");
}

// 4 ------------------------------------------------------------------------

void scheduler(Outcome& o)
{
    const auto orders = models::enumerate_sched_orders(3);
    const auto report = cli::sched_coverage(3, 216, 20, 42);
    o.detail << "orders=" << orders.size() << " distinct_mean=" << fmt(report.distinct_mean, 1)
             << " collector_mean=" << fmt(report.collector_mean, 1);
    o.require(orders.size() == 216, "216 reachable orders");
    o.require(report.distinct_mean >= distinct_lo && report.distinct_mean <= distinct_hi, "distinct mean in [120, 152]");
    o.require(report.collector_mean >= collector_lo && report.collector_mean <= collector_hi,
              "collector mean in [1100, 1700]");
}

// 5 ------------------------------------------------------------------------

RunSetup ecs()
{
    RunSetup s;
    s.model = models::find_model("ecs");
    return s;
}

void ecs_ordering(Outcome& o)
{
    const std::string T = std::to_string(30 * models::ticks_per_day);
    std::vector<bltl::FormulaPtr> fs;
    for (int i = 1; i <= 4; ++i)
        fs.push_back(bltl::parse_formula("F<=" + T + " failure_" + std::to_string(i)));
    for (int i = 1; i <= 4; ++i)
        fs.push_back(bltl::parse_formula("!shutdown U<=" + T + " failure_" + std::to_string(i)));
    const double delta = 0.05;
    const auto rs = estimate_many(ecs(), fs, {delta, delta, delta, 0.5}, 42);
    double eventually[5] = {}, first[5] = {};
    for (int i = 1; i <= 4; ++i) {
        eventually[i] = rs[std::size_t(i) - 1].p_hat;
        first[i] = rs[std::size_t(i) + 3].p_hat;
    }
    o.detail << "F:";
    for (int i = 1; i <= 4; ++i)
        o.detail << " " << fmt(eventually[i], 3);
    o.detail << " first:";
    for (int i = 1; i <= 4; ++i)
        o.detail << " " << fmt(first[i], 3);
    const double sum = first[1] + first[2] + first[3] + first[4];
    o.require(eventually[1] >= eventually[4] + ordering_margin, "failure_1 >= failure_4 + 0.1");
    o.require(eventually[3] >= eventually[4] + ordering_margin, "failure_3 >= failure_4 + 0.1");
    o.require(sum <= 1 + 2 * delta * 4, "first-failure sum <= 1 + 8 delta");
    o.require(first[1] >= std::max({first[2], first[3], first[4]}), "failure_1 likeliest first cause");
}

// 6 ------------------------------------------------------------------------

void ecs_rewards(Outcome& o)
{
    RunSetup s = ecs();
    const Tick T = 30 * models::ticks_per_day;
    s.max_ticks = T;
    for (const char* v : {"reward_up", "reward_danger", "reward_shutdown", "reboot_count_i", "reboot_count_o",
                          "reboot_count"})
        s.bindings.push_back({v, mon::Binding::Source::Attribute, v, {}});
    std::uint64_t violations = 0;
    double sum_i = 0, sum_o = 0, sum_total = 0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        const auto rec = simulate(s, {}, smc::run_seed(42, std::uint64_t(r)), false);
        const auto& t = rec.trace;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const auto& v = t[k].values;
            violations += v[0] + v[1] + v[2] != double(t[k].time);
        }
        violations += t[t.size() - 1].time != T;
        const auto& last = t[t.size() - 1].values;
        sum_i += last[3];
        sum_o += last[4];
        sum_total += last[5];
    }
    const double mi = sum_i / runs, mo = sum_o / runs, mt = sum_total / runs;
    o.detail << "conservation violations=" << violations << " reboots I=" << fmt(mi, 2) << " O=" << fmt(mo, 2)
             << " total=" << fmt(mt, 2);
    o.require(violations == 0, "reward counters sum to elapsed ticks");
    o.require(std::abs(mt - (mi + mo)) < 1e-9, "total reboots = I + O");
    o.require(std::abs(mi - mo) <= doubling_tolerance * std::max(mi, mo), "I and O reboots within 10%");
}

// 7 ------------------------------------------------------------------------

void oracle_agreement(Outcome& o)
{
    const auto reg = oracle::registry();
    RandomSource rng(7);
    int mismatches = 0, law_failures = 0;
    for (int i = 0; i < oracle_pairs; ++i) {
        const auto t = oracle::random_trace(rng, 8);
        const auto f = oracle::random_formula(rng, 4);
        const bool expected = oracle::holds(*f, t.states(), reg, 0);
        if ((bltl::evaluate(*f, t, 0, true) == bltl::Verdict::True) != expected)
            ++mismatches;
        const auto b = oracle::random_bound(rng);
        const auto ev = bltl::evaluate(*bltl::eventually(b, f), t, 0, true);
        law_failures += ev != bltl::evaluate(*bltl::until(bltl::f_true(), f, b), t, 0, true);
        const auto gl = bltl::evaluate(*bltl::globally(b, f), t, 0, true);
        const auto dual = bltl::evaluate(*bltl::eventually(b, bltl::f_not(f)), t, 0, true);
        law_failures += (gl == bltl::Verdict::True) == (dual == bltl::Verdict::True);
    }
    o.detail << "pairs=" << oracle_pairs << " mismatches=" << mismatches << " law failures=" << law_failures;
    o.require(mismatches == 0, "zero mismatches");
    o.require(law_failures == 0, "derived-operator laws");
}

// 8 ------------------------------------------------------------------------

void sprt(Outcome& o)
{
    const smc::StatParams p{0.05, 0.01, 0.01, 0.5};
    auto coin = [](double prob) {
        return [prob](std::uint64_t seed) { return RandomSource(seed).bernoulli(prob); };
    };
    int h1 = 0, h0 = 0;
    double used = 0;
    for (int r = 0; r < sprt_reps; ++r) {
        h1 += !smc::sprt_test(coin(0.05), p, smc::run_seed(1, std::uint64_t(r))).accept_h0;
        const auto hi = smc::sprt_test(coin(0.95), p, smc::run_seed(2, std::uint64_t(r)));
        h0 += hi.accept_h0;
        used += double(hi.n);
    }
    o.detail << "p=0.05 accepts H1 " << h1 << "/" << sprt_reps << ", p=0.95 accepts H0 " << h0 << "/" << sprt_reps
             << ", mean samples " << fmt(used / sprt_reps, 1);
    o.require(h1 >= sprt_min_rate * sprt_reps, "p=0.05 correct in >= 99%");
    o.require(h0 >= sprt_min_rate * sprt_reps, "p=0.95 correct in >= 99%");
}

// 9 ------------------------------------------------------------------------

void determinism(Outcome& o)
{
    const auto c = load_config(data_dir + "/fifo_quick.cfg");
    auto strip = [](nlohmann::ordered_json j) {
        j.erase("wall_time_s");
        for (auto& r : j["results"])
            r.erase("wall_time_s");
        return j.dump(2);
    };
    cli::Options opt;
    const auto a = strip(cli::run_check(c, opt));
    const auto b = strip(cli::run_check(c, opt));
    opt.jobs = 4;
    const auto d = strip(cli::run_check(c, opt));
    o.detail << "bytes=" << a.size();
    o.require(a == b, "identical JSON across runs");
    o.require(a == d, "identical JSON with 4 jobs");
}

struct Criterion {
    int id;
    const char* name;
    void (*run)(Outcome&);
};

const Criterion criteria[] = {
    {1, "chernoff sample size", chernoff},
    {2, "latency table", table},
    {3, "latency curve", latency},
    {4, "scheduler coverage", scheduler},
    {5, "ecs failure ordering", ecs_ordering},
    {6, "ecs conservation and reboot doubling", ecs_rewards},
    {7, "bltl oracle", oracle_agreement},
    {8, "sprt strength", sprt},
    {9, "check determinism", determinism},
};

} // namespace

int main(int argc, char** argv)
{
    set_warning_sink([](std::string_view) {});
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.push_back(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [error: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << " - "
                  << o.detail.str() << " (" << fmt(secs, 1) << " s)" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
