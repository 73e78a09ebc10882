#include <doctest.h>

#include <algorithm>
#include <regex>
#include <string>
#include <vector>

#include "smcheck/kernel.hpp"
#include "smcheck/models.hpp"

using namespace smcheck;
using namespace smcheck::sim;

namespace {

struct HookLog : KernelObserver {
    std::string phases;
    std::vector<Hook> hooks;
    void on_hook(Hook h) override
    {
        hooks.push_back(h);
        switch (h) {
        case Hook::InitBegin: phases += 'I'; break;
        case Hook::EvaluationBegin: phases += 'e'; break;
        case Hook::UpdateBegin: phases += 'u'; break;
        case Hook::DeltaNotifyBegin: phases += 'd'; break;
        case Hook::TimedNotifyBegin: phases += 'T'; break;
        default: break;
        }
    }
};

struct Log {
    std::vector<std::string> lines;
    void add(const Kernel& k, const std::string& what)
    {
        lines.push_back(std::to_string(k.now()) + "/" + std::to_string(k.delta_count()) + ":" + what);
    }
};

Thread ticker(Kernel& k, Log& log, std::string name, int n, Tick d)
{
    for (int i = 0; i < n; ++i) {
        log.add(k, name);
        co_await k.wait_time(d);
    }
    log.add(k, name + " done");
}

Thread waiter(Kernel& k, Log& log, EventId e, std::string name)
{
    co_await k.wait_event(e);
    log.add(k, name);
}

Thread notifier(Kernel& k, Log& log, EventId e, int how, Tick d)
{
    log.add(k, "notify");
    if (how == 0)
        k.notify_immediate(e);
    else if (how == 1)
        k.notify_delta(e);
    else
        k.notify_timed(e, d);
    co_return;
}

Thread writer(Kernel& k, Log& log, SignalId s, double v)
{
    k.write(s, v);
    log.add(k, "read " + std::to_string(int(k.read(s))));
    co_await k.wait_time(0);
    log.add(k, "read " + std::to_string(int(k.read(s))));
}

Thread thrower(Kernel& k)
{
    co_await k.wait_time(3);
    throw std::runtime_error("boom");
}

Thread atomic_pair(Kernel& k, std::string& out, char c)
{
    out += c;
    co_await k.wait_time(0);
    out += c;
}

} // namespace

TEST_CASE("empty kernel ends at time zero")
{
    Kernel k;
    HookLog h;
    k.add_observer(&h);
    k.run();
    CHECK(k.now() == 0);
    CHECK(k.phase() == Phase::Finished);
    CHECK(h.phases == "Ieud");
    CHECK_THROWS_AS(k.run(), KernelError);
}

TEST_CASE("hook names")
{
    CHECK(hook_name(Hook::TimedNotifyEnd) == "MON_TIMED_NOTIFY_PHASE_END");
    CHECK(hook_name(Hook::InitBegin) == "MON_INIT_PHASE_BEGIN");
    CHECK(hook_name(Hook::DeltaCycleEnd) == "MON_DELTA_CYCLE_END");
    for (std::size_t i = 0; i < hook_count; ++i)
        CHECK(parse_hook(hook_name(Hook(i))) == Hook(i));
    CHECK_FALSE(parse_hook("MON_NOPE").has_value());
}

TEST_CASE("phase order follows the scheduler loop")
{
    Kernel k(RandomSource(3));
    HookLog h;
    Log log;
    k.add_observer(&h);
    k.spawn("a", ticker(k, log, "a", 3, 2));
    k.spawn("b", ticker(k, log, "b", 4, 0));
    k.spawn("c", ticker(k, log, "c", 2, 5));
    k.run();
    CHECK(std::regex_match(h.phases, std::regex("I(eud)+(T(eud)+)*")));
    // Each delta cycle is bracketed by cycle hooks.
    std::size_t begins = 0, ends = 0;
    for (auto x : h.hooks) {
        begins += x == Hook::DeltaCycleBegin;
        ends += x == Hook::DeltaCycleEnd;
    }
    CHECK(begins == ends);
    CHECK(ends == k.delta_count());
    CHECK(k.now() == 10);
}

TEST_CASE("timed, delta and zero waits")
{
    Kernel k;
    Log log;
    k.spawn("p", ticker(k, log, "p", 2, 0));
    k.spawn("q", ticker(k, log, "q", 1, 7), {});
    k.run();
    // p resumes at the same time in the next delta cycle; q jumps 7 ticks.
    CHECK(std::find(log.lines.begin(), log.lines.end(), "0/1:p") != log.lines.end());
    CHECK(std::find(log.lines.begin(), log.lines.end(), "0/2:p done") != log.lines.end());
    CHECK(std::find(log.lines.begin(), log.lines.end(), "7/3:q done") != log.lines.end());
}

TEST_CASE("immediate notification wakes waiters in the same evaluation phase")
{
    // The notifier starts one delta later so the waiter is already suspended.
    Kernel k2(RandomSource(1));
    Log log2;
    const auto e2 = k2.make_event("e");
    const auto go = k2.make_event("go");
    k2.spawn("w", waiter(k2, log2, e2, "woke"));
    k2.spawn("n", notifier(k2, log2, e2, 0, 0), {true, go});
    k2.spawn("g", notifier(k2, log2, go, 1, 0));
    k2.run();
    REQUIRE(log2.lines.size() == 3);
    CHECK(log2.lines[1] == "0/1:notify");
    CHECK(log2.lines[2] == "0/1:woke");
}

TEST_CASE("delta and timed notifications")
{
    {
        Kernel k;
        Log log;
        const auto e = k.make_event("e");
        k.spawn("w", waiter(k, log, e, "woke"));
        k.spawn("n", notifier(k, log, e, 1, 0));
        k.run();
        CHECK(log.lines.back() == "0/1:woke");
    }
    {
        Kernel k;
        Log log;
        const auto e = k.make_event("e");
        k.spawn("w", waiter(k, log, e, "woke"));
        k.spawn("n", notifier(k, log, e, 2, 3));
        k.run();
        CHECK(log.lines.back() == "3/1:woke");
        CHECK(k.now() == 3);
    }
}

namespace {

Thread override_probe(Kernel& k, Log& log, EventId e, int scenario)
{
    switch (scenario) {
    case 0: // later timed does not replace an earlier one
        k.notify_timed(e, 4);
        k.notify_timed(e, 10);
        break;
    case 1: // earlier timed replaces a later one
        k.notify_timed(e, 10);
        k.notify_timed(e, 4);
        break;
    case 2: // delta beats timed
        k.notify_timed(e, 4);
        k.notify_delta(e);
        break;
    case 3: // a pending delta is not replaced by timed
        k.notify_delta(e);
        k.notify_timed(e, 4);
        break;
    default: // immediate cancels a pending delta
        k.notify_delta(e);
        k.notify_immediate(e);
        break;
    }
    log.add(k, "sent");
    co_return;
}

Thread counting_waiter(Kernel& k, Log& log, EventId e)
{
    for (;;) {
        co_await k.wait_event(e);
        log.add(k, "woke");
    }
}

std::vector<std::string> override_run(int scenario)
{
    Kernel k;
    Log log;
    const auto e = k.make_event("e");
    k.spawn("w", counting_waiter(k, log, e));
    const auto go = k.make_event("go");
    k.spawn("n", override_probe(k, log, e, scenario), {true, go});
    k.spawn("g", notifier(k, log, go, 1, 0));
    k.run();
    std::vector<std::string> woke;
    for (const auto& l : log.lines)
        if (l.ends_with("woke"))
            woke.push_back(l.substr(0, l.find('/')));
    return woke;
}

} // namespace

TEST_CASE("override rule: stronger or earlier notifications win, once")
{
    CHECK(override_run(0) == std::vector<std::string>{"4"});
    CHECK(override_run(1) == std::vector<std::string>{"4"});
    CHECK(override_run(2) == std::vector<std::string>{"0"});
    CHECK(override_run(3) == std::vector<std::string>{"0"});
    CHECK(override_run(4) == std::vector<std::string>{"0"});
}

TEST_CASE("signals update between delta cycles")
{
    Kernel k;
    Log log;
    const auto s = k.make_signal("s", 1);
    k.spawn("w", writer(k, log, s, 5));
    k.spawn("c", waiter(k, log, k.value_changed_event(s), "changed"));
    k.run();
    CHECK(log.lines[0] == "0/0:read 1");
    CHECK(std::find(log.lines.begin(), log.lines.end(), "0/1:read 5") != log.lines.end());
    CHECK(std::find(log.lines.begin(), log.lines.end(), "0/1:changed") != log.lines.end());
    CHECK(k.read(s) == 5);

    // Writing the current value raises no change event.
    Kernel k2;
    Log log2;
    const auto s2 = k2.make_signal("s", 5);
    k2.spawn("w", writer(k2, log2, s2, 5));
    k2.spawn("c", waiter(k2, log2, k2.value_changed_event(s2), "changed"));
    k2.run();
    CHECK(std::find(log2.lines.begin(), log2.lines.end(), "0/1:changed") == log2.lines.end());
}

TEST_CASE("misuse and failures")
{
    Kernel k;
    CHECK_THROWS_AS((void)k.wait_time(1), KernelError);
    CHECK_THROWS_AS(k.write(k.make_signal("s"), 1), KernelError);
    CHECK_THROWS_AS(k.probe("nope"), KernelError);
    k.spawn("t", thrower(k));
    try {
        k.run();
        FAIL("expected a simulation error");
    } catch (const SimulationError& e) {
        CHECK(e.process() == "t");
        CHECK(e.time() == 3);
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }
    CHECK_THROWS_AS(k.spawn("late", thrower(k)), KernelError);
}

TEST_CASE("run stops before activity beyond the limit")
{
    Kernel k;
    Log log;
    k.spawn("a", ticker(k, log, "a", 100, 10));
    k.run(35);
    CHECK(k.now() == 30);
    CHECK(log.lines.back() == "30/3:a");
}

TEST_CASE("dispatch is non-preemptive")
{
    // Each process writes two letters around a delta wait; within one
    // dispatch no other process can interleave.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Kernel k{RandomSource(seed)};
        std::string out;
        k.spawn("a", atomic_pair(k, out, 'a'));
        k.spawn("b", atomic_pair(k, out, 'b'));
        k.spawn("c", atomic_pair(k, out, 'c'));
        k.run();
        REQUIRE(out.size() == 6);
        std::string first = out.substr(0, 3), second = out.substr(3);
        std::sort(first.begin(), first.end());
        std::sort(second.begin(), second.end());
        CHECK(first == "abc");
        CHECK(second == "abc");
    }
}

TEST_CASE("scheduler draws are uniform and reproducible")
{
    int a_first = 0;
    const int runs = 10000;
    for (int i = 0; i < runs; ++i) {
        const auto order = models::run_sched_example(1, RandomSource(7).fork(std::uint64_t(i)).seed());
        REQUIRE(order.size() == 2);
        a_first += order == "AB";
    }
    const double f = double(a_first) / runs;
    CHECK(f >= 0.48);
    CHECK(f <= 0.52);
    for (std::uint64_t seed : {1u, 99u, 12345u})
        CHECK(models::run_sched_example(3, seed) == models::run_sched_example(3, seed));
}

TEST_CASE("chooser overrides the scheduler draw")
{
    CHECK(models::run_sched_example(1, [](std::size_t) { return std::size_t{0}; }) == "AB");
    CHECK(models::run_sched_example(1, [](std::size_t n) { return n - 1; }) == "BA");
    CHECK_THROWS(models::run_sched_example(1, [](std::size_t n) { return n; }));
}
