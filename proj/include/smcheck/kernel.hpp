#pragma once

#include <coroutine>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smcheck/rng.hpp"
#include "smcheck/trace.hpp"

namespace smcheck::sim {

/// Misuse of the kernel API (wait outside a process, spawn after start, ...).
class KernelError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A process body failed; the run is aborted.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::string process, Tick time, const std::string& what);
    [[nodiscard]] const std::string& process() const noexcept { return process_; }
    [[nodiscard]] Tick time() const noexcept { return time_; }

private:
    std::string process_;
    Tick time_;
};

using ProcessId = std::uint32_t;
using EventId = std::uint32_t;
using SignalId = std::uint32_t;
using ProbeId = std::uint32_t;

enum class Phase { Idle, Initialize, Evaluate, Update, DeltaNotify, TimedNotify, Finished };

enum class Hook : std::uint8_t {
    InitBegin,
    InitEnd,
    EvaluationBegin,
    EvaluationEnd,
    UpdateBegin,
    UpdateEnd,
    DeltaNotifyBegin,
    DeltaNotifyEnd,
    TimedNotifyBegin,
    TimedNotifyEnd,
    DeltaCycleBegin,
    DeltaCycleEnd,
};

inline constexpr std::size_t hook_count = 12;

/// Configuration name, e.g. "MON_TIMED_NOTIFY_PHASE_END".
[[nodiscard]] std::string_view hook_name(Hook h) noexcept;
[[nodiscard]] std::optional<Hook> parse_hook(std::string_view name) noexcept;
[[nodiscard]] std::string_view to_string(Phase p) noexcept;

// ---------------------------------------------------------------------------
// Coroutine types

/// Return type of a process body. Starts suspended; the kernel owns it after spawn.
class Thread {
public:
    struct promise_type {
        std::exception_ptr error;

        Thread get_return_object() { return Thread(std::coroutine_handle<promise_type>::from_promise(*this)); }
        std::suspend_always initial_suspend() noexcept { return {}; }
        std::suspend_always final_suspend() noexcept { return {}; }
        void return_void() noexcept {}
        void unhandled_exception() noexcept { error = std::current_exception(); }
    };

    Thread() = default;
    Thread(Thread&& other) noexcept : h_(std::exchange(other.h_, {})) {}
    Thread& operator=(Thread&& other) noexcept
    {
        if (this != &other) {
            if (h_)
                h_.destroy();
            h_ = std::exchange(other.h_, {});
        }
        return *this;
    }
    Thread(const Thread&) = delete;
    Thread& operator=(const Thread&) = delete;
    ~Thread()
    {
        if (h_)
            h_.destroy();
    }

    [[nodiscard]] std::coroutine_handle<promise_type> handle() const noexcept { return h_; }
    [[nodiscard]] bool valid() const noexcept { return bool(h_); }

private:
    explicit Thread(std::coroutine_handle<promise_type> h) : h_(h) {}
    std::coroutine_handle<promise_type> h_;
};

template <class T>
class Task;

namespace detail {

struct TaskPromiseBase {
    std::coroutine_handle<> continuation = std::noop_coroutine();
    std::exception_ptr error;

    struct FinalAwaiter {
        bool await_ready() const noexcept { return false; }
        template <class P>
        std::coroutine_handle<> await_suspend(std::coroutine_handle<P> h) noexcept
        {
            return h.promise().continuation;
        }
        void await_resume() const noexcept {}
    };

    std::suspend_always initial_suspend() noexcept { return {}; }
    FinalAwaiter final_suspend() noexcept { return {}; }
    void unhandled_exception() noexcept { error = std::current_exception(); }
};

template <class T>
struct TaskPromise : TaskPromiseBase {
    std::optional<T> value;
    Task<T> get_return_object();
    void return_value(T v) { value.emplace(std::move(v)); }
};

template <>
struct TaskPromise<void> : TaskPromiseBase {
    Task<void> get_return_object();
    void return_void() noexcept {}
};

} // namespace detail

/// Nested coroutine awaited from a process (or another Task). Lazily started;
/// resumes its awaiter by symmetric transfer on completion, so kernel waits
/// inside a Task suspend the whole process.
template <class T = void>
class Task {
public:
    using promise_type = detail::TaskPromise<T>;

    Task(Task&& other) noexcept : h_(std::exchange(other.h_, {})) {}
    Task(const Task&) = delete;
    Task& operator=(const Task&) = delete;
    Task& operator=(Task&&) = delete;
    ~Task()
    {
        if (h_)
            h_.destroy();
    }

    bool await_ready() const noexcept { return false; }
    std::coroutine_handle<> await_suspend(std::coroutine_handle<> awaiting) noexcept
    {
        h_.promise().continuation = awaiting;
        return h_;
    }
    T await_resume()
    {
        auto& p = h_.promise();
        if (p.error)
            std::rethrow_exception(p.error);
        if constexpr (!std::is_void_v<T>)
            return std::move(*p.value);
    }

private:
    friend struct detail::TaskPromise<T>;
    explicit Task(std::coroutine_handle<promise_type> h) : h_(h) {}
    std::coroutine_handle<promise_type> h_;
};

namespace detail {
template <class T>
Task<T> TaskPromise<T>::get_return_object()
{
    return Task<T>(std::coroutine_handle<TaskPromise<T>>::from_promise(*this));
}
inline Task<void> TaskPromise<void>::get_return_object()
{
    return Task<void>(std::coroutine_handle<TaskPromise<void>>::from_promise(*this));
}
} // namespace detail

// ---------------------------------------------------------------------------
// Kernel

/// Receives kernel callbacks. `on_activity` is called immediately before the
/// kernel changes model-visible state (a dispatch, the update step, delta or
/// timed triggering, time advance) and once at the end of the run, so everything
/// reported between two activity calls describes the same instant.
class KernelObserver {
public:
    virtual ~KernelObserver() = default;
    virtual void on_hook(Hook) {}
    virtual void on_event_notified(EventId) {}
    virtual void on_activity() {}
    virtual void on_probe(ProbeId, std::optional<double>) {}
    virtual void on_finish() {}
};

struct SpawnOptions {
    /// Do not run the process in the initialization phase.
    bool dont_initialize = false;
    /// With dont_initialize, first wake on this event instead of never.
    std::optional<EventId> initial_event;
};

class Kernel {
public:
    enum class Status { Runnable, Running, WaitingEvent, WaitingTime, Terminated };

    /// The RNG drives only the scheduler choice.
    explicit Kernel(RandomSource rng = RandomSource());
    ~Kernel();
    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    ProcessId spawn(std::string name, Thread body, SpawnOptions options = {});

    class WaitAwaiter {
    public:
        bool await_ready() const noexcept { return false; }
        void await_suspend(std::coroutine_handle<> h) { kernel_->suspend_current(h, *this); }
        void await_resume() const noexcept {}

    private:
        friend class Kernel;
        WaitAwaiter(Kernel* k, bool timed, Tick delay, EventId event) : kernel_(k), timed_(timed), delay_(delay), event_(event) {}
        Kernel* kernel_;
        bool timed_;
        Tick delay_;
        EventId event_;
    };

    /// Suspends the running process for `d` ticks; d = 0 resumes it in the next delta cycle.
    [[nodiscard]] WaitAwaiter wait_time(Tick d);
    /// Suspends the running process until `e` is triggered.
    [[nodiscard]] WaitAwaiter wait_event(EventId e);

    EventId make_event(std::string name);
    [[nodiscard]] std::optional<EventId> find_event(std::string_view name) const;
    [[nodiscard]] const std::string& event_name(EventId e) const { return events_.at(e).name; }
    [[nodiscard]] std::size_t event_count() const noexcept { return events_.size(); }

    // Override rule: immediate > delta > timed; of two timed, the earlier wins.
    void notify_immediate(EventId e);
    void notify_delta(EventId e);
    void notify_timed(EventId e, Tick d);

    SignalId make_signal(std::string name, double initial = 0.0);
    [[nodiscard]] double read(SignalId s) const { return signals_.at(s).current; }
    /// Only from a running process; visible after the next update phase.
    void write(SignalId s, double v);
    [[nodiscard]] EventId value_changed_event(SignalId s) const { return signals_.at(s).changed; }

    ProbeId declare_probe(std::string name);
    [[nodiscard]] std::optional<ProbeId> find_probe(std::string_view name) const;
    [[nodiscard]] const std::string& probe_name(ProbeId p) const { return probes_.at(p); }
    [[nodiscard]] std::size_t probe_count() const noexcept { return probes_.size(); }
    void probe(ProbeId p, std::optional<double> value = std::nullopt);
    /// Throws KernelError for an undeclared name.
    void probe(std::string_view name, std::optional<double> value = std::nullopt);

    void add_observer(KernelObserver* o) { observers_.push_back(o); }

    /// Replaces the scheduler draw; receives the runnable-set size (> 1), returns an index.
    void set_chooser(std::function<std::size_t(std::size_t)> chooser) { chooser_ = std::move(chooser); }

    /// Runs to quiescence, to the stop request, or until the next timed
    /// activity would lie beyond `until`. Can be called once.
    void run(std::optional<Tick> until = std::nullopt);
    void request_stop() noexcept { stop_ = true; }

    [[nodiscard]] bool stop_requested() const noexcept { return stop_; }
    [[nodiscard]] Tick now() const noexcept { return now_; }
    [[nodiscard]] Phase phase() const noexcept { return phase_; }
    [[nodiscard]] std::uint64_t delta_count() const noexcept { return delta_count_; }
    [[nodiscard]] std::size_t process_count() const noexcept { return processes_.size(); }
    [[nodiscard]] Status status(ProcessId p) const { return processes_.at(p).status; }
    [[nodiscard]] const std::string& process_name(ProcessId p) const { return processes_.at(p).name; }
    [[nodiscard]] std::optional<ProcessId> current_process() const noexcept { return current_; }
    /// True when nothing is runnable and no notification or wake-up is pending.
    [[nodiscard]] bool idle() const;

private:
    enum class Pending : std::uint8_t { None, Delta, Timed };

    struct Process {
        std::string name;
        Thread body;
        std::coroutine_handle<> resume_point;
        Status status = Status::Runnable;
        SpawnOptions options;
    };

    struct Event {
        std::string name;
        Pending pending = Pending::None;
        Tick timed_at = 0;
        std::uint64_t generation = 0;
        std::vector<ProcessId> waiters;
    };

    struct Signal {
        std::string name;
        double current = 0.0;
        double next = 0.0;
        bool update_requested = false;
        EventId changed = 0;
    };

    struct TimedEntry {
        Tick at;
        std::uint64_t seq;
        bool is_event;
        std::uint32_t id;          // EventId or ProcessId
        std::uint64_t generation;  // events only
        bool operator>(const TimedEntry& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };

    friend class WaitAwaiter;
    void suspend_current(std::coroutine_handle<> h, const WaitAwaiter& w);

    void emit(Hook h);
    void activity();
    void make_runnable(ProcessId p);
    void trigger(EventId e);
    void dispatch(ProcessId p);
    void delta_cycle();
    void run_delta_cycles();
    bool stale(const TimedEntry& t) const;
    Process& running(const char* what);

    RandomSource rng_;
    std::function<std::size_t(std::size_t)> chooser_;
    std::vector<Process> processes_;
    std::vector<Event> events_;
    std::vector<Signal> signals_;
    std::vector<std::string> probes_;
    std::vector<KernelObserver*> observers_;

    std::vector<ProcessId> runnable_;
    std::vector<EventId> delta_events_;
    std::vector<ProcessId> delta_wakes_;
    std::vector<SignalId> update_requests_;
    std::priority_queue<TimedEntry, std::vector<TimedEntry>, std::greater<>> timed_;
    std::uint64_t seq_ = 0;

    std::optional<ProcessId> current_;
    Tick now_ = 0;
    Phase phase_ = Phase::Idle;
    std::uint64_t delta_count_ = 0;
    bool stop_ = false;
    bool started_ = false;
};

} // namespace smcheck::sim
