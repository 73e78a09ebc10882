#include "smcheck/kernel.hpp"

#include <array>

namespace smcheck::sim {

namespace {

constexpr std::array<std::string_view, hook_count> hook_names = {
    "MON_INIT_PHASE_BEGIN",
    "MON_INIT_PHASE_END",
    "MON_EVALUATION_PHASE_BEGIN",
    "MON_EVALUATION_PHASE_END",
    "MON_UPDATE_PHASE_BEGIN",
    "MON_UPDATE_PHASE_END",
    "MON_DELTA_NOTIFY_PHASE_BEGIN",
    "MON_DELTA_NOTIFY_PHASE_END",
    "MON_TIMED_NOTIFY_PHASE_BEGIN",
    "MON_TIMED_NOTIFY_PHASE_END",
    "MON_DELTA_CYCLE_BEGIN",
    "MON_DELTA_CYCLE_END",
};

} // namespace

SimulationError::SimulationError(std::string process, Tick time, const std::string& what)
    : std::runtime_error("process '" + process + "' failed at time " + std::to_string(time) + ": " + what),
      process_(std::move(process)), time_(time)
{
}

std::string_view hook_name(Hook h) noexcept
{
    return hook_names[static_cast<std::size_t>(h)];
}

std::optional<Hook> parse_hook(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < hook_count; ++i)
        if (hook_names[i] == name)
            return static_cast<Hook>(i);
    return std::nullopt;
}

std::string_view to_string(Phase p) noexcept
{
    switch (p) {
    case Phase::Idle: return "idle";
    case Phase::Initialize: return "initialize";
    case Phase::Evaluate: return "evaluate";
    case Phase::Update: return "update";
    case Phase::DeltaNotify: return "delta_notify";
    case Phase::TimedNotify: return "timed_notify";
    case Phase::Finished: return "finished";
    }
    return "?";
}

Kernel::Kernel(RandomSource rng) : rng_(rng) {}

Kernel::~Kernel() = default;

ProcessId Kernel::spawn(std::string name, Thread body, SpawnOptions options)
{
    if (started_)
        throw KernelError("cannot spawn process '" + name + "' after the simulation started");
    if (!body.valid())
        throw KernelError("process '" + name + "' has no body");
    if (options.initial_event && *options.initial_event >= events_.size())
        throw KernelError("process '" + name + "' waits on an unknown event");
    Process p;
    p.name = std::move(name);
    p.resume_point = body.handle();
    p.body = std::move(body);
    p.options = options;
    processes_.push_back(std::move(p));
    return static_cast<ProcessId>(processes_.size() - 1);
}

Kernel::Process& Kernel::running(const char* what)
{
    if (!current_)
        throw KernelError(std::string(what) + " called outside a running process");
    return processes_[*current_];
}

Kernel::WaitAwaiter Kernel::wait_time(Tick d)
{
    running("wait_time");
    return WaitAwaiter(this, true, d, 0);
}

Kernel::WaitAwaiter Kernel::wait_event(EventId e)
{
    running("wait_event");
    if (e >= events_.size())
        throw KernelError("wait_event on unknown event " + std::to_string(e));
    return WaitAwaiter(this, false, 0, e);
}

void Kernel::suspend_current(std::coroutine_handle<> h, const WaitAwaiter& w)
{
    Process& p = running("wait");
    p.resume_point = h;
    const ProcessId id = *current_;
    if (!w.timed_) {
        p.status = Status::WaitingEvent;
        events_[w.event_].waiters.push_back(id);
    } else if (w.delay_ == 0) {
        p.status = Status::WaitingTime;
        delta_wakes_.push_back(id);
    } else {
        p.status = Status::WaitingTime;
        timed_.push({now_ + w.delay_, seq_++, false, id, 0});
    }
}

EventId Kernel::make_event(std::string name)
{
    Event e;
    e.name = std::move(name);
    events_.push_back(std::move(e));
    return static_cast<EventId>(events_.size() - 1);
}

std::optional<EventId> Kernel::find_event(std::string_view name) const
{
    for (std::size_t i = 0; i < events_.size(); ++i)
        if (events_[i].name == name)
            return static_cast<EventId>(i);
    return std::nullopt;
}

void Kernel::make_runnable(ProcessId id)
{
    Process& p = processes_[id];
    if (p.status == Status::Terminated || p.status == Status::Runnable || p.status == Status::Running)
        return;
    p.status = Status::Runnable;
    runnable_.push_back(id);
}

void Kernel::trigger(EventId e)
{
    Event& ev = events_[e];
    auto waiters = std::move(ev.waiters);
    ev.waiters.clear();
    for (ProcessId p : waiters)
        make_runnable(p);
    for (auto* o : observers_)
        o->on_event_notified(e);
}

void Kernel::notify_immediate(EventId e)
{
    Event& ev = events_.at(e);
    ev.pending = Pending::None;
    ++ev.generation;
    trigger(e);
}

void Kernel::notify_delta(EventId e)
{
    Event& ev = events_.at(e);
    if (ev.pending == Pending::Delta)
        return;
    ev.pending = Pending::Delta;
    ++ev.generation;
    delta_events_.push_back(e);
}

void Kernel::notify_timed(EventId e, Tick d)
{
    if (d == 0) {
        notify_delta(e);
        return;
    }
    Event& ev = events_.at(e);
    if (ev.pending == Pending::Delta)
        return;
    const Tick at = now_ + d;
    if (ev.pending == Pending::Timed && ev.timed_at <= at)
        return;
    ev.pending = Pending::Timed;
    ev.timed_at = at;
    ++ev.generation;
    timed_.push({at, seq_++, true, e, ev.generation});
}

SignalId Kernel::make_signal(std::string name, double initial)
{
    Signal s;
    s.changed = make_event(name + ".value_changed");
    s.name = std::move(name);
    s.current = s.next = initial;
    signals_.push_back(std::move(s));
    return static_cast<SignalId>(signals_.size() - 1);
}

void Kernel::write(SignalId id, double v)
{
    running("signal write");
    Signal& s = signals_.at(id);
    s.next = v;
    if (!s.update_requested) {
        s.update_requested = true;
        update_requests_.push_back(id);
    }
}

ProbeId Kernel::declare_probe(std::string name)
{
    if (auto existing = find_probe(name))
        return *existing;
    probes_.push_back(std::move(name));
    return static_cast<ProbeId>(probes_.size() - 1);
}

std::optional<ProbeId> Kernel::find_probe(std::string_view name) const
{
    for (std::size_t i = 0; i < probes_.size(); ++i)
        if (probes_[i] == name)
            return static_cast<ProbeId>(i);
    return std::nullopt;
}

void Kernel::probe(ProbeId p, std::optional<double> value)
{
    if (p >= probes_.size())
        throw KernelError("unknown probe id " + std::to_string(p));
    for (auto* o : observers_)
        o->on_probe(p, value);
}

void Kernel::probe(std::string_view name, std::optional<double> value)
{
    auto id = find_probe(name);
    if (!id)
        throw KernelError("unknown probe '" + std::string(name) + "'");
    probe(*id, value);
}

void Kernel::emit(Hook h)
{
    for (auto* o : observers_)
        o->on_hook(h);
}

void Kernel::activity()
{
    for (auto* o : observers_)
        o->on_activity();
}

void Kernel::dispatch(ProcessId id)
{
    Process& p = processes_[id];
    p.status = Status::Running;
    current_ = id;
    p.resume_point.resume();
    current_.reset();

    Process& after = processes_[id];
    auto root = after.body.handle();
    if (root.done()) {
        after.status = Status::Terminated;
        if (auto err = root.promise().error) {
            try {
                std::rethrow_exception(err);
            } catch (const std::exception& e) {
                throw SimulationError(after.name, now_, e.what());
            } catch (...) {
                throw SimulationError(after.name, now_, "unknown exception");
            }
        }
    } else if (after.status == Status::Running) {
        throw KernelError("process '" + after.name + "' suspended without a kernel wait");
    }
}

void Kernel::delta_cycle()
{
    emit(Hook::DeltaCycleBegin);

    phase_ = Phase::Evaluate;
    emit(Hook::EvaluationBegin);
    while (!runnable_.empty() && !stop_) {
        std::size_t idx = 0;
        if (runnable_.size() > 1) {
            idx = chooser_ ? chooser_(runnable_.size()) : static_cast<std::size_t>(rng_.uniform_int(runnable_.size()));
            if (idx >= runnable_.size())
                throw KernelError("scheduler chose index " + std::to_string(idx) + " of "
                                  + std::to_string(runnable_.size()));
        }
        const ProcessId id = runnable_[idx];
        runnable_.erase(runnable_.begin() + static_cast<std::ptrdiff_t>(idx));
        activity();
        dispatch(id);
    }
    if (stop_)
        return;
    emit(Hook::EvaluationEnd);

    phase_ = Phase::Update;
    emit(Hook::UpdateBegin);
    if (!update_requests_.empty()) {
        activity();
        auto requests = std::move(update_requests_);
        update_requests_.clear();
        for (SignalId id : requests) {
            Signal& s = signals_[id];
            s.update_requested = false;
            if (s.next != s.current) {
                s.current = s.next;
                notify_delta(s.changed);
            }
        }
    }
    emit(Hook::UpdateEnd);

    phase_ = Phase::DeltaNotify;
    emit(Hook::DeltaNotifyBegin);
    if (!delta_events_.empty() || !delta_wakes_.empty()) {
        activity();
        auto events = std::move(delta_events_);
        delta_events_.clear();
        auto wakes = std::move(delta_wakes_);
        delta_wakes_.clear();
        for (EventId e : events) {
            if (events_[e].pending != Pending::Delta)
                continue;
            events_[e].pending = Pending::None;
            trigger(e);
        }
        for (ProcessId p : wakes)
            make_runnable(p);
    }
    emit(Hook::DeltaNotifyEnd);

    ++delta_count_;
    emit(Hook::DeltaCycleEnd);
}

void Kernel::run_delta_cycles()
{
    do {
        delta_cycle();
    } while (!runnable_.empty() && !stop_);
}

bool Kernel::stale(const TimedEntry& t) const
{
    if (!t.is_event)
        return false;
    const Event& ev = events_[t.id];
    return ev.pending != Pending::Timed || ev.generation != t.generation;
}

bool Kernel::idle() const
{
    if (!runnable_.empty() || !delta_events_.empty() || !delta_wakes_.empty() || !update_requests_.empty())
        return false;
    auto copy = timed_;
    while (!copy.empty()) {
        if (!stale(copy.top()))
            return false;
        copy.pop();
    }
    return true;
}

void Kernel::run(std::optional<Tick> until)
{
    if (started_)
        throw KernelError("run may be called only once per kernel");
    started_ = true;

    phase_ = Phase::Initialize;
    emit(Hook::InitBegin);
    for (std::size_t i = 0; i < processes_.size(); ++i) {
        Process& p = processes_[i];
        const auto id = static_cast<ProcessId>(i);
        if (!p.options.dont_initialize) {
            p.status = Status::Runnable;
            runnable_.push_back(id);
        } else {
            p.status = Status::WaitingEvent;
            if (p.options.initial_event)
                events_[*p.options.initial_event].waiters.push_back(id);
        }
    }
    emit(Hook::InitEnd);

    if (!stop_)
        run_delta_cycles();

    while (!stop_) {
        while (!timed_.empty() && stale(timed_.top()))
            timed_.pop();
        if (timed_.empty())
            break;
        const Tick t = timed_.top().at;
        if (until && t > *until)
            break;

        phase_ = Phase::TimedNotify;
        emit(Hook::TimedNotifyBegin);
        activity();
        now_ = t;
        while (!timed_.empty() && timed_.top().at == t) {
            const TimedEntry e = timed_.top();
            timed_.pop();
            if (stale(e))
                continue;
            if (e.is_event) {
                events_[e.id].pending = Pending::None;
                trigger(e.id);
            } else {
                make_runnable(e.id);
            }
        }
        emit(Hook::TimedNotifyEnd);
        if (!stop_)
            run_delta_cycles();
    }

    phase_ = Phase::Finished;
    activity();
    for (auto* o : observers_)
        o->on_finish();
}

} // namespace smcheck::sim
