#include <algorithm>
#include <cmath>

#include "smcheck/models.hpp"

namespace smcheck::models {

namespace {

// Exponential delays are capped far beyond any horizon to stay inside Tick.
constexpr double max_delay = 0x1.0p62;

} // namespace

void EcsParams::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw ModelError(std::string("ecs: ") + what);
    };
    require(sensor_groups >= 1 && sensors_per_group >= 1, "sensor counts must be positive");
    require(actuator_groups >= 1 && actuators_per_group >= 1, "actuator counts must be positive");
    require(sensor_group_quorum >= 1 && sensor_group_quorum <= sensors_per_group,
            "sensor_group_quorum must lie in [1, sensors_per_group]");
    require(actuator_group_quorum >= 1 && actuator_group_quorum <= actuators_per_group,
            "actuator_group_quorum must lie in [1, actuators_per_group]");
    require(sensor_quorum >= 0 && sensor_quorum <= sensor_groups, "sensor_quorum must lie in [0, sensor_groups]");
    require(actuator_quorum >= 0 && actuator_quorum <= actuator_groups,
            "actuator_quorum must lie in [0, actuator_groups]");
    require(max_skipped >= 0, "K must be non-negative");
    require(cycle >= 1, "cycle must be at least one tick");
    for (double m : {sensor_mttf, actuator_mttf, processor_mttf, main_mttf, transient_mttf, reboot_mean})
        require(m > 0.0, "mean times must be positive");
}

EcsParams EcsParams::from(const ParamValues& v)
{
    EcsParams p;
    auto as_int = [&](const char* name, int fallback) { return static_cast<int>(param_int(v, name, fallback)); };
    p.sensor_groups = as_int("sensor_groups", p.sensor_groups);
    p.sensors_per_group = as_int("sensors_per_group", p.sensors_per_group);
    p.sensor_group_quorum = as_int("sensor_group_quorum", p.sensor_group_quorum);
    p.sensor_quorum = as_int("sensor_quorum", p.sensor_quorum);
    p.actuator_groups = as_int("actuator_groups", p.actuator_groups);
    p.actuators_per_group = as_int("actuators_per_group", p.actuators_per_group);
    p.actuator_group_quorum = as_int("actuator_group_quorum", p.actuator_group_quorum);
    p.actuator_quorum = as_int("actuator_quorum", p.actuator_quorum);
    p.max_skipped = as_int("K", p.max_skipped);
    const auto cycle = param_int(v, "cycle", static_cast<std::int64_t>(p.cycle));
    if (cycle < 1)
        throw ModelError("ecs: cycle must be at least one tick");
    p.cycle = static_cast<Tick>(cycle);
    p.sensor_mttf = param_real(v, "sensor_mttf", p.sensor_mttf);
    p.actuator_mttf = param_real(v, "actuator_mttf", p.actuator_mttf);
    p.processor_mttf = param_real(v, "processor_mttf", p.processor_mttf);
    p.main_mttf = param_real(v, "main_mttf", p.main_mttf);
    p.transient_mttf = param_real(v, "transient_mttf", p.transient_mttf);
    p.reboot_mean = param_real(v, "reboot_mean", p.reboot_mean);
    p.validate();
    return p;
}

EcsModel::EcsModel(sim::Kernel& kernel, RandomSource rng, EcsParams params) : k_(kernel), params_(params)
{
    params_.validate();
    sensors_ok_.assign(static_cast<std::size_t>(params_.sensor_groups), params_.sensors_per_group);
    actuators_ok_.assign(static_cast<std::size_t>(params_.actuator_groups), params_.actuators_per_group);
    sensor_groups_ok_ = params_.sensor_groups;
    actuator_groups_ok_ = params_.actuator_groups;
    tick_probe_ = k_.declare_probe("tick");

    auto num = [](auto getter) { return std::function<double()>(getter); };
    expose("number_sensors", VarKind::Int, num([this] { return double(sensor_groups_ok_); }), "functional sensor groups");
    expose("number_actuators", VarKind::Int, num([this] { return double(actuator_groups_ok_); }), "functional actuator groups");
    expose("proci_status", VarKind::Int, num([this] { return double(proc_status_[0]); }), "input processor: 0 failed, 1 transient fault, 2 functional");
    expose("proco_status", VarKind::Int, num([this] { return double(proc_status_[1]); }), "output processor: 0 failed, 1 transient fault, 2 functional");
    expose("main_status", VarKind::Int, num([this] { return double(main_status_); }), "main processor: 0 failed, 1 functional");
    expose("skipped", VarKind::Int, num([this] { return double(skipped_); }), "consecutive skipped cycles");
    expose("reboot_count_i", VarKind::Int, num([this] { return double(reboots_[0]); }), "completed reboots of the input processor");
    expose("reboot_count_o", VarKind::Int, num([this] { return double(reboots_[1]); }), "completed reboots of the output processor");
    expose("reboot_count", VarKind::Int, num([this] { return double(reboots_[0] + reboots_[1]); }), "completed reboots of both I/O processors");
    expose("reward_up", VarKind::Int, num([this] { return double(reward_[0]); }), "ticks spent up");
    expose("reward_danger", VarKind::Int, num([this] { return double(reward_[1]); }), "ticks spent in danger");
    expose("reward_shutdown", VarKind::Int, num([this] { return double(reward_[2]); }), "ticks spent shut down");
    for (int i = 1; i <= 4; ++i)
        expose("failure_" + std::to_string(i), VarKind::Bool, num([this, i] { return failure(i) ? 1.0 : 0.0; }));
    expose("shutdown", VarKind::Bool,
           num([this] { return (failure(1) || failure(2) || failure(3) || failure(4)) ? 1.0 : 0.0; }),
           "some failure condition holds");
    expose("halted", VarKind::Bool, num([this] { return halted_ ? 1.0 : 0.0; }), "the system has been shut down");
    expose("first_cause", VarKind::Int, num([this] { return double(static_cast<int>(cause_)); }),
           "failure that caused the shutdown (0 while running)");

    std::uint64_t stream = 16;
    for (int g = 0; g < params_.sensor_groups; ++g)
        for (int s = 0; s < params_.sensors_per_group; ++s)
            k_.spawn("sensor" + std::to_string(g) + "." + std::to_string(s), sensor(g, rng.fork(stream++)));
    for (int g = 0; g < params_.actuator_groups; ++g)
        for (int a = 0; a < params_.actuators_per_group; ++a)
            k_.spawn("actuator" + std::to_string(g) + "." + std::to_string(a), actuator(g, rng.fork(stream++)));
    k_.spawn("main", main_processor(rng.fork(1)));
    k_.spawn("proc_i", io_processor(0, rng.fork(2)));
    k_.spawn("proc_o", io_processor(1, rng.fork(3)));
    k_.spawn("poll", poll());
    k_.spawn("reward", reward());
}

bool EcsModel::failure(int i) const
{
    switch (i) {
    case 1: return sensor_groups_ok_ < params_.sensor_quorum && proc_status_[0] == 2;
    case 2: return actuator_groups_ok_ < params_.actuator_quorum && proc_status_[1] == 2;
    case 3: return skipped_ > params_.max_skipped;
    case 4: return main_status_ == 0;
    default: return false;
    }
}

Tick EcsModel::delay(RandomSource& rng, double mean) const
{
    const double x = std::min(rng.exponential(mean), max_delay);
    return std::max<Tick>(1, static_cast<Tick>(std::ceil(x)));
}

void EcsModel::shut_down(Cause cause)
{
    if (halted_)
        return;
    halted_ = true;
    cause_ = cause;
}

sim::Thread EcsModel::sensor(int group, RandomSource rng)
{
    co_await k_.wait_time(delay(rng, params_.sensor_mttf));
    if (halted_)
        co_return;
    auto& ok = sensors_ok_[static_cast<std::size_t>(group)];
    --ok;
    if (ok == params_.sensor_group_quorum - 1)
        --sensor_groups_ok_;
}

sim::Thread EcsModel::actuator(int group, RandomSource rng)
{
    co_await k_.wait_time(delay(rng, params_.actuator_mttf));
    if (halted_)
        co_return;
    auto& ok = actuators_ok_[static_cast<std::size_t>(group)];
    --ok;
    if (ok == params_.actuator_group_quorum - 1)
        --actuator_groups_ok_;
}

sim::Thread EcsModel::main_processor(RandomSource rng)
{
    co_await k_.wait_time(delay(rng, params_.main_mttf));
    if (halted_)
        co_return;
    main_status_ = 0;
    shut_down(Cause::Main);
}

// Permanent and transient faults race; the permanent fault time is fixed up
// front (memorylessness makes this equivalent to re-drawing after each repair).
sim::Thread EcsModel::io_processor(int which, RandomSource rng)
{
    const Tick permanent_at = k_.now() + delay(rng, params_.processor_mttf);
    int& status = proc_status_[which];
    for (;;) {
        const Tick transient = delay(rng, params_.transient_mttf);
        if (k_.now() + transient >= permanent_at)
            break;
        co_await k_.wait_time(transient);
        if (halted_)
            co_return;
        status = 1;
        const Tick reboot = delay(rng, params_.reboot_mean);
        if (k_.now() + reboot >= permanent_at)
            break;
        co_await k_.wait_time(reboot);
        if (halted_)
            co_return;
        status = 2;
        ++reboots_[which];
    }
    co_await k_.wait_time(permanent_at - k_.now());
    if (halted_)
        co_return;
    status = 0;
}

// Polls at cycle boundaries, one delta after the timed wake-ups of that tick.
sim::Thread EcsModel::poll()
{
    for (;;) {
        co_await k_.wait_time(params_.cycle);
        co_await k_.wait_time(0);
        if (halted_)
            co_return;
        if (proc_status_[0] != 2 || proc_status_[1] != 2)
            ++skipped_;
        else
            skipped_ = 0;
        if (skipped_ > params_.max_skipped)
            shut_down(Cause::Skipped);
        else if (failure(1))
            shut_down(Cause::Sensors);
        else if (failure(2))
            shut_down(Cause::Actuators);
    }
}

// Classifies each elapsed tick two deltas after the poll has run. The t = 0
// state is covered by the monitor's initial sample.
sim::Thread EcsModel::reward()
{
    for (;;) {
        co_await k_.wait_time(1);
        co_await k_.wait_time(0);
        co_await k_.wait_time(0);
        if (halted_) {
            ++reward_[2];
        } else {
            const bool up = proc_status_[0] == 2 && proc_status_[1] == 2 && main_status_ == 1
                            && sensor_groups_ok_ >= params_.sensor_quorum
                            && actuator_groups_ok_ >= params_.actuator_quorum;
            ++reward_[up ? 0 : 1];
        }
        k_.probe(tick_probe_);
    }
}

} // namespace smcheck::models
