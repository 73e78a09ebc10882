#include <charconv>
#include <cmath>

#include "smcheck/models.hpp"

namespace smcheck::models {

const Attribute* Model::find_attribute(std::string_view path) const
{
    for (const auto& a : attributes_)
        if (a.path == path)
            return &a;
    return nullptr;
}

void Model::expose(std::string path, VarKind kind, std::function<double()> get, std::string description)
{
    if (find_attribute(path))
        throw ModelError("attribute '" + path + "' exposed twice");
    attributes_.push_back(Attribute{std::move(path), kind, std::move(get), std::move(description)});
}

void ModelSpec::check_params(const ParamValues& values) const
{
    for (const auto& [key, value] : values) {
        bool known = false;
        for (const auto& p : params)
            known = known || p.name == key;
        if (!known)
            throw ModelError("model '" + name + "' has no parameter '" + key + "'");
    }
}

double param_real(const ParamValues& values, std::string_view name, double fallback)
{
    auto it = values.find(name);
    if (it == values.end())
        return fallback;
    const std::string& s = it->second;
    double v = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || std::isnan(v))
        throw ModelError("parameter '" + std::string(name) + "' expects a number, got '" + s + "'");
    return v;
}

std::int64_t param_int(const ParamValues& values, std::string_view name, std::int64_t fallback)
{
    auto it = values.find(name);
    if (it == values.end())
        return fallback;
    const std::string& s = it->second;
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw ModelError("parameter '" + std::string(name) + "' expects an integer, got '" + s + "'");
    return v;
}

std::string param_string(const ParamValues& values, std::string_view name, std::string fallback)
{
    auto it = values.find(name);
    return it == values.end() ? fallback : it->second;
}

namespace {

std::string fmt(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

std::vector<ModelSpec> build_registry()
{
    std::vector<ModelSpec> specs;

    {
        const FifoParams d;
        ModelSpec s;
        s.name = "fifo";
        s.description = "producer and consumer exchanging a cyclic message over a bounded blocking FIFO";
        s.params = {
            {"p1", fmt(d.p1), "probability that the producer writes in a given ns"},
            {"p2", fmt(d.p2), "probability that the consumer reads in a given ns"},
            {"capacity", std::to_string(d.capacity), "buffer slots"},
            {"message", d.message, "characters written cyclically"},
        };
        s.default_resolution = "MON_TIMED_NOTIFY_PHASE_END";
        s.time_unit = "1 ns";
        s.build = [](sim::Kernel& k, RandomSource rng, const ParamValues& v) -> std::unique_ptr<Model> {
            return std::make_unique<FifoModel>(k, rng, FifoParams::from(v));
        };
        specs.push_back(std::move(s));
    }
    {
        const EcsParams d;
        ModelSpec s;
        s.name = "ecs";
        s.description = "embedded control system reliability model (sensors, actuators, I/O and main processors)";
        s.params = {
            {"sensor_groups", std::to_string(d.sensor_groups), "number of sensor groups"},
            {"sensors_per_group", std::to_string(d.sensors_per_group), "sensors in each group"},
            {"sensor_group_quorum", std::to_string(d.sensor_group_quorum), "working sensors for a functional group"},
            {"sensor_quorum", std::to_string(d.sensor_quorum), "functional sensor groups required"},
            {"actuator_groups", std::to_string(d.actuator_groups), "number of actuator groups"},
            {"actuators_per_group", std::to_string(d.actuators_per_group), "actuators in each group"},
            {"actuator_group_quorum", std::to_string(d.actuator_group_quorum), "working actuators for a functional group"},
            {"actuator_quorum", std::to_string(d.actuator_quorum), "functional actuator groups required"},
            {"K", std::to_string(d.max_skipped), "shutdown when more than K consecutive cycles are skipped"},
            {"cycle", std::to_string(d.cycle), "poll period in ticks"},
            {"sensor_mttf", fmt(d.sensor_mttf), "mean sensor lifetime in ticks"},
            {"actuator_mttf", fmt(d.actuator_mttf), "mean actuator lifetime in ticks"},
            {"processor_mttf", fmt(d.processor_mttf), "mean time to permanent I/O processor failure in ticks"},
            {"main_mttf", fmt(d.main_mttf), "mean main processor lifetime in ticks"},
            {"transient_mttf", fmt(d.transient_mttf), "mean time to a transient I/O processor fault in ticks"},
            {"reboot_mean", fmt(d.reboot_mean), "mean reboot delay in ticks"},
        };
        s.default_resolution = "tick";
        s.time_unit = "30 s";
        s.build = [](sim::Kernel& k, RandomSource rng, const ParamValues& v) -> std::unique_ptr<Model> {
            return std::make_unique<EcsModel>(k, rng, EcsParams::from(v));
        };
        specs.push_back(std::move(s));
    }
    for (int example = 1; example <= 3; ++example) {
        ModelSpec s;
        s.name = "sched" + std::to_string(example);
        s.description = "scheduler coverage example " + std::to_string(example);
        s.default_resolution = "MON_DELTA_CYCLE_END";
        s.time_unit = "1 tick";
        s.build = [example](sim::Kernel& k, RandomSource, const ParamValues&) -> std::unique_ptr<Model> {
            return std::make_unique<SchedModel>(k, example);
        };
        specs.push_back(std::move(s));
    }
    return specs;
}

} // namespace

std::span<const ModelSpec> model_registry()
{
    static const std::vector<ModelSpec> specs = build_registry();
    return specs;
}

const ModelSpec* find_model(std::string_view name)
{
    for (const auto& s : model_registry())
        if (s.name == name)
            return &s;
    return nullptr;
}

} // namespace smcheck::models
