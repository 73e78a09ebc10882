#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smcheck/kernel.hpp"
#include "smcheck/rng.hpp"
#include "smcheck/trace.hpp"

namespace smcheck::models {

/// Invalid or unknown model parameters.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A named, typed accessor into live model state.
struct Attribute {
    std::string path;
    VarKind kind = VarKind::Int;
    std::function<double()> get;
    std::string description;
};

/// Owns the processes, events and state of one simulation run.
/// Must be destroyed before its kernel.
class Model {
public:
    virtual ~Model() = default;

    [[nodiscard]] std::span<const Attribute> attributes() const noexcept { return attributes_; }
    [[nodiscard]] const Attribute* find_attribute(std::string_view path) const;

protected:
    void expose(std::string path, VarKind kind, std::function<double()> get, std::string description = {});

private:
    std::vector<Attribute> attributes_;
};

using ParamValues = std::map<std::string, std::string, std::less<>>;

struct ParamInfo {
    std::string name;
    std::string default_value;
    std::string description;
};

struct ModelSpec {
    std::string name;
    std::string description;
    std::vector<ParamInfo> params;
    std::string default_resolution;
    /// Physical duration of one kernel tick.
    std::string time_unit;
    std::function<std::unique_ptr<Model>(sim::Kernel&, RandomSource, const ParamValues&)> build;

    /// Throws ModelError for parameter names not in `params`.
    void check_params(const ParamValues& values) const;
};

/// Built-in models: fifo, ecs, sched1, sched2, sched3.
[[nodiscard]] std::span<const ModelSpec> model_registry();
[[nodiscard]] const ModelSpec* find_model(std::string_view name);

// Parameter parsing helpers; throw ModelError naming the parameter.
double param_real(const ParamValues& values, std::string_view name, double fallback);
std::int64_t param_int(const ParamValues& values, std::string_view name, std::int64_t fallback);
std::string param_string(const ParamValues& values, std::string_view name, std::string fallback);

// ---------------------------------------------------------------------------
// Producer / consumer over a bounded blocking FIFO

struct FifoParams {
    double p1 = 0.9;  // producer write attempt probability per tick
    double p2 = 0.9;  // consumer read attempt probability per tick
    std::size_t capacity = 10;
    std::string message = "&abcdefgh@";

    void validate() const;
    static FifoParams from(const ParamValues& values);
};

/// One tick is 1 ns. The producer and consumer each flip a coin every tick and
/// on success perform one blocking write/read of the next message character.
///
/// Attributes: "pnt_con->c_int" / "c_read" (last char read, -1 initially),
/// "pnt_pro->c_int" / "c_write", "fifo.num_elements" / "n_elements".
/// Probes: send:call, send:entry, send:1, send:exit, send:return and the
/// same set for receive (receive:1 carries the character read, set at exit).
class FifoModel : public Model {
public:
    FifoModel(sim::Kernel& kernel, RandomSource rng, FifoParams params);

    [[nodiscard]] int c_read() const noexcept { return c_read_; }
    [[nodiscard]] int c_write() const noexcept { return c_write_; }
    [[nodiscard]] std::size_t size() const noexcept { return count_; }
    [[nodiscard]] const FifoParams& params() const noexcept { return params_; }

private:
    sim::Thread producer(RandomSource rng);
    sim::Thread consumer(RandomSource rng);
    sim::Task<> send(char c);
    sim::Task<char> receive();
    sim::Task<> fifo_write(char c);
    sim::Task<char> fifo_read();

    sim::Kernel& k_;
    FifoParams params_;
    std::vector<char> buffer_;
    std::size_t first_ = 0;
    std::size_t count_ = 0;
    sim::EventId write_event_;
    sim::EventId read_event_;
    int c_read_ = -1;
    int c_write_ = -1;

    struct Probes {
        sim::ProbeId call, entry, arg, exit, ret;
    };
    Probes send_probes_{};
    Probes receive_probes_{};
};

// ---------------------------------------------------------------------------
// Embedded control system

/// Calendar: 1 tick = 30 s, 1 day = 2880 ticks, 1 month = 30 days, 1 year = 12 months.
inline constexpr Tick ticks_per_day = 2880;
inline constexpr Tick ticks_per_month = 30 * ticks_per_day;
inline constexpr Tick ticks_per_year = 12 * ticks_per_month;

struct EcsParams {
    int sensor_groups = 50;
    int sensors_per_group = 3;
    int sensor_group_quorum = 2;   // functional sensors needed per group
    int sensor_quorum = 37;        // functional groups needed
    int actuator_groups = 30;
    int actuators_per_group = 2;
    int actuator_group_quorum = 1;
    int actuator_quorum = 27;
    int max_skipped = 4;           // K; shutdown when skipped > K
    Tick cycle = 2;                // poll period

    // Mean lifetimes in ticks.
    double sensor_mttf = static_cast<double>(ticks_per_month);
    double actuator_mttf = 2.0 * static_cast<double>(ticks_per_month);
    double processor_mttf = static_cast<double>(ticks_per_year);
    double main_mttf = static_cast<double>(ticks_per_year);
    double transient_mttf = static_cast<double>(ticks_per_day);
    double reboot_mean = 1.0;

    void validate() const;
    static EcsParams from(const ParamValues& values);
};

/// Reliability model of a control system with a main processor M, an input
/// processor I reading 50 groups of 3 sensors and an output processor O
/// driving 30 groups of 2 actuators. All delays are exponential, rounded up to
/// whole ticks. Shutdown is absorbing.
///
/// Each tick the reward process classifies the state as up, danger or
/// shutdown after all other activity of that tick, bumps one counter and
/// fires the probe "tick"; the three counters therefore always sum to the
/// number of elapsed ticks.
class EcsModel : public Model {
public:
    EcsModel(sim::Kernel& kernel, RandomSource rng, EcsParams params);

    enum class Cause : std::uint8_t { None = 0, Sensors = 1, Actuators = 2, Skipped = 3, Main = 4 };

    [[nodiscard]] int functional_sensor_groups() const noexcept { return sensor_groups_ok_; }
    [[nodiscard]] int functional_actuator_groups() const noexcept { return actuator_groups_ok_; }
    [[nodiscard]] int input_status() const noexcept { return proc_status_[0]; }
    [[nodiscard]] int output_status() const noexcept { return proc_status_[1]; }
    [[nodiscard]] int main_status() const noexcept { return main_status_; }
    [[nodiscard]] int skipped() const noexcept { return skipped_; }
    [[nodiscard]] std::int64_t reboots(int processor) const noexcept { return reboots_[processor]; }
    [[nodiscard]] bool halted() const noexcept { return halted_; }
    [[nodiscard]] Cause first_cause() const noexcept { return cause_; }
    [[nodiscard]] std::int64_t reward_up() const noexcept { return reward_[0]; }
    [[nodiscard]] std::int64_t reward_danger() const noexcept { return reward_[1]; }
    [[nodiscard]] std::int64_t reward_shutdown() const noexcept { return reward_[2]; }

    /// Current values of the four failure conditions (index 1..4; 0 unused).
    [[nodiscard]] bool failure(int i) const;

private:
    sim::Thread sensor(int group, RandomSource rng);
    sim::Thread actuator(int group, RandomSource rng);
    sim::Thread main_processor(RandomSource rng);
    sim::Thread io_processor(int which, RandomSource rng);
    sim::Thread poll();
    sim::Thread reward();

    void shut_down(Cause cause);
    Tick delay(RandomSource& rng, double mean) const;

    sim::Kernel& k_;
    EcsParams params_;
    std::vector<int> sensors_ok_;
    std::vector<int> actuators_ok_;
    int sensor_groups_ok_ = 0;
    int actuator_groups_ok_ = 0;
    int proc_status_[2] = {2, 2};
    int main_status_ = 1;
    int skipped_ = 0;
    std::int64_t reboots_[2] = {0, 0};
    std::int64_t reward_[3] = {0, 0, 0};
    bool halted_ = false;
    Cause cause_ = Cause::None;
    sim::ProbeId tick_probe_;
};

// ---------------------------------------------------------------------------
// Scheduler coverage examples

/// Example k in {1, 2, 3}. Processes are named A, B (and C); each appends its
/// letter to the order string at every segment it executes.
///   1: two processes, one segment each (2 orders)
///   2: two processes, each waits once with wait_time(0) (4 orders)
///   3: three processes, 3 segments each separated by two barriers (216 orders)
class SchedModel : public Model {
public:
    SchedModel(sim::Kernel& kernel, int example);

    [[nodiscard]] const std::string& order() const noexcept { return order_; }
    [[nodiscard]] int example() const noexcept { return example_; }

private:
    sim::Thread worker(char name);
    sim::Thread barrier_worker(char name);

    sim::Kernel& k_;
    int example_;
    std::string order_;
    int arrived_[2] = {0, 0};
    sim::EventId barrier_[2] = {0, 0};
    int processes_ = 0;
};

/// Runs example k once with the given scheduler seed and returns its order string.
std::string run_sched_example(int example, std::uint64_t seed);

/// Runs example k once with an explicit scheduler choice function.
std::string run_sched_example(int example, const std::function<std::size_t(std::size_t)>& chooser);

/// All dispatch-order strings reachable by any sequence of scheduler choices,
/// by depth-first enumeration of choice sequences.
std::vector<std::string> enumerate_sched_orders(int example);

} // namespace smcheck::models
