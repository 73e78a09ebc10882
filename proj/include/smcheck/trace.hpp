#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smcheck {

/// Simulation time in kernel ticks. The physical meaning of a tick is model metadata.
using Tick = std::uint64_t;

enum class VarKind { Int, Real, Bool };

std::string_view to_string(VarKind kind);
std::optional<VarKind> parse_var_kind(std::string_view text);

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VarInfo {
    std::string name;
    VarKind kind = VarKind::Int;
    std::string description;

    bool operator==(const VarInfo&) const = default;
};

/// Ordered set of observed variables; the order is the column order of every state.
class VarRegistry {
public:
    VarRegistry() = default;
    explicit VarRegistry(std::vector<VarInfo> vars);

    /// Throws TraceError on a duplicate name.
    std::size_t add(VarInfo var);

    [[nodiscard]] std::size_t size() const noexcept { return vars_.size(); }
    [[nodiscard]] bool empty() const noexcept { return vars_.empty(); }
    [[nodiscard]] const VarInfo& operator[](std::size_t i) const { return vars_[i]; }
    [[nodiscard]] std::span<const VarInfo> vars() const noexcept { return vars_; }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;

    bool operator==(const VarRegistry&) const = default;

private:
    std::vector<VarInfo> vars_;
};

/// Valuation of every registry entry at one sampling instant.
/// Values are stored as doubles; ints are exact up to 2^53, bools are 0/1.
struct TimedState {
    std::vector<double> values;
    Tick time = 0;

    bool operator==(const TimedState&) const = default;
};

/// Returns true when `value` is representable as `kind` (integral for Int, 0/1 for Bool).
bool value_fits(VarKind kind, double value);

class Trace {
public:
    Trace() = default;
    explicit Trace(VarRegistry registry);

    /// Appends a state. Rejects appends after completion, time regression, wrong
    /// arity, and values that do not fit the declared kinds.
    void append(TimedState state);

    /// Marks the generating simulation as ended; no further appends are allowed.
    void mark_complete() noexcept { complete_ = true; }

    [[nodiscard]] bool complete() const noexcept { return complete_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] bool empty() const noexcept { return states_.empty(); }
    [[nodiscard]] const TimedState& operator[](std::size_t i) const { return states_[i]; }
    [[nodiscard]] std::span<const TimedState> states() const noexcept { return states_; }
    [[nodiscard]] const VarRegistry& registry() const noexcept { return registry_; }

    /// Value of variable `name` at state `i`. Throws TraceError for an unknown name.
    [[nodiscard]] double value(std::size_t i, std::string_view name) const;

    /// Same length and timestamps, keeping only `names` (in the order given).
    [[nodiscard]] Trace project(std::span<const std::string> names) const;

    // Header metadata carried through serialization.
    std::string resolution;
    std::optional<std::uint64_t> seed;

    bool operator==(const Trace&) const = default;

private:
    VarRegistry registry_;
    std::vector<TimedState> states_;
    bool complete_ = false;
};

/// JSONL: a header object {"registry": [...], "complete": b, "resolution": s, "seed": n}
/// followed by one {"t": <int>, "v": [...]} object per state.
void write_jsonl(std::ostream& out, const Trace& trace);

/// Inverse of write_jsonl. Throws TraceError naming the offending line.
Trace read_jsonl(std::istream& in);

/// CSV with a leading `t` column and one column per variable.
void write_csv(std::ostream& out, const Trace& trace);

} // namespace smcheck
