#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smcheck/bltl.hpp"
#include "smcheck/evaluator.hpp"
#include "smcheck/kernel.hpp"
#include "smcheck/models.hpp"
#include "smcheck/trace.hpp"

namespace smcheck::mon {

/// Unresolvable binding or resolution term, or a sampling failure.
class MonitorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Where an observed variable takes its value from.
struct Binding {
    enum class Source { Attribute, Location, Phase, EventFlag };

    std::string name;
    Source source = Source::Attribute;
    /// Attribute path, probe spec, hook name, or event name (without ".notified").
    std::string target;
    /// Declared kind; defaults follow the source (attribute kind, bool flags, real probe values).
    std::optional<VarKind> kind;

    bool operator==(const Binding&) const = default;
};

/// `"%Producer::send()":call` -> `send:call`; `% A::foo():entry` -> `foo:entry`.
/// Names already in `f:suffix` form are returned unchanged.
[[nodiscard]] std::string normalize_probe_spec(std::string_view spec);

/// Splits "A | B | x > 3" into trimmed terms; throws MonitorError on an empty term.
[[nodiscard]] std::vector<std::string> split_resolution(std::string_view text);

struct MonitorOptions {
    /// Record one state at the end of initialization (time 0).
    bool initial_sample = true;
    /// Ask the kernel to stop as soon as the formula verdict is decided.
    bool stop_on_verdict = true;
    /// Record only the variables the formula (and `extra_variables`) mention.
    bool project = false;
    std::vector<std::string> extra_variables;
};

/// Samples observed variables into a Trace whenever a resolution term fires
/// and feeds the online evaluator.
///
/// Sampling instants: phase-hook and delta/timed event triggers mark a sample
/// as pending; the pending sample is taken at the next kernel activity, so all
/// hooks between two activities collapse into one state carrying all their
/// flags. Probe fires and immediate notifications inside a process sample at
/// once. Phase flags are true only in the sample of their instant; probe and
/// event flags stay set until the next sample.
///
/// Names the formula references without an explicit binding are resolved, in
/// order, as a hook name, "<event>.notified", a declared probe, or a model
/// attribute path.
class Monitor : public sim::KernelObserver {
public:
    Monitor(sim::Kernel& kernel, const models::Model* model, std::vector<Binding> bindings,
            std::string_view resolution, bltl::FormulaPtr formula = nullptr, MonitorOptions options = {});

    Monitor(const Monitor&) = delete;
    Monitor& operator=(const Monitor&) = delete;

    [[nodiscard]] const Trace& trace() const noexcept { return trace_; }
    [[nodiscard]] Trace take_trace() { return std::move(trace_); }
    [[nodiscard]] const std::vector<Binding>& bindings() const noexcept { return bindings_; }

    /// Latest online verdict (Inconclusive before the first sample or without a formula).
    [[nodiscard]] bltl::Verdict verdict() const noexcept { return verdict_; }
    /// True once the online verdict became definite before the run ended.
    [[nodiscard]] bool decided_early() const noexcept { return decided_early_; }

    /// Verdict on the final trace, treating it as complete when the run ended
    /// without an early stop. Requires a formula.
    [[nodiscard]] bltl::Verdict final_verdict();

    void on_hook(sim::Hook h) override;
    void on_event_notified(sim::EventId e) override;
    void on_activity() override;
    void on_probe(sim::ProbeId p, std::optional<double> value) override;
    void on_finish() override;

private:
    struct Source {
        Binding::Source kind;
        const models::Attribute* attribute = nullptr;
        std::size_t index = 0; // hook, event, or probe id
        bool probe_value = false;
    };

    struct ExprTerm {
        bltl::FormulaPtr formula;
        std::vector<std::size_t> vars; // indices into sources_
        VarRegistry registry;
    };

    void resolve(const std::string& name);
    std::size_t add_binding(Binding b);
    void parse_resolution(std::string_view text);
    double read(const Source& s) const;
    bool expr_terms_fire();
    void sample();

    sim::Kernel& kernel_;
    const models::Model* model_;
    MonitorOptions options_;

    std::vector<Binding> bindings_;
    std::vector<Source> sources_;
    std::vector<std::size_t> recorded_; // indices into sources_

    std::vector<bool> hook_terms_;
    std::vector<bool> event_terms_;
    std::vector<bool> probe_terms_;
    std::vector<ExprTerm> expr_terms_;
    std::vector<bool> probe_referenced_;
    std::vector<bool> probe_warned_; // warn_once already called from this monitor

    std::vector<bool> hook_flags_;
    std::vector<bool> event_flags_;
    std::vector<bool> probe_flags_;
    std::vector<double> probe_values_;
    bool pending_ = false;
    bool any_hook_flag_ = false;

    Trace trace_;
    bltl::FormulaPtr formula_;
    std::optional<bltl::Evaluator> evaluator_;
    bltl::Verdict verdict_ = bltl::Verdict::Inconclusive;
    bool decided_early_ = false;
    bool sampling_ = true;
    bool finished_ = false;
};

} // namespace smcheck::mon
