#include "smcheck/monitor.hpp"

#include <algorithm>
#include <cctype>

#include "smcheck/log.hpp"

namespace smcheck::mon {

namespace {

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

constexpr std::string_view notified_suffix = ".notified";

bool is_value_probe(std::string_view probe)
{
    const auto colon = probe.rfind(':');
    if (colon == std::string_view::npos || colon + 1 == probe.size())
        return false;
    return std::all_of(probe.begin() + static_cast<std::ptrdiff_t>(colon + 1), probe.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool temporal_free(const bltl::Formula& f)
{
    using Op = bltl::Formula::Op;
    if (f.op == Op::Until || f.op == Op::Eventually || f.op == Op::Globally)
        return false;
    return (!f.lhs || temporal_free(*f.lhs)) && (!f.rhs || temporal_free(*f.rhs));
}

bool holds(const bltl::Formula& f, const VarRegistry& reg, const std::vector<double>& values)
{
    using Op = bltl::Formula::Op;
    switch (f.op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return bltl::eval_expr(*f.atom, reg, values) != 0.0;
    case Op::Not: return !holds(*f.lhs, reg, values);
    case Op::And: return holds(*f.lhs, reg, values) && holds(*f.rhs, reg, values);
    case Op::Or: return holds(*f.lhs, reg, values) || holds(*f.rhs, reg, values);
    case Op::Implies: return !holds(*f.lhs, reg, values) || holds(*f.rhs, reg, values);
    default: return false;
    }
}

} // namespace

std::string normalize_probe_spec(std::string_view spec)
{
    std::string s;
    for (char c : spec)
        if (c != '"' && !std::isspace(static_cast<unsigned char>(c)))
            s.push_back(c);
    if (!s.empty() && s.front() == '%')
        s.erase(0, 1);
    const auto colon = s.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size() || s[colon - 1] == ':')
        return s;
    std::string func = s.substr(0, colon);
    const std::string suffix = s.substr(colon + 1);
    if (auto paren = func.find('('); paren != std::string::npos)
        func.erase(paren);
    if (auto scope = func.rfind("::"); scope != std::string::npos)
        func.erase(0, scope + 2);
    return func + ":" + suffix;
}

std::vector<std::string> split_resolution(std::string_view text)
{
    std::vector<std::string> terms;
    std::size_t start = 0;
    for (;;) {
        const auto bar = text.find('|', start);
        std::string term = trim(text.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
        if (term.empty())
            throw MonitorError("empty term in temporal resolution '" + std::string(text) + "'");
        terms.push_back(std::move(term));
        if (bar == std::string_view::npos)
            break;
        start = bar + 1;
        if (start < text.size() && text[start] == '|')
            ++start;
    }
    return terms;
}

Monitor::Monitor(sim::Kernel& kernel, const models::Model* model, std::vector<Binding> bindings,
                 std::string_view resolution, bltl::FormulaPtr formula, MonitorOptions options)
    : kernel_(kernel), model_(model), options_(std::move(options)), formula_(std::move(formula))
{
    hook_terms_.assign(sim::hook_count, false);
    hook_flags_.assign(sim::hook_count, false);
    event_terms_.assign(kernel_.event_count(), false);
    event_flags_.assign(kernel_.event_count(), false);
    probe_terms_.assign(kernel_.probe_count(), false);
    probe_flags_.assign(kernel_.probe_count(), false);
    probe_values_.assign(kernel_.probe_count(), 0.0);
    probe_referenced_.assign(kernel_.probe_count(), false);

    for (auto& b : bindings)
        add_binding(std::move(b));
    parse_resolution(resolution);

    std::vector<std::string> wanted;
    if (formula_)
        wanted = bltl::variables(*formula_);
    for (const auto& extra : options_.extra_variables)
        if (std::find(wanted.begin(), wanted.end(), extra) == wanted.end())
            wanted.push_back(extra);
    for (const auto& name : wanted)
        resolve(name);

    VarRegistry registry;
    for (std::size_t i = 0; i < bindings_.size(); ++i) {
        const auto& b = bindings_[i];
        if (options_.project && std::find(wanted.begin(), wanted.end(), b.name) == wanted.end())
            continue;
        recorded_.push_back(i);
        registry.add(VarInfo{b.name, *b.kind, b.target});
    }
    trace_ = Trace(std::move(registry));
    trace_.resolution = trim(resolution);
    if (formula_)
        evaluator_.emplace(*formula_, trace_.registry());

    kernel_.add_observer(this);
}

std::size_t Monitor::add_binding(Binding b)
{
    for (const auto& existing : bindings_)
        if (existing.name == b.name)
            throw MonitorError("observed variable '" + b.name + "' is declared twice");

    Source s{b.source};
    switch (b.source) {
    case Binding::Source::Attribute: {
        const models::Attribute* attr = model_ ? model_->find_attribute(b.target) : nullptr;
        if (!attr)
            throw MonitorError("observed variable '" + b.name + "': the model has no attribute '" + b.target + "'");
        s.attribute = attr;
        if (!b.kind)
            b.kind = attr->kind;
        break;
    }
    case Binding::Source::Location: {
        b.target = normalize_probe_spec(b.target);
        auto probe = kernel_.find_probe(b.target);
        if (!probe)
            throw MonitorError("observed variable '" + b.name + "': the model has no location '" + b.target + "'");
        s.index = *probe;
        s.probe_value = is_value_probe(b.target);
        probe_referenced_[*probe] = true;
        if (!b.kind)
            b.kind = s.probe_value ? VarKind::Real : VarKind::Bool;
        break;
    }
    case Binding::Source::Phase: {
        auto hook = sim::parse_hook(b.target);
        if (!hook)
            throw MonitorError("observed variable '" + b.name + "': unknown kernel phase '" + b.target + "'");
        s.index = static_cast<std::size_t>(*hook);
        if (!b.kind)
            b.kind = VarKind::Bool;
        break;
    }
    case Binding::Source::EventFlag: {
        auto event = kernel_.find_event(b.target);
        if (!event)
            throw MonitorError("observed variable '" + b.name + "': unknown event '" + b.target + "'");
        s.index = *event;
        if (!b.kind)
            b.kind = VarKind::Bool;
        break;
    }
    }
    bindings_.push_back(std::move(b));
    sources_.push_back(s);
    return bindings_.size() - 1;
}

void Monitor::resolve(const std::string& name)
{
    for (const auto& b : bindings_)
        if (b.name == name)
            return;
    Binding b;
    b.name = name;
    b.target = name;
    if (sim::parse_hook(name)) {
        b.source = Binding::Source::Phase;
    } else if (name.size() > notified_suffix.size() && name.ends_with(notified_suffix)
               && kernel_.find_event(name.substr(0, name.size() - notified_suffix.size()))) {
        b.source = Binding::Source::EventFlag;
        b.target = name.substr(0, name.size() - notified_suffix.size());
    } else if (kernel_.find_probe(name)) {
        b.source = Binding::Source::Location;
    } else if (model_ && model_->find_attribute(name)) {
        b.source = Binding::Source::Attribute;
    } else {
        throw MonitorError("cannot resolve observed variable '" + name
                           + "': not a kernel phase, event flag, location, or model attribute");
    }
    add_binding(std::move(b));
}

void Monitor::parse_resolution(std::string_view text)
{
    if (trim(text).empty())
        throw MonitorError("temporal resolution is empty");
    for (const auto& term : split_resolution(text)) {
        if (auto hook = sim::parse_hook(term)) {
            hook_terms_[static_cast<std::size_t>(*hook)] = true;
            continue;
        }
        if (term.ends_with(notified_suffix)) {
            if (auto e = kernel_.find_event(term.substr(0, term.size() - notified_suffix.size()))) {
                event_terms_[*e] = true;
                continue;
            }
        }
        if (auto p = kernel_.find_probe(normalize_probe_spec(term))) {
            probe_terms_[*p] = true;
            probe_referenced_[*p] = true;
            continue;
        }
        auto located = std::find_if(bindings_.begin(), bindings_.end(), [&](const Binding& b) {
            return b.name == term && b.source == Binding::Source::Location;
        });
        if (located != bindings_.end()) {
            const auto idx = static_cast<std::size_t>(located - bindings_.begin());
            probe_terms_[sources_[idx].index] = true;
            continue;
        }

        bltl::FormulaPtr f;
        try {
            f = bltl::parse_formula(term);
        } catch (const bltl::ParseError& e) {
            throw MonitorError("unresolvable temporal resolution term '" + term + "': " + e.what());
        }
        if (!temporal_free(*f))
            throw MonitorError("temporal resolution term '" + term + "' must not contain temporal operators");
        ExprTerm t;
        t.formula = f;
        for (const auto& name : bltl::variables(*f)) {
            try {
                resolve(name);
            } catch (const MonitorError& e) {
                throw MonitorError("unresolvable temporal resolution term '" + term + "': " + e.what());
            }
            for (std::size_t i = 0; i < bindings_.size(); ++i) {
                if (bindings_[i].name == name) {
                    t.vars.push_back(i);
                    t.registry.add(VarInfo{name, *bindings_[i].kind, {}});
                    break;
                }
            }
        }
        expr_terms_.push_back(std::move(t));
    }
}

double Monitor::read(const Source& s) const
{
    switch (s.kind) {
    case Binding::Source::Attribute: return s.attribute->get();
    case Binding::Source::Location: return s.probe_value ? probe_values_[s.index] : (probe_flags_[s.index] ? 1.0 : 0.0);
    case Binding::Source::Phase: return hook_flags_[s.index] ? 1.0 : 0.0;
    case Binding::Source::EventFlag: return event_flags_[s.index] ? 1.0 : 0.0;
    }
    return 0.0;
}

bool Monitor::expr_terms_fire()
{
    std::vector<double> values;
    for (const auto& t : expr_terms_) {
        values.clear();
        for (auto idx : t.vars)
            values.push_back(read(sources_[idx]));
        if (holds(*t.formula, t.registry, values))
            return true;
    }
    return false;
}

void Monitor::on_hook(sim::Hook h)
{
    if (!sampling_)
        return;
    hook_flags_[static_cast<std::size_t>(h)] = true;
    any_hook_flag_ = true;
    if (h == sim::Hook::InitEnd && options_.initial_sample)
        pending_ = true;
    if (hook_terms_[static_cast<std::size_t>(h)])
        pending_ = true;
    if (!pending_ && !expr_terms_.empty() && expr_terms_fire())
        pending_ = true;
}

void Monitor::on_event_notified(sim::EventId e)
{
    if (!sampling_)
        return;
    if (e >= event_flags_.size()) {
        event_flags_.resize(e + 1, false);
        event_terms_.resize(e + 1, false);
    }
    event_flags_[e] = true;
    if (event_terms_[e]) {
        if (kernel_.current_process())
            sample();
        else
            pending_ = true;
    }
}

void Monitor::on_activity()
{
    if (pending_)
        sample();
    if (any_hook_flag_) {
        std::fill(hook_flags_.begin(), hook_flags_.end(), false);
        any_hook_flag_ = false;
    }
}

void Monitor::on_probe(sim::ProbeId p, std::optional<double> value)
{
    if (!sampling_)
        return;
    if (p >= probe_flags_.size() || !probe_referenced_[p]) {
        if (p >= probe_warned_.size())
            probe_warned_.resize(p + 1, false);
        if (!probe_warned_[p]) {
            probe_warned_[p] = true;
            warn_once("probe:" + kernel_.probe_name(p),
                      "location '" + kernel_.probe_name(p) + "' fired but is not observed; ignored");
        }
        return;
    }
    probe_flags_[p] = true;
    if (value)
        probe_values_[p] = *value;
    if (probe_terms_[p])
        sample();
}

void Monitor::on_finish()
{
    if (pending_)
        sample();
    finished_ = true;
    if (sampling_ && !trace_.complete())
        trace_.mark_complete();
}

void Monitor::sample()
{
    pending_ = false;
    if (!sampling_)
        return;
    TimedState s;
    s.time = kernel_.now();
    s.values.reserve(recorded_.size());
    for (auto idx : recorded_)
        s.values.push_back(read(sources_[idx]));
    std::fill(probe_flags_.begin(), probe_flags_.end(), false);
    std::fill(event_flags_.begin(), event_flags_.end(), false);
    try {
        trace_.append(std::move(s));
    } catch (const TraceError& e) {
        throw MonitorError(std::string("sampling failed: ") + e.what());
    }
    if (!evaluator_)
        return;
    verdict_ = evaluator_->evaluate(trace_.states(), false);
    if (verdict_ != bltl::Verdict::Inconclusive) {
        decided_early_ = true;
        if (options_.stop_on_verdict) {
            sampling_ = false;
            kernel_.request_stop();
        }
    }
}

bltl::Verdict Monitor::final_verdict()
{
    if (!evaluator_)
        throw MonitorError("final_verdict requires a formula");
    if (!sampling_)
        return verdict_;
    if (!trace_.complete())
        trace_.mark_complete();
    if (trace_.empty())
        throw MonitorError("the run produced no samples; check the temporal resolution");
    verdict_ = evaluator_->evaluate(trace_.states(), true);
    return verdict_;
}

} // namespace smcheck::mon
