#include "smcheck/trace.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace smcheck {

using json = nlohmann::ordered_json;

std::string_view to_string(VarKind kind)
{
    switch (kind) {
    case VarKind::Int: return "int";
    case VarKind::Real: return "real";
    case VarKind::Bool: return "bool";
    }
    return "?";
}

std::optional<VarKind> parse_var_kind(std::string_view text)
{
    if (text == "int")
        return VarKind::Int;
    if (text == "real" || text == "double" || text == "float")
        return VarKind::Real;
    if (text == "bool")
        return VarKind::Bool;
    return std::nullopt;
}

VarRegistry::VarRegistry(std::vector<VarInfo> vars)
{
    for (auto& v : vars)
        add(std::move(v));
}

std::size_t VarRegistry::add(VarInfo var)
{
    if (index_of(var.name))
        throw TraceError("duplicate variable '" + var.name + "'");
    vars_.push_back(std::move(var));
    return vars_.size() - 1;
}

std::optional<std::size_t> VarRegistry::index_of(std::string_view name) const
{
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name)
            return i;
    return std::nullopt;
}

bool value_fits(VarKind kind, double value)
{
    if (!std::isfinite(value))
        return false;
    switch (kind) {
    case VarKind::Int: return std::trunc(value) == value && std::fabs(value) <= 0x1.0p53;
    case VarKind::Bool: return value == 0.0 || value == 1.0;
    case VarKind::Real: return true;
    }
    return false;
}

Trace::Trace(VarRegistry registry) : registry_(std::move(registry)) {}

void Trace::append(TimedState state)
{
    if (complete_)
        throw TraceError("cannot append to a complete trace");
    if (state.values.size() != registry_.size())
        throw TraceError("state arity " + std::to_string(state.values.size()) + " does not match registry size "
                         + std::to_string(registry_.size()));
    if (!states_.empty() && state.time < states_.back().time)
        throw TraceError("time regression: " + std::to_string(state.time) + " after "
                         + std::to_string(states_.back().time));
    for (std::size_t i = 0; i < state.values.size(); ++i) {
        if (!value_fits(registry_[i].kind, state.values[i]))
            throw TraceError("value " + std::to_string(state.values[i]) + " is not a valid "
                             + std::string(to_string(registry_[i].kind)) + " for '" + registry_[i].name + "'");
    }
    states_.push_back(std::move(state));
}

double Trace::value(std::size_t i, std::string_view name) const
{
    auto idx = registry_.index_of(name);
    if (!idx)
        throw TraceError("unknown variable '" + std::string(name) + "'");
    return states_.at(i).values[*idx];
}

Trace Trace::project(std::span<const std::string> names) const
{
    std::vector<std::size_t> columns;
    VarRegistry reg;
    for (const auto& name : names) {
        auto idx = registry_.index_of(name);
        if (!idx)
            throw TraceError("cannot project on unknown variable '" + name + "'");
        columns.push_back(*idx);
        reg.add(registry_[*idx]);
    }
    Trace out(std::move(reg));
    out.resolution = resolution;
    out.seed = seed;
    out.states_.reserve(states_.size());
    for (const auto& s : states_) {
        TimedState p;
        p.time = s.time;
        p.values.reserve(columns.size());
        for (auto c : columns)
            p.values.push_back(s.values[c]);
        out.states_.push_back(std::move(p));
    }
    out.complete_ = complete_;
    return out;
}

namespace {

json value_to_json(VarKind kind, double v)
{
    switch (kind) {
    case VarKind::Int: return static_cast<std::int64_t>(v);
    case VarKind::Bool: return v != 0.0;
    case VarKind::Real: return v;
    }
    return v;
}

double value_from_json(const json& j, VarKind kind)
{
    if (kind == VarKind::Bool) {
        if (j.is_boolean())
            return j.get<bool>() ? 1.0 : 0.0;
        throw TraceError("expected a boolean");
    }
    if (kind == VarKind::Int) {
        if (j.is_number_integer())
            return static_cast<double>(j.get<std::int64_t>());
        throw TraceError("expected an integer");
    }
    if (!j.is_number())
        throw TraceError("expected a number");
    return j.get<double>();
}

} // namespace

void write_jsonl(std::ostream& out, const Trace& trace)
{
    json header;
    json reg = json::array();
    for (const auto& v : trace.registry().vars()) {
        json entry{{"name", v.name}, {"kind", std::string(to_string(v.kind))}};
        if (!v.description.empty())
            entry["description"] = v.description;
        reg.push_back(std::move(entry));
    }
    header["registry"] = std::move(reg);
    header["complete"] = trace.complete();
    header["resolution"] = trace.resolution;
    if (trace.seed)
        header["seed"] = *trace.seed;
    out << header.dump() << '\n';

    const auto& vars = trace.registry().vars();
    for (const auto& s : trace.states()) {
        json values = json::array();
        for (std::size_t i = 0; i < s.values.size(); ++i)
            values.push_back(value_to_json(vars[i].kind, s.values[i]));
        json line{{"t", s.time}, {"v", std::move(values)}};
        out << line.dump() << '\n';
    }
}

Trace read_jsonl(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) -> TraceError {
        return TraceError("line " + std::to_string(line_no) + ": " + what);
    };

    Trace trace;
    bool complete = false;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw fail(std::string("malformed JSON: ") + e.what());
        }
        try {
            if (!have_header) {
                VarRegistry reg;
                for (const auto& entry : j.at("registry")) {
                    auto kind = parse_var_kind(entry.at("kind").get<std::string>());
                    if (!kind)
                        throw fail("unknown variable kind");
                    reg.add(VarInfo{entry.at("name").get<std::string>(), *kind, entry.value("description", "")});
                }
                trace = Trace(std::move(reg));
                complete = j.at("complete").get<bool>();
                trace.resolution = j.value("resolution", "");
                if (j.contains("seed"))
                    trace.seed = j.at("seed").get<std::uint64_t>();
                have_header = true;
                continue;
            }
            const auto& vals = j.at("v");
            if (!vals.is_array() || vals.size() != trace.registry().size())
                throw fail("state arity does not match registry");
            TimedState s;
            s.time = j.at("t").get<Tick>();
            for (std::size_t i = 0; i < vals.size(); ++i)
                s.values.push_back(value_from_json(vals[i], trace.registry()[i].kind));
            trace.append(std::move(s));
        } catch (const TraceError& e) {
            if (std::string_view(e.what()).starts_with("line "))
                throw;
            throw fail(e.what());
        } catch (const json::exception& e) {
            throw fail(e.what());
        }
    }
    if (!have_header)
        throw TraceError("missing trace header");
    if (complete)
        trace.mark_complete();
    return trace;
}

void write_csv(std::ostream& out, const Trace& trace)
{
    out << 't';
    for (const auto& v : trace.registry().vars())
        out << ',' << v.name;
    out << '\n';
    const auto& vars = trace.registry().vars();
    for (const auto& s : trace.states()) {
        out << s.time;
        for (std::size_t i = 0; i < s.values.size(); ++i)
            // Booleans stay numeric so every column parses as a number.
            out << ',' << (vars[i].kind == VarKind::Bool ? json(s.values[i] != 0.0 ? 1 : 0)
                                                          : value_to_json(vars[i].kind, s.values[i]))
                              .dump();
        out << '\n';
    }
}

} // namespace smcheck
