#include "smcheck/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "smcheck/bltl.hpp"
#include "smcheck/log.hpp"

namespace smcheck {

ConfigError::ConfigError(const std::string& message, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line)
{
}

namespace {

constexpr std::string_view ignored_directives[] = {
    "output_file", "mon_name", "plasma_file", "plasma_project_name", "plasma_model_name",
    "plasma_model_content", "write_to_file", "usertype", "type", "include",
};

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Splits off the first whitespace-delimited word.
std::pair<std::string_view, std::string_view> head(std::string_view s)
{
    s = trim(s);
    const auto p = s.find_first_of(" \t");
    if (p == std::string_view::npos)
        return {s, {}};
    return {s.substr(0, p), trim(s.substr(p))};
}

std::string fmt(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

class Parser {
public:
    Config run(std::string_view text)
    {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_;
            directive(trim(raw));
            if (nl == std::string_view::npos)
                break;
            pos = nl + 1;
        }
        finish();
        return std::move(c_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line_); }

    std::string_view need(std::string_view value, std::string_view what) const
    {
        if (value.empty())
            fail("missing " + std::string(what));
        return value;
    }

    double real(std::string_view v) const
    {
        double x = 0.0;
        auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || end != v.data() + v.size() || std::isnan(x))
            fail("expected a number, got '" + std::string(v) + "'");
        return x;
    }

    std::uint64_t natural(std::string_view v) const
    {
        std::uint64_t x = 0;
        auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || end != v.data() + v.size())
            fail("expected a natural number, got '" + std::string(v) + "'");
        return x;
    }

    void once(std::string_view key)
    {
        if (!seen_.emplace(key).second)
            fail("directive '" + std::string(key) + "' given twice");
    }

    void add_binding(std::string name, mon::Binding::Source source, std::string target)
    {
        for (const auto& b : c_.bindings)
            if (b.name == name)
                fail("variable '" + name + "' bound twice");
        c_.bindings.push_back(mon::Binding{std::move(name), source, std::move(target), std::nullopt});
    }

    void directive(std::string_view line)
    {
        if (line.empty() || line.front() == '#')
            return;
        auto [key, rest] = head(line);
        for (auto ignored : ignored_directives) {
            if (key == ignored) {
                warn_once("config:" + std::string(key), "directive '" + std::string(key) + "' has no effect here; ignored");
                return;
            }
        }
        if (key == "model") {
            once(key);
            c_.model = need(rest, "model name");
        } else if (key == "param") {
            auto [name, value] = head(rest);
            need(name, "parameter name");
            if (!c_.params.emplace(std::string(name), std::string(need(value, "parameter value"))).second)
                fail("parameter '" + std::string(name) + "' given twice");
        } else if (key == "attribute") {
            auto [path, name] = head(rest);
            need(path, "accessor path");
            add_binding(std::string(need(name, "variable name")), mon::Binding::Source::Attribute, std::string(path));
        } else if (key == "location" || key == "phase" || key == "event") {
            auto [name, target] = head(rest);
            need(name, "variable name");
            need(target, key == "location" ? "probe spec" : key == "phase" ? "hook name" : "event name");
            const auto source = key == "location" ? mon::Binding::Source::Location
                                : key == "phase"  ? mon::Binding::Source::Phase
                                                  : mon::Binding::Source::EventFlag;
            if (source == mon::Binding::Source::Phase && !sim::parse_hook(target))
                fail("unknown hook '" + std::string(target) + "'");
            add_binding(std::string(name), source, std::string(target));
        } else if (key == "att_type") {
            auto [kind, name] = head(rest);
            const auto k = parse_var_kind(need(kind, "type"));
            if (!k)
                fail("unknown type '" + std::string(kind) + "' (expected int, real or bool)");
            need(name, "variable name");
            if (!types_.emplace(std::string(name), *k).second)
                fail("att_type for '" + std::string(name) + "' given twice");
            type_order_.emplace_back(name);
        } else if (key == "time_resolution") {
            once(key);
            c_.resolution = need(rest, "resolution terms");
            try {
                (void)mon::split_resolution(c_.resolution);
            } catch (const mon::MonitorError& e) {
                fail(e.what());
            }
        } else if (key == "formula") {
            c_.queries.emplace_back(need(rest, "query"));
            query_lines_.push_back(line_);
        } else if (key == "let") {
            auto [name, value] = head(rest);
            need(name, "name");
            if (!c_.lets.emplace(std::string(name), std::string(need(value, "value"))).second)
                fail("let '" + std::string(name) + "' given twice");
        } else if (key == "delta" || key == "alpha" || key == "beta") {
            once(key);
            const double v = real(need(rest, "value"));
            if (!(v > 0.0 && v < 1.0))
                fail(std::string(key) + " must lie in (0, 1)");
            (key == "delta" ? c_.stats.delta : key == "alpha" ? c_.stats.alpha : c_.stats.beta) = v;
        } else if (key == "seed") {
            once(key);
            c_.seed = natural(need(rest, "seed"));
        } else if (key == "max_ticks") {
            once(key);
            c_.max_ticks = natural(need(rest, "tick count"));
        } else if (key == "mean_runs") {
            once(key);
            c_.mean_runs = natural(need(rest, "run count"));
            if (*c_.mean_runs == 0)
                fail("mean_runs must be positive");
        } else if (key == "result_file") {
            once(key);
            c_.result_file = need(rest, "path");
        } else if (key == "csv_file") {
            once(key);
            c_.csv_file = need(rest, "path");
        } else {
            fail("unknown directive '" + std::string(key) + "'");
        }
    }

    void finish()
    {
        for (const auto& name : type_order_) {
            const auto kind = types_.at(name);
            bool found = false;
            for (auto& b : c_.bindings) {
                if (b.name == name) {
                    b.kind = kind;
                    found = true;
                }
            }
            // A typed name without a source is read from the model attribute of that name.
            if (!found)
                c_.bindings.push_back(mon::Binding{name, mon::Binding::Source::Attribute, name, kind});
        }
        if (c_.model.empty())
            throw ConfigError("no model given (directive 'model')");
        if (!models::find_model(c_.model))
            throw ConfigError("unknown model '" + c_.model + "'");
        if (c_.queries.empty())
            throw ConfigError("no query given (directive 'formula')");
        for (std::size_t i = 0; i < c_.queries.size(); ++i) {
            try {
                (void)bltl::parse_query(substitute(c_.queries[i], c_.lets));
            } catch (const bltl::ParseError& e) {
                throw ConfigError("formula: " + std::string(e.what()), query_lines_[i]);
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), query_lines_[i]);
            }
        }
    }

    Config c_;
    std::size_t line_ = 0;
    std::set<std::string, std::less<>> seen_;
    std::map<std::string, VarKind, std::less<>> types_;
    std::vector<std::string> type_order_;
    std::vector<std::size_t> query_lines_;
};

} // namespace

std::string substitute(std::string_view query, const std::map<std::string, std::string, std::less<>>& lets)
{
    std::string out;
    std::size_t pos = 0;
    while (pos < query.size()) {
        const auto open = query.find('{', pos);
        if (open == std::string_view::npos) {
            out += query.substr(pos);
            break;
        }
        const auto close = query.find('}', open);
        if (close == std::string_view::npos)
            throw ConfigError("unterminated '{' in query");
        out += query.substr(pos, open - pos);
        const auto name = trim(query.substr(open + 1, close - open - 1));
        const auto it = lets.find(name);
        if (it == lets.end())
            throw ConfigError("query refers to undefined '{" + std::string(name) + "}'");
        out += it->second;
        pos = close + 1;
    }
    return out;
}

Config parse_config(std::string_view text)
{
    return Parser{}.run(text);
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const Config& c)
{
    std::ostringstream o;
    o << "model " << c.model << '\n';
    for (const auto& [k, v] : c.params)
        o << "param " << k << ' ' << v << '\n';
    for (const auto& b : c.bindings) {
        switch (b.source) {
        case mon::Binding::Source::Attribute: o << "attribute " << b.target << ' ' << b.name << '\n'; break;
        case mon::Binding::Source::Location: o << "location " << b.name << ' ' << b.target << '\n'; break;
        case mon::Binding::Source::Phase: o << "phase " << b.name << ' ' << b.target << '\n'; break;
        case mon::Binding::Source::EventFlag: o << "event " << b.name << ' ' << b.target << '\n'; break;
        }
    }
    for (const auto& b : c.bindings)
        if (b.kind)
            o << "att_type " << to_string(*b.kind) << ' ' << b.name << '\n';
    if (!c.resolution.empty())
        o << "time_resolution " << c.resolution << '\n';
    for (const auto& [k, v] : c.lets)
        o << "let " << k << ' ' << v << '\n';
    for (const auto& q : c.queries)
        o << "formula " << q << '\n';
    const smc::StatParams defaults;
    if (c.stats.delta != defaults.delta)
        o << "delta " << fmt(c.stats.delta) << '\n';
    if (c.stats.alpha != defaults.alpha)
        o << "alpha " << fmt(c.stats.alpha) << '\n';
    if (c.stats.beta != defaults.beta)
        o << "beta " << fmt(c.stats.beta) << '\n';
    if (c.seed)
        o << "seed " << *c.seed << '\n';
    if (c.max_ticks)
        o << "max_ticks " << *c.max_ticks << '\n';
    if (c.mean_runs)
        o << "mean_runs " << *c.mean_runs << '\n';
    if (!c.result_file.empty())
        o << "result_file " << c.result_file << '\n';
    if (!c.csv_file.empty())
        o << "csv_file " << c.csv_file << '\n';
    return o.str();
}

} // namespace smcheck
