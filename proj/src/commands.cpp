#include "smcheck/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "smcheck/bltl.hpp"
#include "smcheck/monitor.hpp"
#include "smcheck/version.hpp"

namespace smcheck::cli {

using nlohmann::ordered_json;

namespace {

constexpr Tick default_max_ticks = 1'000'000;

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot write '" + path + "'");
    f << text;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

ordered_json params_json(const Config& config)
{
    ordered_json p = ordered_json::object();
    for (const auto& [k, v] : config.params)
        p[k] = v;
    return p;
}

std::vector<bltl::Query> parse_queries(const Config& config)
{
    std::vector<bltl::Query> qs;
    for (const auto& text : config.queries)
        qs.push_back(bltl::parse_query(substitute(text, config.lets)));
    return qs;
}

void validate(const RunSetup& setup, const std::vector<bltl::Query>& queries)
{
    std::vector<bltl::FormulaPtr> formulas;
    std::vector<std::string> variables;
    for (const auto& q : queries) {
        if (q.kind == bltl::Query::Kind::Mean)
            variables.push_back(q.variable);
        else
            formulas.push_back(q.formula);
    }
    validate_setup(setup, formulas, variables);
}

std::string decision(const smc::StatResult& r) { return r.accept_h0 ? "accept_H0" : "accept_H1"; }

ordered_json result_json(const bltl::Query& q, const smc::StatResult& r, const smc::StatParams& p)
{
    ordered_json j;
    j["query"] = q.text;
    j["kind"] = bltl::to_string(q.kind);
    switch (q.kind) {
    case bltl::Query::Kind::Estimate:
        j["delta"] = p.delta;
        j["alpha"] = p.alpha;
        j["n"] = r.n;
        j["successes"] = r.successes;
        j["p_hat"] = r.p_hat;
        break;
    case bltl::Query::Kind::Test:
        j["theta"] = q.theta;
        j["delta"] = p.delta;
        j["alpha"] = p.alpha;
        j["beta"] = p.beta;
        j["samples_used"] = r.n;
        j["successes"] = r.successes;
        j["accept_h0"] = r.accept_h0;
        j["decision"] = decision(r);
        break;
    case bltl::Query::Kind::Mean:
        j["variable"] = q.variable;
        j["time"] = q.time;
        j["n"] = r.n;
        j["mean"] = r.mean;
        j["stddev"] = r.stddev;
        break;
    }
    j["seed"] = r.master_seed;
    return j;
}

std::string result_cell(const smc::StatResult& r)
{
    std::ostringstream o;
    o.precision(17);
    switch (r.kind) {
    case smc::StatResult::Kind::Estimate: o << r.p_hat; break;
    case smc::StatResult::Kind::Test: o << decision(r); break;
    case smc::StatResult::Kind::Mean: o << r.mean; break;
    }
    return o.str();
}

double mean_of(const std::vector<double>& xs)
{
    double s = 0.0;
    for (double x : xs)
        s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs)
{
    if (xs.size() < 2)
        return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

} // namespace

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const Config& config)
{
    if (flag)
        return *flag;
    if (const char* env = std::getenv("SMCHECK_SEED"); env && *env) {
        const std::string_view s(env);
        std::uint64_t v = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size())
            throw ConfigError("SMCHECK_SEED must be a natural number, got '" + std::string(s) + "'");
        return v;
    }
    return config.seed.value_or(default_seed);
}

smc::StatParams resolve_stats(const Config& config, const Options& options)
{
    smc::StatParams p = config.stats;
    if (options.delta)
        p.delta = *options.delta;
    if (options.alpha)
        p.alpha = *options.alpha;
    if (options.beta)
        p.beta = *options.beta;
    p.validate_estimate();
    if (!(p.beta > 0.0 && p.beta < 1.0))
        throw smc::StatError("beta must lie in (0, 1)");
    return p;
}

RunSetup make_setup(const Config& config)
{
    RunSetup s;
    s.model = models::find_model(config.model);
    if (!s.model)
        throw ConfigError("unknown model '" + config.model + "'");
    s.params = config.params;
    s.bindings = config.bindings;
    s.resolution = config.resolution;
    s.max_ticks = config.max_ticks.value_or(default_max_ticks);
    return s;
}

ordered_json run_check(const Config& config, const Options& options)
{
    const auto start = std::chrono::steady_clock::now();
    const auto seed = resolve_seed(options.seed, config);
    const auto stats = resolve_stats(config, options);
    const auto setup = make_setup(config);
    const auto queries = parse_queries(config);
    validate(setup, queries);
    const auto mean_runs = options.mean_runs ? options.mean_runs : config.mean_runs;

    ordered_json doc;
    doc["tool"] = "smcheck";
    doc["version"] = std::string(version);
    doc["model"] = config.model;
    doc["params"] = params_json(config);
    doc["seed"] = seed;
    doc["results"] = ordered_json::array();
    for (const auto& q : queries) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = verify(setup, q, stats, seed, options.jobs, mean_runs);
        auto j = result_json(q, r, stats);
        j["wall_time_s"] = seconds_since(t0);
        doc["results"].push_back(std::move(j));
    }
    doc["wall_time_s"] = seconds_since(start);
    return doc;
}

std::string run_sweep(const Config& config, const std::string& variable, const std::vector<std::string>& values,
                      const Options& options)
{
    const auto seed = resolve_seed(options.seed, config);
    const auto stats = resolve_stats(config, options);
    const auto* spec = models::find_model(config.model);
    if (!spec)
        throw ConfigError("unknown model '" + config.model + "'");
    bool is_param = false;
    for (const auto& p : spec->params)
        is_param = is_param || p.name == variable;
    bool is_let = config.lets.count(variable) > 0;
    for (const auto& q : config.queries)
        is_let = is_let || q.find("{" + variable + "}") != std::string::npos;
    if (!is_param && !is_let)
        throw ConfigError("sweep variable '" + variable + "' is neither a parameter of model '" + config.model
                          + "' nor a {placeholder} in a query");

    std::ostringstream csv;
    csv << "variable,value,query,kind,result,n,seed,version\n";
    for (const auto& value : values) {
        Config c = config;
        if (is_param)
            c.params[variable] = value;
        else
            c.lets[variable] = value;
        const auto setup = make_setup(c);
        const auto queries = parse_queries(c);
        validate(setup, queries);
        const auto mean_runs = options.mean_runs ? options.mean_runs : c.mean_runs;
        for (const auto& q : queries) {
            const auto r = verify(setup, q, stats, seed, options.jobs, mean_runs);
            csv << csv_field(variable) << ',' << csv_field(value) << ',' << csv_field(q.text) << ','
                << bltl::to_string(q.kind) << ',' << result_cell(r) << ',' << r.n << ',' << seed << ','
                << version << '\n';
        }
    }
    return csv.str();
}

CoverageReport sched_coverage(int example, std::uint64_t runs, std::uint64_t reps, std::uint64_t seed)
{
    if (example < 1 || example > 3)
        throw models::ModelError("scheduler example must be 1, 2 or 3");
    CoverageReport report;
    report.example = example;
    report.runs = runs;
    report.seed = seed;
    report.orders_total = models::enumerate_sched_orders(example).size();
    const std::uint64_t cap = 10'000 * report.orders_total;
    std::vector<double> distinct;
    std::vector<double> collector;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto rep_seed = smc::run_seed(seed, r);
        std::set<std::string> seen;
        CoverageRep rep;
        for (std::uint64_t j = 0;; ++j) {
            if (j == runs)
                rep.distinct = seen.size();
            if (seen.size() == report.orders_total && rep.collector_runs == 0)
                rep.collector_runs = j;
            if (j >= runs && rep.collector_runs != 0)
                break;
            if (j == cap)
                throw models::ModelError("coupon collector did not finish within " + std::to_string(cap) + " runs");
            seen.insert(models::run_sched_example(example, smc::run_seed(rep_seed, j)));
        }
        distinct.push_back(static_cast<double>(rep.distinct));
        collector.push_back(static_cast<double>(rep.collector_runs));
        report.reps.push_back(rep);
    }
    report.distinct_mean = mean_of(distinct);
    report.distinct_stddev = stddev_of(distinct);
    report.collector_mean = mean_of(collector);
    report.collector_stddev = stddev_of(collector);
    return report;
}

ordered_json to_json(const CoverageReport& r)
{
    ordered_json j;
    j["tool"] = "smcheck";
    j["version"] = std::string(version);
    j["example"] = r.example;
    j["orders_total"] = r.orders_total;
    j["runs"] = r.runs;
    j["reps"] = r.reps.size();
    j["seed"] = r.seed;
    j["distinct_mean"] = r.distinct_mean;
    j["distinct_stddev"] = r.distinct_stddev;
    j["coverage"] = r.orders_total ? r.distinct_mean / static_cast<double>(r.orders_total) : 0.0;
    j["collector_mean"] = r.collector_mean;
    j["collector_stddev"] = r.collector_stddev;
    auto& per = j["per_rep"] = ordered_json::array();
    for (const auto& rep : r.reps)
        per.push_back({{"distinct", rep.distinct}, {"collector_runs", rep.collector_runs}});
    return j;
}

ordered_json run_simulate(const Config& config, std::uint64_t runs, const std::string& dump_dir,
                          const Options& options)
{
    const auto seed = resolve_seed(options.seed, config);
    const auto setup = make_setup(config);
    const auto queries = parse_queries(config);
    validate(setup, queries);
    std::vector<bltl::FormulaPtr> formulas;
    std::vector<std::string> texts;
    for (const auto& q : queries) {
        if (q.kind != bltl::Query::Kind::Mean) {
            formulas.push_back(q.formula);
            texts.push_back(q.text);
        }
    }
    if (!dump_dir.empty())
        std::filesystem::create_directories(dump_dir);

    ordered_json doc;
    doc["tool"] = "smcheck";
    doc["version"] = std::string(version);
    doc["model"] = config.model;
    doc["params"] = params_json(config);
    doc["seed"] = seed;
    auto& out = doc["runs"] = ordered_json::array();
    for (std::uint64_t i = 0; i < runs; ++i) {
        const auto run = smc::run_seed(seed, i);
        RunRecord rec;
        try {
            rec = simulate(setup, formulas, run, false);
        } catch (const std::exception& e) {
            throw smc::RunError(i, run, e.what());
        }
        ordered_json j;
        j["run"] = i;
        j["seed"] = run;
        j["end_time"] = rec.end_time;
        j["states"] = rec.trace.size();
        auto& v = j["verdicts"] = ordered_json::object();
        for (std::size_t f = 0; f < formulas.size(); ++f)
            v[texts[f]] = bltl::to_string(rec.verdicts[f]);
        if (!dump_dir.empty()) {
            const auto path = (std::filesystem::path(dump_dir) / ("run_" + std::to_string(i) + ".jsonl")).string();
            std::ofstream f(path, std::ios::binary);
            if (!f)
                throw ConfigError("cannot write '" + path + "'");
            write_jsonl(f, rec.trace);
            j["trace"] = path;
        }
        out.push_back(std::move(j));
    }
    return doc;
}

int guarded(const std::function<int()>& body, std::ostream& err)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const bltl::ParseError& e) {
        err << "config error: formula: " << e.what() << '\n';
        return exit_config_error;
    } catch (const mon::MonitorError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const smc::StatError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const smc::InconclusiveTest& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const models::ModelError& e) {
        err << "model error: " << e.what() << '\n';
        return exit_model_error;
    } catch (const smc::RunError& e) {
        err << "model error: " << e.what() << '\n';
        return exit_model_error;
    } catch (const std::exception& e) {
        err << "model error: " << e.what() << '\n';
        return exit_model_error;
    }
}

int cmd_check(const Config& config, const Options& options, std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        const auto doc = run_check(config, options);
        const auto text = doc.dump(2) + "\n";
        out << text;
        const auto& path = options.out.empty() ? config.result_file : options.out;
        if (!path.empty())
            write_file(path, text);
        return int{exit_ok};
    }, err);
}

int cmd_sweep(const Config& config, const std::string& variable, const std::vector<std::string>& values,
              const Options& options, std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        const auto csv = run_sweep(config, variable, values, options);
        const auto& path = options.out.empty() ? config.csv_file : options.out;
        if (path.empty())
            out << csv;
        else
            write_file(path, csv);
        return int{exit_ok};
    }, err);
}

int cmd_sched_coverage(int example, std::uint64_t runs, std::uint64_t reps, const Options& options,
                       std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        const auto report = sched_coverage(example, runs, reps, resolve_seed(options.seed, Config{}));
        const auto text = to_json(report).dump(2) + "\n";
        out << text;
        if (!options.out.empty())
            write_file(options.out, text);
        return int{exit_ok};
    }, err);
}

int cmd_simulate(const Config& config, std::uint64_t runs, const std::string& dump_dir, const Options& options,
                 std::ostream& out, std::ostream& err)
{
    return guarded([&] {
        const auto text = run_simulate(config, runs, dump_dir, options).dump(2) + "\n";
        out << text;
        if (!options.out.empty())
            write_file(options.out, text);
        return int{exit_ok};
    }, err);
}

} // namespace smcheck::cli
