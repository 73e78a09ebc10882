#include "smcheck/verifier.hpp"

#include <algorithm>
#include <memory>

namespace smcheck {

namespace {

/// Requests a stop once every monitor has a definite online verdict.
class StopWhenDecided : public sim::KernelObserver {
public:
    StopWhenDecided(sim::Kernel& k, const std::vector<std::unique_ptr<mon::Monitor>>& monitors)
        : kernel_(k), monitors_(monitors)
    {
    }

    void on_activity() override
    {
        for (const auto& m : monitors_)
            if (!m->decided_early())
                return;
        kernel_.request_stop();
    }

private:
    sim::Kernel& kernel_;
    const std::vector<std::unique_ptr<mon::Monitor>>& monitors_;
};

const models::ModelSpec& model_of(const RunSetup& setup)
{
    if (!setup.model)
        throw models::ModelError("no model selected");
    return *setup.model;
}

std::string_view resolution_of(const RunSetup& setup)
{
    return setup.resolution.empty() ? std::string_view(model_of(setup).default_resolution)
                                    : std::string_view(setup.resolution);
}

} // namespace

Tick run_horizon(const RunSetup& setup, std::span<const bltl::FormulaPtr> formulas)
{
    Tick until = 0;
    for (const auto& f : formulas) {
        const auto h = bltl::horizon(*f);
        if (h.has_steps)
            return setup.max_ticks;
        until = std::max<Tick>(until, h.ticks);
    }
    return until;
}

void validate_setup(const RunSetup& setup, std::span<const bltl::FormulaPtr> formulas,
                    std::span<const std::string> variables)
{
    const auto& spec = model_of(setup);
    spec.check_params(setup.params);
    sim::Kernel kernel;
    const auto model = spec.build(kernel, RandomSource(), setup.params);
    mon::MonitorOptions o;
    o.extra_variables.assign(variables.begin(), variables.end());
    mon::Monitor check_bindings(kernel, model.get(), setup.bindings, resolution_of(setup), nullptr, o);
    for (const auto& f : formulas)
        mon::Monitor check_formula(kernel, model.get(), setup.bindings, resolution_of(setup), f, {});
}

RunRecord simulate(const RunSetup& setup, std::span<const bltl::FormulaPtr> formulas, std::uint64_t seed,
                   bool project)
{
    const auto& spec = model_of(setup);
    spec.check_params(setup.params);
    const RandomSource root(seed);
    sim::Kernel kernel(root.fork(0));
    const auto model = spec.build(kernel, root.fork(1), setup.params);

    // The first monitor owns the recorded trace; one more per extra formula.
    std::vector<std::unique_ptr<mon::Monitor>> monitors;
    const bool single = formulas.size() <= 1;
    mon::MonitorOptions first;
    first.project = project;
    first.stop_on_verdict = single && setup.early_stop;
    if (!project)
        for (std::size_t i = 1; i < formulas.size(); ++i)
            for (auto& v : bltl::variables(*formulas[i]))
                first.extra_variables.push_back(v);
    monitors.push_back(std::make_unique<mon::Monitor>(kernel, model.get(), setup.bindings, resolution_of(setup),
                                                      formulas.empty() ? nullptr : formulas[0], first));
    for (std::size_t i = 1; i < formulas.size(); ++i) {
        mon::MonitorOptions o;
        o.project = true;
        o.stop_on_verdict = false;
        monitors.push_back(std::make_unique<mon::Monitor>(kernel, model.get(), setup.bindings,
                                                          resolution_of(setup), formulas[i], o));
    }
    StopWhenDecided stopper(kernel, monitors);
    if (!single && setup.early_stop)
        kernel.add_observer(&stopper);

    kernel.run(formulas.empty() ? setup.max_ticks : run_horizon(setup, formulas));

    RunRecord r;
    for (auto& m : monitors)
        if (!formulas.empty())
            r.verdicts.push_back(m->final_verdict());
    r.end_time = kernel.now();
    r.trace = monitors.front()->take_trace();
    r.trace.seed = seed;
    return r;
}

bool sample_formula(const RunSetup& setup, const bltl::FormulaPtr& formula, std::uint64_t seed)
{
    const auto r = simulate(setup, std::span(&formula, 1), seed);
    return r.verdicts.front() == bltl::Verdict::True;
}

double sample_value(const RunSetup& setup, const std::string& variable, Tick time, std::uint64_t seed)
{
    const auto& spec = model_of(setup);
    spec.check_params(setup.params);
    const RandomSource root(seed);
    sim::Kernel kernel(root.fork(0));
    const auto model = spec.build(kernel, root.fork(1), setup.params);
    mon::MonitorOptions o;
    o.project = true;
    o.stop_on_verdict = false;
    o.extra_variables = {variable};
    mon::Monitor monitor(kernel, model.get(), setup.bindings, resolution_of(setup), nullptr, o);
    kernel.run(time);
    const Trace& t = monitor.trace();
    for (std::size_t i = t.size(); i-- > 0;)
        if (t[i].time <= time)
            return t.value(i, variable);
    throw mon::MonitorError("variable '" + variable + "' was never sampled by time " + std::to_string(time));
}

smc::StatResult verify(const RunSetup& setup, const bltl::Query& query, const smc::StatParams& params,
                       std::uint64_t master_seed, unsigned jobs, std::optional<std::uint64_t> mean_runs)
{
    switch (query.kind) {
    case bltl::Query::Kind::Estimate:
        return smc::estimate_probability(
            [&](std::uint64_t seed) { return sample_formula(setup, query.formula, seed); }, params, master_seed, jobs);
    case bltl::Query::Kind::Test: {
        smc::StatParams p = params;
        p.theta = query.theta;
        return smc::sprt_test([&](std::uint64_t seed) { return sample_formula(setup, query.formula, seed); }, p,
                              master_seed, jobs);
    }
    case bltl::Query::Kind::Mean: {
        params.validate_estimate();
        const auto n = mean_runs.value_or(smc::chernoff_sample_size(params.delta, params.alpha));
        return smc::estimate_mean(
            [&](std::uint64_t seed) { return sample_value(setup, query.variable, query.time, seed); }, n,
            master_seed, jobs);
    }
    }
    throw smc::StatError("unknown query kind");
}

std::vector<smc::StatResult> estimate_many(const RunSetup& setup, std::span<const bltl::FormulaPtr> formulas,
                                           const smc::StatParams& params, std::uint64_t master_seed, unsigned jobs)
{
    params.validate_estimate();
    const auto n = smc::chernoff_sample_size(params.delta, params.alpha);
    const std::function<std::vector<char>(std::uint64_t)> runner = [&](std::uint64_t seed) {
        const auto r = simulate(setup, formulas, seed);
        std::vector<char> bits;
        for (auto v : r.verdicts)
            bits.push_back(v == bltl::Verdict::True ? 1 : 0);
        return bits;
    };
    const auto rows = smc::run_batch(runner, master_seed, 0, n, jobs);
    std::vector<smc::StatResult> out(formulas.size());
    for (std::size_t f = 0; f < formulas.size(); ++f) {
        auto& r = out[f];
        r.kind = smc::StatResult::Kind::Estimate;
        r.master_seed = master_seed;
        r.n = n;
        for (const auto& row : rows)
            r.successes += static_cast<std::uint64_t>(row[f]);
        r.p_hat = static_cast<double>(r.successes) / static_cast<double>(n);
        r.seeds.resize(n);
        for (std::uint64_t i = 0; i < n; ++i)
            r.seeds[i] = smc::run_seed(master_seed, i);
    }
    return out;
}

} // namespace smcheck
