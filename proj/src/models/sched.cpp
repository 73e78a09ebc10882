#include <set>

#include "smcheck/models.hpp"

namespace smcheck::models {

SchedModel::SchedModel(sim::Kernel& kernel, int example) : k_(kernel), example_(example)
{
    if (example < 1 || example > 3)
        throw ModelError("scheduler example must be 1, 2 or 3");
    expose("order_length", VarKind::Int, [this] { return static_cast<double>(order_.size()); },
           "segments executed so far");
    if (example == 3) {
        barrier_[0] = k_.make_event("barrier0");
        barrier_[1] = k_.make_event("barrier1");
        processes_ = 3;
        for (char c : {'A', 'B', 'C'})
            k_.spawn(std::string(1, c), barrier_worker(c));
        return;
    }
    processes_ = 2;
    for (char c : {'A', 'B'})
        k_.spawn(std::string(1, c), worker(c));
}

sim::Thread SchedModel::worker(char name)
{
    order_ += name;
    if (example_ == 2) {
        co_await k_.wait_time(0);
        order_ += name;
    }
}

// The last process to reach a barrier releases everyone in the next delta
// cycle, so all processes are runnable together at the start of every segment.
sim::Thread SchedModel::barrier_worker(char name)
{
    for (int b = 0; b < 2; ++b) {
        order_ += name;
        if (++arrived_[b] == processes_)
            k_.notify_delta(barrier_[b]);
        co_await k_.wait_event(barrier_[b]);
    }
    order_ += name;
}

std::string run_sched_example(int example, std::uint64_t seed)
{
    sim::Kernel k{RandomSource(seed)};
    SchedModel m(k, example);
    k.run();
    return m.order();
}

std::string run_sched_example(int example, const std::function<std::size_t(std::size_t)>& chooser)
{
    sim::Kernel k;
    k.set_chooser(chooser);
    SchedModel m(k, example);
    k.run();
    return m.order();
}

// Odometer over decision sequences: replay a prefix, take choice 0 beyond it,
// then advance the deepest decision that still has an untried alternative.
std::vector<std::string> enumerate_sched_orders(int example)
{
    struct Decision {
        std::size_t choice;
        std::size_t width;
    };
    std::vector<Decision> path;
    std::set<std::string> orders;
    for (;;) {
        std::size_t depth = 0;
        auto chooser = [&](std::size_t n) -> std::size_t {
            if (depth < path.size()) {
                if (path[depth].width != n)
                    throw ModelError("scheduler example is not deterministic under replay");
                return path[depth++].choice;
            }
            path.push_back({0, n});
            ++depth;
            return 0;
        };
        orders.insert(run_sched_example(example, chooser));
        path.resize(depth);
        while (!path.empty() && path.back().choice + 1 == path.back().width)
            path.pop_back();
        if (path.empty())
            break;
        ++path.back().choice;
    }
    return {orders.begin(), orders.end()};
}

} // namespace smcheck::models
