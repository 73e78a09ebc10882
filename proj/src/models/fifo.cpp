#include "smcheck/models.hpp"

namespace smcheck::models {

void FifoParams::validate() const
{
    if (!(p1 >= 0.0 && p1 <= 1.0))
        throw ModelError("fifo: p1 must lie in [0, 1]");
    if (!(p2 >= 0.0 && p2 <= 1.0))
        throw ModelError("fifo: p2 must lie in [0, 1]");
    if (capacity < 1)
        throw ModelError("fifo: capacity must be at least 1");
    if (message.empty())
        throw ModelError("fifo: message must not be empty");
}

FifoParams FifoParams::from(const ParamValues& values)
{
    FifoParams p;
    p.p1 = param_real(values, "p1", p.p1);
    p.p2 = param_real(values, "p2", p.p2);
    const auto capacity = param_int(values, "capacity", static_cast<std::int64_t>(p.capacity));
    if (capacity < 1)
        throw ModelError("fifo: capacity must be at least 1");
    p.capacity = static_cast<std::size_t>(capacity);
    p.message = param_string(values, "message", p.message);
    p.validate();
    return p;
}

FifoModel::FifoModel(sim::Kernel& kernel, RandomSource rng, FifoParams params)
    : k_(kernel), params_(std::move(params))
{
    params_.validate();
    buffer_.resize(params_.capacity);
    write_event_ = k_.make_event("write_event");
    read_event_ = k_.make_event("read_event");

    auto declare = [&](const std::string& f, const char* arg) {
        return Probes{
            k_.declare_probe(f + ":call"),
            k_.declare_probe(f + ":entry"),
            k_.declare_probe(f + ":" + arg),
            k_.declare_probe(f + ":exit"),
            k_.declare_probe(f + ":return"),
        };
    };
    send_probes_ = declare("send", "1");
    receive_probes_ = declare("receive", "1");

    auto c_read = [this] { return static_cast<double>(c_read_); };
    auto c_write = [this] { return static_cast<double>(c_write_); };
    auto elements = [this] { return static_cast<double>(count_); };
    expose("pnt_con->c_int", VarKind::Int, c_read, "last character read by the consumer (-1 before the first read)");
    expose("pnt_pro->c_int", VarKind::Int, c_write, "last character written by the producer (-1 before the first write)");
    expose("fifo.num_elements", VarKind::Int, elements, "characters currently buffered");
    expose("c_read", VarKind::Int, c_read, "alias of pnt_con->c_int");
    expose("c_write", VarKind::Int, c_write, "alias of pnt_pro->c_int");
    expose("n_elements", VarKind::Int, elements, "alias of fifo.num_elements");

    k_.spawn("producer", producer(rng.fork(0)));
    k_.spawn("consumer", consumer(rng.fork(1)));
}

sim::Task<> FifoModel::fifo_write(char c)
{
    while (count_ == params_.capacity)
        co_await k_.wait_event(read_event_);
    buffer_[(first_ + count_) % params_.capacity] = c;
    ++count_;
    k_.notify_immediate(write_event_);
}

sim::Task<char> FifoModel::fifo_read()
{
    while (count_ == 0)
        co_await k_.wait_event(write_event_);
    const char c = buffer_[first_];
    --count_;
    first_ = (first_ + 1) % params_.capacity;
    k_.notify_immediate(read_event_);
    co_return c;
}

sim::Task<> FifoModel::send(char c)
{
    k_.probe(send_probes_.arg, static_cast<unsigned char>(c));
    k_.probe(send_probes_.entry);
    co_await fifo_write(c);
    c_write_ = static_cast<unsigned char>(c);
    k_.probe(send_probes_.exit);
}

sim::Task<char> FifoModel::receive()
{
    k_.probe(receive_probes_.entry);
    const char c = co_await fifo_read();
    c_read_ = static_cast<unsigned char>(c);
    k_.probe(receive_probes_.arg, c_read_);
    k_.probe(receive_probes_.exit);
    co_return c;
}

sim::Thread FifoModel::producer(RandomSource rng)
{
    std::size_t next = 0;
    for (;;) {
        if (rng.bernoulli(params_.p1)) {
            k_.probe(send_probes_.call);
            co_await send(params_.message[next]);
            k_.probe(send_probes_.ret);
            next = (next + 1) % params_.message.size();
        }
        co_await k_.wait_time(1);
    }
}

sim::Thread FifoModel::consumer(RandomSource rng)
{
    for (;;) {
        if (rng.bernoulli(params_.p2)) {
            k_.probe(receive_probes_.call);
            co_await receive();
            k_.probe(receive_probes_.ret);
        }
        co_await k_.wait_time(1);
    }
}

} // namespace smcheck::models
