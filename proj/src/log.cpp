#include "smcheck/log.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace smcheck {

namespace {

std::mutex mutex;
std::function<void(std::string_view)> sink;
std::set<std::string, std::less<>> seen;

void emit(std::string_view message)
{
    if (sink)
        sink(message);
    else
        std::cerr << "warning: " << message << '\n';
}

} // namespace

void warn(std::string_view message)
{
    std::lock_guard lock(mutex);
    emit(message);
}

void warn_once(std::string_view key, std::string_view message)
{
    std::lock_guard lock(mutex);
    if (!seen.emplace(key).second)
        return;
    emit(message);
}

std::function<void(std::string_view)> set_warning_sink(std::function<void(std::string_view)> s)
{
    std::lock_guard lock(mutex);
    return std::exchange(sink, std::move(s));
}

} // namespace smcheck
