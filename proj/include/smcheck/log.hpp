#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace smcheck {

/// Diagnostics that do not abort anything. Default sink: stderr with a "warning: " prefix.
void warn(std::string_view message);

/// Like warn(), but only the first call with a given key in this process is reported.
void warn_once(std::string_view key, std::string_view message);

/// Replaces the sink (nullptr restores the default). Returns the previous sink.
std::function<void(std::string_view)> set_warning_sink(std::function<void(std::string_view)> sink);

} // namespace smcheck
