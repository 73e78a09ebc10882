#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smcheck/models.hpp"
#include "smcheck/monitor.hpp"
#include "smcheck/stats.hpp"

namespace smcheck {

/// Malformed configuration; `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::size_t line = 0);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A verification job read from a directive file, one directive per line:
///
///   model <name>                    param <name> <value>
///   attribute <accessor> <var>      att_type <int|real|bool> <var>
///   location <var> <probe-spec>     phase <var> <hook>
///   event <var> <event-name>        time_resolution <term> [| <term>]*
///   formula <query>                 let <name> <value>
///   delta|alpha|beta <x>            seed <n>
///   max_ticks <n>                   mean_runs <n>
///   result_file <path>              csv_file <path>
///
/// Lines starting with '#' are comments. `{name}` in a query is replaced by
/// the value of `let name`. Directives of the original monitor generator that
/// have no meaning here are accepted with a warning.
struct Config {
    std::string model;
    models::ParamValues params;
    std::vector<mon::Binding> bindings;
    std::string resolution;
    std::vector<std::string> queries;
    std::map<std::string, std::string, std::less<>> lets;
    smc::StatParams stats;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> max_ticks;
    std::optional<std::uint64_t> mean_runs;
    std::string result_file;
    std::string csv_file;

    bool operator==(const Config&) const = default;
};

/// Parses and validates directive text: at least one query, every query
/// parses after substitution, known model when given.
[[nodiscard]] Config parse_config(std::string_view text);
[[nodiscard]] Config load_config(const std::filesystem::path& path);

/// Inverse of parse_config: parse_config(serialize(c)) == c.
[[nodiscard]] std::string serialize(const Config& config);

/// Query text with every `{name}` replaced from `lets`; unknown names throw.
[[nodiscard]] std::string substitute(std::string_view query, const std::map<std::string, std::string, std::less<>>& lets);

} // namespace smcheck
