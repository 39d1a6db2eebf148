#pragma once
// Batch commands behind the nlab executable. Exit status: 0 pass,
// 1 scientific failure, 2 usage or configuration error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace nlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct CommandOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    unsigned workers = 1;
    std::optional<std::string> out_dir;
    bool skip_validate = false;
};

/// Runs `verify`, `ms-limit`, `decompose`, `avr` or `tail-table`, mapping
/// exceptions to exit codes and messages on `err`.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace nlab
