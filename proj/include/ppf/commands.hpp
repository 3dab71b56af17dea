#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ppf::cmd {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> methods{"M1", "M2", "M3", "M4"};
    bool force = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Each command returns a process exit code: 0 ok, 1 runtime failure,
/// 2 usage or configuration error.
int gen_data(const Options& opt);
int train(const Options& opt);
int eval(const Options& opt);
int sweep(const Options& opt);
int report(const Options& opt);

}  // namespace ppf::cmd
