// commands.hpp: the five subcommands of the lightmu tool
//
// Each command resolves its settings from a Config (recording the effective
// values), runs, writes its files into the output directory and returns a
// JSON summary that also lands in <command>.meta.json.

#pragma once

#include "app/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lightmu::app {

struct RunContext {
    std::filesystem::path out_dir{"."};
    unsigned threads{0}; // 0: hardware concurrency
    std::optional<long> seed;
};

struct RunResult {
    std::vector<std::filesystem::path> files;
    nlohmann::json summary;
};

RunResult cmd_sweep(Config& cfg, const RunContext& ctx);
RunResult cmd_steady(Config& cfg, const RunContext& ctx);
RunResult cmd_tls(Config& cfg, const RunContext& ctx);
RunResult cmd_bath(Config& cfg, const RunContext& ctx);
RunResult cmd_lobes(Config& cfg, const RunContext& ctx);

enum ExitCode { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

// Full command line handling; diagnostics and error JSON go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace lightmu::app
