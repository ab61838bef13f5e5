#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace pbf::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,     // I/O and anything unexpected
  kExitConfig = 2,      // bad command line, config file or arguments
  kExitValidation = 3,  // a computed or loaded object broke an invariant
  kExitCheck = 4,       // a requested check ran and failed
};

struct CommandContext {
  RunConfig config;
  bool override_nonhermitian = false;
  std::ostream& out;
};

// Each command returns its exit code; library exceptions propagate.
int cmd_build_rep(const CommandContext& ctx);
int cmd_check(const CommandContext& ctx);
int cmd_dims(const CommandContext& ctx);
int cmd_spectrum(const CommandContext& ctx);
int cmd_evolve(const CommandContext& ctx);
int cmd_transitions(const CommandContext& ctx);

// Full command line (without argv[0]); maps exceptions to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pbf::cli
