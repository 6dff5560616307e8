#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "output.hpp"

namespace wickgl::cli {

struct Globals {
  std::optional<int> threads;  // unset: WICKGL_THREADS or the hardware
  std::string out_dir;
  bool quiet = false;
};

/// A subcommand: registers its options, then runs with the parsed values.
/// run returns the process exit status (0 pass, 1 domain/statistical
/// failure).
struct Command {
  CLI::App* app = nullptr;
  std::function<int(RunContext&, const Globals&)> run;
};

std::vector<Command> register_commands(CLI::App& app);

}  // namespace wickgl::cli
