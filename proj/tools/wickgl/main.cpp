#include <exception>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "output.hpp"
#include "wickgl/error.hpp"

namespace {

// Globals that affect outputs, then the chosen subcommand's full option set.
// Options left unset (no default, written as key="") are dropped so that
// mutually exclusive pairs survive the round trip.  Feeding this back
// through --config repeats the run.
std::string replay_parameters(const CLI::App* sub, const wickgl::cli::Globals& g) {
  std::string text;
  if (g.threads) text += "threads=" + std::to_string(*g.threads) + "\n";
  text += "[" + sub->get_name() + "]\n";
  std::istringstream lines(sub->config_to_str(true, false));
  for (std::string line; std::getline(lines, line);) {
    if (line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0) continue;
    text += line + "\n";
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wickgl::cli;

  CLI::App app{"wickgl: Wick powers, their correlations and Ginzburg-Landau runs"};
  app.set_version_flag("--version", WICKGL_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "Read options from a key = value file ([subcommand] sections)");

  Globals g;
  app.add_option("--threads", g.threads, "Worker cap (default: WICKGL_THREADS or all cores)");
  app.add_option("--out-dir", g.out_dir, "Write output files and a manifest here");
  app.add_flag("--quiet", g.quiet, "No summary line on stderr");

  const std::vector<Command> commands = register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << '\n' << app.help();
    return 2;
  }

  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      RunContext ctx(c.app->get_name(), replay_parameters(c.app, g), g.out_dir);
      const int status = c.run(ctx, g);
      ctx.finish();
      return status;
    } catch (const wickgl::DomainError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    } catch (const wickgl::ConvergenceError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
