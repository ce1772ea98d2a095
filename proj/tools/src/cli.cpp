#include "cli.hpp"

#include <exception>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "logging.hpp"

namespace plateau_cli {

int run_cli(int argc, char** argv) {
  CLI::App app{"Plateau problems with homotopical boundary charges"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions opts;
  std::uint64_t seed = 0;
  std::string out;
  std::string chain;

  using Runner = int (*)(const Config&, const RunOptions&);
  const std::map<std::string, std::pair<Runner, std::string>> commands = {
      {"solve", {run_solve, "Minimal admissible chain for a spec"}},
      {"simulate", {run_simulate, "Minimize the p-energy for one p"}},
      {"sweep", {run_sweep, "Minimize over a list of p values"}},
      {"compare", {run_compare, "Compare a p sweep with the solver optimum"}},
      {"validate", {run_validate, "Check a chain against a spec"}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, cmd] : commands) {
    CLI::App* sub = app.add_subcommand(name, cmd.second);
    sub->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Seed override");
    sub->add_option("--threads", opts.threads, "Parallelism cap")->check(CLI::PositiveNumber);
    if (name == "validate") sub->add_option("--chain", chain, "Chain JSON (overrides validate.chain)");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInfeasible;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      Config cfg = Config::load(config_path);
      if (sub->count("--seed")) opts.seed = seed;
      opts.out = !out.empty() ? std::filesystem::path(out) : std::filesystem::path(cfg.str("run.out", "."));
      opts.chain = chain;
      if (!sub->count("--threads")) opts.threads = static_cast<int>(cfg.integer("run.threads", 1));
      if (opts.threads < 1) throw hplateau::Error(hplateau::Errc::config_error, "run.threads: must be positive");
      if (cfg.has("run.mode") && cfg.str("run.mode") != name)
        log(LogLevel::warn, "run.mode is '" + cfg.str("run.mode") + "' but running '" + name + "'");
      std::filesystem::create_directories(opts.out);
      return commands.at(name).first(cfg, opts);
    } catch (const hplateau::Error& e) {
      log(LogLevel::error, e.what());
      return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
      log(LogLevel::error, std::string("io_error: ") + e.what());
      return kExitInfeasible;
    } catch (const std::exception& e) {
      log(LogLevel::error, std::string("internal: ") + e.what());
      return kExitInternal;
    }
  }
  return kExitInternal;
}

}  // namespace plateau_cli
