#include <CLI11.hpp>

#include <iostream>

#include "opfree/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"opfree: finite-dimensional verification engine for operator-valued "
               "free probability"};
  app.require_subcommand(1);

  std::string config_path;
  int depth_override = -1;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  double tol_override = -1.0;
  std::vector<std::string> suite_override;
  std::string out_override;

  auto add_common = [&](CLI::App* cmd, bool with_run_flags) {
    cmd->add_option("config", config_path, "path to the run configuration")->required();
    cmd->add_option("--depth", depth_override, "override the Fock truncation depth");
    if (with_run_flags) {
      cmd->add_option("--seed", seed_override, "override the random seed")
          ->each([&](const std::string&) { has_seed = true; });
      cmd->add_option("--tolerance", tol_override, "override the suite tolerance");
      cmd->add_option("--suite", suite_override, "run only the named suite (repeatable)");
      cmd->add_option("--out", out_override, "write the report to this path");
    }
  };

  CLI::App* run = app.add_subcommand("run", "build the model and run verification suites");
  add_common(run, true);
  CLI::App* describe = app.add_subcommand("describe", "print a model summary");
  add_common(describe, false);
  CLI::App* suites = app.add_subcommand("suites", "list registered suites");
  (void)suites;

  CLI11_PARSE(app, argc, argv);

  try {
    if (suites->parsed()) {
      opfree::cli::list_suites(std::cout);
      return 0;
    }
    opfree::cli::RunConfig config = opfree::cli::load_config(config_path);
    if (depth_override > 0) config.depth = depth_override;
    if (has_seed) config.seed = seed_override;
    if (tol_override > 0.0) config.suite_tolerance = tol_override;
    if (!suite_override.empty()) config.suites = suite_override;
    if (!out_override.empty()) config.out_path = out_override;

    if (run->parsed()) return opfree::cli::run_command(config, std::cout);
    return opfree::cli::describe_command(config, std::cout);
  } catch (const opfree::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const opfree::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const opfree::SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 2;
  } catch (const opfree::ExactnessError& e) {
    std::cerr << "exactness error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
