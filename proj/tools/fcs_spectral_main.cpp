#include "fcs/error.hpp"
#include "fcs/experiment.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>

int main(int argc, char** argv) {
  CLI::App app{"Spectral reconstruction of finitely correlated states from noisy marginals"};
  app.require_subcommand(1, 1);
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::string log_level = "info";
  for (const char* name : {"aklt", "rank-scan", "nonhomog", "lemma-check", "robustness", "reconstruct"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  }
  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("fcs");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    const fcs::Command command = fcs::parse_command(app.get_subcommands().front()->get_name());
    const fcs::ExperimentConfig cfg = fcs::load_config(command, config_path);
    fcs::write_result(fcs::run_command(cfg), out_dir);
  } catch (const fcs::FormatError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
