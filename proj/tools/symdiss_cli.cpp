#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "symdiss/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quantized symbolic models and dissipativity analysis"};

  std::string config_path;
  std::string command;
  std::string out_dir = "out";
  std::string mode_override;
  std::string radius_override;

  app.add_option("--config", config_path, "analysis config (JSON)")->required();
  app.add_option("--command", command, "pipeline command")
      ->required()
      ->check(CLI::IsMember(symdiss::command_names()));
  app.add_option("--out", out_dir, "output directory for report files");
  app.add_option("--mode", mode_override, "output-measured supply-rate formula")
      ->check(CLI::IsMember({"theorem", "example2compat"}));
  app.add_option("--radius", radius_override, "transition inclusion radius")
      ->check(CLI::IsMember({"spec", "figure"}));

  CLI11_PARSE(app, argc, argv);

  try {
    symdiss::AnalysisConfig cfg = symdiss::load_config(config_path);
    if (!mode_override.empty())
      cfg.formula_mode = mode_override == "theorem"
                             ? symdiss::OutputFormulaMode::kTheorem
                             : symdiss::OutputFormulaMode::kExample2Compat;
    if (!radius_override.empty()) {
      if (!cfg.params)
        throw symdiss::ConfigError("--radius: config has no abstraction block");
      cfg.params->radius_mode = radius_override == "spec" ? symdiss::RadiusMode::kSpec
                                                          : symdiss::RadiusMode::kFigure;
    }
    const symdiss::RunResult res = symdiss::run_command(cfg, command, out_dir);
    std::cout << res.report_text;
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
