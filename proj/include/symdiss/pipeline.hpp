#ifndef SYMDISS_PIPELINE_HPP
#define SYMDISS_PIPELINE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symdiss/abstraction.hpp"
#include "symdiss/composition.hpp"
#include "symdiss/dissipativity.hpp"
#include "symdiss/relations.hpp"
#include "symdiss/systems.hpp"
#include "symdiss/transition.hpp"

namespace symdiss {

/* config and schema problems; the message carries the offending field path */
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CompositionConfig {
  std::optional<PassivityIndices> indices;  /* second loop component in index form */
  nlohmann::json second;                    /* second component spec; null when absent */
  double eps_u = 0.0;
  double eps_y = 0.0;
  CompositionOutputMode mode = CompositionOutputMode::kAverage;
};

struct CheckSimConfig {
  std::string t1_path;
  std::string t2_path;
  RelationKind kind = RelationKind::kIoas;
  double eps_u = 0.0;
  double eps_y = 0.0;
};

struct AnalysisConfig {
  std::string name = "custom";
  std::string base_dir = ".";  /* relative file references resolve against this */
  std::optional<ContinuousSystem> system;
  std::optional<AbstractionParams> params;
  OutputFormulaMode formula_mode = OutputFormulaMode::kTheorem;
  std::optional<double> gamma;              /* absent: estimate from the LTI model */
  std::optional<PassivityIndices> indices;  /* continuous supply rate, index form */
  std::optional<QsrTriple> qsr;             /* continuous supply rate, matrix form */
  bool storage_search = false;
  std::optional<Matrix> storage_p;
  std::optional<double> storage_l;          /* absent: gradient bound over the grid */
  std::optional<TransferConstants> transfer;
  bool build_abstraction = true;
  std::optional<CompositionConfig> composition;
  std::optional<CheckSimConfig> check_sim;
};

/* overlay wins; objects merge recursively, everything else is replaced */
nlohmann::json deep_merge(nlohmann::json base, const nlohmann::json& overlay);

AnalysisConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
AnalysisConfig load_config(const std::string& path);

struct RunResult {
  int exit_code = 1;  /* 0 verdict passed, 2 verdict failed, 1 reserved for errors */
  std::string report_text;
  nlohmann::json report_json;
  std::vector<std::string> files_written;
};

std::vector<std::string> command_names();

/* abstract | check-sim | derive-qsr | verify | transfer | compose | report;
 * writes report.txt / report.json and stage side files into out_dir */
RunResult run_command(const AnalysisConfig& cfg, const std::string& command,
                      const std::string& out_dir);

}  // namespace symdiss

#endif
