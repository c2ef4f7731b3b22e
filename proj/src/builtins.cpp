#include "symdiss/builtins.hpp"

#include <stdexcept>

namespace symdiss {

namespace {

nlohmann::json box_json(const Box& box) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& iv : box) out.push_back({iv.lo, iv.hi});
  return out;
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : m.to_rows()) out.push_back(row);
  return out;
}

nlohmann::json system_json(const ContinuousSystem& sys) {
  return {
      {"A", matrix_json(sys.a())},
      {"B", matrix_json(sys.b())},
      {"C", matrix_json(sys.c())},
      {"D", matrix_json(sys.d())},
      {"measurement_mode",
       sys.measurement_mode() == MeasurementMode::kStateMeasured ? "state" : "output"},
      {"domain", box_json(sys.domain())},
      {"input_set", box_json(sys.input_set())},
  };
}

nlohmann::json params_json(const AbstractionParams& p) {
  return {
      {"tau", p.tau},     {"eta", p.eta},       {"mu", p.mu},       {"theta1", p.theta1},
      {"theta2", p.theta2}, {"eps_u", p.eps_u}, {"eps_y", p.eps_y},
  };
}

}  // namespace

ContinuousSystem example1_system() {
  const Matrix a{{-1.0}};
  const Matrix b{{1.0}};
  const Matrix c{{1.0}};
  const Matrix d{{1.0}};
  const Box domain = {{-0.2, 0.2}};
  const Box inputs = {{-0.1, 0.1}};
  return ContinuousSystem::lti(a, b, c, d, MeasurementMode::kStateMeasured, domain, inputs);
}

AbstractionParams example1_params(RadiusMode mode) {
  AbstractionParams p;
  p.tau = 0.2;
  p.eta = 0.1;
  p.mu = 0.1;
  p.theta1 = 1.0;
  p.theta2 = 0.1;
  p.eps_u = 0.1;
  p.eps_y = 1.0;
  p.radius_mode = mode;
  return p;
}

ContinuousSystem example2_plant() {
  const Matrix a{{-3.6, 0.2, 2.4, 0.0, 0.0},
                 {0.2, -1.0, 0.0, -0.6, 0.0},
                 {2.4, 0.0, -6.0, -4.0, 1.0},
                 {0.0, -0.6, -4.0, -6.0, -0.8},
                 {0.0, 0.0, 1.0, 0.8, -2.0}};
  const Matrix b{{0.1}, {0.4}, {0.1}, {0.5}, {0.1}};
  const Matrix c{{0.1, 0.4, 0.1, 0.5, 0.1}};
  const Matrix d{{0.2}};
  Box domain;
  for (int i = 0; i < 5; ++i) domain.push_back({-0.2, 0.2});
  const Box inputs = {{-0.1, 0.1}};
  return ContinuousSystem::lti(a, b, c, d, MeasurementMode::kOutputMeasured, domain, inputs);
}

ContinuousSystem example2_controller() {
  const Matrix a{{-2.0, -1.0}, {-3.0, -5.0}};
  const Matrix b{{0.1}, {0.2}};
  const Matrix c{{1.0, 1.0}};
  const Matrix d{{1.0}};
  const Box domain = {{-0.2, 0.2}, {-0.2, 0.2}};
  const Box inputs = {{-0.1, 0.1}};
  return ContinuousSystem::lti(a, b, c, d, MeasurementMode::kOutputMeasured, domain, inputs);
}

AbstractionParams example2_params() {
  AbstractionParams p;
  p.tau = 0.2;
  p.eta = 0.1;
  p.mu = 0.1;
  p.theta1 = 1.0;
  p.theta2 = 0.1;
  p.eps_u = 0.1;
  p.eps_y = 0.2;
  p.radius_mode = RadiusMode::kSpec;
  return p;
}

std::vector<std::string> builtin_names() {
  return {"example1", "example2_plant", "example2_controller"};
}

bool is_builtin(const std::string& name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

nlohmann::json builtin_config(const std::string& name) {
  if (name == "example1") {
    nlohmann::json cfg;
    cfg["name"] = "example1";
    cfg["system"] = system_json(example1_system());
    cfg["abstraction"] = params_json(example1_params());
    cfg["radius_mode"] = "figure";
    cfg["formula_mode"] = "theorem";
    cfg["gamma"] = 1.0;
    cfg["qsr"] = {{"rho", 0.25}, {"nu", 0.5}};
    cfg["storage"] = {{"P", {{0.5154}}}, {"L", "auto"}};
    cfg["transfer"] = {{"zeta1", 0.1}, {"zeta2", 0.05}, {"zeta3", 0.05}, {"zeta4", 0.1}};
    return cfg;
  }
  if (name == "example2_plant") {
    nlohmann::json cfg;
    cfg["name"] = "example2_plant";
    cfg["system"] = system_json(example2_plant());
    cfg["abstraction"] = params_json(example2_params());
    cfg["radius_mode"] = "spec";
    cfg["formula_mode"] = "example2compat";
    cfg["gamma"] = 0.44;
    cfg["qsr"] = {{"rho", 0.15}, {"nu", 0.7}};
    cfg["build_abstraction"] = false;
    cfg["composition"] = {{"indices", {{"rho", 0.0420}, {"nu", 0.8115}}}};
    return cfg;
  }
  if (name == "example2_controller") {
    nlohmann::json cfg;
    cfg["name"] = "example2_controller";
    cfg["system"] = system_json(example2_controller());
    cfg["abstraction"] = params_json(example2_params());
    cfg["radius_mode"] = "spec";
    cfg["formula_mode"] = "example2compat";
    cfg["qsr"] = {{"rho", 0.0420}, {"nu", 0.8115}};
    return cfg;
  }
  throw std::invalid_argument("unknown builtin config: " + name);
}

}  // namespace symdiss
