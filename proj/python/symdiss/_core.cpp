#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "symdiss/abstraction.hpp"
#include "symdiss/builtins.hpp"
#include "symdiss/composition.hpp"
#include "symdiss/dissipativity.hpp"
#include "symdiss/pipeline.hpp"
#include "symdiss/relations.hpp"
#include "symdiss/systems.hpp"
#include "symdiss/transition.hpp"

namespace py = pybind11;
using namespace symdiss;

namespace {

using Rows = std::vector<std::vector<double>>;
using BoxPairs = std::vector<std::pair<double, double>>;

Matrix mat(const Rows& rows) { return Matrix(rows); }

Box to_box(const BoxPairs& pairs) {
  Box b;
  for (const auto& [lo, hi] : pairs) b.push_back({lo, hi});
  return b;
}

MeasurementMode to_measurement(const std::string& s) {
  if (s == "state") return MeasurementMode::kStateMeasured;
  if (s == "output") return MeasurementMode::kOutputMeasured;
  throw std::invalid_argument("measurement_mode: expected 'state' or 'output'");
}

RadiusMode to_radius(const std::string& s) {
  if (s == "spec") return RadiusMode::kSpec;
  if (s == "figure") return RadiusMode::kFigure;
  throw std::invalid_argument("radius_mode: expected 'spec' or 'figure'");
}

OutputFormulaMode to_formula(const std::string& s) {
  if (s == "theorem") return OutputFormulaMode::kTheorem;
  if (s == "example2compat") return OutputFormulaMode::kExample2Compat;
  throw std::invalid_argument("formula_mode: expected 'theorem' or 'example2compat'");
}

CompositionOutputMode to_out_mode(const std::string& s) {
  if (s == "average") return CompositionOutputMode::kAverage;
  if (s == "left") return CompositionOutputMode::kLeft;
  if (s == "right") return CompositionOutputMode::kRight;
  throw std::invalid_argument("mode: expected 'average', 'left' or 'right'");
}

IfcBounds lti_bounds_of(const ContinuousSystem& sys) {
  if (!sys.is_lti())
    throw std::invalid_argument("build_abstraction: the python layer supports LTI systems");
  return lti_ifc_bounds(sys.a(), sys.b());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "quantized symbolic models, simulation relations, and dissipativity analysis";

  py::class_<ContinuousSystem>(m, "ContinuousSystem")
      .def_static(
          "lti",
          [](const Rows& a, const Rows& b, const Rows& c, const Rows& d,
             const std::string& measurement_mode, const BoxPairs& domain,
             const BoxPairs& input_set, std::optional<double> k1, std::optional<double> k2) {
            return ContinuousSystem::lti(mat(a), mat(b), mat(c), mat(d),
                                         to_measurement(measurement_mode), to_box(domain),
                                         to_box(input_set), k1, k2);
          },
          py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
          py::arg("measurement_mode"), py::arg("domain"), py::arg("input_set"),
          py::arg("k1") = std::nullopt, py::arg("k2") = std::nullopt)
      .def_property_readonly("state_dim", &ContinuousSystem::state_dim)
      .def_property_readonly("input_dim", &ContinuousSystem::input_dim)
      .def_property_readonly("output_dim", &ContinuousSystem::output_dim)
      .def_property_readonly("k1", &ContinuousSystem::k1)
      .def_property_readonly("k2", &ContinuousSystem::k2)
      .def_property_readonly("is_lti", &ContinuousSystem::is_lti)
      .def_property_readonly("measurement_mode",
                             [](const ContinuousSystem& s) {
                               return s.measurement_mode() == MeasurementMode::kStateMeasured
                                          ? "state"
                                          : "output";
                             })
      .def("dynamics", &ContinuousSystem::dynamics, py::arg("x"), py::arg("u"))
      .def("output", &ContinuousSystem::output, py::arg("x"), py::arg("u"));

  m.def("integrate", &integrate, py::arg("system"), py::arg("x0"), py::arg("u"),
        py::arg("t"), py::arg("h"));
  m.def("quantize", &quantize, py::arg("x"), py::arg("step"));

  py::class_<L2GainEstimate>(m, "L2GainEstimate")
      .def_readonly("gamma", &L2GainEstimate::gamma)
      .def_readonly("high_freq_limit", &L2GainEstimate::high_freq_limit);
  m.def(
      "l2_gain_u_to_ydot",
      [](const Rows& a, const Rows& b, const Rows& c, const Rows& d) {
        return l2_gain_u_to_ydot(mat(a), mat(b), mat(c), mat(d));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));

  py::class_<AbstractionParams>(m, "AbstractionParams")
      .def(py::init<>())
      .def_readwrite("tau", &AbstractionParams::tau)
      .def_readwrite("eta", &AbstractionParams::eta)
      .def_readwrite("mu", &AbstractionParams::mu)
      .def_readwrite("theta1", &AbstractionParams::theta1)
      .def_readwrite("theta2", &AbstractionParams::theta2)
      .def_readwrite("eps_u", &AbstractionParams::eps_u)
      .def_readwrite("eps_y", &AbstractionParams::eps_y)
      .def_property(
          "radius_mode",
          [](const AbstractionParams& p) {
            return p.radius_mode == RadiusMode::kSpec ? "spec" : "figure";
          },
          [](AbstractionParams& p, const std::string& s) { p.radius_mode = to_radius(s); });

  py::class_<ParamCheck>(m, "ParamCheck")
      .def_readonly("ok", &ParamCheck::ok)
      .def_readonly("violations", &ParamCheck::violations);
  m.def("validate_state_measured", &validate_state_measured, py::arg("params"));
  m.def("validate_output_measured", &validate_output_measured, py::arg("params"),
        py::arg("k1"), py::arg("k2"));

  py::class_<FiniteTransitionSystem>(m, "FiniteTransitionSystem")
      .def_property_readonly("num_states", &FiniteTransitionSystem::num_states)
      .def_property_readonly("num_inputs", &FiniteTransitionSystem::num_inputs)
      .def_property_readonly("num_transitions", &FiniteTransitionSystem::num_transitions)
      .def_property_readonly("deterministic", &FiniteTransitionSystem::deterministic)
      .def_property_readonly("tau", &FiniteTransitionSystem::tau)
      .def_property_readonly("states", &FiniteTransitionSystem::states)
      .def_property_readonly("inputs", &FiniteTransitionSystem::inputs)
      .def("state", &FiniteTransitionSystem::state, py::arg("i"))
      .def("input", &FiniteTransitionSystem::input, py::arg("j"))
      .def("post", &FiniteTransitionSystem::post, py::arg("i"), py::arg("j"))
      .def("measured_output", &FiniteTransitionSystem::measured_output, py::arg("i"),
           py::arg("j"))
      .def("system_output", &FiniteTransitionSystem::system_output, py::arg("i"),
           py::arg("j"))
      .def("enabled_inputs", &FiniteTransitionSystem::enabled_inputs, py::arg("i"))
      .def("to_json", [](const FiniteTransitionSystem& ts) { return fts_to_json(ts).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return fts_from_json(nlohmann::json::parse(text));
      });
  m.def("export_dot", &export_dot, py::arg("ts"), py::arg("name") = "symbolic_model");

  m.def(
      "build_abstraction",
      [](const ContinuousSystem& sys, const AbstractionParams& params) {
        return build_abstraction(sys, lti_bounds_of(sys), params);
      },
      py::arg("system"), py::arg("params"));
  m.def(
      "transition_radius",
      [](const ContinuousSystem& sys, const AbstractionParams& params) {
        return transition_radius(lti_bounds_of(sys), params);
      },
      py::arg("system"), py::arg("params"));

  py::class_<SimRelation>(m, "SimRelation")
      .def_property_readonly("kind",
                             [](const SimRelation& r) {
                               return r.kind == RelationKind::kIos ? "ios" : "ioas";
                             })
      .def_readonly("eps_u", &SimRelation::eps_u)
      .def_readonly("eps_y", &SimRelation::eps_y)
      .def_readonly("pairs", &SimRelation::pairs)
      .def("contains", &SimRelation::contains, py::arg("i"), py::arg("j"));
  m.def("max_ios_relation", &max_ios_relation, py::arg("t1"), py::arg("t2"),
        py::arg("eps_u"), py::arg("eps_y"));
  m.def("max_ioas_relation", &max_ioas_relation, py::arg("t1"), py::arg("t2"),
        py::arg("eps_u"), py::arg("eps_y"));
  m.def("check_covering", &check_covering, py::arg("relation"), py::arg("t1"));

  py::class_<QsrTriple>(m, "QsrTriple")
      .def(py::init([](const Rows& q, const Rows& s, const Rows& r) {
             return QsrTriple(mat(q), mat(s), mat(r));
           }),
           py::arg("q"), py::arg("s"), py::arg("r"))
      .def_static("passivity", &QsrTriple::passivity, py::arg("rho"), py::arg("nu"),
                  py::arg("m"))
      .def_property_readonly("q", [](const QsrTriple& t) { return t.q.to_rows(); })
      .def_property_readonly("s", [](const QsrTriple& t) { return t.s.to_rows(); })
      .def_property_readonly("r", [](const QsrTriple& t) { return t.r.to_rows(); });

  py::class_<PassivityIndices>(m, "PassivityIndices")
      .def(py::init([](double rho, double nu) {
             return PassivityIndices{rho, nu};
           }),
           py::arg("rho"), py::arg("nu"))
      .def_readwrite("rho", &PassivityIndices::rho)
      .def_readwrite("nu", &PassivityIndices::nu)
      .def("to_qsr", &PassivityIndices::to_qsr, py::arg("m"));
  m.def("as_passivity_indices", &as_passivity_indices, py::arg("qsr"));

  m.def("supply_rate", &supply_rate, py::arg("qsr"), py::arg("u"), py::arg("y"));

  py::class_<LtiQsrCheck>(m, "LtiQsrCheck")
      .def_readonly("margin", &LtiQsrCheck::margin)
      .def_readonly("ok", &LtiQsrCheck::ok)
      .def_property_readonly("form", [](const LtiQsrCheck& c) { return c.form.to_rows(); });
  m.def(
      "verify_lti_qsr",
      [](const Rows& a, const Rows& b, const Rows& c, const Rows& d, const Rows& p,
         const QsrTriple& qsr) {
        return verify_lti_qsr(mat(a), mat(b), mat(c), mat(d), mat(p), qsr);
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("p"), py::arg("qsr"));
  m.def(
      "search_storage",
      [](const Rows& a, const Rows& b, const Rows& c, const Rows& d,
         const QsrTriple& qsr) -> std::optional<Rows> {
        const auto found = search_storage(mat(a), mat(b), mat(c), mat(d), qsr);
        if (!found) return std::nullopt;
        return found->to_rows();
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("qsr"));

  py::class_<StorageFunction>(m, "StorageFunction")
      .def_static(
          "quadratic",
          [](const Rows& p, double tau, const std::vector<Vec>& domain_states) {
            return StorageFunction::quadratic(mat(p), tau, domain_states);
          },
          py::arg("p"), py::arg("tau"), py::arg("domain_states"))
      .def_property_readonly("p", [](const StorageFunction& s) { return s.p.to_rows(); })
      .def_readonly("scale", &StorageFunction::scale)
      .def_readwrite("l", &StorageFunction::l);

  py::class_<TransitionMargin>(m, "TransitionMargin")
      .def_readonly("state", &TransitionMargin::state)
      .def_readonly("input", &TransitionMargin::input)
      .def_readonly("successor", &TransitionMargin::successor)
      .def_readonly("margin", &TransitionMargin::margin);

  py::class_<QuasiCertificate>(m, "QuasiCertificate")
      .def_readonly("qsr", &QuasiCertificate::qsr)
      .def_readonly("storage", &QuasiCertificate::storage)
      .def_readonly("beta", &QuasiCertificate::beta)
      .def_readonly("margins", &QuasiCertificate::margins)
      .def_readonly("min_margin", &QuasiCertificate::min_margin)
      .def_readonly("verdict", &QuasiCertificate::verdict);
  m.def("verify_quasi_dissipativity", &verify_quasi_dissipativity, py::arg("ts"),
        py::arg("qsr"), py::arg("storage"), py::arg("beta"));
  m.def("quantization_offset", &quantization_offset, py::arg("storage"), py::arg("eta"),
        py::arg("tau"));
  m.def(
      "kron_batch_check",
      [](const FiniteTransitionSystem& ts, const PassivityIndices& indices, const Rows& c,
         const Rows& d, const StorageFunction& storage, double beta) {
        return kron_batch_check(ts, indices, mat(c), mat(d), storage, beta);
      },
      py::arg("ts"), py::arg("indices"), py::arg("c"), py::arg("d"), py::arg("storage"),
      py::arg("beta"));

  py::class_<TransferConstants>(m, "TransferConstants")
      .def(py::init([](double z1, double z2, double z3, double z4) {
             return TransferConstants{z1, z2, z3, z4};
           }),
           py::arg("zeta1"), py::arg("zeta2"), py::arg("zeta3"), py::arg("zeta4"))
      .def_readwrite("zeta1", &TransferConstants::zeta1)
      .def_readwrite("zeta2", &TransferConstants::zeta2)
      .def_readwrite("zeta3", &TransferConstants::zeta3)
      .def_readwrite("zeta4", &TransferConstants::zeta4);

  py::class_<TransferCheck>(m, "TransferCheck")
      .def_readonly("ok", &TransferCheck::ok)
      .def_readonly("q_slack", &TransferCheck::q_slack)
      .def_readonly("r_slack", &TransferCheck::r_slack)
      .def_readonly("s_mismatch", &TransferCheck::s_mismatch);
  m.def("transfer_qsr_from_abstraction", &transfer_qsr_from_abstraction, py::arg("qsr2"),
        py::arg("zeta"), py::arg("qsr1"));
  m.def("transfer_passivity_indices", &transfer_passivity_indices, py::arg("rho2"),
        py::arg("nu2"), py::arg("zeta"));
  m.def("transfer_offset_penalty", &transfer_offset_penalty, py::arg("qsr1"),
        py::arg("zeta"), py::arg("eps_u"), py::arg("eps_y"));
  m.def("search_transfer_candidate", &search_transfer_candidate, py::arg("qsr2"),
        py::arg("zeta"));

  m.def("abstraction_qsr_state_measured", &abstraction_qsr_state_measured, py::arg("qsr"),
        py::arg("tau"), py::arg("gamma"));
  m.def(
      "abstraction_qsr_output_measured",
      [](const QsrTriple& qsr, double tau, double gamma, double mu, int m_dim,
         const std::string& mode) {
        return abstraction_qsr_output_measured(qsr, tau, gamma, mu, m_dim, to_formula(mode));
      },
      py::arg("qsr"), py::arg("tau"), py::arg("gamma"), py::arg("mu"), py::arg("m"),
      py::arg("mode") = "theorem");

  py::class_<FeedbackIndexResult>(m, "FeedbackIndexResult")
      .def_readonly("ok", &FeedbackIndexResult::ok)
      .def_readonly("rho_cl", &FeedbackIndexResult::rho_cl);
  m.def("feedback_passivity_index", &feedback_passivity_index, py::arg("rho1"),
        py::arg("nu1"), py::arg("rho2"), py::arg("nu2"));

  py::class_<FeedbackRelation>(m, "FeedbackRelation")
      .def_readonly("eps_u", &FeedbackRelation::eps_u)
      .def_readonly("eps_y", &FeedbackRelation::eps_y)
      .def_property_readonly("quadruples", [](const FeedbackRelation& f) {
        std::vector<std::tuple<int, int, int, int>> out;
        out.reserve(f.quadruples.size());
        for (const auto& q : f.quadruples) out.emplace_back(q.x1, q.x2, q.u1, q.u2);
        return out;
      });
  m.def("build_feedback_relation", &build_feedback_relation, py::arg("t1"), py::arg("t2"),
        py::arg("relation"), py::arg("eps_u"), py::arg("eps_y"));

  py::class_<ComposedSystem>(m, "ComposedSystem")
      .def_readonly("composable", &ComposedSystem::composable)
      .def_readonly("eps_u", &ComposedSystem::eps_u)
      .def_readonly("eps_y", &ComposedSystem::eps_y)
      .def_readonly("fts", &ComposedSystem::fts)
      .def_readonly("state_pairs", &ComposedSystem::state_pairs)
      .def_readonly("input_pairs", &ComposedSystem::input_pairs);
  m.def(
      "compose",
      [](const FiniteTransitionSystem& t1, const FiniteTransitionSystem& t2,
         const FeedbackRelation& f, const std::string& mode) {
        return compose(t1, t2, f, to_out_mode(mode));
      },
      py::arg("t1"), py::arg("t2"), py::arg("f"), py::arg("mode") = "average");
  m.def(
      "check_prop_5_2",
      [](const ComposedSystem& composed, const FiniteTransitionSystem& t1,
         const FiniteTransitionSystem& t2, const std::string& mode) {
        return check_prop_5_2(composed, t1, t2, to_out_mode(mode));
      },
      py::arg("composed"), py::arg("t1"), py::arg("t2"), py::arg("mode") = "average");

  m.def("example1_system", &example1_system);
  m.def(
      "example1_params",
      [](const std::string& radius_mode) { return example1_params(to_radius(radius_mode)); },
      py::arg("radius_mode") = "figure");
  m.def("example2_plant", &example2_plant);
  m.def("example2_controller", &example2_controller);
  m.def("example2_params", &example2_params);
  m.def("builtin_names", &builtin_names);
  m.def(
      "builtin_config",
      [](const std::string& name) { return builtin_config(name).dump(2); },
      py::arg("name"));

  py::class_<AnalysisConfig>(m, "AnalysisConfig")
      .def_readonly("name", &AnalysisConfig::name);
  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "parse_config",
      [](const std::string& json_text, const std::string& base_dir) {
        return parse_config(nlohmann::json::parse(json_text), base_dir);
      },
      py::arg("json_text"), py::arg("base_dir") = ".");
  m.def(
      "run",
      [](const AnalysisConfig& cfg, const std::string& command, const std::string& out_dir) {
        const RunResult res = run_command(cfg, command, out_dir);
        return py::make_tuple(res.exit_code, res.report_text, res.report_json.dump(2));
      },
      py::arg("config"), py::arg("command"), py::arg("out_dir"));
}
