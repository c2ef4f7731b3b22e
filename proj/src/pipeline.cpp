#include "symdiss/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "symdiss/builtins.hpp"

namespace symdiss {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

std::string formula_name(OutputFormulaMode m) {
  return m == OutputFormulaMode::kTheorem ? "theorem" : "example2compat";
}

std::string radius_name(RadiusMode m) { return m == RadiusMode::kSpec ? "spec" : "figure"; }

double as_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

bool as_flag(const nlohmann::json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected a boolean");
  return j.get<bool>();
}

std::string as_text(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

Matrix as_matrix(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty())
      throw ConfigError(path + ": each row must be a non-empty array of numbers");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ConfigError(path + ": non-numeric entry");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return Matrix(rows);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Box as_box(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path + ": expected an array of [lo, hi] pairs");
  Box box;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw ConfigError(path + ": each interval must be [lo, hi]");
    const double lo = iv[0].get<double>();
    const double hi = iv[1].get<double>();
    if (!(lo <= hi)) throw ConfigError(path + ": interval with lo > hi");
    box.push_back({lo, hi});
  }
  return box;
}

nlohmann::json resolve_builtins(const nlohmann::json& in) {
  if (!in.is_object()) throw ConfigError("config: expected a JSON object");
  if (!in.contains("system")) return in;
  const auto& sys = in.at("system");
  if (!sys.is_object() || !sys.contains("builtin")) return in;
  const std::string name = as_text(sys.at("builtin"), "config.system.builtin");
  if (sys.size() != 1)
    throw ConfigError("config.system: a builtin reference takes no sibling keys");
  nlohmann::json base;
  try {
    base = builtin_config(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.system.builtin: ") + e.what());
  }
  nlohmann::json overlay = in;
  overlay.erase("system");
  return deep_merge(base, overlay);
}

AbstractionParams parse_abstraction_block(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config.abstraction: expected an object");
  AbstractionParams p;
  auto field = [&](const char* key) {
    if (!j.contains(key))
      throw ConfigError(std::string("config.abstraction.") + key + ": missing");
    return as_number(j.at(key), std::string("config.abstraction.") + key);
  };
  p.tau = field("tau");
  p.eta = field("eta");
  p.mu = field("mu");
  p.theta1 = field("theta1");
  p.theta2 = field("theta2");
  p.eps_u = field("eps_u");
  p.eps_y = field("eps_y");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"tau", "eta", "mu", "theta1", "theta2", "eps_u", "eps_y"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw ConfigError("config.abstraction." + it.key() + ": unknown field");
  }
  return p;
}

ContinuousSystem parse_system_block(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config.system: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"A", "B", "C", "D", "measurement_mode",
                                  "domain", "input_set", "k1", "k2"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw ConfigError("config.system." + it.key() + ": unknown field");
  }
  auto matrix_field = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config.system.") + key + ": missing");
    return as_matrix(j.at(key), std::string("config.system.") + key);
  };
  const Matrix a = matrix_field("A");
  const Matrix b = matrix_field("B");
  const Matrix c = matrix_field("C");
  const Matrix d = matrix_field("D");
  if (!j.contains("measurement_mode"))
    throw ConfigError("config.system.measurement_mode: missing");
  const std::string mode_s = as_text(j.at("measurement_mode"), "config.system.measurement_mode");
  MeasurementMode mode;
  if (mode_s == "state")
    mode = MeasurementMode::kStateMeasured;
  else if (mode_s == "output")
    mode = MeasurementMode::kOutputMeasured;
  else
    throw ConfigError("config.system.measurement_mode: expected \"state\" or \"output\"");
  if (!j.contains("domain")) throw ConfigError("config.system.domain: missing");
  if (!j.contains("input_set")) throw ConfigError("config.system.input_set: missing");
  const Box domain = as_box(j.at("domain"), "config.system.domain");
  const Box input_set = as_box(j.at("input_set"), "config.system.input_set");
  std::optional<double> k1, k2;
  if (j.contains("k1")) k1 = as_number(j.at("k1"), "config.system.k1");
  if (j.contains("k2")) k2 = as_number(j.at("k2"), "config.system.k2");
  try {
    return ContinuousSystem::lti(a, b, c, d, mode, domain, input_set, k1, k2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.system: ") + e.what());
  }
}

CompositionOutputMode parse_output_mode(const nlohmann::json& j, const std::string& path) {
  const std::string s = as_text(j, path);
  if (s == "average") return CompositionOutputMode::kAverage;
  if (s == "left") return CompositionOutputMode::kLeft;
  if (s == "right") return CompositionOutputMode::kRight;
  throw ConfigError(path + ": expected \"average\", \"left\" or \"right\"");
}

/* ---- report assembly ------------------------------------------------- */

struct Report {
  std::string tags;
  std::vector<std::string> lines;
  nlohmann::json stages = nlohmann::json::object();

  void add(const std::string& stage, const std::string& body) {
    lines.push_back("[" + stage + "] " + body + tags);
  }
  void plain(const std::string& s) { lines.push_back(s); }
  std::string text() const {
    std::string out;
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

struct Sink {
  fs::path dir;
  std::vector<std::string>* files = nullptr;

  void write(const std::string& name, const std::string& content) const {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name);
    out << content;
    files->push_back(name);
  }
};

struct PipelineState {
  std::optional<FiniteTransitionSystem> fts;
  AbstractionDiagnostics diag;
  std::optional<double> gamma;
  std::string gamma_source;
  std::optional<double> gamma_hf;
  std::optional<QsrTriple> derived;
  bool verdict = true;
};

std::optional<QsrTriple> continuous_qsr(const AnalysisConfig& cfg) {
  if (cfg.qsr) return cfg.qsr;
  if (cfg.indices) {
    if (!cfg.system) return std::nullopt;
    return cfg.indices->to_qsr(cfg.system->input_dim());
  }
  return std::nullopt;
}

void stage_params(const AnalysisConfig& cfg, PipelineState&, Report& rep) {
  const AbstractionParams& p = *cfg.params;
  rep.add("params", "tau=" + fmt(p.tau) + " eta=" + fmt(p.eta) + " mu=" + fmt(p.mu) +
                        " theta1=" + fmt(p.theta1) + " theta2=" + fmt(p.theta2) +
                        " eps_u=" + fmt(p.eps_u) + " eps_y=" + fmt(p.eps_y));
  const bool state_measured =
      cfg.system->measurement_mode() == MeasurementMode::kStateMeasured;
  const ParamCheck check =
      state_measured ? validate_state_measured(p)
                     : validate_output_measured(p, cfg.system->k1(), cfg.system->k2());
  if (!check.ok) {
    std::string joined;
    for (const auto& v : check.violations) {
      if (!joined.empty()) joined += "; ";
      joined += v;
    }
    throw ConfigError("parameter validation failed: " + joined);
  }
  rep.add("validation",
          std::string("measurement=") + (state_measured ? "state" : "output") + " ok=true");
  rep.stages["validation"] = {{"ok", true}, {"measurement", state_measured ? "state" : "output"}};
}

void stage_gamma(const AnalysisConfig& cfg, PipelineState& st, Report& rep) {
  if (cfg.gamma) {
    st.gamma = *cfg.gamma;
    st.gamma_source = "config";
    rep.add("gamma", "gamma=" + fmt(*st.gamma) + " source=config");
    rep.stages["gamma"] = {{"gamma", *st.gamma}, {"source", "config"}};
    return;
  }
  if (!cfg.system->is_lti())
    throw ConfigError("config.gamma: required (the estimator needs an LTI system block)");
  const L2GainEstimate est = l2_gain_u_to_ydot(cfg.system->a(), cfg.system->b(),
                                               cfg.system->c(), cfg.system->d());
  st.gamma = est.gamma;
  st.gamma_hf = est.high_freq_limit;
  st.gamma_source = "estimate";
  rep.add("gamma", "gamma=" + fmt(est.gamma) + " source=estimate high_freq_limit=" +
                       fmt(est.high_freq_limit));
  rep.stages["gamma"] = {{"gamma", est.gamma},
                         {"source", "estimate"},
                         {"high_freq_limit", est.high_freq_limit}};
}

void stage_abstract(const AnalysisConfig& cfg, PipelineState& st, Report& rep,
                    const Sink& sink) {
  if (!cfg.system->is_lti())
    throw ConfigError("config.system: abstraction from config needs an LTI system block");
  const IfcBounds ifc = lti_ifc_bounds(cfg.system->a(), cfg.system->b());
  st.fts = build_abstraction(*cfg.system, ifc, *cfg.params, &st.diag);
  const double radius = transition_radius(ifc, *cfg.params);
  rep.add("abstraction",
          "states=" + std::to_string(st.fts->num_states()) +
              " inputs=" + std::to_string(st.fts->num_inputs()) +
              " transitions=" + std::to_string(st.fts->num_transitions()) +
              " deterministic=" + (st.fts->deterministic() ? "true" : "false") +
              " dead_states=" + std::to_string(st.diag.dead_states.size()) +
              " radius=" + fmt(radius));
  rep.stages["abstraction"] = {{"states", st.fts->num_states()},
                               {"inputs", st.fts->num_inputs()},
                               {"transitions", st.fts->num_transitions()},
                               {"deterministic", st.fts->deterministic()},
                               {"dead_states", st.diag.dead_states},
                               {"radius", radius}};
  sink.write("abstraction.json", fts_to_json(*st.fts).dump(2) + "\n");
  sink.write("abstraction.dot", export_dot(*st.fts));
}

void stage_derive(const AnalysisConfig& cfg, PipelineState& st, Report& rep) {
  const auto cqsr = continuous_qsr(cfg);
  if (!cqsr) throw ConfigError("config.qsr: required for this command");
  const AbstractionParams& p = *cfg.params;
  if (cfg.system->measurement_mode() == MeasurementMode::kStateMeasured)
    st.derived = abstraction_qsr_state_measured(*cqsr, p.tau, *st.gamma);
  else
    st.derived = abstraction_qsr_output_measured(*cqsr, p.tau, *st.gamma, p.mu,
                                                 cfg.system->input_dim(), cfg.formula_mode);
  nlohmann::json dj;
  dj["Q"] = st.derived->q.to_rows();
  dj["S"] = st.derived->s.to_rows();
  dj["R"] = st.derived->r.to_rows();
  std::string body;
  if (const auto idx = as_passivity_indices(*st.derived)) {
    body = "rho_abs=" + fmt(idx->rho) + " nu_abs=" + fmt(idx->nu) + " passivity=true";
    dj["rho_abs"] = idx->rho;
    dj["nu_abs"] = idx->nu;
  } else {
    body = "passivity=false q_min=" + fmt(min_symmetric_eigenvalue(st.derived->q)) +
           " r_min=" + fmt(min_symmetric_eigenvalue(st.derived->r));
  }
  rep.add("derive-qsr", body);
  rep.stages["derive_qsr"] = dj;
}

void stage_verify(const AnalysisConfig& cfg, PipelineState& st, Report& rep,
                  const Sink& sink) {
  Matrix p_mat;
  std::string p_source;
  if (cfg.storage_p) {
    p_mat = *cfg.storage_p;
    p_source = "config";
  } else {
    std::optional<Matrix> found;
    try {
      found = search_storage(cfg.system->a(), cfg.system->b(), cfg.system->c(),
                             cfg.system->d(), *continuous_qsr(cfg));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.storage.P: ") + e.what());
    }
    if (!found) {
      rep.add("verify", "storage_found=false verdict=false");
      rep.stages["verify"] = {{"storage_found", false}, {"verdict", false}};
      st.verdict = false;
      return;
    }
    p_mat = *found;
    p_source = "search";
  }

  StorageFunction storage =
      StorageFunction::quadratic(p_mat, cfg.params->tau, st.fts->states());
  if (cfg.storage_l) storage.l = *cfg.storage_l;
  const double beta = quantization_offset(storage, cfg.params->eta, cfg.params->tau);
  const QuasiCertificate cert = verify_quasi_dissipativity(*st.fts, *st.derived, storage, beta);

  std::string kron = "skipped";
  bool kron_ok = true;
  const auto idx = as_passivity_indices(*st.derived);
  if (idx && cfg.system->is_lti() && cfg.system->output_dim() == cfg.system->input_dim()) {
    std::vector<double> kv = kron_batch_check(*st.fts, *idx, cfg.system->c(),
                                              cfg.system->d(), storage, beta);
    std::vector<double> mv;
    mv.reserve(cert.margins.size());
    for (const auto& m : cert.margins) mv.push_back(m.margin);
    std::sort(kv.begin(), kv.end());
    std::sort(mv.begin(), mv.end());
    kron_ok = kv.size() == mv.size();
    for (size_t i = 0; kron_ok && i < kv.size(); ++i)
      kron_ok = std::abs(kv[i] - mv[i]) <= 1e-12;
    kron = kron_ok ? "match" : "mismatch";
  }

  rep.add("verify", std::string("verdict=") + (cert.verdict ? "true" : "false") +
                        " min_margin=" + fmt(cert.min_margin) +
                        " transitions=" + std::to_string(cert.margins.size()) +
                        " beta=" + fmt(beta) + " L=" + fmt(storage.l) +
                        " storage=" + p_source + " kron=" + kron);
  nlohmann::json vj = {{"verdict", cert.verdict},
                       {"min_margin", cert.min_margin},
                       {"transitions", cert.margins.size()},
                       {"beta", beta},
                       {"L", storage.l},
                       {"storage_source", p_source},
                       {"kron", kron}};
  vj["P"] = storage.p.to_rows();
  rep.stages["verify"] = vj;
  st.verdict = st.verdict && cert.verdict && kron_ok;
  sink.write("certificate.json",
             certificate_to_json(cert, formula_name(cfg.formula_mode),
                                 radius_name(cfg.params->radius_mode))
                     .dump(2) +
                 "\n");
}

void stage_transfer(const AnalysisConfig& cfg, PipelineState& st, Report& rep) {
  const TransferConstants& zeta = *cfg.transfer;
  nlohmann::json tj;
  bool corollary_ok = false;
  std::string body;

  if (const auto idx2 = as_passivity_indices(*st.derived)) {
    const double rho_gap = idx2->rho - zeta.zeta3;
    const double nu_gap = idx2->nu - zeta.zeta2;
    if (rho_gap > 0.0 && nu_gap > 0.0) {
      const PassivityIndices back = transfer_passivity_indices(idx2->rho, idx2->nu, zeta);
      corollary_ok = true;
      body = "corollary=ok rho1=" + fmt(back.rho) + " nu1=" + fmt(back.nu);
      tj["corollary"] = {{"ok", true}, {"rho1", back.rho}, {"nu1", back.nu}};
    } else {
      const std::string reason = rho_gap > 0.0
                                     ? "nu2 - zeta2 > 0 fails (" + fmt(idx2->nu) + " - " +
                                           fmt(zeta.zeta2) + " <= 0)"
                                     : "rho2 - zeta3 > 0 fails (" + fmt(idx2->rho) + " - " +
                                           fmt(zeta.zeta3) + " <= 0)";
      body = "corollary=failed reason=\"" + reason + "\"";
      tj["corollary"] = {{"ok", false}, {"reason", reason}};
    }
  } else {
    body = "corollary=skipped";
    tj["corollary"] = {{"ok", false}, {"reason", "derived supply rate is not passivity-form"}};
  }

  bool candidate_ok = false;
  const auto cand = search_transfer_candidate(*st.derived, zeta);
  if (cand) {
    const TransferCheck chk = transfer_qsr_from_abstraction(*st.derived, zeta, *cand);
    const double penalty =
        transfer_offset_penalty(*cand, zeta, cfg.params->eps_u, cfg.params->eps_y);
    candidate_ok = chk.ok;
    body += std::string(" candidate_ok=") + (chk.ok ? "true" : "false") +
            " q_slack=" + fmt(chk.q_slack) + " r_slack=" + fmt(chk.r_slack) +
            " offset_penalty=" + fmt(penalty);
    tj["candidate"] = {{"ok", chk.ok},
                       {"q_slack", chk.q_slack},
                       {"r_slack", chk.r_slack},
                       {"s_mismatch", chk.s_mismatch},
                       {"offset_penalty", penalty},
                       {"Q", cand->q.to_rows()},
                       {"S", cand->s.to_rows()},
                       {"R", cand->r.to_rows()}};
  } else {
    body += " candidate=none";
    tj["candidate"] = {{"ok", false}, {"reason", "no feasible diagonal shift"}};
  }

  const bool ok = corollary_ok || candidate_ok;
  body += std::string(" ok=") + (ok ? "true" : "false");
  tj["ok"] = ok;
  rep.add("transfer", body);
  rep.stages["transfer"] = tj;
  st.verdict = st.verdict && ok;
}

FiniteTransitionSystem build_second_component(const AnalysisConfig& cfg,
                                              const nlohmann::json& second) {
  if (!second.is_object())
    throw ConfigError("config.composition.second: expected an object");
  if (second.contains("fts_path")) {
    const std::string rel = as_text(second.at("fts_path"), "config.composition.second.fts_path");
    const fs::path path = fs::path(cfg.base_dir) / rel;
    std::ifstream in(path);
    if (!in) throw ConfigError("config.composition.second.fts_path: cannot read " + rel);
    nlohmann::json j;
    try {
      in >> j;
      return fts_from_json(j);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config.composition.second.fts_path: ") + e.what());
    }
  }
  AnalysisConfig sub;
  try {
    sub = parse_config(second, cfg.base_dir);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config.composition.second.") + e.what());
  }
  if (!sub.system || !sub.params)
    throw ConfigError("config.composition.second: needs system and abstraction blocks");
  const IfcBounds ifc = lti_ifc_bounds(sub.system->a(), sub.system->b());
  return build_abstraction(*sub.system, ifc, *sub.params);
}

void stage_compose(const AnalysisConfig& cfg, PipelineState& st, Report& rep) {
  const CompositionConfig& cc = *cfg.composition;
  nlohmann::json cj;

  if (cc.indices) {
    const auto idx = as_passivity_indices(*st.derived);
    if (!idx)
      throw ConfigError(
          "config.composition.indices: needs a passivity-form derived supply rate");
    const FeedbackIndexResult res =
        feedback_passivity_index(idx->rho, idx->nu, cc.indices->rho, cc.indices->nu);
    rep.add("compose", std::string("feedback_ok=") + (res.ok ? "true" : "false") +
                           " rho_cl=" + fmt(res.rho_cl) + " rho_c=" + fmt(cc.indices->rho) +
                           " nu_c=" + fmt(cc.indices->nu));
    cj["feedback_index"] = {{"ok", res.ok},
                            {"rho_cl", res.rho_cl},
                            {"rho_c", cc.indices->rho},
                            {"nu_c", cc.indices->nu}};
    st.verdict = st.verdict && res.ok;
  }

  if (!cc.second.is_null()) {
    const FiniteTransitionSystem t2 = build_second_component(cfg, cc.second);
    const FiniteTransitionSystem& t1 = *st.fts;
    const SimRelation rel = max_ioas_relation(t2, t1, cc.eps_u, cc.eps_y);
    const bool covered = check_covering(rel, t2);
    const FeedbackRelation f = build_feedback_relation(t1, t2, rel, cc.eps_u, cc.eps_y);
    const ComposedSystem composed = compose(t1, t2, f, cc.mode);
    std::string body = "relation_pairs=" + std::to_string(rel.pairs.size()) +
                       " covering=" + (covered ? "true" : "false") +
                       " quadruples=" + std::to_string(f.quadruples.size()) +
                       " composable=" + (composed.composable ? "true" : "false");
    cj["second"] = {{"relation_pairs", rel.pairs.size()},
                    {"covering", covered},
                    {"quadruples", f.quadruples.size()},
                    {"composable", composed.composable}};
    if (composed.composable) {
      body += " states=" + std::to_string(composed.fts->num_states()) +
              " transitions=" + std::to_string(composed.fts->num_transitions());
      const bool p52 = check_prop_5_2(composed, t1, t2, cc.mode);
      body += std::string(" prop52=") + (p52 ? "true" : "false");
      cj["second"]["states"] = composed.fts->num_states();
      cj["second"]["transitions"] = composed.fts->num_transitions();
      cj["second"]["prop52"] = p52;
      st.verdict = st.verdict && covered && p52;
    } else {
      st.verdict = false;
    }
    if (cfg.transfer && st.derived) {
      const auto cand = search_transfer_candidate(*st.derived, *cfg.transfer);
      if (cand) {
        const TransferCheck chk = composition_qsr(*st.derived, *cfg.transfer, *cand);
        body += std::string(" composed_qsr_ok=") + (chk.ok ? "true" : "false");
        cj["second"]["composed_qsr"] = {
            {"ok", chk.ok}, {"q_slack", chk.q_slack}, {"r_slack", chk.r_slack}};
        st.verdict = st.verdict && chk.ok;
      } else {
        body += " composed_qsr_ok=false";
        cj["second"]["composed_qsr"] = {{"ok", false}, {"reason", "no candidate"}};
        st.verdict = false;
      }
    }
    rep.add("compose", body);
  }
  rep.stages["compose"] = cj;
}

void stage_checksim(const AnalysisConfig& cfg, PipelineState& st, Report& rep) {
  if (!cfg.check_sim) throw ConfigError("config.check_sim: required for command 'check-sim'");
  const CheckSimConfig& cs = *cfg.check_sim;
  auto load = [&](const std::string& rel, const char* which) {
    const fs::path path = fs::path(cfg.base_dir) / rel;
    std::ifstream in(path);
    if (!in)
      throw ConfigError(std::string("config.check_sim.") + which + ": cannot read " + rel);
    nlohmann::json j;
    try {
      in >> j;
      return fts_from_json(j);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config.check_sim.") + which + ": " + e.what());
    }
  };
  const FiniteTransitionSystem t1 = load(cs.t1_path, "t1");
  const FiniteTransitionSystem t2 = load(cs.t2_path, "t2");
  const SimRelation rel = cs.kind == RelationKind::kIos
                              ? max_ios_relation(t1, t2, cs.eps_u, cs.eps_y)
                              : max_ioas_relation(t1, t2, cs.eps_u, cs.eps_y);
  const bool covered = check_covering(rel, t1);
  const bool ok = !rel.pairs.empty() && covered;
  rep.add("check-sim", std::string("kind=") +
                           (cs.kind == RelationKind::kIos ? "ios" : "ioas") +
                           " eps_u=" + fmt(cs.eps_u) + " eps_y=" + fmt(cs.eps_y) +
                           " pairs=" + std::to_string(rel.pairs.size()) +
                           " covering=" + (covered ? "true" : "false") +
                           " t1_states=" + std::to_string(t1.num_states()) +
                           " t2_states=" + std::to_string(t2.num_states()));
  rep.stages["check_sim"] = {{"covering", covered}, {"ok", ok}};
  rep.stages["check_sim"]["relation"] = relation_to_json(rel);
  st.verdict = st.verdict && ok;
}

void require_system(const AnalysisConfig& cfg, const std::string& command) {
  if (!cfg.system || !cfg.params)
    throw ConfigError("config.system: required for command '" + command + "'");
}

}  // namespace

nlohmann::json deep_merge(nlohmann::json base, const nlohmann::json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()))
      base[it.key()] = deep_merge(base.at(it.key()), it.value());
    else
      base[it.key()] = it.value();
  }
  return base;
}

AnalysisConfig parse_config(const nlohmann::json& j, const std::string& base_dir) {
  const nlohmann::json cfg_json = resolve_builtins(j);
  AnalysisConfig cfg;
  cfg.base_dir = base_dir;

  for (auto it = cfg_json.begin(); it != cfg_json.end(); ++it) {
    static const char* known[] = {"name",          "system",     "abstraction",
                                  "radius_mode",   "formula_mode", "gamma",
                                  "qsr",           "storage",    "transfer",
                                  "build_abstraction", "composition", "check_sim"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw ConfigError("config." + it.key() + ": unknown field");
  }

  if (cfg_json.contains("name")) cfg.name = as_text(cfg_json.at("name"), "config.name");

  if (cfg_json.contains("system")) {
    cfg.system = parse_system_block(cfg_json.at("system"));
    if (!cfg_json.contains("abstraction"))
      throw ConfigError("config.abstraction: required alongside a system block");
    cfg.params = parse_abstraction_block(cfg_json.at("abstraction"));
  } else if (cfg_json.contains("abstraction")) {
    throw ConfigError("config.abstraction: needs a system block");
  }

  if (cfg_json.contains("radius_mode")) {
    const std::string s = as_text(cfg_json.at("radius_mode"), "config.radius_mode");
    if (!cfg.params) throw ConfigError("config.radius_mode: needs a system block");
    if (s == "spec")
      cfg.params->radius_mode = RadiusMode::kSpec;
    else if (s == "figure")
      cfg.params->radius_mode = RadiusMode::kFigure;
    else
      throw ConfigError("config.radius_mode: expected \"spec\" or \"figure\"");
  }

  if (cfg_json.contains("formula_mode")) {
    const std::string s = as_text(cfg_json.at("formula_mode"), "config.formula_mode");
    if (s == "theorem")
      cfg.formula_mode = OutputFormulaMode::kTheorem;
    else if (s == "example2compat")
      cfg.formula_mode = OutputFormulaMode::kExample2Compat;
    else
      throw ConfigError("config.formula_mode: expected \"theorem\" or \"example2compat\"");
  }

  if (cfg_json.contains("gamma")) {
    const auto& g = cfg_json.at("gamma");
    if (g.is_string()) {
      if (g.get<std::string>() != "estimate")
        throw ConfigError("config.gamma: expected a number or \"estimate\"");
    } else {
      const double v = as_number(g, "config.gamma");
      if (!(v >= 0.0)) throw ConfigError("config.gamma: must be >= 0");
      cfg.gamma = v;
    }
  }

  if (cfg_json.contains("qsr")) {
    const auto& q = cfg_json.at("qsr");
    if (!q.is_object()) throw ConfigError("config.qsr: expected an object");
    if (q.contains("rho") || q.contains("nu")) {
      if (!q.contains("rho") || !q.contains("nu"))
        throw ConfigError("config.qsr: index form needs both rho and nu");
      cfg.indices = PassivityIndices{as_number(q.at("rho"), "config.qsr.rho"),
                                     as_number(q.at("nu"), "config.qsr.nu")};
    } else {
      if (!q.contains("Q") || !q.contains("S") || !q.contains("R"))
        throw ConfigError("config.qsr: matrix form needs Q, S and R");
      try {
        cfg.qsr = QsrTriple(as_matrix(q.at("Q"), "config.qsr.Q"),
                            as_matrix(q.at("S"), "config.qsr.S"),
                            as_matrix(q.at("R"), "config.qsr.R"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config.qsr: ") + e.what());
      }
    }
  }

  if (cfg_json.contains("storage")) {
    const auto& s = cfg_json.at("storage");
    if (!s.is_object()) throw ConfigError("config.storage: expected an object");
    if (s.contains("P")) {
      if (s.at("P").is_string()) {
        if (s.at("P").get<std::string>() != "search")
          throw ConfigError("config.storage.P: expected a matrix or \"search\"");
        cfg.storage_search = true;
      } else {
        cfg.storage_p = as_matrix(s.at("P"), "config.storage.P");
      }
    }
    if (s.contains("L")) {
      if (s.at("L").is_string()) {
        if (s.at("L").get<std::string>() != "auto")
          throw ConfigError("config.storage.L: expected a number or \"auto\"");
      } else {
        const double l = as_number(s.at("L"), "config.storage.L");
        if (!(l >= 0.0)) throw ConfigError("config.storage.L: must be >= 0");
        cfg.storage_l = l;
      }
    }
  }

  if (cfg_json.contains("transfer")) {
    const auto& t = cfg_json.at("transfer");
    if (!t.is_object()) throw ConfigError("config.transfer: expected an object");
    TransferConstants zeta;
    auto field = [&](const char* key, double& out) {
      if (!t.contains(key))
        throw ConfigError(std::string("config.transfer.") + key + ": missing");
      out = as_number(t.at(key), std::string("config.transfer.") + key);
      if (!(out > 0.0))
        throw ConfigError(std::string("config.transfer.") + key + ": must be > 0");
    };
    field("zeta1", zeta.zeta1);
    field("zeta2", zeta.zeta2);
    field("zeta3", zeta.zeta3);
    field("zeta4", zeta.zeta4);
    cfg.transfer = zeta;
  }

  if (cfg_json.contains("build_abstraction"))
    cfg.build_abstraction = as_flag(cfg_json.at("build_abstraction"), "config.build_abstraction");

  if (cfg_json.contains("composition")) {
    const auto& c = cfg_json.at("composition");
    if (!c.is_object()) throw ConfigError("config.composition: expected an object");
    CompositionConfig cc;
    if (c.contains("indices")) {
      const auto& idx = c.at("indices");
      if (!idx.is_object() || !idx.contains("rho") || !idx.contains("nu"))
        throw ConfigError("config.composition.indices: expected {rho, nu}");
      cc.indices = PassivityIndices{as_number(idx.at("rho"), "config.composition.indices.rho"),
                                    as_number(idx.at("nu"), "config.composition.indices.nu")};
    }
    if (c.contains("second")) cc.second = c.at("second");
    cc.eps_u = cfg.params ? cfg.params->eps_u : 0.0;
    cc.eps_y = cfg.params ? cfg.params->eps_y : 0.0;
    if (c.contains("eps_u")) cc.eps_u = as_number(c.at("eps_u"), "config.composition.eps_u");
    if (c.contains("eps_y")) cc.eps_y = as_number(c.at("eps_y"), "config.composition.eps_y");
    if (c.contains("mode")) cc.mode = parse_output_mode(c.at("mode"), "config.composition.mode");
    if (!cc.indices && cc.second.is_null())
      throw ConfigError("config.composition: needs \"indices\" and/or \"second\"");
    cfg.composition = cc;
  }

  if (cfg_json.contains("check_sim")) {
    const auto& c = cfg_json.at("check_sim");
    if (!c.is_object()) throw ConfigError("config.check_sim: expected an object");
    CheckSimConfig cs;
    if (!c.contains("t1") || !c.contains("t2"))
      throw ConfigError("config.check_sim: needs t1 and t2 file paths");
    cs.t1_path = as_text(c.at("t1"), "config.check_sim.t1");
    cs.t2_path = as_text(c.at("t2"), "config.check_sim.t2");
    if (c.contains("kind")) {
      const std::string k = as_text(c.at("kind"), "config.check_sim.kind");
      if (k == "ios")
        cs.kind = RelationKind::kIos;
      else if (k == "ioas")
        cs.kind = RelationKind::kIoas;
      else
        throw ConfigError("config.check_sim.kind: expected \"ios\" or \"ioas\"");
    }
    if (c.contains("eps_u")) cs.eps_u = as_number(c.at("eps_u"), "config.check_sim.eps_u");
    if (c.contains("eps_y")) cs.eps_y = as_number(c.at("eps_y"), "config.check_sim.eps_y");
    cfg.check_sim = cs;
  }

  return cfg;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  const fs::path parent = fs::path(path).parent_path();
  return parse_config(j, parent.empty() ? std::string(".") : parent.string());
}

std::vector<std::string> command_names() {
  return {"abstract", "check-sim", "derive-qsr", "verify", "transfer", "compose", "report"};
}

RunResult run_command(const AnalysisConfig& cfg, const std::string& command,
                      const std::string& out_dir) {
  const auto names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw ConfigError("command: unknown command '" + command + "'");

  RunResult result;
  Sink sink{fs::path(out_dir), &result.files_written};
  Report rep;
  rep.tags = " [formula=" + formula_name(cfg.formula_mode) + " radius=" +
             radius_name(cfg.params ? cfg.params->radius_mode : RadiusMode::kSpec) + "]";
  rep.plain("symdiss analysis report");
  rep.plain("config=" + cfg.name + " command=" + command);

  PipelineState st;
  const bool has_qsr = cfg.qsr.has_value() || cfg.indices.has_value();

  if (command == "abstract") {
    require_system(cfg, command);
    stage_params(cfg, st, rep);
    stage_abstract(cfg, st, rep, sink);
  } else if (command == "check-sim") {
    stage_checksim(cfg, st, rep);
  } else if (command == "derive-qsr") {
    require_system(cfg, command);
    stage_params(cfg, st, rep);
    stage_gamma(cfg, st, rep);
    stage_derive(cfg, st, rep);
  } else if (command == "verify") {
    require_system(cfg, command);
    stage_params(cfg, st, rep);
    stage_gamma(cfg, st, rep);
    stage_abstract(cfg, st, rep, sink);
    stage_derive(cfg, st, rep);
    stage_verify(cfg, st, rep, sink);
  } else if (command == "transfer") {
    require_system(cfg, command);
    if (!cfg.transfer) throw ConfigError("config.transfer: required for command 'transfer'");
    stage_params(cfg, st, rep);
    stage_gamma(cfg, st, rep);
    stage_derive(cfg, st, rep);
    stage_transfer(cfg, st, rep);
  } else if (command == "compose") {
    require_system(cfg, command);
    if (!cfg.composition)
      throw ConfigError("config.composition: required for command 'compose'");
    stage_params(cfg, st, rep);
    const bool needs_derive = cfg.composition->indices.has_value() || cfg.transfer.has_value();
    if (needs_derive) stage_gamma(cfg, st, rep);
    if (!cfg.composition->second.is_null()) stage_abstract(cfg, st, rep, sink);
    if (needs_derive) stage_derive(cfg, st, rep);
    stage_compose(cfg, st, rep);
  } else { /* report */
    if (!cfg.system && !cfg.check_sim)
      throw ConfigError("config.system: required for command 'report'");
    if (cfg.system) {
      stage_params(cfg, st, rep);
      if (has_qsr || cfg.gamma)
        stage_gamma(cfg, st, rep);
      else
        rep.add("gamma", "skipped=no-qsr");
      if (cfg.build_abstraction)
        stage_abstract(cfg, st, rep, sink);
      else
        rep.add("abstraction", "skipped=build_abstraction:false");
      if (has_qsr)
        stage_derive(cfg, st, rep);
      else
        rep.add("derive-qsr", "skipped=no-qsr");
      if (st.fts && st.derived && (cfg.storage_p || cfg.storage_search))
        stage_verify(cfg, st, rep, sink);
      else
        rep.add("verify", "skipped=no-storage");
      if (st.derived && cfg.transfer)
        stage_transfer(cfg, st, rep);
      else
        rep.add("transfer", "skipped=no-transfer-constants");
      if (cfg.composition &&
          ((cfg.composition->indices && st.derived) ||
           (!cfg.composition->second.is_null() && st.fts)))
        stage_compose(cfg, st, rep);
      else
        rep.add("compose", "skipped=not-configured");
    }
    if (cfg.check_sim) stage_checksim(cfg, st, rep);
  }

  rep.plain(std::string("[verdict] ") + (st.verdict ? "PASS" : "FAIL"));

  result.report_json["command"] = command;
  result.report_json["config"] = cfg.name;
  result.report_json["formula_mode"] = formula_name(cfg.formula_mode);
  result.report_json["radius_mode"] =
      radius_name(cfg.params ? cfg.params->radius_mode : RadiusMode::kSpec);
  result.report_json["stages"] = rep.stages;
  result.report_json["verdict"] = st.verdict ? "PASS" : "FAIL";

  result.report_text = rep.text();
  sink.write("report.txt", result.report_text);
  sink.write("report.json", result.report_json.dump(2) + "\n");
  result.exit_code = st.verdict ? 0 : 2;
  return result;
}

}  // namespace symdiss
