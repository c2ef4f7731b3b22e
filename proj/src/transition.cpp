#include "symdiss/transition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace symdiss {

double quantize_scalar(double x, double step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw std::invalid_argument("quantize: step must be positive");
  if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite value");
  double q = x / step;
  /* exact half-integer quotients drift below .5 in floating point
   * (0.05/0.1 < 0.5); snap before rounding so ties go toward +inf */
  const double twice = 2.0 * q;
  const double snapped = std::round(twice);
  if (std::abs(twice - snapped) < 1e-9) q = snapped / 2.0;
  return std::floor(q + 0.5) * step;
}

Vec quantize(const Vec& x, double step) {
  Vec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = quantize_scalar(x[i], step);
  return r;
}

std::vector<Vec> build_grid(const GridSpec& spec) {
  if (!(spec.step > 0.0) || !std::isfinite(spec.step))
    throw std::invalid_argument("build_grid: step must be positive");
  if (spec.bounds.empty()) throw std::invalid_argument("build_grid: empty bounds");
  std::vector<std::vector<double>> axes;
  for (const auto& iv : spec.bounds) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi)
      throw std::invalid_argument("build_grid: invalid interval");
    const long long k_lo = static_cast<long long>(std::ceil(iv.lo / spec.step - 1e-9));
    const long long k_hi = static_cast<long long>(std::floor(iv.hi / spec.step + 1e-9));
    std::vector<double> axis;
    for (long long k = k_lo; k <= k_hi; ++k) axis.push_back(static_cast<double>(k) * spec.step);
    if (axis.empty()) return {};
    axes.push_back(std::move(axis));
  }
  std::vector<Vec> grid;
  Vec point(axes.size());
  std::vector<size_t> idx(axes.size(), 0);
  while (true) {
    for (size_t d = 0; d < axes.size(); ++d) point[d] = axes[d][idx[d]];
    grid.push_back(point);
    size_t d = axes.size();
    while (d > 0) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) return grid;
    }
  }
}

FiniteTransitionSystem::FiniteTransitionSystem(
    double tau, std::vector<Vec> states, std::vector<Vec> inputs,
    std::vector<std::vector<std::vector<int>>> post,
    std::vector<std::vector<Vec>> measured_output, std::vector<std::vector<Vec>> system_output)
    : tau_(tau),
      states_(std::move(states)),
      inputs_(std::move(inputs)),
      post_(std::move(post)),
      measured_(std::move(measured_output)),
      system_(std::move(system_output)) {
  if (!(tau_ > 0.0) || !std::isfinite(tau_))
    throw std::invalid_argument("FiniteTransitionSystem: tau must be positive");
  const int ns = num_states();
  const int ni = num_inputs();
  if (static_cast<int>(post_.size()) != ns ||
      static_cast<int>(measured_.size()) != ns ||
      static_cast<int>(system_.size()) != ns)
    throw std::invalid_argument("FiniteTransitionSystem: per-state table size mismatch");
  enabled_.resize(ns);
  for (int i = 0; i < ns; ++i) {
    if (static_cast<int>(post_[i].size()) != ni ||
        static_cast<int>(measured_[i].size()) != ni ||
        static_cast<int>(system_[i].size()) != ni)
      throw std::invalid_argument("FiniteTransitionSystem: per-input table size mismatch");
    for (int j = 0; j < ni; ++j) {
      auto& succ = post_[i][j];
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
      for (int k : succ)
        if (k < 0 || k >= ns)
          throw std::invalid_argument("FiniteTransitionSystem: successor index out of range");
      if (!succ.empty()) enabled_[i].push_back(j);
      if (succ.size() > 1) deterministic_ = false;
      num_transitions_ += static_cast<int>(succ.size());
    }
  }
}

const std::vector<int>& FiniteTransitionSystem::post(int i, int j) const {
  return post_.at(i).at(j);
}
const Vec& FiniteTransitionSystem::measured_output(int i, int j) const {
  return measured_.at(i).at(j);
}
const Vec& FiniteTransitionSystem::system_output(int i, int j) const {
  return system_.at(i).at(j);
}

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_vec(const Vec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_num(v[i]);
  }
  s += ")";
  return s;
}

}  // namespace

std::string export_dot(const FiniteTransitionSystem& ts, const std::string& name) {
  std::string out = "digraph " + name + " {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int i = 0; i < ts.num_states(); ++i)
    out += "  s" + std::to_string(i) + " [label=\"" + fmt_vec(ts.state(i)) + "\"];\n";
  for (int i = 0; i < ts.num_states(); ++i)
    for (int j = 0; j < ts.num_inputs(); ++j)
      for (int k : ts.post(i, j))
        out += "  s" + std::to_string(i) + " -> s" + std::to_string(k) + " [label=\"" +
               fmt_vec(ts.input(j)) + "\"];\n";
  out += "}\n";
  return out;
}

nlohmann::json fts_to_json(const FiniteTransitionSystem& ts) {
  nlohmann::json j;
  j["tau"] = ts.tau();
  j["states"] = ts.states();
  j["inputs"] = ts.inputs();
  j["post"] = ts.post_table();
  j["measured_output"] = ts.measured_output_table();
  j["system_output"] = ts.system_output_table();
  return j;
}

FiniteTransitionSystem fts_from_json(const nlohmann::json& j) {
  try {
    return FiniteTransitionSystem(
        j.at("tau").get<double>(), j.at("states").get<std::vector<Vec>>(),
        j.at("inputs").get<std::vector<Vec>>(),
        j.at("post").get<std::vector<std::vector<std::vector<int>>>>(),
        j.at("measured_output").get<std::vector<std::vector<Vec>>>(),
        j.at("system_output").get<std::vector<std::vector<Vec>>>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("fts_from_json: malformed document: ") + e.what());
  }
}

}  // namespace symdiss
