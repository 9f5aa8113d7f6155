// Copyright 2026 The Bonsai BO Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef BONSAI_IO_HPP
#define BONSAI_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "bonsai/bench.hpp"
#include "bonsai/gp.hpp"
#include "bonsai/pruning.hpp"

namespace bonsai::io {

using json = nlohmann::ordered_json;

inline constexpr int kConfigSchemaVersion = 1;

/// Bad configuration contents. `field` is the dotted path of the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : std::invalid_argument(field + ": " + msg), field_(field) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd vector_from_json(const json& a) {
  if (!a.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw std::invalid_argument("expected a JSON array of numbers");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Enum names

inline Method parse_method(const std::string& s) {
  if (s == "sobol") return Method::Sobol;
  if (s == "standard_bo") return Method::StandardBO;
  if (s == "bonsai") return Method::Bonsai;
  if (s == "bonsai_exact") return Method::BonsaiExact;
  throw ConfigError("method", "unknown method '" + s + "' (expected sobol, standard_bo, bonsai or bonsai_exact)");
}

inline AcqKind parse_acq(const std::string& s) {
  if (s == "ei") return AcqKind::EI;
  if (s == "logei") return AcqKind::LogEI;
  if (s == "ucb") return AcqKind::UCB;
  throw ConfigError("acquisition", "unknown acquisition '" + s + "' (expected ei, logei or ucb)");
}

inline ScheduleKind parse_schedule(const std::string& s) {
  if (s == "constant") return ScheduleKind::Constant;
  if (s == "inverse_t") return ScheduleKind::InverseT;
  if (s == "inverse_power") return ScheduleKind::InversePower;
  throw ConfigError("rule.kind", "unknown schedule '" + s + "' (expected constant, inverse_t or inverse_power)");
}

inline KernelFamily parse_kernel(const std::string& s) {
  if (s == "matern52") return KernelFamily::Matern52;
  if (s == "squared_exponential") return KernelFamily::SquaredExponential;
  throw ConfigError("fit.kernel", "unknown kernel '" + s + "' (expected matern52 or squared_exponential)");
}

// ---------------------------------------------------------------------------
// Experiment config

inline json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["problem"] = c.problem;
  j["embed_dim"] = c.embed_dim;
  j["center_default"] = c.center_default;
  j["noise_sd"] = c.noise_sd;
  j["method"] = to_string(c.method);
  j["acquisition"] = to_string(c.acquisition);
  j["rule"] = {{"kind", to_string(c.rule.kind)},
               {"rho0", c.rule.rho0},
               {"epsilon", c.rule.epsilon},
               {"rho_max", c.rule.rho_max ? json(*c.rule.rho_max) : json(nullptr)}};
  j["q"] = c.q;
  j["init_sobol"] = c.init_sobol;
  j["iterations"] = c.iterations;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["ensemble_size"] = c.ensemble_size;
  j["fit"] = {{"restarts", c.fit.restarts},
              {"max_iters", c.fit.max_iters},
              {"grad_tol", c.fit.grad_tol},
              {"kernel", to_string(c.fit.family)},
              {"prior_jacobian", c.fit.prior_jacobian}};
  j["optimizer"] = {{"raw_samples", c.budget.raw_samples},
                    {"num_starts", c.budget.num_starts},
                    {"max_local_iters", c.budget.max_local_iters},
                    {"tol", c.budget.tol},
                    {"fd_step", c.budget.fd_step},
                    {"analytic_gradients", c.budget.analytic_gradients}};
  j["record_timing"] = c.record_timing;
  j["output"] = c.output;
  return j;
}

namespace io_detail {

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(path, "expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)
          throw ConfigError(path, "expected a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(path, "expected a number");
    } else {
      if (!it->is_string()) throw ConfigError(path, "expected a string");
    }
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

inline std::string read_enum(const json& obj, const char* key, const std::string& path, std::string fallback) {
  read(obj, key, path, fallback);
  return fallback;
}

}  // namespace io_detail

/// Parse and validate a config. Missing fields keep their defaults; unknown fields
/// and type mismatches are rejected with the dotted field name.
inline ExperimentConfig config_from_json(const json& j) {
  using io_detail::read;
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  io_detail::check_keys(j, "",
                        {"schema_version", "problem", "embed_dim", "center_default", "noise_sd", "method", "acquisition",
                         "rule", "q", "init_sobol", "iterations", "replications", "seed", "ensemble_size", "fit",
                         "optimizer", "record_timing", "output"});
  if (!j.contains("schema_version")) throw ConfigError("schema_version", "missing");
  int version = 0;
  read(j, "schema_version", "schema_version", version);
  if (version != kConfigSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                            std::to_string(kConfigSchemaVersion) + ")");

  ExperimentConfig c;
  read(j, "problem", "problem", c.problem);
  read(j, "embed_dim", "embed_dim", c.embed_dim);
  read(j, "center_default", "center_default", c.center_default);
  read(j, "noise_sd", "noise_sd", c.noise_sd);
  c.method = parse_method(io_detail::read_enum(j, "method", "method", to_string(c.method)));
  c.acquisition = parse_acq(io_detail::read_enum(j, "acquisition", "acquisition", to_string(c.acquisition)));
  if (auto it = j.find("rule"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("rule", "expected an object");
    io_detail::check_keys(*it, "rule", {"kind", "rho0", "epsilon", "rho_max"});
    c.rule.kind = parse_schedule(io_detail::read_enum(*it, "kind", "rule.kind", to_string(c.rule.kind)));
    read(*it, "rho0", "rule.rho0", c.rule.rho0);
    read(*it, "epsilon", "rule.epsilon", c.rule.epsilon);
    if (auto r = it->find("rho_max"); r != it->end()) {
      if (r->is_null()) {
        c.rule.rho_max.reset();
      } else {
        double v = 0.0;
        read(*it, "rho_max", "rule.rho_max", v);
        c.rule.rho_max = v;
      }
    }
  }
  read(j, "q", "q", c.q);
  read(j, "init_sobol", "init_sobol", c.init_sobol);
  read(j, "iterations", "iterations", c.iterations);
  read(j, "replications", "replications", c.replications);
  read(j, "seed", "seed", c.seed);
  read(j, "ensemble_size", "ensemble_size", c.ensemble_size);
  if (auto it = j.find("fit"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("fit", "expected an object");
    io_detail::check_keys(*it, "fit", {"restarts", "max_iters", "grad_tol", "kernel", "prior_jacobian"});
    read(*it, "restarts", "fit.restarts", c.fit.restarts);
    read(*it, "max_iters", "fit.max_iters", c.fit.max_iters);
    read(*it, "grad_tol", "fit.grad_tol", c.fit.grad_tol);
    c.fit.family = parse_kernel(io_detail::read_enum(*it, "kernel", "fit.kernel", "matern52"));
    read(*it, "prior_jacobian", "fit.prior_jacobian", c.fit.prior_jacobian);
  }
  if (auto it = j.find("optimizer"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("optimizer", "expected an object");
    io_detail::check_keys(*it, "optimizer",
                          {"raw_samples", "num_starts", "max_local_iters", "tol", "fd_step", "analytic_gradients"});
    read(*it, "raw_samples", "optimizer.raw_samples", c.budget.raw_samples);
    read(*it, "num_starts", "optimizer.num_starts", c.budget.num_starts);
    read(*it, "max_local_iters", "optimizer.max_local_iters", c.budget.max_local_iters);
    read(*it, "tol", "optimizer.tol", c.budget.tol);
    read(*it, "fd_step", "optimizer.fd_step", c.budget.fd_step);
    read(*it, "analytic_gradients", "optimizer.analytic_gradients", c.budget.analytic_gradients);
  }
  read(j, "record_timing", "record_timing", c.record_timing);
  read(j, "output", "output", c.output);

  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    // validate() messages start with the field name
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(colon == std::string::npos ? "<config>" : msg.substr(0, colon),
                      colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Prune traces and model snapshots

inline json to_json(const PruneTrace& tr) {
  json steps = json::array();
  for (const auto& s : tr.steps) {
    json js = {{"pass", s.pass}, {"component", s.component}, {"gap", s.gap},
               {"feasible", s.feasible}, {"accepted", s.accepted}};
    if (!s.kept.empty() || s.component < 0) js["kept"] = s.kept;
    steps.push_back(std::move(js));
  }
  return {{"acq_evals", tr.acq_evals},     {"final_gap", tr.final_gap},   {"rho", tr.rho_used},
          {"budget", tr.budget},           {"alpha_star", tr.alpha_star}, {"alpha_tilde", tr.alpha_tilde},
          {"baseline", tr.baseline},       {"skipped", tr.skipped},       {"active_before", tr.active_before},
          {"active_after", tr.active_after}, {"steps", std::move(steps)}};
}

inline PruneTrace trace_from_json(const json& j) {
  PruneTrace tr;
  tr.acq_evals = j.at("acq_evals").get<long>();
  tr.final_gap = j.at("final_gap").get<double>();
  tr.rho_used = j.at("rho").get<double>();
  tr.budget = j.at("budget").get<double>();
  tr.alpha_star = j.at("alpha_star").get<double>();
  tr.alpha_tilde = j.at("alpha_tilde").get<double>();
  tr.baseline = j.at("baseline").get<double>();
  tr.skipped = j.at("skipped").get<bool>();
  tr.active_before = j.at("active_before").get<int>();
  tr.active_after = j.at("active_after").get<int>();
  for (const auto& s : j.at("steps")) {
    PruneStep st;
    st.pass = s.at("pass").get<int>();
    st.component = s.at("component").get<int>();
    if (s.contains("kept")) st.kept = s.at("kept").get<std::vector<int>>();
    st.gap = s.at("gap").get<double>();
    st.feasible = s.at("feasible").get<bool>();
    st.accepted = s.at("accepted").get<bool>();
    tr.steps.push_back(std::move(st));
  }
  return tr;
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Per-member theta, tau and kernel, plus the hash of the training data.
inline json model_snapshot(const EnsembleGP& model) {
  json members = json::array();
  for (const auto& m : model.members())
    members.push_back({{"theta", to_json(m.theta())},
                       {"tau", m.tau()},
                       {"mean", m.mean_const()},
                       {"kernel", to_string(m.params().family)},
                       {"fallback", m.fallback()}});
  return {{"dim", model.space().dim()},
          {"n", model.data().size()},
          {"dataset_hash", hex64(model.data().hash())},
          {"members", std::move(members)}};
}

// ---------------------------------------------------------------------------
// Result CSV

inline constexpr const char* kCsvHeader = "rep,t,phase,y_raw,best_raw,n_active,eta,rho,m_t,gen_ms,acq_evals,x_json";

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string x_json(const Configuration& x) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ',';
    s += format_double(x[i]);
  }
  return s + "]";
}

inline void write_csv(std::ostream& out, const ReplicationRecord& rec) {
  out << kCsvHeader << '\n';
  for (const auto& r : rec.rows) {
    out << r.rep << ',' << r.t << ',' << to_string(r.phase) << ',' << format_double(r.y_raw) << ','
        << format_double(r.best_raw) << ',' << r.n_active << ',' << format_double(r.eta) << ','
        << format_double(r.rho) << ',' << format_double(r.m_t) << ',' << format_double(r.gen_ms) << ','
        << r.acq_evals << ",\"" << x_json(r.x) << "\"\n";
  }
}

namespace io_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

inline double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

inline long to_long(const std::string& s) {
  std::size_t used = 0;
  const long v = std::stol(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

}  // namespace io_detail

/// Read one replication CSV. Direction is not stored in the file; pass it in.
inline ReplicationRecord read_csv(std::istream& in, Direction direction, const std::string& name = "<csv>") {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument(name + ": unexpected header '" + line + "'");
  ReplicationRecord rec;
  rec.direction = direction;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto f = io_detail::split_csv_line(line);
      if (f.size() != 12) throw std::invalid_argument("expected 12 fields, got " + std::to_string(f.size()));
      RecordRow r;
      r.rep = static_cast<int>(io_detail::to_long(f[0]));
      r.t = static_cast<int>(io_detail::to_long(f[1]));
      if (f[2] == "init") r.phase = Phase::Init;
      else if (f[2] == "bo") r.phase = Phase::BO;
      else throw std::invalid_argument("phase must be init or bo");
      r.y_raw = io_detail::to_double(f[3]);
      r.best_raw = io_detail::to_double(f[4]);
      r.n_active = static_cast<int>(io_detail::to_long(f[5]));
      r.eta = io_detail::to_double(f[6]);
      r.rho = io_detail::to_double(f[7]);
      r.m_t = io_detail::to_double(f[8]);
      r.gen_ms = io_detail::to_double(f[9]);
      r.acq_evals = io_detail::to_long(f[10]);
      r.x = vector_from_json(json::parse(f[11]));
      if (rec.rows.empty()) {
        rec.rep = r.rep;
        rec.dim = static_cast<int>(r.x.size());
      } else if (r.rep != rec.rep || r.x.size() != rec.dim) {
        throw std::invalid_argument("rep or dimension changes within the file");
      }
      rec.rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (rec.rows.empty()) throw std::invalid_argument(name + ": no data rows");
  return rec;
}

}  // namespace bonsai::io

#endif  // BONSAI_IO_HPP
