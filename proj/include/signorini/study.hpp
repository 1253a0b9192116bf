#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "signorini/error.hpp"
#include "signorini/norms.hpp"
#include "signorini/solver.hpp"
#include "signorini/steklov.hpp"

namespace signorini {

struct StudyConfig {
  int min_level = 1;
  int max_level = 8;
  double knot_s0 = 0.5;
  double knot_s1 = 1.0;
  double weight = 0.7;
  double pdas_c = 1.0;
  int pdas_max_iter = 100;
  InitialActiveSet pdas_start = InitialActiveSet::ExactContact;
  bool load_refine_near = true;
  int volume_max_depth = 6;
  double volume_near_factor = 4.0;
  double volume_tolerance = 1e-16;
  double boundary_tolerance = 1e-12;
  int reference_offset = 3;
  std::string out_dir = "study_out";
  bool volume_norms = true;
  bool trace_norms = true;
  bool multiplier_norms = true;
  bool lambda_tilde = true;
  bool profiles = false;
  /// When false, wall times are reported as 0 so outputs are byte-reproducible.
  bool timing = true;

  void validate() const {
    if (min_level < 1 || min_level > max_level || max_level > 11) {
      throw Error("config: levels must satisfy 1 <= min_level <= max_level <= 11");
    }
    if (!(knot_s0 > 0.0 && knot_s0 < knot_s1)) throw Error("config: knots must satisfy 0 < s0 < s1");
    if (pdas_c <= 0.0) throw Error("config: pdas_c must be positive");
    if (pdas_max_iter < 1) throw Error("config: pdas_max_iter must be positive");
    if (volume_max_depth < 0) throw Error("config: volume_max_depth must be non-negative");
    if (reference_offset < 1) throw Error("config: reference_offset must be at least 1");
    if (!(volume_tolerance > 0.0) || !(boundary_tolerance > 0.0)) throw Error("config: tolerances must be positive");
  }

  [[nodiscard]] ExactSolution solution() const { return ExactSolution(weight, CutoffSpline(knot_s0, knot_s1)); }
  [[nodiscard]] int reference_level() const { return max_level + reference_offset; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw Error("config: '" + key + "' expects a number, got '" + v + "'");
  }
  if (pos != v.size()) throw Error("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    throw Error("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw Error("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config: '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace detail

/// Parses "s0,s1" into the two knots.
inline void apply_knots(StudyConfig& cfg, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error("knots: expected 's0,s1', got '" + text + "'");
  cfg.knot_s0 = detail::parse_double("knots", detail::trim(text.substr(0, comma)));
  cfg.knot_s1 = detail::parse_double("knots", detail::trim(text.substr(comma + 1)));
}

/// Applies one `key = value` setting.
inline void apply_setting(StudyConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "min_level") cfg.min_level = parse_int(key, value);
  else if (key == "max_level") cfg.max_level = parse_int(key, value);
  else if (key == "knots") apply_knots(cfg, value);
  else if (key == "knot_s0") cfg.knot_s0 = parse_double(key, value);
  else if (key == "knot_s1") cfg.knot_s1 = parse_double(key, value);
  else if (key == "weight") cfg.weight = parse_double(key, value);
  else if (key == "pdas_c") cfg.pdas_c = parse_double(key, value);
  else if (key == "pdas_max_iter") cfg.pdas_max_iter = parse_int(key, value);
  else if (key == "pdas_start") {
    if (value == "exact") cfg.pdas_start = InitialActiveSet::ExactContact;
    else if (value == "empty") cfg.pdas_start = InitialActiveSet::Empty;
    else throw Error("config: 'pdas_start' expects 'exact' or 'empty', got '" + value + "'");
  } else if (key == "load_refine_near") cfg.load_refine_near = parse_bool(key, value);
  else if (key == "volume_max_depth") cfg.volume_max_depth = parse_int(key, value);
  else if (key == "volume_near_factor") cfg.volume_near_factor = parse_double(key, value);
  else if (key == "volume_tolerance") cfg.volume_tolerance = parse_double(key, value);
  else if (key == "boundary_tolerance") cfg.boundary_tolerance = parse_double(key, value);
  else if (key == "reference_offset") cfg.reference_offset = parse_int(key, value);
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "volume_norms") cfg.volume_norms = parse_bool(key, value);
  else if (key == "trace_norms") cfg.trace_norms = parse_bool(key, value);
  else if (key == "multiplier_norms") cfg.multiplier_norms = parse_bool(key, value);
  else if (key == "lambda_tilde") cfg.lambda_tilde = parse_bool(key, value);
  else if (key == "profiles") cfg.profiles = parse_bool(key, value);
  else if (key == "timing") cfg.timing = parse_bool(key, value);
  else throw Error("config: unknown key '" + key + "'");
}

/// Flat `key = value` text; '#' starts a comment. Starts from `base`.
inline StudyConfig parse_config(std::istream& in, StudyConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_setting(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline StudyConfig load_config(const std::string& path, StudyConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

/// Averaged rate from err_1 / err_k = (1/2)^{alpha (k - 1)}.
inline double averaged_rate(double err_1, double err_k, int k) {
  if (!(err_1 > 0.0) || !(err_k > 0.0)) throw Error("averaged_rate: errors must be positive");
  if (k < 2) throw Error("averaged_rate: k must be at least 2");
  return std::log2(err_1 / err_k) / (k - 1);
}

/// Names of the error families carried in the reports, in column order.
inline const std::vector<std::string>& norm_names() {
  static const std::vector<std::string> names{
      "L2_omega",  "H1_omega",         "L2_gammaS",         "H1_gammaS",      "Hhalf",
      "L2_lambda", "Hm1_lambda",       "Hmhalf_lambda",     "L2_lambda_tilde", "Hm1_lambda_tilde",
      "Hmhalf_lambda_tilde"};
  return names;
}

inline double report_value(const ErrorReport& r, const std::string& name) {
  if (name == "L2_omega") return r.e_L2_omega;
  if (name == "H1_omega") return r.e_H1_omega;
  if (name == "L2_gammaS") return r.e_L2_gammaS;
  if (name == "H1_gammaS") return r.e_H1_gammaS;
  if (name == "Hhalf") return r.e_Hhalf_gammaS;
  if (name == "L2_lambda") return r.e_L2_lambda;
  if (name == "Hm1_lambda") return r.e_Hminus1_lambda;
  if (name == "Hmhalf_lambda") return r.e_Hminushalf_lambda;
  if (name == "L2_lambda_tilde") return r.e_L2_lambda_tilde;
  if (name == "Hm1_lambda_tilde") return r.e_Hminus1_lambda_tilde;
  if (name == "Hmhalf_lambda_tilde") return r.e_Hminushalf_lambda_tilde;
  throw Error("unknown norm '" + name + "'");
}

struct ConvergenceRecord {
  int level = 0;
  double h = 0.0;
  std::size_t num_multipliers = 0;
  bool ok = true;
  std::string failure;
  ErrorReport errors;
  /// Averaged rates against the first successful level (absent on that level).
  std::map<std::string, double> rates;
  /// Level-to-level log2 ratios; diagnostic only.
  std::map<std::string, double> step_rates;
  double xl_h = std::numeric_limits<double>::quiet_NaN();
  double xr_h = std::numeric_limits<double>::quiet_NaN();
  double xl_dist = std::numeric_limits<double>::quiet_NaN();
  double xr_dist = std::numeric_limits<double>::quiet_NaN();
  double xl_ratio = std::numeric_limits<double>::quiet_NaN();
  double xr_ratio = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double residual = 0.0;
  double seconds = 0.0;

  [[nodiscard]] double rate(const std::string& name) const {
    const auto it = rates.find(name);
    return it == rates.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  }
};

struct BoundaryProfile {
  int level = 0;
  std::vector<double> x, u, u_h, lambda, lambda_hat;
};

struct StudyResult {
  std::vector<ConvergenceRecord> records;
  std::vector<BoundaryProfile> profiles;
};

namespace detail {

inline ErrorReport nan_report(int level) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ErrorReport r;
  r.level = level;
  r.e_L2_omega = r.e_H1_omega = r.e_L2_gammaS = r.e_H1_gammaS = r.e_Hhalf_gammaS = nan;
  r.e_L2_lambda = r.e_Hminus1_lambda = r.e_Hminushalf_lambda = nan;
  r.e_L2_lambda_tilde = r.e_Hminus1_lambda_tilde = r.e_Hminushalf_lambda_tilde = nan;
  return r;
}

/// Fills averaged and step rates for every record.
inline void compute_rates(std::vector<ConvergenceRecord>& records) {
  const ConvergenceRecord* base = nullptr;
  const ConvergenceRecord* prev = nullptr;
  for (auto& rec : records) {
    if (!rec.ok) continue;
    for (const auto& name : norm_names()) {
      const double e = report_value(rec.errors, name);
      if (base) {
        const double e1 = report_value(base->errors, name);
        if (e1 > 0.0 && e > 0.0) rec.rates[name] = averaged_rate(e1, e, rec.level - base->level + 1);
      }
      if (prev) {
        const double ep = report_value(prev->errors, name);
        if (ep > 0.0 && e > 0.0) rec.step_rates[name] = std::log2(ep / e) / (rec.level - prev->level);
      }
    }
    if (!base) base = &rec;
    prev = &rec;
  }
}

}  // namespace detail

/// Runs every level of the study. A level whose solve fails is recorded and
/// the study moves on.
inline StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  const ExactSolution sol = cfg.solution();
  std::optional<DualNormEvaluator> dual;
  if (cfg.multiplier_norms) dual.emplace(cfg.reference_level());

  LoadOptions load_opts;
  load_opts.refine_near = cfg.load_refine_near;
  VolumeQuadrature vq;
  vq.max_depth = cfg.volume_max_depth;
  vq.near_factor = cfg.volume_near_factor;
  vq.tolerance = cfg.volume_tolerance;
  PdasOptions pdas;
  pdas.c = cfg.pdas_c;
  pdas.max_iter = cfg.pdas_max_iter;
  pdas.start = cfg.pdas_start;

  StudyResult out;
  TriMesh mesh = build_level(cfg.min_level);
  for (int k = cfg.min_level; k <= cfg.max_level; ++k) {
    if (k > cfg.min_level) mesh = refine(mesh);
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceRecord rec;
    rec.level = k;
    rec.h = mesh.max_edge_length();
    rec.errors = detail::nan_report(k);
    try {
      const SignoriniSystem sys = build_system(mesh, sol, load_opts);
      rec.num_multipliers = sys.num_multipliers();
      const VISolution vi = solve_vi(sys, pdas);
      rec.iterations = vi.iterations;
      rec.residual = vi.residual;

      const auto tp = discrete_transmission_points(sys, vi);
      rec.xl_h = tp.x_l;
      rec.xr_h = tp.x_r;
      rec.xl_dist = std::abs(ExactSolution::x_l - tp.x_l);
      rec.xr_dist = std::abs(ExactSolution::x_r - tp.x_r);
      rec.xl_ratio = rec.xl_dist / rec.h;
      rec.xr_ratio = rec.xr_dist / rec.h;

      ErrorReport& e = rec.errors;
      if (cfg.volume_norms) {
        const auto ve = volume_errors(mesh, vi.u_h.coeffs, sol, vq);
        e.e_L2_omega = ve.l2;
        e.e_H1_omega = ve.h1_semi;
      }
      if (cfg.trace_norms) {
        const auto te = trace_errors(mesh, sys.tmap, vi.u_h.coeffs, sol, cfg.boundary_tolerance);
        e.e_L2_gammaS = te.l2;
        e.e_H1_gammaS = te.h1;
        e.e_Hhalf_gammaS = te.hhalf;
      }
      const auto xs = trace_coordinates(mesh, sys.tmap);
      const auto lambda_hat = postprocess_lambda_hat(sys.tmap, vi.lambda_h);
      if (cfg.multiplier_norms) {
        e.e_L2_lambda = multiplier_l2_error(xs, lambda_hat, sol, cfg.boundary_tolerance);
        e.e_Hminus1_lambda = dual->lambda_error(xs, lambda_hat, sol);
        e.e_Hminushalf_lambda = geometric_mean(e.e_Hminus1_lambda, e.e_L2_lambda);
        if (cfg.lambda_tilde) {
          const DirichletNeumannMap map(sys);
          const auto lt = lambda_tilde(map, sol, cfg.boundary_tolerance);
          const auto lt_hat = postprocess_lambda_hat(sys.tmap, lt.lambda);
          e.e_L2_lambda_tilde = multiplier_l2_error(xs, lt_hat, sol, cfg.boundary_tolerance);
          e.e_Hminus1_lambda_tilde = dual->lambda_error(xs, lt_hat, sol);
          e.e_Hminushalf_lambda_tilde = geometric_mean(e.e_Hminus1_lambda_tilde, e.e_L2_lambda_tilde);
        }
      }
      if (cfg.profiles) {
        BoundaryProfile p;
        p.level = k;
        p.x = xs;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          p.u.push_back(sol.u(xs[i], 0.0));
          p.u_h.push_back(vi.u_h.coeffs[sys.tmap.signorini_vertices[i]]);
          p.lambda.push_back(sol.lambda(xs[i]));
          p.lambda_hat.push_back(lambda_hat[i]);
        }
        out.profiles.push_back(std::move(p));
      }
    } catch (const std::exception& ex) {
      rec.ok = false;
      rec.failure = ex.what();
    }
    if (cfg.timing) rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.records.push_back(std::move(rec));
  }
  detail::compute_rates(out.records);
  return out;
}

namespace detail {

inline std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

inline nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "level",         "h",
      "e_L2_omega",    "rate_L2_omega",
      "e_L2_gammaS",   "rate_L2_gammaS",
      "e_L2_lambda",   "rate_L2_lambda",
      "e_Hhalf",       "rate_Hhalf",
      "e_Hmhalf_lambda", "rate_Hmhalf_lambda",
      "e_Hmhalf_lambda_tilde", "rate_Hmhalf_lambda_tilde",
      "xl_dist",       "xl_ratio",
      "xr_dist",       "xr_ratio",
      "iters",         "seconds"};
  return cols;
}

inline void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  using detail::fmt;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    const ErrorReport& e = r.errors;
    out << r.level << ',' << fmt(r.h) << ',' << fmt(e.e_L2_omega) << ',' << fmt(r.rate("L2_omega")) << ','
        << fmt(e.e_L2_gammaS) << ',' << fmt(r.rate("L2_gammaS")) << ',' << fmt(e.e_L2_lambda) << ','
        << fmt(r.rate("L2_lambda")) << ',' << fmt(e.e_Hhalf_gammaS) << ',' << fmt(r.rate("Hhalf")) << ','
        << fmt(e.e_Hminushalf_lambda) << ',' << fmt(r.rate("Hmhalf_lambda")) << ','
        << fmt(e.e_Hminushalf_lambda_tilde) << ',' << fmt(r.rate("Hmhalf_lambda_tilde")) << ',' << fmt(r.xl_dist)
        << ',' << fmt(r.xl_ratio) << ',' << fmt(r.xr_dist) << ',' << fmt(r.xr_ratio) << ',' << r.iterations << ','
        << fmt(r.seconds) << '\n';
  }
}

inline nlohmann::json config_json(const StudyConfig& cfg) {
  return {{"min_level", cfg.min_level},
          {"max_level", cfg.max_level},
          {"knot_s0", cfg.knot_s0},
          {"knot_s1", cfg.knot_s1},
          {"weight", cfg.weight},
          {"pdas_c", cfg.pdas_c},
          {"pdas_max_iter", cfg.pdas_max_iter},
          {"pdas_start", cfg.pdas_start == InitialActiveSet::ExactContact ? "exact" : "empty"},
          {"load_refine_near", cfg.load_refine_near},
          {"volume_max_depth", cfg.volume_max_depth},
          {"volume_near_factor", cfg.volume_near_factor},
          {"volume_tolerance", cfg.volume_tolerance},
          {"boundary_tolerance", cfg.boundary_tolerance},
          {"reference_offset", cfg.reference_offset},
          {"reference_level", cfg.reference_level()},
          {"out_dir", cfg.out_dir},
          {"volume_norms", cfg.volume_norms},
          {"trace_norms", cfg.trace_norms},
          {"multiplier_norms", cfg.multiplier_norms},
          {"lambda_tilde", cfg.lambda_tilde},
          {"profiles", cfg.profiles},
          {"timing", cfg.timing}};
}

inline nlohmann::json record_json(const ConvergenceRecord& r) {
  using detail::json_number;
  nlohmann::json errors = nlohmann::json::object();
  nlohmann::json rates = nlohmann::json::object();
  nlohmann::json steps = nlohmann::json::object();
  for (const auto& name : norm_names()) {
    errors[name] = json_number(report_value(r.errors, name));
    rates[name] = json_number(r.rate(name));
    const auto it = r.step_rates.find(name);
    steps[name] = json_number(it == r.step_rates.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
  }
  return {{"level", r.level},
          {"h", r.h},
          {"num_multipliers", r.num_multipliers},
          {"ok", r.ok},
          {"failure", r.failure},
          {"errors", errors},
          {"averaged_rates", rates},
          {"step_rates", steps},
          {"xl_h", json_number(r.xl_h)},
          {"xr_h", json_number(r.xr_h)},
          {"xl_dist", json_number(r.xl_dist)},
          {"xl_ratio", json_number(r.xl_ratio)},
          {"xr_dist", json_number(r.xr_dist)},
          {"xr_ratio", json_number(r.xr_ratio)},
          {"iters", r.iterations},
          {"residual", r.residual},
          {"seconds", r.seconds}};
}

inline nlohmann::json study_json(const std::vector<ConvergenceRecord>& records, const StudyConfig& cfg) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(record_json(r));
  return {{"config", config_json(cfg)},
          {"tolerances",
           {{"volume_absolute", cfg.volume_tolerance},
            {"volume_max_depth", cfg.volume_max_depth},
            {"boundary_absolute", cfg.boundary_tolerance},
            {"dual_norm_reference_level", cfg.reference_level()}}},
          {"records", recs}};
}

/// Reads a record back from its JSON form.
inline ConvergenceRecord record_from_json(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  ConvergenceRecord r;
  r.level = j.at("level").get<int>();
  r.h = j.at("h").get<double>();
  r.num_multipliers = j.at("num_multipliers").get<std::size_t>();
  r.ok = j.at("ok").get<bool>();
  r.failure = j.at("failure").get<std::string>();
  const auto& e = j.at("errors");
  r.errors.level = r.level;
  r.errors.e_L2_omega = num(e.at("L2_omega"));
  r.errors.e_H1_omega = num(e.at("H1_omega"));
  r.errors.e_L2_gammaS = num(e.at("L2_gammaS"));
  r.errors.e_H1_gammaS = num(e.at("H1_gammaS"));
  r.errors.e_Hhalf_gammaS = num(e.at("Hhalf"));
  r.errors.e_L2_lambda = num(e.at("L2_lambda"));
  r.errors.e_Hminus1_lambda = num(e.at("Hm1_lambda"));
  r.errors.e_Hminushalf_lambda = num(e.at("Hmhalf_lambda"));
  r.errors.e_L2_lambda_tilde = num(e.at("L2_lambda_tilde"));
  r.errors.e_Hminus1_lambda_tilde = num(e.at("Hm1_lambda_tilde"));
  r.errors.e_Hminushalf_lambda_tilde = num(e.at("Hmhalf_lambda_tilde"));
  for (const auto& [name, v] : j.at("averaged_rates").items()) {
    if (!v.is_null()) r.rates[name] = v.get<double>();
  }
  for (const auto& [name, v] : j.at("step_rates").items()) {
    if (!v.is_null()) r.step_rates[name] = v.get<double>();
  }
  r.xl_h = num(j.at("xl_h"));
  r.xr_h = num(j.at("xr_h"));
  r.xl_dist = num(j.at("xl_dist"));
  r.xl_ratio = num(j.at("xl_ratio"));
  r.xr_dist = num(j.at("xr_dist"));
  r.xr_ratio = num(j.at("xr_ratio"));
  r.iterations = j.at("iters").get<int>();
  r.residual = j.at("residual").get<double>();
  r.seconds = j.at("seconds").get<double>();
  return r;
}

inline void write_profile(std::ostream& out, const BoundaryProfile& p) {
  using detail::fmt;
  out << "x,u,u_h,lambda,lambda_hat\n";
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    out << fmt(p.x[i]) << ',' << fmt(p.u[i]) << ',' << fmt(p.u_h[i]) << ',' << fmt(p.lambda[i]) << ','
        << fmt(p.lambda_hat[i]) << '\n';
  }
}

/// Writes convergence.csv, convergence.json and, if present, one
/// profile_level_<k>.csv per level into cfg.out_dir.
inline std::vector<std::filesystem::path> emit_reports(const StudyResult& result, const StudyConfig& cfg) {
  if (result.records.empty()) throw Error("emit_reports: no records");
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());

  std::vector<fs::path> written;
  {
    auto out = detail::open_output(dir / "convergence.csv");
    write_csv(out, result.records);
    written.push_back(dir / "convergence.csv");
  }
  {
    auto out = detail::open_output(dir / "convergence.json");
    out << study_json(result.records, cfg).dump(2) << '\n';
    written.push_back(dir / "convergence.json");
  }
  for (const auto& p : result.profiles) {
    const fs::path path = dir / ("profile_level_" + std::to_string(p.level) + ".csv");
    auto out = detail::open_output(path);
    write_profile(out, p);
    written.push_back(path);
  }
  return written;
}

/// Human-readable error/rate table and transmission-point table.
inline void print_tables(std::ostream& os, const std::vector<ConvergenceRecord>& records) {
  auto cell = [](double v, const char* f) {
    if (!std::isfinite(v)) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, f, v);
    return std::string(buf);
  };
  char line[256];
  os << "Errors and averaged rates\n";
  std::snprintf(line, sizeof line, "%3s %10s %11s %5s %11s %5s %11s %5s %11s %5s %11s %5s %11s %5s\n", "k", "h",
                "L2(Om)", "a", "L2(GS)", "a", "L2(lam)", "a", "H1/2", "a", "H-1/2 lam", "a", "H-1/2 lt", "a");
  os << line;
  for (const auto& r : records) {
    if (!r.ok) {
      std::snprintf(line, sizeof line, "%3d failed: ", r.level);
      os << line << r.failure << '\n';
      continue;
    }
    const ErrorReport& e = r.errors;
    std::snprintf(line, sizeof line, "%3d %10.4e %11s %5s %11s %5s %11s %5s %11s %5s %11s %5s %11s %5s\n", r.level,
                  r.h, cell(e.e_L2_omega, "%.4e").c_str(), cell(r.rate("L2_omega"), "%.2f").c_str(),
                  cell(e.e_L2_gammaS, "%.4e").c_str(), cell(r.rate("L2_gammaS"), "%.2f").c_str(),
                  cell(e.e_L2_lambda, "%.4e").c_str(), cell(r.rate("L2_lambda"), "%.2f").c_str(),
                  cell(e.e_Hhalf_gammaS, "%.4e").c_str(), cell(r.rate("Hhalf"), "%.2f").c_str(),
                  cell(e.e_Hminushalf_lambda, "%.4e").c_str(), cell(r.rate("Hmhalf_lambda"), "%.2f").c_str(),
                  cell(e.e_Hminushalf_lambda_tilde, "%.4e").c_str(),
                  cell(r.rate("Hmhalf_lambda_tilde"), "%.2f").c_str());
    os << line;
  }
  os << "\nTransmission points\n";
  std::snprintf(line, sizeof line, "%3s %11s %6s %11s %6s %6s %8s\n", "k", "|xl-xlh|", "/h", "|xr-xrh|", "/h",
                "iters", "seconds");
  os << line;
  for (const auto& r : records) {
    if (!r.ok) continue;
    std::snprintf(line, sizeof line, "%3d %11.4e %6.2f %11.4e %6.2f %6d %8.2f\n", r.level, r.xl_dist, r.xl_ratio,
                  r.xr_dist, r.xr_ratio, r.iterations, r.seconds);
    os << line;
  }
}

}  // namespace signorini
