#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sspc/errors.hpp"
#include "sspc/fit.hpp"
#include "sspc/hamiltonian.hpp"
#include "sspc/hjb.hpp"
#include "sspc/io.hpp"
#include "sspc/json_io.hpp"
#include "sspc/operators.hpp"
#include "sspc/parallel.hpp"
#include "sspc/quasimode.hpp"
#include "sspc/schema.hpp"
#include "sspc/special.hpp"
#include "sspc/spectral.hpp"
#include "sspc/symbol.hpp"

#ifndef SSPC_VERSION
#define SSPC_VERSION "0.1.0"
#endif

namespace sspc {

using io::ordered_json;

/// Invalid configuration; `pointer` is the JSON pointer of the offending value.
class ConfigError : public ArgumentError {
 public:
  ConfigError(const std::string& pointer, const std::string& what)
      : ArgumentError((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

namespace detail {

inline std::string pointer_escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

inline bool schema_type_matches(const std::string& type, const ordered_json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && std::floor(d) == d;
  }
  return false;
}

inline bool json_equal(const nlohmann::json& a, const ordered_json& b) { return a == nlohmann::json::parse(b.dump()); }

/// Validator for the subset of JSON Schema used by the experiment schema. Returns the first issue.
class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json root) : root_(std::move(root)) {}

  std::optional<std::pair<std::string, std::string>> check(const ordered_json& v) const { return check(root_, v, ""); }

 private:
  using Issue = std::optional<std::pair<std::string, std::string>>;

  const nlohmann::json& resolve(const nlohmann::json& s) const {
    if (!s.contains("$ref")) return s;
    const std::string ref = s["$ref"].get<std::string>();
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw Error("schema: unsupported $ref " + ref);
    return root_["$defs"].at(ref.substr(prefix.size()));
  }

  Issue check(const nlohmann::json& schema_in, const ordered_json& v, const std::string& ptr) const {
    const auto& s = resolve(schema_in);
    if (s.contains("type") && !schema_type_matches(s["type"].get<std::string>(), v))
      return Issue({ptr, "expected " + s["type"].get<std::string>()});
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || json_equal(e, v);
      if (!found) return Issue({ptr, "value not in " + s["enum"].dump()});
    }
    if (s.contains("const") && !json_equal(s["const"], v)) return Issue({ptr, "expected " + s["const"].dump()});
    if (v.is_number()) {
      const double d = v.get<double>();
      if (!std::isfinite(d)) return Issue({ptr, "number must be finite"});
      if (s.contains("minimum") && d < s["minimum"].get<double>())
        return Issue({ptr, "must be >= " + s["minimum"].dump()});
      if (s.contains("maximum") && d > s["maximum"].get<double>())
        return Issue({ptr, "must be <= " + s["maximum"].dump()});
      if (s.contains("exclusiveMinimum") && !(d > s["exclusiveMinimum"].get<double>()))
        return Issue({ptr, "must be > " + s["exclusiveMinimum"].dump()});
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& r : s["required"]) {
          const auto key = r.get<std::string>();
          if (!v.contains(key)) return Issue({ptr + "/" + pointer_escape(key), "required key is missing"});
        }
      const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
      for (auto it = v.begin(); it != v.end(); ++it) {
        const std::string child = ptr + "/" + pointer_escape(it.key());
        if (s.contains("properties") && s["properties"].contains(it.key())) {
          if (auto issue = check(s["properties"][it.key()], it.value(), child)) return issue;
        } else if (closed) {
          return Issue({child, "unknown key"});
        }
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
        return Issue({ptr, "needs at least " + s["minItems"].dump() + " items"});
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
        return Issue({ptr, "allows at most " + s["maxItems"].dump() + " items"});
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i)
          if (auto issue = check(s["items"], v[i], ptr + "/" + std::to_string(i))) return issue;
    }
    if (s.contains("allOf"))
      for (const auto& sub : s["allOf"]) {
        if (sub.contains("if")) {
          if (!check(sub["if"], v, ptr) && sub.contains("then"))
            if (auto issue = check(sub["then"], v, ptr)) return issue;
        } else if (auto issue = check(sub, v, ptr)) {
          return issue;
        }
      }
    return std::nullopt;
  }

  nlohmann::json root_;
};

inline const SchemaValidator& experiment_validator() {
  static const SchemaValidator v(nlohmann::json::parse(kExperimentSchema));
  return v;
}

/// Shortest %g text that reads back to the same double; used in file names.
inline std::string short_tag(double v) {
  char buf[40];
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline complex complex_of(const ordered_json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline ordered_json complex_json(complex z) { return ordered_json::array({z.real(), z.imag()}); }

inline ordered_json fit_json(const ScalingFit& f) {
  ordered_json j;
  j["exponent"] = f.exponent;
  j["constant"] = f.constant;
  j["r_squared"] = f.r_squared;
  j["window"] = ordered_json::array({f.window[0], f.window[1]});
  return j;
}

inline double number_or(const ordered_json& obj, const char* key, double fallback) {
  return obj.contains(key) ? obj[key].get<double>() : fallback;
}

inline int int_or(const ordered_json& obj, const char* key, int fallback) {
  return obj.contains(key) ? obj[key].get<int>() : fallback;
}

}  // namespace detail

/// Schema validation; throws ConfigError with the JSON pointer of the first violation.
inline void validate_config(const ordered_json& config) {
  if (auto issue = detail::experiment_validator().check(config)) throw ConfigError(issue->first, issue->second);
}

inline ordered_json parse_config(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  validate_config(j);
  return j;
}

inline ordered_json load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

struct RunOptions {
  std::optional<std::filesystem::path> out;  // --out; beats SSPC_OUT and the config's "output"
  std::optional<unsigned> workers;           // --workers; beats the config's "workers"
};

struct RunReport {
  ordered_json report;
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::vector<std::string> violations;
  double wall_seconds = 0.0;  // printed by the tool, never written to artifacts

  /// 0 on success, 2 when an assumption or certified bound was violated.
  int exit_code() const { return violations.empty() ? 0 : 2; }
};

inline std::filesystem::path resolve_output_dir(const ordered_json& config, const RunOptions& opts) {
  if (opts.out) return *opts.out;
  if (const char* env = std::getenv("SSPC_OUT"); env && *env) return env;
  if (config.contains("output")) return config["output"].get<std::string>();
  return "sspc_out";
}

/// Anchor of the statement each experiment kind targets.
inline std::string experiment_anchor(const std::string& kind, const std::string& model) {
  if (kind == "pseudospectrum") return "in.10";
  if (kind == "semigroup") return "in.15";
  if (kind == "critical-radius") return model == "nsa-harmonic" ? "ex.3" : "in.14";
  if (kind == "hjb") return "ev.15";
  if (kind == "special") return "re.11";
  if (kind == "quasimode") return "in.18";
  if (kind == "brackets") return "ev.13";
  return "";
}

namespace detail {

struct RunContext {
  ordered_json config;
  std::filesystem::path out;
  unsigned workers = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::vector<std::string> violations;

  std::filesystem::path file(const std::string& name) {
    files.push_back(name);
    return out / name;
  }
};

inline Symbol config_symbol(const ordered_json& m) {
  SymbolParams p;
  p.amplitude = number_or(m, "amplitude", 1.0);
  p.quartic = number_or(m, "quartic", 0.0);
  if (m.contains("rotate_about")) p.rotate_about = complex_of(m["rotate_about"]);
  return make_symbol(m["id"].get<std::string>(), p);
}

inline bool is_hermite(const ordered_json& config) { return config["model"]["id"] == "nsa-harmonic"; }

inline std::vector<double> h_list(const ordered_json& config) {
  if (config.contains("h")) return config["h"].get<std::vector<double>>();
  if (is_hermite(config)) return {1.0};
  throw ConfigError("/h", "an h list is required for this model");
}

inline int basis_size(const ordered_json& config, int fourier_default) {
  return int_or(config, "N", is_hermite(config) ? 200 : fourier_default);
}

inline ordered_json run_pseudospectrum(RunContext& ctx) {
  const auto& c = ctx.config["pseudospectrum"];
  const auto sym = config_symbol(ctx.config["model"]);
  const ZLattice lat{c["re"][0].get<double>(), c["re"][1].get<double>(), c["im"][0].get<double>(),
                     c["im"][1].get<double>(), c["nx"].get<int>(),  c["ny"].get<int>()};
  const bool with_spectrum = c.contains("spectrum") && c["spectrum"].get<bool>();
  ordered_json rows = ordered_json::array();
  for (double h : h_list(ctx.config)) {
    const auto op = build_from_symbol(sym, h, basis_size(ctx.config, 128));
    const auto map = pseudospectrum_map(op, lat, ctx.workers);
    const std::string tag = short_tag(h);
    write_pseudospectrum_csv(ctx.file("pseudospectrum_h" + tag + ".csv"), map);
    ordered_json r;
    r["h"] = h;
    r["N"] = op.size();
    r["min_log10_norm"] = *std::min_element(map.log10_norm.begin(), map.log10_norm.end());
    r["max_log10_norm"] = *std::max_element(map.log10_norm.begin(), map.log10_norm.end());
    r["singular_nodes"] = std::count(map.singular.begin(), map.singular.end(), true);
    r["numerical_range_left_edge"] = numerical_range_left_edge(op);
    r["accretivity_probe"] = accretivity_probe(op, 64, ctx.seed);
    if (with_spectrum) {
      const auto sp = spectrum(op);
      write_spectrum_csv(ctx.file("spectrum_h" + tag + ".csv"), sp.eigenvalues);
      r["spectrum_residual"] = sp.residual;
    }
    rows.push_back(r);
  }
  ordered_json out;
  out["runs"] = rows;
  return out;
}

inline std::vector<double> uniform_grid(double start, double stop, double step) {
  std::vector<double> g;
  const long n = std::lround(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(start + static_cast<double>(i) * step);
  return g;
}

inline ordered_json run_semigroup(RunContext& ctx) {
  const auto& c = ctx.config["semigroup"];
  const auto sym = config_symbol(ctx.config["model"]);
  const auto ts = uniform_grid(0.0, c["t_stop"].get<double>(), c["t_step"].get<double>());
  if (ts.size() < 2) throw ConfigError("/semigroup/t_step", "step exceeds t_stop");
  std::array<double, 2> window = {0.2, 0.8};
  if (c.contains("fit_window")) window = {c["fit_window"][0].get<double>(), c["fit_window"][1].get<double>()};
  ordered_json rows = ordered_json::array(), fits = ordered_json::array();
  for (double h : h_list(ctx.config)) {
    const auto op = build_from_symbol(sym, h, basis_size(ctx.config, 128));
    const auto tr = semigroup_trace(op, ts);
    for (const auto& w : tr.warnings) ctx.warnings.push_back("h=" + short_tag(h) + ": " + w);
    write_semigroup_csv(ctx.file("trace_h" + short_tag(h) + ".csv"), tr);
    ordered_json r;
    r["h"] = h;
    r["max_norm"] = *std::max_element(tr.norms.begin() + 1, tr.norms.end());
    r["contraction"] = r["max_norm"].get<double>() <= 1.0 + 1e-8;
    // ||U(t)|| >= exp(-t alpha/h) for the smallest Re alpha in the spectrum, so -h ln||U|| <= alpha t
    const Eigen::ComplexEigenSolver<Matrix> es(op.matrix, false);
    const double alpha = es.eigenvalues().real().minCoeff();
    r["spectral_abscissa"] = alpha;
    for (std::size_t i = 1; i < ts.size(); ++i) {
      if (ts[i] > window[1] + 1e-12) break;
      const double y = -h * std::log(tr.norms[i]);
      if (ts[i] >= window[0] - 1e-12 && alpha > 0.0 && y >= 0.75 * alpha * ts[i]) {
        ctx.warnings.push_back("h=" + short_tag(h) + ": -h ln||U|| reaches " + io::fmt(y / (alpha * ts[i])) +
                               " of the spectral bound alpha t (alpha = " + io::fmt(alpha) + ") at t = " + io::fmt(ts[i]) +
                               "; the fit sees the truncated spectrum, not the t^(k+1) law");
        break;
      }
    }
    ordered_json f;
    f["h"] = h;
    try {
      const auto fit = semigroup_decay_fit(tr, window);
      r["fit"] = fit_json(fit);
      f["fit"] = fit_json(fit);
    } catch (const ArgumentError& e) {
      ctx.warnings.push_back("h=" + short_tag(h) + ": " + e.what());
      r["fit"] = nullptr;
      f["fit"] = nullptr;
    }
    rows.push_back(r);
    fits.push_back(f);
  }
  ordered_json fit_doc;
  fit_doc["anchor"] = "in.15";
  fit_doc["quantity"] = "-h ln ||exp(-tA/h)|| ~ c t^e";
  fit_doc["fits"] = fits;
  io::write_json(ctx.file("fit.json"), fit_doc);
  ordered_json out;
  out["t"] = ts;
  out["runs"] = rows;
  return out;
}

inline ThresholdRule threshold_rule(const ordered_json& t) {
  const auto rule = t["rule"].get<std::string>();
  if (rule == "polynomial") return ThresholdRule::polynomial(number_or(t, "a", 2.0));
  if (rule == "boundary-multiple") return ThresholdRule::boundary_multiple(number_or(t, "K", 10.0), int_or(t, "k", 2));
  if (rule == "exp-quarter") return ThresholdRule::exp_quarter();
  if (!t.contains("value")) throw ConfigError("/critical_radius/threshold/value", "the fixed rule needs a value");
  return ThresholdRule::fixed(t["value"].get<double>());
}

inline ordered_json run_critical_radius(RunContext& ctx) {
  const auto& c = ctx.config["critical_radius"];
  const auto sym = config_symbol(ctx.config["model"]);
  const complex z0 = complex_of(c["z0"]), dir = complex_of(c["direction"]);
  const auto rule = threshold_rule(c["threshold"]);
  CriticalRadiusOptions opt;
  opt.hi = number_or(c, "hi", opt.hi);
  opt.scan = int_or(c, "scan", opt.scan);
  opt.rel_tol = number_or(c, "rel_tol", opt.rel_tol);
  const bool hermite = is_hermite(ctx.config);
  std::vector<double> xs, ys;
  ordered_json rows = ordered_json::array();
  if (hermite) {
    // Q = -d^2 + i y^2 is P/h at h = 1/lambda: z and radii scale by lambda, resolvents by h
    if (!ctx.config.contains("lambda")) throw ConfigError("/lambda", "the oscillator sweep needs a lambda list");
    const auto op = build_hermite_oscillator(basis_size(ctx.config, 400));
    io::CsvWriter csv(ctx.file("critical_radius.csv"), {"lambda", "mu", "crossed", "threshold", "norm_at_start"});
    for (double lambda : ctx.config["lambda"].get<std::vector<double>>()) {
      CriticalRadiusOptions o = opt;
      o.hi = opt.hi * lambda;
      const double h = 1.0 / lambda;
      const auto cr = critical_radius(op, z0 * lambda, dir, rule.value(h) * h, o);
      csv.row({lambda, cr.delta, cr.crossed ? 1.0 : 0.0, cr.threshold, cr.norm_at_start});
      ordered_json r;
      r["lambda"] = lambda;
      r["mu"] = cr.delta;
      r["crossed"] = cr.crossed;
      r["threshold"] = cr.threshold;
      r["evaluations"] = cr.evaluations;
      rows.push_back(r);
      if (cr.crossed && cr.delta > 0.0) xs.push_back(lambda), ys.push_back(cr.delta);
    }
    csv.close();
  } else {
    io::CsvWriter csv(ctx.file("critical_radius.csv"), {"h", "h_log", "delta", "crossed", "threshold", "norm_at_start"});
    for (double h : h_list(ctx.config)) {
      const auto op = build_from_symbol(sym, h, basis_size(ctx.config, 128));
      const auto cr = critical_radius(op, z0, dir, rule, opt);
      const double hl = h * std::log(1.0 / h);
      csv.row({h, hl, cr.delta, cr.crossed ? 1.0 : 0.0, cr.threshold, cr.norm_at_start});
      ordered_json r;
      r["h"] = h;
      r["delta"] = cr.delta;
      r["crossed"] = cr.crossed;
      r["threshold"] = cr.threshold;
      r["evaluations"] = cr.evaluations;
      rows.push_back(r);
      if (cr.crossed && cr.delta > 0.0) xs.push_back(hl), ys.push_back(cr.delta);
    }
    csv.close();
  }
  ordered_json out;
  out["runs"] = rows;
  out["fit_abscissa"] = hermite ? "lambda" : "h ln(1/h)";
  if (xs.size() >= 4) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const auto fit = fit_power_law(xs, ys, {*lo, *hi});
    out["fit"] = fit_json(fit);
    ordered_json doc;
    doc["anchor"] = hermite ? "ex.3" : "in.14";
    doc["abscissa"] = out["fit_abscissa"];
    doc["fit"] = fit_json(fit);
    io::write_json(ctx.file("fit.json"), doc);
  } else {
    out["fit"] = nullptr;
    ctx.warnings.push_back("fewer than 4 crossed radii; no scaling fit");
  }
  return out;
}

inline ordered_json run_hjb(RunContext& ctx) {
  const auto& c = ctx.config["hjb"];
  const auto sym = config_symbol(ctx.config["model"]);
  if (sym.dim() != 1) throw UnsupportedModel("hjb: the lattice solver is one-dimensional");
  const auto L = PhaseLattice::make(c["x"][0].get<double>(), c["x"][1].get<double>(), c["nx"].get<int>(),
                                    c["xi"][0].get<double>(), c["xi"][1].get<double>(), c["nxi"].get<int>(),
                                    sym.periodic(0));
  const double t_end = c["t_end"].get<double>();
  EvolveOptions eo;
  eo.workers = ctx.workers;
  const auto fields = evolve_G(sym, L, t_end, number_or(c, "dt", 0.0), eo);
  const int every = int_or(c, "csv_every", std::max(1, static_cast<int>(fields.size() / 10)));
  write_weight_csv(ctx.file("weight.csv"), L, fields, every);
  const PhasePoint start(c["orbit_start"][0].get<double>(), c["orbit_start"][1].get<double>());
  const int k = int_or(c, "k", 2);
  const auto orbit = flow(sym, Part::Imag, start, t_end, int_or(c, "orbit_steps", 100));

  io::CsvWriter csv(ctx.file("oracle.csv"), {"t", "x", "xi", "G_lattice", "G_characteristic"});
  double worst_low = 1e300, worst_high = 0.0;
  for (const auto& f : fields) {
    if (f.t == 0.0) continue;
    const auto end = flow(sym, Part::Imag, start, f.t, 50).back();
    if (!L.contains(end)) continue;
    const double g = interpolate(L, f, end), oracle = G_characteristic(sym, start, f.t);
    csv.row({f.t, end.x[0], end.xi[0], g, oracle});
    if (f.t >= 0.1 && oracle < 0.0) {
      worst_low = std::min(worst_low, g / oracle);
      worst_high = std::max(worst_high, g / oracle);
    }
  }
  csv.close();

  std::array<double, 2> window = {0.05, std::min(0.5, t_end)};
  if (c.contains("fit_window")) window = {c["fit_window"][0].get<double>(), c["fit_window"][1].get<double>()};
  const auto cert = certify_decay(L, fields, k, orbit, window);
  ordered_json cj;
  cj["anchor"] = "ev.15";
  cj["k"] = k;
  cj["fit"] = fit_json(cert.fit);
  cj["C"] = cert.C;
  cj["consistent"] = cert.consistent;
  io::write_json(ctx.file("certificate.json"), cj);
  if (!cert.consistent)
    ctx.violations.push_back("ev.15: decay exponent " + io::fmt(cert.fit.exponent) + " is not within 10% of k+1 = " +
                             std::to_string(k + 1));

  double gmax = -1e300;
  for (const auto& f : fields) gmax = std::max(gmax, *std::max_element(f.values.begin(), f.values.end()));
  ordered_json out;
  out["steps"] = fields.size() - 1;
  out["dt"] = fields.size() > 1 ? fields[1].t : 0.0;
  out["max_G"] = gmax;
  out["certificate"] = cj;
  if (worst_high > 0.0) out["oracle_ratio"] = ordered_json::array({worst_low, worst_high});
  else out["oracle_ratio"] = nullptr;
  return out;
}

inline ordered_json run_special(RunContext& ctx) {
  const auto& c = ctx.config["special"];
  const auto s = uniform_grid(c["s_start"].get<double>(), c["s_stop"].get<double>(), c["s_step"].get<double>());
  const double budget = number_or(c, "budget", 10.0), laplace_s = number_or(c, "laplace_s", 10.0);
  ordered_json rows = ordered_json::array();
  for (int k : c["k"].get<std::vector<int>>()) {
    const auto rep = check_re2_bounds(k, s, budget);
    write_re2_csv(ctx.file("re2_k" + std::to_string(k) + ".csv"), rep);
    ordered_json r;
    r["k"] = k;
    ordered_json regimes = ordered_json::array();
    for (const auto& g : rep.regimes) {
      ordered_json gj;
      gj["regime"] = regime_name(g.regime);
      gj["anchor"] = regime_anchor(g.regime);
      gj["samples"] = g.s.size();
      gj["constant"] = g.constant;
      gj["within_budget"] = g.within_budget;
      regimes.push_back(gj);
    }
    r["regimes"] = regimes;
    ordered_json lp;
    lp["s"] = laplace_s;
    lp["ratio"] = std::exp(log_I_of_s(k, laplace_s) - std::log(laplace_prediction(k, laplace_s)));
    r["laplace"] = lp;
    r["I0"] = I_of_s(k, 0.0);
    r["gamma"] = std::tgamma((k + 2.0) / (k + 1.0));
    r["violations"] = rep.violations;
    for (const auto& v : rep.violations) ctx.violations.push_back("k=" + std::to_string(k) + ": " + v);
    rows.push_back(r);
  }
  ordered_json out;
  out["budget"] = budget;
  out["s_samples"] = s.size();
  out["runs"] = rows;
  return out;
}

inline ordered_json run_quasimode(RunContext& ctx) {
  const auto& c = ctx.config["quasimode"];
  const auto sym = config_symbol(ctx.config["model"]);
  const PhasePoint center(c["center"][0].get<double>(), c["center"][1].get<double>());
  std::vector<double> hs, res;
  ordered_json rows = ordered_json::array();
  io::CsvWriter csv(ctx.file("quasimode.csv"), {"h", "residual", "resolvent_norm", "product"});
  for (double h : h_list(ctx.config)) {
    const auto beam = make_beam(sym, center, h, int_or(c, "grid", 0));
    const auto op = build_from_symbol(sym, h, basis_size(ctx.config, 256));
    const double r = residual(op, beam, beam.p_center);
    const auto rn = resolvent_norm(op, beam.p_center);
    write_beam_csv(ctx.file("beam_h" + short_tag(h) + ".csv"), beam);
    csv.row({h, r, rn.value, r * rn.value});
    ordered_json row;
    row["h"] = h;
    row["A"] = complex_json(beam.A);
    row["z"] = complex_json(beam.p_center);
    row["residual"] = r;
    row["resolvent_norm"] = rn.value;
    row["resolvent_singular"] = rn.singular;
    row["second_moment"] = beam_second_moment(beam);
    rows.push_back(row);
    if (r * rn.value < 1.0 - 1e-8)
      ctx.violations.push_back("h=" + short_tag(h) + ": residual * resolvent norm = " + io::fmt(r * rn.value) + " < 1");
    hs.push_back(h), res.push_back(r);
  }
  csv.close();
  ordered_json out;
  out["runs"] = rows;
  if (hs.size() >= 4) {
    const auto [lo, hi] = std::minmax_element(hs.begin(), hs.end());
    const auto fit = fit_power_law(hs, res, {*lo, *hi});
    out["fit"] = fit_json(fit);
    ordered_json doc;
    doc["anchor"] = "in.18";
    doc["quantity"] = "||(A - p(rho)) u_h|| ~ c h^e";
    doc["fit"] = fit_json(fit);
    io::write_json(ctx.file("fit.json"), doc);
  } else {
    out["fit"] = nullptr;
  }
  return out;
}

inline ordered_json run_brackets(RunContext& ctx) {
  const auto& c = ctx.config["brackets"];
  const auto sym = config_symbol(ctx.config["model"]);
  const std::size_t n = sym.dim();
  ordered_json rows = ordered_json::array();
  io::CsvWriter csv(ctx.file("brackets.csv"), {"index", "order_k", "coefficient", "bracket_self", "rotation_angle"});
  std::size_t idx = 0;
  for (const auto& pj : c["points"]) {
    const auto v = pj.get<std::vector<double>>();
    if (v.size() != 2 * n)
      throw ConfigError("/brackets/points/" + std::to_string(idx), "expected " + std::to_string(2 * n) + " coordinates");
    const PhasePoint rho(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)),
                         std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n), v.end()));
    ordered_json r;
    r["point"] = v;
    try {
      const auto cls = bracket_order(sym, rho, int_or(c, "j_max", 8));
      const double bs = poisson_bracket_self(sym, rho), angle = rotation_angle(sym, sym.eval(rho), rho);
      csv.row({static_cast<double>(idx), static_cast<double>(cls.order_k), cls.coefficient, bs, angle});
      r["order_k"] = cls.order_k;
      r["coefficient"] = cls.coefficient;
      r["bracket_self"] = bs;
      r["rotation_angle"] = angle;
    } catch (const AssumptionViolation& e) {
      r["violation"] = e.what();
      ctx.violations.push_back("point " + std::to_string(idx) + " (" + e.anchor() + "): " + e.what());
    }
    rows.push_back(r);
    ++idx;
  }
  csv.close();
  ordered_json out;
  out["points"] = rows;
  return out;
}

}  // namespace detail

/// Executes a validated configuration and writes its artifacts plus report.json.
inline RunReport run_experiment(const ordered_json& config, const RunOptions& opts = {}) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  detail::RunContext ctx;
  ctx.config = config;
  ctx.out = resolve_output_dir(config, opts);
  ctx.seed = config.contains("seed") ? config["seed"].get<std::uint64_t>() : 1;
  const unsigned cw = config.contains("workers") ? config["workers"].get<unsigned>() : 0;
  ctx.workers = opts.workers ? *opts.workers : cw;
  if (ctx.workers == 0) ctx.workers = default_workers();
  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec) throw Error("cannot create output directory '" + ctx.out.string() + "': " + ec.message());

  const std::string kind = config["kind"].get<std::string>();
  const std::string model = config.contains("model") ? config["model"]["id"].get<std::string>() : "";
  ordered_json results;
  try {
    if (kind == "pseudospectrum") results = detail::run_pseudospectrum(ctx);
    else if (kind == "semigroup") results = detail::run_semigroup(ctx);
    else if (kind == "critical-radius") results = detail::run_critical_radius(ctx);
    else if (kind == "hjb") results = detail::run_hjb(ctx);
    else if (kind == "special") results = detail::run_special(ctx);
    else if (kind == "quasimode") results = detail::run_quasimode(ctx);
    else results = detail::run_brackets(ctx);
  } catch (const AssumptionViolation& e) {
    ctx.violations.push_back(e.anchor() + ": " + e.what());
    results = nullptr;
  }

  RunReport rep;
  std::vector<std::string> files = ctx.files;
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  ordered_json r;
  r["tool"] = "sspc";
  r["version"] = SSPC_VERSION;
  r["kind"] = kind;
  r["anchor"] = experiment_anchor(kind, model);
  r["status"] = ctx.violations.empty() ? "ok" : "assumption-violation";
  r["config"] = config;
  r["results"] = results;
  r["files"] = files;
  r["warnings"] = ctx.warnings;
  r["violations"] = ctx.violations;
  io::write_json(ctx.out / "report.json", r);
  files.push_back("report.json");
  std::sort(files.begin(), files.end());

  rep.report = std::move(r);
  rep.out_dir = ctx.out;
  rep.files = std::move(files);
  rep.warnings = std::move(ctx.warnings);
  rep.violations = std::move(ctx.violations);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sspc
