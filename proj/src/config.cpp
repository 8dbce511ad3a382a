#include "toralmass/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace toral {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ValidationError("config: " + msg); }

double real_from(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      fail(where + ": '" + s + "' is not a decimal real");
    return v;
  }
  fail(where + ": expected a number or decimal string");
}

i64 int_from(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<i64>();
  if (j.is_number_unsigned()) return static_cast<i64>(j.get<u64>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') fail(where + ": '" + s + "' is not an integer");
    return v;
  }
  fail(where + ": expected an integer");
}

u64 uint_from(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<u64>();
  if (j.is_number_integer()) {
    const i64 v = j.get<i64>();
    if (v < 0) fail(where + ": must be nonnegative");
    return static_cast<u64>(v);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') fail(where + ": '" + s + "' is not an integer");
    return v;
  }
  fail(where + ": expected a 64-bit unsigned integer");
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(where + ": unknown key '" + item.key() + "'");
  }
}

CoefficientSpec parse_coefficients(const json& j) {
  if (!j.is_object()) fail("coefficients: expected an object");
  if (!j.contains("type")) fail("coefficients: missing 'type'");
  CoefficientSpec spec;
  spec.type = j.at("type").get<std::string>();
  if (spec.type == "bourgain") {
    check_keys(j, "coefficients", {"type", "seed"});
    if (!j.contains("seed")) fail("coefficients: bourgain needs 'seed' (or \"all_plus\")");
    const json& s = j.at("seed");
    if (s.is_string()) {
      if (s.get<std::string>() != "all_plus")
        fail("coefficients: seed must be an integer or \"all_plus\"");
      spec.all_plus = true;
    } else {
      spec.seed = uint_from(s, "coefficients.seed");
    }
  } else if (spec.type == "arc") {
    check_keys(j, "coefficients", {"type", "t"});
    if (!j.contains("t")) fail("coefficients: arc needs 't' as \"p/q\"");
    const json& t = j.at("t");
    if (!t.is_string()) fail("coefficients: arc 't' must be a rational string \"p/q\"");
    const std::string s = t.get<std::string>();
    const auto slash = s.find('/');
    std::size_t used1 = 0, used2 = 0;
    try {
      if (slash == std::string::npos) {
        spec.arc_num = std::stoll(s, &used1);
        spec.arc_den = 1;
        used2 = 0;
        if (used1 != s.size()) throw std::invalid_argument(s);
      } else {
        spec.arc_num = std::stoll(s.substr(0, slash), &used1);
        const std::string den = s.substr(slash + 1);
        spec.arc_den = std::stoll(den, &used2);
        if (used1 != slash || used2 != den.size()) throw std::invalid_argument(s);
      }
    } catch (const std::exception&) {
      fail("coefficients: cannot parse arc fraction '" + s + "'");
    }
  } else if (spec.type == "bv") {
    check_keys(j, "coefficients", {"type", "breakpoints", "values"});
    if (!j.contains("breakpoints") || !j.contains("values"))
      fail("coefficients: bv needs 'breakpoints' and 'values'");
    for (const auto& b : j.at("breakpoints"))
      spec.breakpoints.push_back(real_from(b, "coefficients.breakpoints"));
    for (const auto& v : j.at("values"))
      spec.values.push_back(real_from(v, "coefficients.values"));
  } else if (spec.type == "explicit") {
    check_keys(j, "coefficients", {"type", "entries"});
    if (!j.contains("entries") || !j.at("entries").is_array())
      fail("coefficients: explicit needs an 'entries' array");
    for (const auto& e : j.at("entries")) {
      check_keys(e, "coefficients.entries[]", {"lambda", "re", "im"});
      if (!e.contains("lambda") || !e.at("lambda").is_array())
        fail("coefficients.entries[]: missing 'lambda' array");
      const auto& lam = e.at("lambda");
      if (lam.size() != 2 && lam.size() != 3)
        fail("coefficients.entries[]: lambda must have 2 or 3 components");
      ExplicitEntry entry;
      entry.lambda = {0, 0, 0};
      for (std::size_t c = 0; c < lam.size(); ++c)
        entry.lambda[c] = int_from(lam[c], "coefficients.entries[].lambda");
      const double re = e.contains("re") ? real_from(e.at("re"), "entries[].re") : 0.0;
      const double im = e.contains("im") ? real_from(e.at("im"), "entries[].im") : 0.0;
      entry.c = {re, im};
      spec.entries.push_back(entry);
    }
  } else {
    fail("coefficients: unknown type '" + spec.type + "'");
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  check_keys(j, "config",
             {"n", "d", "coefficients", "r", "T", "mc", "restriction", "moments_upto"});

  ExperimentConfig cfg;
  cfg.source_text = text;
  if (!j.contains("n")) fail("missing 'n'");
  cfg.n = int_from(j.at("n"), "n");
  if (cfg.n <= 0) fail("'n' must be positive");
  if (j.contains("d")) {
    cfg.d = static_cast<int>(int_from(j.at("d"), "d"));
    if (cfg.d != 2 && cfg.d != 3) fail("'d' must be 2 or 3");
  }
  if (!j.contains("coefficients")) fail("missing 'coefficients'");
  cfg.coefficients = parse_coefficients(j.at("coefficients"));

  const double sqrt_n = std::sqrt(static_cast<double>(cfg.n));
  const bool has_r = j.contains("r"), has_t = j.contains("T");
  if (!has_r && !has_t) fail("missing radius: give 'r' or 'T'");
  cfg.radius_given_as_t = has_t && !has_r;
  if (has_r) cfg.r = real_from(j.at("r"), "r");
  if (has_t) {
    cfg.t_planck = real_from(j.at("T"), "T");
    if (!has_r) cfg.r = cfg.t_planck / sqrt_n;
  }
  if (has_r && has_t) {
    const double implied = cfg.r * sqrt_n;
    if (std::abs(implied - cfg.t_planck) > 1e-12 * std::max(1.0, std::abs(cfg.t_planck)))
      fail("'r' and 'T' disagree: T != r*sqrt(n) beyond 1e-12");
  }
  cfg.t_planck = cfg.r * sqrt_n;
  if (!(cfg.r > 0.0 && cfg.r < 0.5)) fail("radius must lie in (0, 1/2)");

  if (j.contains("mc")) {
    const json& m = j.at("mc");
    check_keys(m, "mc", {"M", "seed", "batch"});
    if (!m.contains("M")) fail("mc: missing 'M'");
    cfg.mc.samples = int_from(m.at("M"), "mc.M");
    if (cfg.mc.samples < 2) fail("mc.M must be at least 2");
    if (m.contains("seed")) cfg.mc.seed = uint_from(m.at("seed"), "mc.seed");
    if (m.contains("batch")) {
      cfg.mc.batch = int_from(m.at("batch"), "mc.batch");
      if (cfg.mc.batch < 1) fail("mc.batch must be positive");
    }
  }

  if (j.contains("restriction")) {
    const json& rj = j.at("restriction");
    check_keys(rj, "restriction", {"x0", "rho"});
    if (!rj.contains("x0") || !rj.at("x0").is_array()) fail("restriction: missing 'x0'");
    const auto& x0 = rj.at("x0");
    if (static_cast<int>(x0.size()) != cfg.d)
      fail("restriction: x0 must have d components");
    Restriction r;
    for (std::size_t c = 0; c < x0.size(); ++c) {
      r.x0[c] = real_from(x0[c], "restriction.x0");
      if (!(r.x0[c] >= 0.0 && r.x0[c] < 1.0))
        fail("restriction: x0 components must lie in [0, 1)");
    }
    if (!rj.contains("rho")) fail("restriction: missing 'rho'");
    r.rho = real_from(rj.at("rho"), "restriction.rho");
    if (!(r.rho > 0.0 && r.rho < 0.5)) fail("restriction: rho must lie in (0, 1/2)");
    cfg.restriction = r;
  }

  if (j.contains("moments_upto")) {
    cfg.moments_upto = static_cast<int>(int_from(j.at("moments_upto"), "moments_upto"));
    if (cfg.moments_upto < 2 || cfg.moments_upto > 8)
      fail("moments_upto must lie in [2, 8]");
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

CoefficientVector build_coefficients(const ExperimentConfig& cfg) {
  LatticePointSet set = LatticePointSet::enumerate(cfg.n, cfg.d);
  if (set.size() == 0)
    throw ValidationError("config: n = " + std::to_string(cfg.n) +
                          " is not a sum of " + std::to_string(cfg.d) + " squares");
  const CoefficientSpec& c = cfg.coefficients;
  if (c.type == "bourgain") return make_bourgain(set, c.seed, c.all_plus);
  if (c.type == "arc") return make_arc_supported(set, c.arc_num, c.arc_den);
  if (c.type == "bv") return make_bv_density(set, c.breakpoints, c.values);
  return make_explicit(set, c.entries);
}

}  // namespace toral
