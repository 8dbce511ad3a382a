// Command-line front end: parses configs, dispatches subcommands, emits
// machine-readable reports plus an optional run manifest.  Exit codes:
// 0 success, 1 validation/parse failure, 2 work-budget exhaustion.

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toralmass/config.hpp"
#include "toralmass/correlations.hpp"
#include "toralmass/eigenfun.hpp"
#include "toralmass/lattice.hpp"
#include "toralmass/mass.hpp"
#include "toralmass/report.hpp"
#include "toralmass/specfun.hpp"
#include "toralmass/util.hpp"

namespace {

using namespace toral;

constexpr const char* kToolVersion = "0.1.0";

struct RunOutput {
  std::string report;  // printed to stdout
  std::vector<std::pair<std::string, std::string>> files;  // path -> body
  std::optional<u64> seed;
  std::string config_echo;
  int exit_code = 0;
};

void save(RunOutput& out, const std::string& path, const std::string& body) {
  write_text_file(path, body);
  out.files.emplace_back(path, body);
}

// "p", "p.q" or "-p.q" -> exact rational p/q with q a power of ten.
std::pair<i64, i64> parse_decimal_rational(const std::string& text) {
  std::string digits;
  i64 den = 1;
  bool negative = false, seen_dot = false, seen_digit = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '-' && i == 0) {
      negative = true;
    } else if (c == '.') {
      if (seen_dot) throw ValidationError("bad decimal '" + text + "'");
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
      digits += c;
      if (seen_dot) den *= 10;
      if (digits.size() > 17) throw ValidationError("decimal '" + text + "' too long");
    } else {
      throw ValidationError("bad decimal '" + text + "'");
    }
  }
  if (!seen_digit) throw ValidationError("bad decimal '" + text + "'");
  i64 num = std::stoll(digits.empty() ? "0" : digits);
  if (negative) num = -num;
  const i64 g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

struct Grid {
  double lo = 0, hi = 0, step = 0;
  std::vector<double> points() const {
    std::vector<double> s;
    for (i64 i = 0;; ++i) {
      const double v = lo + static_cast<double>(i) * step;
      if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
      s.push_back(std::min(v, hi));
    }
    return s;
  }
};

Grid parse_grid(const std::string& text) {
  Grid g;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ValidationError("grid must be lo:hi:step");
  try {
    std::size_t u = 0;
    g.lo = std::stod(text.substr(0, c1), &u);
    g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1), &u);
    g.step = std::stod(text.substr(c2 + 1), &u);
  } catch (const std::exception&) {
    throw ValidationError("grid must be lo:hi:step with decimal entries");
  }
  require(g.step > 0, "grid step must be positive");
  require(g.lo <= g.hi, "grid lo must not exceed hi");
  return g;
}

void apply_overrides(ExperimentConfig& cfg, const std::optional<i64>& n,
                     const std::optional<u64>& seed, const std::optional<i64>& m) {
  if (n) {
    cfg.n = *n;
    require(cfg.n > 0, "n must be positive");
    if (cfg.radius_given_as_t)
      cfg.r = cfg.t_planck / std::sqrt(static_cast<double>(cfg.n));
    cfg.t_planck = cfg.r * std::sqrt(static_cast<double>(cfg.n));
    require(cfg.r > 0 && cfg.r < 0.5, "radius must lie in (0, 1/2)");
  }
  if (seed) cfg.mc.seed = *seed;
  if (m) {
    cfg.mc.samples = *m;
    require(cfg.mc.samples >= 2, "mc.M must be at least 2");
  }
}

void emit_point(JsonWriter& w, const IVec& p, int d) {
  w.begin_array();
  for (int c = 0; c < d; ++c) w.value(p[c]);
  w.end_array();
}

void emit_discrepancy(JsonWriter& w, const DiscrepancyResult& res, int d) {
  w.begin_object();
  w.field("value", res.value);
  w.field("exact", res.exact);
  w.key("witness").begin_object();
  if (d == 2) {
    w.field("arc_start", res.witness.a);
    w.field("arc_end", res.witness.b);
    w.field("closed_low", res.witness.closed_low);
    w.field("closed_high", res.witness.closed_high);
  } else {
    w.key("centre").begin_array();
    for (int c = 0; c < 3; ++c) w.value(res.witness.centre[c]);
    w.end_array();
    w.field("chordal_radius", res.witness.rad);
    w.field("boundary_included", res.witness.boundary_included);
  }
  w.field("count", res.witness.count);
  w.end_object();
  w.end_object();
}

// ---------------------------------------------------------------------------
// lattice

struct LatticeOpts {
  i64 n = 0;
  int dim = 2;
  bool discrepancy = false;
  std::string out_csv, cap_mode = "auto";
  i64 cap_samples = 4096;
  u64 cap_seed = 1;
};

RunOutput run_lattice(const LatticeOpts& o) {
  RunOutput out;
  require(o.n > 0, "n must be positive");
  const LatticePointSet set = LatticePointSet::enumerate(o.n, o.dim);
  JsonWriter w;
  w.begin_object();
  w.field("n", set.n());
  w.field("d", o.dim);
  w.field("N", static_cast<i64>(set.size()));
  w.field("representable", set.size() != 0);
  if (!o.out_csv.empty()) {
    require(set.size() != 0, "cannot write points: the set is empty");
    CsvWriter csv;
    csv.field("index").field("x").field("y");
    if (o.dim == 3) csv.field("z");
    if (o.dim == 2) csv.field("angle");
    csv.endrow();
    for (std::size_t i = 0; i < set.size(); ++i) {
      const IVec& p = set.points()[i];
      csv.field(static_cast<i64>(i)).field(p[0]).field(p[1]);
      if (o.dim == 3) csv.field(p[2]);
      if (o.dim == 2) csv.field(set.angles()[i]);
      csv.endrow();
    }
    save(out, o.out_csv, csv.str());
    w.field("points_csv", o.out_csv);
  }
  if (o.discrepancy) {
    require(set.size() != 0, "cannot compute discrepancy: the set is empty");
    DiscrepancyResult res;
    if (o.dim == 2) {
      res = angular_discrepancy(set);
    } else {
      CapMode mode = CapMode::kSampled;
      if (o.cap_mode == "exact" || (o.cap_mode == "auto" && set.size() <= 200))
        mode = CapMode::kExact;
      else
        require(o.cap_mode == "auto" || o.cap_mode == "sampled",
                "cap mode must be exact, sampled or auto");
      res = spherical_cap_discrepancy(set, mode, o.cap_samples, o.cap_seed);
    }
    w.key("discrepancy");
    emit_discrepancy(w, res, o.dim);
  }
  w.end_object();
  out.report = w.str();
  return out;
}

// ---------------------------------------------------------------------------
// correlations

struct CorrelationsOpts {
  i64 n = 0;
  int dim = 2, l = 0;
  std::string k_text, delta_text, tuples_csv;
  std::optional<double> gamma;
  u64 budget = 1'000'000'000ull;
};

RunOutput run_correlations(const CorrelationsOpts& o) {
  RunOutput out;
  require(o.n > 0, "n must be positive");
  require(o.l >= 2, "l must be at least 2");
  require(o.k_text.empty() || o.delta_text.empty(),
          "give at most one of --K and --delta");
  const LatticePointSet set = LatticePointSet::enumerate(o.n, o.dim);
  require(set.size() != 0, "the point set is empty");

  CsvWriter tuples;
  std::function<void(const std::vector<IVec>&)> sink;
  const std::function<void(const std::vector<IVec>&)>* emit = nullptr;
  if (!o.tuples_csv.empty()) {
    for (int j = 1; j <= o.l; ++j) {
      tuples.field("x" + std::to_string(j)).field("y" + std::to_string(j));
      if (o.dim == 3) tuples.field("z" + std::to_string(j));
    }
    tuples.endrow();
    sink = [&](const std::vector<IVec>& tup) {
      for (const IVec& p : tup) {
        tuples.field(p[0]).field(p[1]);
        if (o.dim == 3) tuples.field(p[2]);
      }
      tuples.endrow();
    };
    emit = &sink;
  }
  const CorrelationCounts counts = count_correlations(set, o.l, o.budget, emit);

  JsonWriter w;
  w.begin_object();
  w.field("n", set.n());
  w.field("d", o.dim);
  w.field("l", o.l);
  w.field("N", static_cast<i64>(set.size()));
  w.field("count_S", counts.count);
  if (o.l % 2 == 0) {
    const i64 count_d = count_diagonal(set, o.l);
    w.field("count_D", count_d);
    w.field("count_offdiag", counts.count - count_d);
  } else {
    w.key("count_D").null();
    w.key("count_offdiag").null();
  }
  w.field("budget_used", counts.budget_used);

  if (!o.k_text.empty() || !o.delta_text.empty()) {
    NormThreshold thr = NormThreshold::rational(1, 1);
    double k_shown = 0;
    if (!o.k_text.empty()) {
      thr = NormThreshold::from_decimal_radius(o.k_text);
      k_shown = thr.approx_radius();
    } else {
      const auto [dn, dd] = parse_decimal_rational(o.delta_text);
      require(dn > 0 && 2 * dn < dd, "delta must lie in (0, 1/2)");
      thr = NormThreshold::power(set.n(), dd - 2 * dn, dd);
      k_shown = thr.approx_radius();
    }
    const CorrelationCounts quasi = count_quasi_correlations(set, o.l, thr, o.budget);
    w.key("quasi").begin_object();
    w.field("K", k_shown);
    w.field("count", quasi.count);
    w.end_object();
  } else {
    w.key("quasi").null();
  }

  if (!o.delta_text.empty()) {
    const auto [dn, dd] = parse_decimal_rational(o.delta_text);
    const HypothesisA hyp = check_hypothesis_A(set, o.l, dn, dd, o.budget);
    w.key("hypothesis_A").begin_object();
    w.field("delta", o.delta_text);
    w.field("K", hyp.window);
    w.field("holds", hyp.holds);
    w.field("violating_count", hyp.violating_count);
    w.key("witness");
    if (hyp.witness) {
      w.begin_array();
      for (const IVec& p : *hyp.witness) emit_point(w, p, o.dim);
      w.end_array();
    } else {
      w.null();
    }
    w.end_object();
  } else {
    w.key("hypothesis_A").null();
  }

  if (o.gamma) {
    const DiagonalDomination dom = check_diagonal_domination(set, o.l, *o.gamma, o.budget);
    w.key("domination").begin_object();
    w.field("gamma", *o.gamma);
    w.field("margin", dom.margin);
    w.field("dominated", dom.dominated);
    w.end_object();
  } else {
    w.key("domination").null();
  }

  if (!o.tuples_csv.empty()) {
    save(out, o.tuples_csv, tuples.str());
    w.field("tuples_csv", o.tuples_csv);
  }
  w.end_object();
  out.report = w.str();
  return out;
}

// ---------------------------------------------------------------------------
// flatness

struct FlatnessOpts {
  std::string config;
  double eps = 0.1, eta = 0.25;
  std::optional<i64> n_override;
};

RunOutput run_flatness(const FlatnessOpts& o) {
  RunOutput out;
  ExperimentConfig cfg = load_config_file(o.config);
  apply_overrides(cfg, o.n_override, std::nullopt, std::nullopt);
  out.config_echo = cfg.source_text;
  const CoefficientVector cv = build_coefficients(cfg);
  const FlatnessReport rep = flatness_report(cv, o.eps, cfg.t_planck, o.eta);
  JsonWriter w;
  w.begin_object();
  w.field("n", cfg.n);
  w.field("d", cfg.d);
  w.field("N", static_cast<i64>(cv.size()));
  w.field("T", cfg.t_planck);
  w.field("v_inf", rep.v_inf);
  w.field("A4", rep.a4);
  w.field("theta", rep.theta);
  w.key("V");
  if (rep.v) w.value(*rep.v); else w.null();
  w.key("V_tilde");
  if (rep.v_tilde) w.value(*rep.v_tilde); else w.null();
  w.field("hermitian", cv.hermitian());
  w.key("memberships").begin_object();
  w.field("bourgain", rep.is_bourgain);
  w.field("ultraflat", rep.ultraflat);
  w.field("epsilon", rep.epsilon);
  w.field("F1", rep.class_f1);
  w.field("F2", rep.class_f2);
  w.field("eta", rep.eta);
  w.end_object();
  w.end_object();
  out.report = w.str();
  return out;
}

// ---------------------------------------------------------------------------
// variance / clt / restricted

struct MomentOpts {
  std::string config, samples_csv;
  std::optional<i64> n_override, m_override;
  std::optional<u64> seed_override;
  bool force_clt_table = false;
  bool restricted = false;
};

RunOutput run_moments(const MomentOpts& o) {
  RunOutput out;
  ExperimentConfig cfg = load_config_file(o.config);
  apply_overrides(cfg, o.n_override, o.seed_override, o.m_override);
  out.config_echo = cfg.source_text;
  out.seed = cfg.mc.seed;
  require(cfg.mc.samples >= 2, "this subcommand needs an mc section with M >= 2");
  if (o.restricted)
    require(cfg.restriction.has_value(), "restricted run needs a restriction section");
  else
    require(!cfg.restriction.has_value(),
            "config has a restriction section: use the restricted subcommand");

  const CoefficientVector cv = build_coefficients(cfg);
  const double r = cfg.r, t = cfg.t_planck;
  const int d = cfg.d;
  const i64 n_pts = static_cast<i64>(cv.size());
  const int upto = o.force_clt_table ? std::max(cfg.moments_upto, 6) : cfg.moments_upto;

  // Exact reference values; for restricted runs the centring uses the
  // restricted mean and variance.
  const double full_exp = expectation_exact(r, d);
  double centre_mean = 0, centre_var = 0;
  std::optional<double> var_spectral, predicted, ratio, gap, gap_norm, offset;
  double var_exact = 0;
  if (o.restricted) {
    const double k1 =
        restricted_moment_exact(cv, r, cfg.restriction->x0, cfg.restriction->rho, 1);
    var_exact =
        restricted_moment_exact(cv, r, cfg.restriction->x0, cfg.restriction->rho, 2);
    offset = k1;
    centre_mean = full_exp + k1;
    centre_var = var_exact;
  } else {
    var_exact = variance_exact_tuple(cv, r);
    var_spectral = variance_spectral(cv, r);
    const FlatnessReport rep = flatness_report(cv, 0.1, t, 0.25);
    predicted = predict_variance_asymptotic(d, rep.theta, r, t);
    ratio = *predicted > 0 ? var_exact / *predicted : 0.0;
    gap = std::abs(*var_spectral - var_exact);
    if (d == 3 && var_exact > 0)
      gap_norm = *gap * std::pow(static_cast<double>(n_pts), 0.25) /
                 (rep.v_inf * rep.v_inf * std::pow(r, 6));
    centre_mean = full_exp;
    centre_var = var_exact;
  }
  require(centre_var > 0, "exact variance must be positive to standardize");

  // Exact standardized moments where the tuple convolutions stay small.
  std::map<int, std::optional<double>> exact_std;
  for (int k = 3; k <= upto; ++k) {
    exact_std[k] = std::nullopt;
    if (o.restricted || n_pts > 24) continue;
    try {
      const double mk = moment_exact_tuple(cv, r, k, 50'000'000ull);
      exact_std[k] = mk / std::pow(var_exact, 0.5 * k);
    } catch (const BudgetError&) {
    }
  }

  std::vector<McSample> samples;
  std::vector<McSample>* sink = o.samples_csv.empty() ? nullptr : &samples;
  const McMomentStats stats = monte_carlo_moments(
      cv, r, cfg.mc, o.restricted ? cfg.restriction : std::nullopt, upto,
      centre_mean, centre_var, sink);

  if (sink) {
    CsvWriter csv;
    csv.field("index");
    for (int c = 1; c <= d; ++c) csv.field("x" + std::to_string(c));
    csv.field("X").field("X_standardized");
    csv.endrow();
    const double sigma = std::sqrt(centre_var);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      csv.field(static_cast<i64>(i));
      for (int c = 0; c < d; ++c) csv.field(samples[i].x[c]);
      csv.field(samples[i].mass);
      csv.field((samples[i].mass - centre_mean) / sigma);
      csv.endrow();
    }
    save(out, o.samples_csv, csv.str());
  }

  JsonWriter w;
  w.begin_object();
  w.field("n", cfg.n);
  w.field("d", d);
  w.field("N", n_pts);
  w.field("r", r);
  w.field("T", t);
  if (o.restricted) {
    w.key("restriction").begin_object();
    w.key("x0").begin_array();
    for (int c = 0; c < d; ++c) w.value(cfg.restriction->x0[c]);
    w.end_array();
    w.field("rho", cfg.restriction->rho);
    w.end_object();
  }
  w.key("expectation").begin_object();
  w.field("exact", centre_mean);
  if (o.restricted) {
    w.field("full_torus", full_exp);
    w.field("offset_exact", *offset);
  }
  w.field("mc", stats.mean);
  w.field("mc_stderr", stats.mean_stderr);
  w.end_object();
  w.key("variance").begin_object();
  w.key("spectral");
  if (var_spectral) w.value(*var_spectral); else w.null();
  w.field("exact_tuple", var_exact);
  w.field("mc", stats.variance);
  w.field("mc_stderr", stats.variance_stderr);
  w.key("predicted_asymptotic");
  if (predicted) w.value(*predicted); else w.null();
  w.key("ratio");
  if (ratio) w.value(*ratio); else w.null();
  w.key("diagonal_gap");
  if (gap) w.value(*gap); else w.null();
  w.key("diagonal_gap_normalized");
  if (gap_norm) w.value(*gap_norm); else w.null();
  w.end_object();
  w.key("standardized_moments").begin_object();
  for (int k = 3; k <= upto; ++k) {
    w.key(std::to_string(k)).begin_object();
    w.key("exact_tuple");
    if (exact_std[k]) w.value(*exact_std[k]); else w.null();
    const auto it = stats.standardized.find(k);
    w.field("mc", it->second[0]);
    w.field("mc_stderr", it->second[1]);
    double target = 0.0;
    if (k % 2 == 0) {
      target = 1.0;
      for (int j = k - 1; j > 1; j -= 2) target *= j;
    }
    w.field("gaussian_target", target);
    w.end_object();
  }
  w.end_object();
  w.key("ks").begin_object();
  w.field("statistic", stats.ks);
  w.field("sample_count", stats.ks_count);
  w.end_object();
  if (!o.samples_csv.empty()) w.field("samples_csv", o.samples_csv);
  w.end_object();
  out.report = w.str();
  return out;
}

// ---------------------------------------------------------------------------
// pairdist

struct PairdistOpts {
  std::string config, grid_text = "0:2:0.01", out_csv;
  std::optional<i64> n_override;
};

RunOutput run_pairdist(const PairdistOpts& o) {
  RunOutput out;
  ExperimentConfig cfg = load_config_file(o.config);
  apply_overrides(cfg, o.n_override, std::nullopt, std::nullopt);
  out.config_echo = cfg.source_text;
  const Grid grid = parse_grid(o.grid_text);
  require(grid.lo >= 0 && grid.hi <= 2, "pair distances live in [0, 2]");
  const CoefficientVector cv = build_coefficients(cfg);
  const LatticePointSet& set = cv.set();
  const std::vector<double> ss = grid.points();

  CsvWriter csv;
  if (cfg.d == 2)
    csv.field("s").field("weighted").field("point").field("uniform_target");
  else
    csv.field("s").field("uniform").field("uniform_target");
  csv.endrow();

  JsonWriter w;
  w.begin_object();
  w.field("n", cfg.n);
  w.field("d", cfg.d);
  w.field("N", static_cast<i64>(set.size()));
  w.key("grid").begin_object();
  w.field("lo", grid.lo);
  w.field("hi", grid.hi);
  w.field("step", grid.step);
  w.field("points", static_cast<i64>(ss.size()));
  w.end_object();
  w.key("rows").begin_array();
  for (double s : ss) {
    w.begin_object();
    w.field("s", s);
    if (cfg.d == 2) {
      const double f = pair_distance_weighted(cv, s);
      const double fp = pair_distance_point(set, set.points()[0], s);
      const double target = s / std::numbers::pi;
      w.field("weighted", f);
      w.field("point", fp);
      w.field("uniform_target", target);
      csv.field(s).field(f).field(fp).field(target);
    } else {
      const double f3 = pair_distance_uniform3(set, s);
      const double target = s * s / 4.0;
      w.field("uniform", f3);
      w.field("uniform_target", target);
      csv.field(s).field(f3).field(target);
    }
    csv.endrow();
    w.end_object();
  }
  w.end_array();
  if (!o.out_csv.empty()) {
    save(out, o.out_csv, csv.str());
    w.field("csv", o.out_csv);
  }
  w.end_object();
  out.report = w.str();
  return out;
}

// ---------------------------------------------------------------------------
// hypotheses

struct HypothesesOpts {
  i64 n = 0;
  int dim = 2;
  std::optional<double> eps;
  std::optional<int> l;
  std::string delta_text;
  u64 budget = 1'000'000'000ull;
};

RunOutput run_hypotheses(const HypothesesOpts& o) {
  RunOutput out;
  require(o.n > 0, "n must be positive");
  const LatticePointSet set = LatticePointSet::enumerate(o.n, o.dim);
  require(set.size() != 0, "the point set is empty");
  JsonWriter w;
  w.begin_object();
  w.field("n", set.n());
  w.field("d", o.dim);
  w.field("N", static_cast<i64>(set.size()));
  if (o.eps) {
    require(o.dim == 2, "the discrepancy hypothesis is defined for d = 2");
    const HypothesisD hyp = check_hypothesis_D(set, *o.eps);
    w.key("D").begin_object();
    w.field("eps", *o.eps);
    w.field("holds", hyp.holds);
    w.field("discrepancy", hyp.delta);
    w.field("threshold", hyp.threshold);
    w.field("margin", hyp.margin);
    w.end_object();
  } else {
    w.key("D").null();
  }
  if (o.l) {
    require(!o.delta_text.empty(), "hypothesis A needs both --l and --delta");
    const auto [dn, dd] = parse_decimal_rational(o.delta_text);
    require(dn > 0 && 2 * dn < dd, "delta must lie in (0, 1/2)");
    const HypothesisA hyp = check_hypothesis_A(set, *o.l, dn, dd, o.budget);
    w.key("A").begin_object();
    w.field("l", *o.l);
    w.field("delta", o.delta_text);
    w.field("K", hyp.window);
    w.field("holds", hyp.holds);
    w.field("violating_count", hyp.violating_count);
    w.key("witness");
    if (hyp.witness) {
      w.begin_array();
      for (const IVec& p : *hyp.witness) emit_point(w, p, o.dim);
      w.end_array();
    } else {
      w.null();
    }
    w.end_object();
  } else {
    require(o.delta_text.empty(), "hypothesis A needs both --l and --delta");
    w.key("A").null();
  }
  w.end_object();
  out.report = w.str();
  return out;
}

// ---------------------------------------------------------------------------
// selftest

struct SelftestRow {
  std::string name;
  double error = 0, tolerance = 0;
  bool pass = false;
};

RunOutput run_selftest() {
  RunOutput out;
  std::vector<SelftestRow> rows;
  auto check = [&](const std::string& name, double error, double tol) {
    rows.push_back({name, error, tol, std::abs(error) <= tol});
  };
  const double pi = std::numbers::pi;

  check("g2_at_zero", g_kernel(2, 0.0) - 0.5, 1e-15);
  check("g3_at_zero", g_kernel(3, 0.0) - (4.0 * pi / 3.0) / std::pow(2.0 * pi, 1.5),
        1e-15);

  double worst = 0;
  for (double x = 0.0; x <= 50.0; x += 0.125) {
    const double g2 = g_kernel(2, x), g3 = g_kernel(3, x);
    worst = std::max(worst, std::abs(h_kernel(2, x) - g2 * g2));
    worst = std::max(worst, std::abs(h_kernel(3, x) - g3 * g3));
  }
  check("h_equals_g_squared", worst, 1e-12);

  QuadratureSpec spec;
  spec.abs_tol = 1e-9;
  const double int_h2 = integrate_to_infinity(
      [](double s) { return h_kernel(2, s); }, 0.0, spec,
      [&](double a) { return std::pow(2.0 * pi, -3.0) / (pi * a * a); });
  check("integral_h2", int_h2 - 2.0 / (3.0 * pi * pi), 1e-8);

  const double int_sh3 = integrate_to_infinity(
      [](double s) { return s * h_kernel(3, s); }, 0.0, spec,
      [&](double a) { return 4.0 / pi * std::pow(2.0 * pi, -4.0) / (a * a); });
  check("integral_s_h3", int_sh3 - std::pow(2.0 * pi, -3.0), 1e-8);

  worst = 0;
  for (double x = 0.3; x <= 20.0; x += 0.4) {
    const double h = 1e-5;
    const double fd = (g_kernel(2, x + h) - g_kernel(2, x - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(g2_derivative(x) - fd));
  }
  check("g2_derivative_fd", worst, 1e-6);

  worst = 0;
  for (double x = 0.5; x <= 200.0; x += 0.7) {
    const double lhs = bessel_j(2, x);
    const double rhs = 2.0 * bessel_j(1, x) / x - bessel_j(0, x);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  check("bessel_recurrence", worst, 1e-11);

  worst = 0;
  for (double y = 0.3; y <= 30.0; y += 0.3) {
    const double direct =
        std::sqrt(2.0 / (pi * y)) * (std::sin(y) / y - std::cos(y));
    worst = std::max(worst, std::abs(bessel_j(1, y, true) - direct));
  }
  check("bessel_three_halves", worst, 1e-12);

  std::string table = "check                        |error|      tolerance  status\n";
  bool all_pass = true;
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%-26s %12.3e %12.3e  %s\n", r.name.c_str(),
                  std::abs(r.error), r.tolerance, r.pass ? "PASS" : "FAIL");
    table += line;
    all_pass = all_pass && r.pass;
  }
  table += all_pass ? "all checks passed\n" : "CHECKS FAILED\n";
  out.report = table;
  out.exit_code = all_pass ? 0 : 1;
  return out;
}

// ---------------------------------------------------------------------------

std::string build_manifest(const std::string& subcommand,
                           const std::vector<std::string>& argv_echo,
                           const RunOutput& res, double wall_ms) {
  JsonWriter w;
  w.begin_object();
  w.field("tool", "toralmass");
  w.field("version", kToolVersion);
  w.field("subcommand", subcommand);
  w.key("command_line").begin_array();
  for (const auto& a : argv_echo) w.value(a);
  w.end_array();
  w.key("config");
  if (res.config_echo.empty()) w.null(); else w.value(res.config_echo);
  w.field("threads", thread_count());
  w.key("seed");
  if (res.seed) w.value(*res.seed); else w.null();
  w.field("wall_ms", wall_ms);
  w.key("outputs").begin_object();
  w.field("report", checksum_label(res.report));
  for (const auto& [path, body] : res.files) w.field(path, checksum_label(body));
  w.end_object();
  w.end_object();
  return w.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planck-scale mass statistics of toral Laplace eigenfunctions"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::string manifest_path;
  app.add_option("--threads", threads, "worker threads (0 = TORAL_MASS_THREADS or cores)");
  app.add_option("--manifest", manifest_path, "write a run manifest JSON here");

  LatticeOpts lat;
  auto* c_lat = app.add_subcommand("lattice", "enumerate E_n and its discrepancy");
  c_lat->add_option("--n", lat.n, "eigenvalue parameter")->required();
  c_lat->add_option("--dim", lat.dim, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  c_lat->add_flag("--discrepancy", lat.discrepancy, "compute the discrepancy");
  c_lat->add_option("--out", lat.out_csv, "write the points to this CSV");
  c_lat->add_option("--cap-mode", lat.cap_mode, "d=3 cap scan: exact|sampled|auto")
      ->check(CLI::IsMember({"exact", "sampled", "auto"}));
  c_lat->add_option("--cap-samples", lat.cap_samples, "sampled-mode cap centres");
  c_lat->add_option("--cap-seed", lat.cap_seed, "sampled-mode seed");

  CorrelationsOpts cor;
  auto* c_cor = app.add_subcommand("correlations", "count spectral correlation sets");
  c_cor->add_option("--n", cor.n, "eigenvalue parameter")->required();
  c_cor->add_option("--dim", cor.dim, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  c_cor->add_option("--l", cor.l, "tuple length")->required();
  c_cor->add_option("--K", cor.k_text, "quasi-correlation radius (decimal string)");
  c_cor->add_option("--delta", cor.delta_text,
                    "separateness exponent: window K = n^(1/2-delta)");
  double gamma_val = 0;
  auto* gopt = c_cor->add_option("--gamma", gamma_val, "diagonal domination exponent");
  c_cor->add_option("--tuples", cor.tuples_csv, "stream zero-sum tuples to this CSV");
  c_cor->add_option("--budget", cor.budget, "work budget in hash operations");

  FlatnessOpts fla;
  auto* c_fla = app.add_subcommand("flatness", "flatness functionals of a config");
  c_fla->add_option("--config", fla.config, "experiment JSON")->required();
  c_fla->add_option("--eps", fla.eps, "ultraflatness exponent");
  c_fla->add_option("--eta", fla.eta, "class threshold exponent");
  i64 fla_n = 0;
  auto* fla_nopt = c_fla->add_option("--n", fla_n, "override n");

  MomentOpts varo;
  auto* c_var = app.add_subcommand("variance", "exact and MC moments of the mass");
  MomentOpts clto;
  clto.force_clt_table = true;
  auto* c_clt = app.add_subcommand("clt", "CLT diagnostics of the standardized mass");
  MomentOpts reso;
  reso.restricted = true;
  auto* c_res = app.add_subcommand("restricted", "moments over a shrinking disc");
  i64 mom_n[3] = {0, 0, 0}, mom_m[3] = {0, 0, 0};
  u64 mom_seed[3] = {0, 0, 0};
  CLI::Option* mom_nopt[3];
  CLI::Option* mom_mopt[3];
  CLI::Option* mom_sopt[3];
  MomentOpts* moms[3] = {&varo, &clto, &reso};
  CLI::App* mcmds[3] = {c_var, c_clt, c_res};
  for (int i = 0; i < 3; ++i) {
    mcmds[i]->add_option("--config", moms[i]->config, "experiment JSON")->required();
    mom_nopt[i] = mcmds[i]->add_option("--n", mom_n[i], "override n");
    mom_sopt[i] = mcmds[i]->add_option("--seed", mom_seed[i], "override mc seed");
    mom_mopt[i] = mcmds[i]->add_option("--M", mom_m[i], "override mc sample count");
  }
  c_clt->add_option("--samples-out", clto.samples_csv, "write per-sample CSV here");

  PairdistOpts pdo;
  auto* c_pd = app.add_subcommand("pairdist", "pair-distance distribution on a grid");
  c_pd->add_option("--config", pdo.config, "experiment JSON")->required();
  c_pd->add_option("--grid", pdo.grid_text, "s grid as lo:hi:step");
  c_pd->add_option("--out", pdo.out_csv, "write the grid rows to this CSV");
  i64 pd_n = 0;
  auto* pd_nopt = c_pd->add_option("--n", pd_n, "override n");

  HypothesesOpts hyp;
  auto* c_hyp = app.add_subcommand("hypotheses", "arithmetic hypotheses for one n");
  c_hyp->add_option("--n", hyp.n, "eigenvalue parameter")->required();
  c_hyp->add_option("--dim", hyp.dim, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  double hyp_eps = 0;
  auto* hyp_eopt = c_hyp->add_option("--eps", hyp_eps, "discrepancy hypothesis slack");
  int hyp_l = 0;
  auto* hyp_lopt = c_hyp->add_option("--l", hyp_l, "separateness tuple length");
  c_hyp->add_option("--delta", hyp.delta_text, "separateness exponent (decimal)");
  c_hyp->add_option("--budget", hyp.budget, "work budget in hash operations");

  auto* c_self = app.add_subcommand("selftest", "kernel and Bessel identity suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::vector<std::string> argv_echo;
  for (int i = 1; i < argc; ++i) argv_echo.emplace_back(argv[i]);

  try {
    set_thread_count(threads);
    if (*gopt) cor.gamma = gamma_val;
    if (*fla_nopt) fla.n_override = fla_n;
    for (int i = 0; i < 3; ++i) {
      if (*mom_nopt[i]) moms[i]->n_override = mom_n[i];
      if (*mom_sopt[i]) moms[i]->seed_override = mom_seed[i];
      if (*mom_mopt[i]) moms[i]->m_override = mom_m[i];
    }
    if (*pd_nopt) pdo.n_override = pd_n;
    if (*hyp_eopt) hyp.eps = hyp_eps;
    if (*hyp_lopt) hyp.l = hyp_l;

    const auto t0 = std::chrono::steady_clock::now();
    RunOutput res;
    std::string name;
    if (app.got_subcommand(c_lat)) {
      name = "lattice";
      res = run_lattice(lat);
    } else if (app.got_subcommand(c_cor)) {
      name = "correlations";
      res = run_correlations(cor);
    } else if (app.got_subcommand(c_fla)) {
      name = "flatness";
      res = run_flatness(fla);
    } else if (app.got_subcommand(c_var)) {
      name = "variance";
      res = run_moments(varo);
    } else if (app.got_subcommand(c_clt)) {
      name = "clt";
      res = run_moments(clto);
    } else if (app.got_subcommand(c_res)) {
      name = "restricted";
      res = run_moments(reso);
    } else if (app.got_subcommand(c_pd)) {
      name = "pairdist";
      res = run_pairdist(pdo);
    } else if (app.got_subcommand(c_hyp)) {
      name = "hypotheses";
      res = run_hypotheses(hyp);
    } else if (app.got_subcommand(c_self)) {
      name = "selftest";
      res = run_selftest();
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0)
            .count();
    std::cout << res.report;
    if (!manifest_path.empty())
      write_text_file(manifest_path, build_manifest(name, argv_echo, res, wall_ms));
    return res.exit_code;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
