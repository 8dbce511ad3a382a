// Python bindings for the core library.  Wraps the coefficient vector as an
// opaque handle and exposes the main computations as plain functions that
// return dicts, so the python side needs no mirrored data model.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "toralmass/config.hpp"
#include "toralmass/correlations.hpp"
#include "toralmass/eigenfun.hpp"
#include "toralmass/lattice.hpp"
#include "toralmass/mass.hpp"
#include "toralmass/specfun.hpp"

namespace py = pybind11;
using namespace toral;

namespace {

std::array<double, 3> to_point(const std::vector<double>& x, int d) {
  if (static_cast<int>(x.size()) != d)
    throw ValidationError("point must have exactly d components");
  std::array<double, 3> p{0, 0, 0};
  for (int c = 0; c < d; ++c) p[c] = x[c];
  return p;
}

py::tuple point_tuple(const IVec& p, int d) {
  if (d == 2) return py::make_tuple(p[0], p[1]);
  return py::make_tuple(p[0], p[1], p[2]);
}

py::dict discrepancy_dict(const DiscrepancyResult& res, int d) {
  py::dict w;
  if (d == 2) {
    w["arc_start"] = res.witness.a;
    w["arc_end"] = res.witness.b;
    w["closed_low"] = res.witness.closed_low;
    w["closed_high"] = res.witness.closed_high;
  } else {
    w["centre"] = py::make_tuple(res.witness.centre[0], res.witness.centre[1],
                                 res.witness.centre[2]);
    w["chordal_radius"] = res.witness.rad;
    w["boundary_included"] = res.witness.boundary_included;
  }
  w["count"] = res.witness.count;
  py::dict out;
  out["value"] = res.value;
  out["exact"] = res.exact;
  out["witness"] = w;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Planck-scale mass statistics of toral Laplace eigenfunctions";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  // ---- lattice ----------------------------------------------------------
  m.def(
      "lattice_points",
      [](i64 n, int d) {
        const LatticePointSet set = LatticePointSet::enumerate(n, d);
        py::list out;
        for (const IVec& p : set.points()) out.append(point_tuple(p, d));
        return out;
      },
      py::arg("n"), py::arg("d") = 2,
      "Canonically ordered lattice points with squared norm n");

  m.def("is_sum_of_squares", &is_sum_of_squares, py::arg("n"), py::arg("d") = 2);

  m.def(
      "angular_discrepancy",
      [](i64 n) {
        const LatticePointSet set = LatticePointSet::enumerate(n, 2);
        require(set.size() != 0, "the point set is empty");
        return discrepancy_dict(angular_discrepancy(set), 2);
      },
      py::arg("n"), "Exact arc discrepancy of the projected points, d = 2");

  m.def(
      "spherical_cap_discrepancy",
      [](i64 n, bool exact, i64 samples, u64 seed) {
        const LatticePointSet set = LatticePointSet::enumerate(n, 3);
        require(set.size() != 0, "the point set is empty");
        return discrepancy_dict(
            spherical_cap_discrepancy(
                set, exact ? CapMode::kExact : CapMode::kSampled, samples, seed),
            3);
      },
      py::arg("n"), py::arg("exact") = false, py::arg("samples") = 4096,
      py::arg("seed") = u64{1});

  // ---- correlations -------------------------------------------------------
  m.def(
      "count_correlations",
      [](i64 n, int d, int l, u64 budget) {
        const LatticePointSet set = LatticePointSet::enumerate(n, d);
        require(set.size() != 0, "the point set is empty");
        const CorrelationCounts counts = count_correlations(set, l, budget);
        py::dict out;
        out["n"] = counts.n;
        out["d"] = counts.d;
        out["l"] = counts.l;
        out["count_S"] = counts.count;
        if (l % 2 == 0) {
          const i64 cd = count_diagonal(set, l);
          out["count_D"] = cd;
          out["count_offdiag"] = counts.count - cd;
        } else {
          out["count_D"] = py::none();
          out["count_offdiag"] = py::none();
        }
        out["budget_used"] = counts.budget_used;
        return out;
      },
      py::arg("n"), py::arg("d"), py::arg("l"),
      py::arg("budget") = u64{1'000'000'000});

  m.def(
      "count_quasi_correlations",
      [](i64 n, int d, int l, const std::string& radius, u64 budget) {
        const LatticePointSet set = LatticePointSet::enumerate(n, d);
        require(set.size() != 0, "the point set is empty");
        const NormThreshold thr = NormThreshold::from_decimal_radius(radius);
        const CorrelationCounts counts = count_quasi_correlations(set, l, thr, budget);
        py::dict out;
        out["count"] = counts.count;
        out["K"] = thr.approx_radius();
        out["budget_used"] = counts.budget_used;
        return out;
      },
      py::arg("n"), py::arg("d"), py::arg("l"), py::arg("radius"),
      py::arg("budget") = u64{1'000'000'000});

  // ---- coefficient vectors ------------------------------------------------
  py::class_<CoefficientVector>(m, "CoefficientVector")
      .def_property_readonly("n", [](const CoefficientVector& cv) { return cv.set().n(); })
      .def_property_readonly("d", [](const CoefficientVector& cv) { return cv.set().dim(); })
      .def_property_readonly("hermitian", &CoefficientVector::hermitian)
      .def("__len__", &CoefficientVector::size)
      .def("points",
           [](const CoefficientVector& cv) {
             py::list out;
             for (const IVec& p : cv.set().points())
               out.append(point_tuple(p, cv.set().dim()));
             return out;
           })
      .def("coeffs", [](const CoefficientVector& cv) { return cv.coeffs(); })
      .def("weights", [](const CoefficientVector& cv) {
        std::vector<double> w(cv.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = cv.weight(i);
        return w;
      });

  m.def(
      "bourgain_vector",
      [](i64 n, int d, u64 seed, bool all_plus) {
        return make_bourgain(LatticePointSet::enumerate(n, d), seed, all_plus);
      },
      py::arg("n"), py::arg("d") = 2, py::arg("seed") = u64{1},
      py::arg("all_plus") = false);

  m.def(
      "arc_vector",
      [](i64 n, i64 num, i64 den) {
        return make_arc_supported(LatticePointSet::enumerate(n, 2), num, den);
      },
      py::arg("n"), py::arg("num"), py::arg("den"));

  m.def(
      "bv_density_vector",
      [](i64 n, const std::vector<double>& breakpoints,
         const std::vector<double>& values) {
        return make_bv_density(LatticePointSet::enumerate(n, 2), breakpoints, values);
      },
      py::arg("n"), py::arg("breakpoints"), py::arg("values"));

  m.def(
      "explicit_vector",
      [](i64 n, int d,
         const std::vector<std::pair<std::vector<i64>, cplx>>& entries) {
        std::vector<ExplicitEntry> es;
        for (const auto& [lam, c] : entries) {
          if (static_cast<int>(lam.size()) != d)
            throw ValidationError("lambda must have exactly d components");
          IVec v{0, 0, 0};
          for (int k = 0; k < d; ++k) v[k] = lam[k];
          es.push_back({v, c});
        }
        return make_explicit(LatticePointSet::enumerate(n, d), es);
      },
      py::arg("n"), py::arg("d"), py::arg("entries"));

  m.def(
      "flatness",
      [](const CoefficientVector& cv, double eps, double t_planck, double eta) {
        const FlatnessReport rep = flatness_report(cv, eps, t_planck, eta);
        py::dict out;
        out["v_inf"] = rep.v_inf;
        out["A4"] = rep.a4;
        out["theta"] = rep.theta;
        out["V"] = rep.v ? py::cast(*rep.v) : py::none();
        out["V_tilde"] = rep.v_tilde ? py::cast(*rep.v_tilde) : py::none();
        out["bourgain"] = rep.is_bourgain;
        out["ultraflat"] = rep.ultraflat;
        out["F1"] = rep.class_f1;
        out["F2"] = rep.class_f2;
        return out;
      },
      py::arg("cv"), py::arg("eps") = 0.1, py::arg("t_planck") = 1.0,
      py::arg("eta") = 0.25);

  // ---- kernels ------------------------------------------------------------
  m.def("bessel_j", &bessel_j, py::arg("order"), py::arg("x"),
        py::arg("half") = false);
  m.def("g_kernel", &g_kernel, py::arg("d"), py::arg("x"));
  m.def("h_kernel", &h_kernel, py::arg("d"), py::arg("x"));

  // ---- mass and moments -----------------------------------------------------
  m.def(
      "eigenfunction_value",
      [](const CoefficientVector& cv, const std::vector<double>& x) {
        return evaluate(cv, to_point(x, cv.set().dim()));
      },
      py::arg("cv"), py::arg("x"));

  m.def(
      "mass",
      [](const CoefficientVector& cv, const std::vector<double>& x, double r) {
        return mass_exact(cv, to_point(x, cv.set().dim()), r);
      },
      py::arg("cv"), py::arg("x"), py::arg("r"));

  m.def("expectation", &expectation_exact, py::arg("r"), py::arg("d"));
  m.def("variance_spectral", &variance_spectral, py::arg("cv"), py::arg("r"));
  m.def("variance_exact", &variance_exact_tuple, py::arg("cv"), py::arg("r"));
  m.def("moment_exact", &moment_exact_tuple, py::arg("cv"), py::arg("r"),
        py::arg("k"), py::arg("budget") = u64{1'000'000'000});
  m.def(
      "restricted_moment",
      [](const CoefficientVector& cv, double r, const std::vector<double>& x0,
         double rho, int k) {
        return restricted_moment_exact(cv, r, to_point(x0, cv.set().dim()), rho, k);
      },
      py::arg("cv"), py::arg("r"), py::arg("x0"), py::arg("rho"), py::arg("k"));
  m.def("predict_variance", &predict_variance_asymptotic, py::arg("d"),
        py::arg("theta"), py::arg("r"), py::arg("t_planck"));

  m.def(
      "monte_carlo",
      [](const CoefficientVector& cv, double r, i64 samples, u64 seed,
         int moments_upto, std::optional<std::pair<std::vector<double>, double>> restrict_ball) {
        McSpec mc;
        mc.samples = samples;
        mc.seed = seed;
        std::optional<Restriction> restriction;
        const int d = cv.set().dim();
        double centre_mean = expectation_exact(r, d);
        double centre_var;
        if (restrict_ball) {
          Restriction res;
          res.x0 = to_point(restrict_ball->first, d);
          res.rho = restrict_ball->second;
          centre_mean += restricted_moment_exact(cv, r, res.x0, res.rho, 1);
          centre_var = restricted_moment_exact(cv, r, res.x0, res.rho, 2);
          restriction = res;
        } else {
          centre_var = variance_exact_tuple(cv, r);
        }
        const McMomentStats stats = monte_carlo_moments(
            cv, r, mc, restriction, moments_upto, centre_mean, centre_var);
        py::dict out;
        out["samples"] = stats.samples;
        out["mean"] = stats.mean;
        out["mean_stderr"] = stats.mean_stderr;
        out["variance"] = stats.variance;
        out["variance_stderr"] = stats.variance_stderr;
        out["exact_mean"] = centre_mean;
        out["exact_variance"] = centre_var;
        py::dict std_moments;
        for (const auto& [k, row] : stats.standardized) {
          py::dict entry;
          entry["estimate"] = row[0];
          entry["stderr"] = row[1];
          std_moments[py::cast(k)] = entry;
        }
        out["standardized"] = std_moments;
        out["ks"] = stats.ks;
        out["ks_count"] = stats.ks_count;
        return out;
      },
      py::arg("cv"), py::arg("r"), py::arg("samples"), py::arg("seed") = u64{1},
      py::arg("moments_upto") = 4, py::arg("restriction") = py::none());

  // ---- pair distances -------------------------------------------------------
  m.def(
      "pair_distance_weighted",
      [](const CoefficientVector& cv, double s) {
        return pair_distance_weighted(cv, s);
      },
      py::arg("cv"), py::arg("s"));
  m.def(
      "pair_distance_uniform3",
      [](i64 n, double s) {
        const LatticePointSet set = LatticePointSet::enumerate(n, 3);
        require(set.size() != 0, "the point set is empty");
        return pair_distance_uniform3(set, s);
      },
      py::arg("n"), py::arg("s"));

  // ---- config round trip ------------------------------------------------------
  m.def(
      "coefficients_from_config",
      [](const std::string& text) {
        const ExperimentConfig cfg = parse_config_text(text);
        py::dict out;
        out["n"] = cfg.n;
        out["d"] = cfg.d;
        out["r"] = cfg.r;
        out["T"] = cfg.t_planck;
        out["cv"] = py::cast(build_coefficients(cfg));
        return out;
      },
      py::arg("text"), "Parse an experiment config and build its coefficients");
}
