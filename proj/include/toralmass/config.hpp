#pragma once

#include <optional>
#include <string>

#include "toralmass/eigenfun.hpp"
#include "toralmass/mass.hpp"

namespace toral {

// Coefficient construction request, one of the four bundled families.
struct CoefficientSpec {
  std::string type;  // "bourgain" | "arc" | "bv" | "explicit"
  // bourgain
  u64 seed = 1;
  bool all_plus = false;
  // arc: t = arc_num / arc_den
  i64 arc_num = 1, arc_den = 1;
  // bv
  std::vector<double> breakpoints, values;
  // explicit
  std::vector<ExplicitEntry> entries;
};

// One experiment: eigenfunction family, ball radius, sampling plan.
// Radius may be given directly ("r") or in wavelengths ("T", r = T/sqrt(n));
// when both appear they must agree to 1e-12 relative.  All reals are
// accepted as JSON numbers or as decimal strings.
struct ExperimentConfig {
  i64 n = 0;
  int d = 2;
  CoefficientSpec coefficients;
  double r = 0;
  double t_planck = 0;
  bool radius_given_as_t = false;  // config gave T only; n overrides rescale r
  McSpec mc;  // mc.samples == 0 when the config has no mc section
  std::optional<Restriction> restriction;
  int moments_upto = 4;
  std::string source_text;  // raw config body, echoed into the manifest
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Enumerates the point set for (n, d) and builds the requested coefficients.
CoefficientVector build_coefficients(const ExperimentConfig& cfg);

}  // namespace toral
