#include <algorithm>
#include <cmath>
#include <numbers>

#include "toralmass/mass.hpp"
#include "toralmass/rng.hpp"
#include "toralmass/util.hpp"

namespace toral {

namespace {

double phi_normal(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Per-block power sums of standardized samples, blocks in sample order.
// Block boundaries depend only on the sample count, so estimates and
// jackknife errors are reproducible regardless of threading.
struct BlockSums {
  static constexpr int kMaxPower = 8;
  int blocks = 0;
  i64 total = 0;
  std::vector<std::array<long double, kMaxPower + 1>> sums;  // [block][power], 0 = count
};

BlockSums block_power_sums(const std::vector<double>& z, int blocks) {
  BlockSums out;
  out.blocks = blocks;
  out.total = static_cast<i64>(z.size());
  out.sums.assign(blocks, {});
  for (i64 i = 0; i < out.total; ++i) {
    const int b = static_cast<int>((i * blocks) / out.total);
    auto& s = out.sums[b];
    long double p = 1.0L;
    s[0] += 1.0L;
    for (int k = 1; k <= BlockSums::kMaxPower; ++k) {
      p *= z[static_cast<std::size_t>(i)];
      s[k] += p;
    }
  }
  return out;
}

std::array<long double, BlockSums::kMaxPower + 1> sum_blocks(const BlockSums& bs,
                                                             int skip = -1) {
  std::array<long double, BlockSums::kMaxPower + 1> tot{};
  for (int b = 0; b < bs.blocks; ++b) {
    if (b == skip) continue;
    for (int k = 0; k <= BlockSums::kMaxPower; ++k) tot[k] += bs.sums[b][k];
  }
  return tot;
}

// Delete-one-block jackknife of a statistic defined on the power sums.
template <typename Stat>
std::array<double, 2> jackknife(const BlockSums& bs, const Stat& stat) {
  const double full = stat(sum_blocks(bs));
  if (bs.blocks < 2) return {full, 0.0};
  std::vector<double> leave(static_cast<std::size_t>(bs.blocks));
  double mean = 0.0;
  for (int b = 0; b < bs.blocks; ++b) {
    leave[static_cast<std::size_t>(b)] = stat(sum_blocks(bs, b));
    mean += leave[static_cast<std::size_t>(b)];
  }
  mean /= bs.blocks;
  double ss = 0.0;
  for (double v : leave) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss * (bs.blocks - 1) / static_cast<double>(bs.blocks));
  return {full, se};
}

double ks_statistic(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = phi_normal(z[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / m - cdf,
                             cdf - static_cast<double>(i) / m));
  }
  return d;
}

int pick_blocks(i64 samples) {
  // 20 blocks once there is material for them; tiny runs fall back to fewer
  // so every leave-one-out subset keeps at least two samples.
  return static_cast<int>(std::min<i64>(20, std::max<i64>(1, samples / 4)));
}

}  // namespace

McMomentStats monte_carlo_moments(const CoefficientVector& cv, double r,
                                  const McSpec& mc,
                                  const std::optional<Restriction>& restriction,
                                  int moments_upto, double centre_mean,
                                  double centre_variance,
                                  std::vector<McSample>* samples_out) {
  require(mc.samples >= 2, "Monte Carlo needs at least 2 samples");
  require(mc.samples <= 50'000'000, "Monte Carlo sample count exceeds memory guard");
  require(mc.batch >= 1, "Monte Carlo batch size must be positive");
  require(moments_upto >= 2 && moments_upto <= BlockSums::kMaxPower,
          "moments_upto must lie in [2, 8]");
  require(centre_variance > 0.0, "standardization variance must be positive");
  const int d = cv.set().dim();
  if (restriction) {
    require(d == 2, "restricted sampling is defined for d = 2");
    require(restriction->rho > 0.0 && restriction->rho < 0.5,
            "restriction radius must lie in (0, 1/2)");
  }
  const MassEvaluator ev(cv, r);
  const double sigma = std::sqrt(centre_variance);
  const i64 m = mc.samples;
  std::vector<double> z(static_cast<std::size_t>(m));

  // Sample i reads the counter RNG at stream i; slots 0..2 hold the
  // unrestricted coordinates and slots 8, 9, 10, 11, ... hold rejection
  // attempts for the restricted draw.
  auto draw = [&](i64 i) -> std::array<double, 3> {
    const u64 stream = static_cast<u64>(i);
    if (!restriction) {
      std::array<double, 3> x{0, 0, 0};
      for (int c = 0; c < d; ++c)
        x[c] = uniform01(rng_at(mc.seed, stream, static_cast<u64>(c)));
      return x;
    }
    const double rho = restriction->rho;
    for (u64 attempt = 0; attempt < 1024; ++attempt) {
      const double dx =
          (2.0 * uniform01(rng_at(mc.seed, stream, 8 + 2 * attempt)) - 1.0) * rho;
      const double dy =
          (2.0 * uniform01(rng_at(mc.seed, stream, 9 + 2 * attempt)) - 1.0) * rho;
      if (dx * dx + dy * dy <= rho * rho)
        return {restriction->x0[0] + dx, restriction->x0[1] + dy, 0.0};
    }
    throw BudgetError("rejection sampling failed to land in the restriction ball");
  };

  if (samples_out) samples_out->resize(static_cast<std::size_t>(m));
  parallel_chunks(m, mc.batch, [&](i64, i64 begin, i64 end) {
    for (i64 i = begin; i < end; ++i) {
      const std::array<double, 3> x = draw(i);
      const double mass = ev(x);
      z[static_cast<std::size_t>(i)] = (mass - centre_mean) / sigma;
      if (samples_out) (*samples_out)[static_cast<std::size_t>(i)] = {x, mass};
    }
  });

  const BlockSums bs = block_power_sums(z, pick_blocks(m));

  McMomentStats out;
  out.samples = m;
  auto stat_mean = [&](const std::array<long double, BlockSums::kMaxPower + 1>& s) {
    return centre_mean + sigma * static_cast<double>(s[1] / s[0]);
  };
  auto stat_var = [&](const std::array<long double, BlockSums::kMaxPower + 1>& s) {
    const long double cnt = s[0];
    if (cnt < 2) return 0.0;
    return centre_variance *
           static_cast<double>((s[2] - s[1] * s[1] / cnt) / (cnt - 1));
  };
  const auto mean_j = jackknife(bs, stat_mean);
  const auto var_j = jackknife(bs, stat_var);
  out.mean = mean_j[0];
  out.mean_stderr = mean_j[1];
  out.variance = var_j[0];
  out.variance_stderr = var_j[1];
  for (int k = 3; k <= moments_upto; ++k) {
    auto stat_k = [&, k](const std::array<long double, BlockSums::kMaxPower + 1>& s) {
      return static_cast<double>(s[k] / s[0]);
    };
    const auto mj = jackknife(bs, stat_k);
    out.standardized[k] = {mj[0], mj[1]};
  }
  out.ks = ks_statistic(z);
  out.ks_count = m;
  return out;
}

CltDiagnostics clt_diagnostics(const std::vector<double>& standardized) {
  require(standardized.size() >= 100, "CLT diagnostics need at least 100 samples");
  const i64 m = static_cast<i64>(standardized.size());
  const BlockSums bs = block_power_sums(standardized, pick_blocks(m));
  CltDiagnostics out;
  out.sample_count = m;
  out.ks = ks_statistic(standardized);
  for (int k = 3; k <= 6; ++k) {
    auto stat_k = [&, k](const std::array<long double, BlockSums::kMaxPower + 1>& s) {
      return static_cast<double>(s[k] / s[0]);
    };
    const auto mj = jackknife(bs, stat_k);
    MomentRow row;
    row.value = mj[0];
    row.stderr_ = mj[1];
    row.gaussian_target = (k % 2 == 0) ? (k == 4 ? 3.0 : 15.0) : 0.0;
    out.moments[k] = row;
  }
  return out;
}

}  // namespace toral
