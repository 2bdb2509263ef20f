#include "csicl/stats/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csicl/util/rng.hpp"

namespace csicl {

using nlohmann::json;

void BootstrapParams::validate() const {
  if (iterations < 1) throw std::invalid_argument("bootstrap: iterations must be >= 1");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw std::invalid_argument("bootstrap: ci_level must be in (0, 1)");
}

std::size_t nearest_rank_index(std::size_t n, double q) {
  if (n == 0) throw std::invalid_argument("percentile of an empty sequence");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must be in [0, 1]");
  // The epsilon keeps q * N that should be an integer (0.025 * 2000) from
  // rounding up one rank.
  const double rank = std::ceil(q * static_cast<double>(n) - 1e-9);
  if (rank < 1.0) return 0;
  return std::min(static_cast<std::size_t>(rank) - 1, n - 1);
}

double percentile(std::span<const double> sorted_values, double q) {
  return sorted_values[nearest_rank_index(sorted_values.size(), q)];
}

std::vector<double> bootstrap_statistics(std::span<const double> diffs, std::size_t iterations, std::uint64_t seed) {
  const std::size_t n = diffs.size();
  std::vector<double> stats(iterations);
  for (std::size_t t = 0; t < iterations; ++t) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += diffs[rng.below(n)];
    stats[t] = sum / static_cast<double>(n);
  }
  std::sort(stats.begin(), stats.end());
  return stats;
}

BootstrapReport paired_bootstrap(const ScoreVector& a, const ScoreVector& b, const BootstrapParams& params) {
  params.validate();
  if (a.scores.empty()) throw std::invalid_argument("paired_bootstrap: empty score vector " + a.system_id);
  if (a.scores.size() != a.item_ids.size() || b.scores.size() != b.item_ids.size())
    throw std::invalid_argument("paired_bootstrap: scores and item ids differ in length");
  if (a.item_ids != b.item_ids)
    throw std::invalid_argument("paired_bootstrap: " + a.system_id + " and " + b.system_id +
                                " are not aligned on item ids");
  std::vector<double> diffs(a.scores.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = a.scores[i] - b.scores[i];

  BootstrapReport r;
  r.iterations = params.iterations;
  r.seed = params.seed;
  double total = 0.0;
  for (double d : diffs) total += d;
  r.mean_diff = total / static_cast<double>(diffs.size());

  const auto stats = bootstrap_statistics(diffs, params.iterations, params.seed);
  double boot_total = 0.0;
  for (double s : stats) boot_total += s;
  r.boot_mean = boot_total / static_cast<double>(stats.size());
  const std::size_t lo = nearest_rank_index(stats.size(), (1.0 - params.ci_level) / 2.0);
  const std::size_t hi = stats.size() - 1 - lo;
  r.ci_lower = stats[std::min(lo, hi)];
  r.ci_upper = stats[std::max(lo, hi)];
  r.significant = r.ci_lower > 0.0;
  return r;
}

SignificanceSummary significant_vs_all(const ScoreVector& target, std::span<const ScoreVector> baselines,
                                       const BootstrapParams& params) {
  SignificanceSummary s;
  s.vacuous = baselines.empty();
  for (const auto& base : baselines) {
    BootstrapParams p = params;
    p.seed = derive_seed(params.seed, {"baseline", base.system_id});
    const BootstrapReport r = paired_bootstrap(target, base, p);
    s.overall = s.overall && r.significant;
    s.per_baseline[base.system_id] = r;
  }
  return s;
}

json to_json(const BootstrapReport& r) {
  return {{"mean_diff", r.mean_diff}, {"boot_mean", r.boot_mean},   {"ci_lower", r.ci_lower},
          {"ci_upper", r.ci_upper},   {"significant", r.significant}, {"iterations", r.iterations},
          {"seed", r.seed}};
}

json to_json(const SignificanceSummary& s) {
  json per = json::object();
  for (const auto& [id, r] : s.per_baseline) per[id] = to_json(r);
  return {{"per_baseline", per}, {"overall", s.overall}, {"vacuous", s.vacuous}};
}

}  // namespace csicl
