#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace csicl {

/// Per-item scores of one system, aligned by item id with the systems it is
/// compared against.
struct ScoreVector {
  std::string system_id;
  std::vector<std::string> item_ids;
  std::vector<double> scores;
};

struct BootstrapParams {
  std::size_t iterations = 2000;
  double ci_level = 0.95;
  std::uint64_t seed = 42;

  void validate() const;
};

struct BootstrapReport {
  /// Mean of a - b over the original items.
  double mean_diff = 0.0;
  /// Mean of the bootstrap statistics.
  double boot_mean = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool significant = false;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
};

/// Nearest-rank percentile: element ceil(q * N) - 1, clamped to [0, N - 1].
double percentile(std::span<const double> sorted_values, double q);

/// Index used by percentile().
std::size_t nearest_rank_index(std::size_t n, double q);

/// The sorted bootstrap statistics: iteration t draws n item indices with
/// replacement from a stream keyed by (seed, t) and averages a - b over them.
std::vector<double> bootstrap_statistics(std::span<const double> diffs, std::size_t iterations, std::uint64_t seed);

/// Paired percentile bootstrap of mean(a - b). The interval takes the
/// nearest-rank lower bound at (1 - ci) / 2 and the mirror-image upper bound,
/// so swapping a and b maps [l, u] exactly to [-u, -l]. Significant iff the
/// lower bound is above zero. Throws std::invalid_argument on empty or
/// misaligned vectors.
BootstrapReport paired_bootstrap(const ScoreVector& a, const ScoreVector& b, const BootstrapParams& params);

struct SignificanceSummary {
  std::map<std::string, BootstrapReport> per_baseline;
  bool overall = true;
  /// Set when there were no baselines and `overall` is vacuously true.
  bool vacuous = false;
};

/// paired_bootstrap against each baseline with a seed derived from
/// (params.seed, baseline id); overall is the AND of all verdicts.
SignificanceSummary significant_vs_all(const ScoreVector& target, std::span<const ScoreVector> baselines,
                                       const BootstrapParams& params);

nlohmann::json to_json(const BootstrapReport& r);
nlohmann::json to_json(const SignificanceSummary& s);

}  // namespace csicl
