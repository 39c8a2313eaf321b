#pragma once

#include <string>

#include "dht/config.hpp"
#include "dht/splitting.hpp"

namespace dht {

enum class BoundVerdict { bounded, unbounded_trend, inconclusive };
std::string_view to_string(BoundVerdict v);

struct TrendPoint {
  Index n = 0;
  Real local = 0.0;
  Real a2 = 0.0;
};

struct BoundednessReport {
  std::string basis;  // theorem1 | corollary1 | corollary2 | theorem4
  Real condition_local = 0.0;
  Real condition_a2 = 0.0;  // NaN when the basis has no second condition
  Real tail_slack = 0.0;
  BoundVerdict verdict = BoundVerdict::inconclusive;
  std::vector<TrendPoint> trend;
  Index beyond_count = 0;
  Index near_boundary_count = 0;
};

/// Nested prefix lengths N/4, N/2, N (deduplicated, at least 1).
std::vector<Index> trend_levels(Index n);

/// Plateau rule shared by all boundedness verdicts. Each series holds one
/// statistic per trend level.
BoundVerdict plateau_verdict(const std::vector<std::vector<Real>>& series, Real growth_tol);

BoundednessReport theorem1_check(const WeightedNodeSet& ns, const AnnulusMeasure& mu,
                                 Real growth_tol = kPlateauThreshold);

struct CorollaryThresholds {
  Real q_v = 1.05;       // minimum v_{n+1}/v_n for the growing regime
  Real q_p = 0.95;       // maximum ratio of v_n/|gamma_n|^2
  Real q_sum = 0.95;     // ratio-test bound for summable weights
};

enum class CorollaryRegime { growing, summable, none };
CorollaryRegime detect_corollary_regime(const WeightedNodeSet& ns, const CorollaryThresholds& t = {});

BoundednessReport corollary_fast_path(const WeightedNodeSet& ns, const std::vector<Atom>& atoms,
                                      Real growth_tol = kPlateauThreshold,
                                      const CorollaryThresholds& thresholds = {});

struct Theorem4Report {
  BoundednessReport report;  // condition_a2 carries the double-sum statistic
  Index count_cap = 16;
  Index max_annulus_count = 0;
  std::vector<Index> count_trend;
  LacunarityProfile lacunarity;
  Index zero_count = 0;
  Index v_count = 0;
  Index p_count = 0;
};

Theorem4Report theorem4_check(const WeightedNodeSet& ns, const TargetSystem& ts, Index count_cap = 16,
                              Real growth_tol = kPlateauThreshold, const SplitVerdict* split = nullptr);

}  // namespace dht
