#pragma once

#include "dht/core.hpp"

namespace dht {

struct CoefficientVector {
  ComplexVector entries;
  Real norm_v = 0.0;

  CoefficientVector() = default;
  CoefficientVector(const WeightedNodeSet& ns, ComplexVector a);
};

struct Evaluation {
  Complex value;
  // Estimate of sum_{n>N} v_n/|z - gamma_n|^2; times the l2_v norm of any
  // omitted coefficients it bounds the truncation error.
  Real tail_kernel = 0.0;
};

Evaluation evaluate(const WeightedNodeSet& ns, const CoefficientVector& a, Complex z);

struct BesselWeights {
  RealVector w;
  std::vector<bool> tail_truncated;
};

/// w_j = (sum_n v_n/|lambda_j - gamma_n|^2 + tail)^{-1}. The tail adds 4 times
/// the omitted node mass when |lambda| <= |gamma_N|/2, otherwise it is dropped
/// and the entry flagged.
BesselWeights bessel_weights(const WeightedNodeSet& ns, const PointList& lambda);

TargetSystem make_bessel_target(const WeightedNodeSet& ns, PointList points, int offset = 1);

struct TruncatedOperator {
  ComplexMatrix matrix;  // M_{jn} = sqrt(w_j v_n) / (lambda_j - gamma_n)

  Index rows() const { return matrix.rows(); }
  Index cols() const { return matrix.cols(); }
};

TruncatedOperator truncated_operator(const WeightedNodeSet& ns, const TargetSystem& ts);

struct WitnessBounds {
  RealVector prefix_quotients;  // c^{(n)}, n = 2..N+1
  RealVector tail_quotients;    // a^{(n)}, n = 0..N-1
  Real best = 0.0;
};

WitnessBounds witness_lower_bounds(const WeightedNodeSet& ns, const TargetSystem& ts);
WitnessBounds witness_lower_bounds(const WeightedNodeSet& ns, const std::vector<Atom>& atoms);

}  // namespace dht
