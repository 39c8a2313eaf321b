#pragma once

#include <functional>

#include "dht/error.hpp"
#include "dht/types.hpp"

namespace dht {

/// Complex points stored as anchor + offset.
///
/// The split keeps differences such as (t + 3) - (t - 4) exact even when the
/// anchor t is far beyond 2^53. Plain inputs carry a zero offset.
class PointList {
 public:
  PointList() = default;
  explicit PointList(ComplexVector values);
  PointList(ComplexVector anchors, ComplexVector offsets);

  Index size() const { return anchors_.size(); }
  bool empty() const { return anchors_.size() == 0; }

  Complex operator[](Index i) const { return anchors_[i] + offsets_[i]; }
  Complex anchor(Index i) const { return anchors_[i]; }
  Complex offset(Index i) const { return offsets_[i]; }
  Real modulus(Index i) const { return std::abs((*this)[i]); }

  const ComplexVector& anchors() const { return anchors_; }
  const ComplexVector& offsets() const { return offsets_; }
  ComplexVector values() const;
  bool has_offsets() const;

  PointList select(const IndexList& idx) const;
  PointList head(Index n) const;

 private:
  ComplexVector anchors_;
  ComplexVector offsets_;
};

/// a_i - b_j, anchors and offsets subtracted separately.
Complex difference(const PointList& a, Index i, const PointList& b, Index j);
/// z - b_j for a plain complex z.
Complex difference(Complex z, const PointList& b, Index j);

/// True when a_i and b_j are closer than kCoincidenceTol relative to the
/// scale at which their difference was formed.
bool coincident(const PointList& a, Index i, const PointList& b, Index j);
bool coincident(Complex z, const PointList& b, Index j);

/// Permutation sorting by modulus, then argument, then offset.
IndexList modulus_order(const PointList& points);

struct TailPolicy {
  enum class Kind { hard, geometric, closed };

  Kind kind = Kind::hard;
  Real ratio = 0.0;  // geometric: 0 estimates the ratio from the window
  int window = 4;
  // closed: tail(N) returns sum_{j>N} v_j/|gamma_j|^2 for a prefix of length N
  std::function<Real(Index)> tail;

  static TailPolicy hard_truncate();
  static TailPolicy geometric_extrapolate(Real ratio = 0.0, int window = 4);
  static TailPolicy closed_form(std::function<Real(Index)> tail);
};

std::string_view to_string(TailPolicy::Kind kind);

struct NodeSetOptions {
  bool cluster_exempt = false;
  TailPolicy tail = TailPolicy::hard_truncate();
};

class WeightedNodeSet {
 public:
  WeightedNodeSet() = default;

  const PointList& nodes() const { return nodes_; }
  const RealVector& weights() const { return weights_; }
  Index size() const { return nodes_.size(); }

  Real sparseness_ratio() const { return sparseness_; }
  Real admissibility_sum() const { return admissibility_; }
  bool cluster_exempt() const { return cluster_exempt_; }
  const TailPolicy& default_tail() const { return tail_; }

  /// Throws SparsenessViolation unless the ratio exceeds 1 and the set is
  /// not a cluster set.
  void require_sparse() const;

  WeightedNodeSet prefix(Index n) const;

 private:
  friend WeightedNodeSet build_node_set(PointList, RealVector, NodeSetOptions);

  PointList nodes_;
  RealVector weights_;
  Real sparseness_ = 0.0;
  Real admissibility_ = 0.0;
  bool cluster_exempt_ = false;
  TailPolicy tail_;
};

WeightedNodeSet build_node_set(PointList points, RealVector weights, NodeSetOptions options = {});
WeightedNodeSet build_node_set(const ComplexVector& points, const RealVector& weights,
                               NodeSetOptions options = {});

class AnnulusPartition {
 public:
  struct Location {
    Index annulus = 0;  // 1-based
    bool beyond = false;
    bool near_boundary = false;
  };

  explicit AnnulusPartition(const WeightedNodeSet& ns);

  /// r_1..r_N. r_N is the nominal outer edge halfway to the extrapolated
  /// next node (infinite when N = 1).
  const RealVector& radii() const { return radii_; }
  Location locate(Real modulus) const;
  Index annulus_of(Complex z) const { return locate(std::abs(z)).annulus; }

 private:
  RealVector radii_;
};

struct CumulantTable {
  RealVector V;  // V[n-1] = V_n, with V_1 = 1
  RealVector P;  // P[n-1] = P_n
  RealVector remainder_bound;
  TailPolicy::Kind policy = TailPolicy::Kind::hard;
  Real tail_mass = 0.0;  // sum beyond the prefix folded into P
};

CumulantTable cumulants(const WeightedNodeSet& ns, const TailPolicy& policy);
CumulantTable cumulants(const WeightedNodeSet& ns);

/// Tail sums sum_{m>n} weight_m * scale_m over the prefix plus an
/// extrapolated tail. Shared by P and Q.
struct TailSums {
  RealVector sums;
  Real tail_mass = 0.0;
  Real remainder = 0.0;
};
TailSums tail_sums(const RealVector& terms, const TailPolicy& policy);

struct Atom {
  Complex z;
  Real mass = 0.0;
};

struct AnnulusMeasure {
  RealVector mass;
  RealVector inv_sq;
  RealVector local;
  Index beyond_count = 0;
  Index near_boundary_count = 0;
};

AnnulusMeasure discrete_measure(const std::vector<Atom>& atoms, const WeightedNodeSet& ns);

class TargetSystem {
 public:
  TargetSystem() = default;

  const PointList& points() const { return points_; }
  const RealVector& weights() const { return weights_; }
  Index size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Index attached to the first point.
  int offset() const { return offset_; }
  bool bessel_weighted() const { return bessel_; }

  /// W[k] = sum of weights before element k; Q[k] = sum_{m>k} w_m/|lambda_m|^2.
  const RealVector& W() const { return W_; }
  const RealVector& Q() const { return Q_; }
  Real q_remainder() const { return q_remainder_; }

  /// Subsequence in the given (increasing) element order. The offset of the
  /// result is that of its first element.
  TargetSystem select(const IndexList& idx) const;

 private:
  friend TargetSystem make_target_system(PointList, RealVector, int, bool, const TailPolicy&);

  PointList points_;
  RealVector weights_;
  RealVector W_;
  RealVector Q_;
  Real q_remainder_ = 0.0;
  int offset_ = 1;
  bool bessel_ = false;
  TailPolicy tail_;
};

TargetSystem make_target_system(PointList points, RealVector weights, int offset = 1,
                                bool bessel_weighted = false,
                                const TailPolicy& policy = TailPolicy::hard_truncate());

/// Atoms as a weighted target (masses become weights). Atoms at the same
/// location are merged.
TargetSystem target_from_atoms(const std::vector<Atom>& atoms);

}  // namespace dht
