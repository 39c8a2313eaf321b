#pragma once

#include <map>
#include <string>

#include "dht/config.hpp"
#include "dht/core.hpp"

namespace dht {

enum class PointClass { zero, v, p };
std::string_view to_string(PointClass c);

struct SplitVerdict {
  std::vector<PointClass> class_of;
  IndexList annulus;  // 1-based annulus of each target point
  RealVector local_term;  // v_n/|lambda - gamma_n|^2
  RealVector v_term;      // V_n/|lambda|^2
  RealVector p_term;      // P_n

  IndexList members(PointClass c) const;
};

/// Tie priority zero > V > P with kTieSlack relative slack.
SplitVerdict classify(const WeightedNodeSet& ns, const TargetSystem& ts, const CumulantTable& cum);
SplitVerdict classify(const WeightedNodeSet& ns, const TargetSystem& ts);

struct LacunarityProfile {
  std::map<long, Index> v_blocks;  // floor(log2 V_m) -> count
  std::map<long, Index> p_blocks;  // floor(-log2 P_m) -> count
  Index max_v = 0;
  Index max_p = 0;
  Index unassigned = 0;  // P-class points in annuli with P_m = 0
};

LacunarityProfile lacunarity_profile(const IndexList& v_annuli, const IndexList& p_annuli,
                                     const CumulantTable& cum);
LacunarityProfile lacunarity_profile(const SplitVerdict& split, const CumulantTable& cum);

struct SplitParameters {
  Real epsilon = 0.0;
  Real delta = 0.0;
  Index n_thin = 0;
  Index n_block = 0;
  Index k_bound = 0;
};

/// delta = eps/16, n_thin = ceil(4/(delta eps)), n_block = ceil(4/delta),
/// k_bound = 3 (n_thin + n_block)^2.
SplitParameters split_parameters(Real epsilon);

struct Provenance {
  PointClass cls = PointClass::zero;
  std::string stage_a;  // whole-class | step1 | step2
  Index residue_a = 0;
  std::string stage_b;  // none | step3 | step4
  Index residue_b = 0;
};

struct Piece {
  IndexList indices;  // positions in the target system
  Provenance provenance;
};

struct SplitOptions {
  bool certify_whole_class = true;
  Real floor = 0.05;
  Real change_tol = kPlateauThreshold;
  Real growth_tol = kPlateauThreshold;
  Index count_cap = 16;
};

struct FeichtingerSplit {
  std::vector<Piece> pieces;
  SplitParameters params;
};

FeichtingerSplit feichtinger_split(const WeightedNodeSet& ns, const TargetSystem& ts, Real epsilon,
                                   const SplitOptions& options = {});

/// Adjoint lower-bound check for one piece: smallest singular value of the
/// piece rows in annuli <= L against the first L node columns, at L = N and
/// at L = max(N/2, annulus of the median piece point).
struct PieceCertificate {
  Index level_low = 0;
  Index level_high = 0;
  Index rows_low = 0;
  Index rows_high = 0;
  Real sigma_low = 0.0;
  Real sigma_high = 0.0;
  Real change = 0.0;
  bool certified = false;
};

PieceCertificate certify_piece(const WeightedNodeSet& ns, const TargetSystem& ts,
                               const IndexList& piece, const SplitOptions& options = {});

}  // namespace dht
