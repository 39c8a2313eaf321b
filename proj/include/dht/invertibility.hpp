#pragma once

#include <string>

#include "dht/boundedness.hpp"
#include "dht/oracle.hpp"
#include "dht/transform.hpp"

namespace dht {

struct SolveOptions {
  Real solve_tol = 1e-8;
  Real cond_cap = 1e12;
};

/// Solution e of H e = (1, 0, ..., 0) on a square truncation together with
/// the quantities derived from it.
struct GeneratingSolution {
  ComplexVector e;
  ComplexVector alpha;
  RealVector nu;
  RealVector varpi;
  Real residual = 0.0;
  Real condition = 0.0;
  WeightedNodeSet ns;
  TargetSystem ts;
};

GeneratingSolution solve_generating(const WeightedNodeSet& ns, const TargetSystem& ts,
                                    const SolveOptions& options = {});

/// a_n = e_n (gamma_n - lambda_1) sum_j b_j alpha_j / (gamma_n - lambda_j).
CoefficientVector inverse_apply(const GeneratingSolution& gs, const ComplexVector& b);

/// Phi(z) = (z - lambda_1) sum_n e_n v_n / (z - gamma_n).
Complex generating_function_eval(const GeneratingSolution& gs, Complex z);

/// nu and varpi recomputed from residues of 1/Phi at the nodes and from
/// Phi' at the targets.
struct ResidueWeights {
  RealVector nu;
  RealVector varpi;
};
ResidueWeights residue_weights(const GeneratingSolution& gs);

enum class PerturbationKind { exact, deficiency, excess, none };
std::string_view to_string(PerturbationKind k);

struct PerturbationClass {
  int n0 = 1;
  PerturbationKind kind = PerturbationKind::none;
  int amount = 0;
  IndexList exceptions;  // aligned indices n with lambda_n outside D_n(v; M)
  Real M_used = 10.0;
  Index aligned = 0;
};

/// Searches n0 in [-3, 4] for the alignment with fewest exceptions; ties go
/// to n0 = 1, then to the smaller |n0 - 1|, then to the smaller n0.
PerturbationClass classify_perturbation(const WeightedNodeSet& ns, const TargetSystem& ts, Real M = 10.0,
                                        Index exception_cap = 5);

enum class RhoScale { V, P };

struct RhoProfile {
  int n0 = 1;
  Index start = 1;        // first index n with a defined rho_n
  RealVector log_rho;     // log rho_n for n = start, start+1, ...
  Real exponent_inf = 0.0;
  Real exponent_sup = 0.0;
  Index pair_count = 0;
  Real drift = 0.0;       // max |log rho_n| / n over the second half
};

/// Pairs n < m must be at least one doubling apart on the chosen scale and
/// start at n >= ceil(N/8); the P scale also stops N/8 short of the end.
RhoProfile rho_profile(const WeightedNodeSet& ns, const TargetSystem& ts, int n0,
                       RhoScale scale = RhoScale::V);

enum class Regime { v, p, summable, none };
std::string_view to_string(Regime r);

Regime detect_regime(const WeightedNodeSet& ns, Real growth_tol = kPlateauThreshold);

enum class Verdict { invertible, adjust_one_point, not_invertible, inconclusive };
std::string_view to_string(Verdict v);

struct VerdictParams {
  Real M = 10.0;
  Index exception_cap = 5;
  Real margin = 0.05;
  Real growth_tol = kPlateauThreshold;
  std::vector<Index> sizes = {25, 50, 100, 200};
  bool run_oracle = true;
};

struct OracleCrosscheck {
  std::vector<Index> sizes;
  std::vector<Real> sigma_min_full;
  std::vector<Real> sigma_min_adjusted;  // empty unless the adjustment removes a point
  Trend trend_full = Trend::plateau;
  Trend trend_adjusted = Trend::plateau;
  bool agrees = true;
};

struct InvertibilityVerdict {
  Regime regime = Regime::none;
  std::string statistic;  // supVQ | supWP | supQ
  Real sup_stat = 0.0;
  std::vector<Real> sup_trend;
  BoundVerdict sup_verdict = BoundVerdict::inconclusive;
  RhoProfile rho;
  PerturbationClass perturbation;
  Verdict verdict = Verdict::inconclusive;
  std::string adjustment;  // drop-first | add-point | none
  std::string reason;
  OracleCrosscheck oracle;
};

InvertibilityVerdict invertibility_verdict(const WeightedNodeSet& ns, const TargetSystem& ts,
                                           const VerdictParams& params = {});

/// sigma_min of the truncation with nodes 1..J and targets with aligned
/// index in [first, J].
Real aligned_sigma_min(const WeightedNodeSet& ns, const TargetSystem& ts, int n0, Index J,
                       int first_aligned);

struct FastVerdict {
  Regime regime = Regime::none;
  Real c_limsup = 0.0;
  Real c_liminf = 0.0;
  Real alignment_constant = 0.0;
  Verdict verdict = Verdict::inconclusive;
  bool deferred = true;
  std::string reason;
};

FastVerdict example_fast_tests(const WeightedNodeSet& ns, const TargetSystem& ts, Real margin = 0.05,
                               Real alignment_cap = 10.0);

}  // namespace dht
