#include "dht/boundedness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dht/oracle.hpp"

namespace dht {

namespace {

constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();

Real sq_ratio(Real num, Real den) {
  const Real r = std::sqrt(num) / den;
  return r * r;
}

// Omitted node mass beyond the prefix under the set's own tail policy.
Real node_tail_estimate(const WeightedNodeSet& ns) {
  const CumulantTable c = cumulants(ns);
  return c.policy == TailPolicy::Kind::hard ? c.remainder_bound[0] : c.tail_mass + c.remainder_bound[0];
}

// Hard-truncated P over the first k nodes.
RealVector prefix_tail(const WeightedNodeSet& ns, Index k) {
  RealVector p = RealVector::Zero(k);
  Real acc = 0.0;
  for (Index n = k - 1; n >= 0; --n) {
    p[n] = acc;
    acc += sq_ratio(ns.weights()[n], ns.nodes().modulus(n));
  }
  return p;
}

TrendPoint theorem1_level(const WeightedNodeSet& ns, const AnnulusMeasure& mu, Index k) {
  const RealVector& v = ns.weights();
  TrendPoint tp;
  tp.n = k;
  for (Index n = 0; n < k; ++n) tp.local = std::max(tp.local, v[n] * mu.local[n]);

  const RealVector p = prefix_tail(ns, k);
  RealVector inv_suffix = RealVector::Zero(k);  // sum_{m>n} inv_sq_m within the level
  Real acc = 0.0;
  for (Index n = k - 1; n >= 0; --n) {
    inv_suffix[n] = acc;
    acc += mu.inv_sq[n];
  }
  Real vp = 0.0, mass = 0.0;
  for (Index n = 0; n < k; ++n) {
    vp += v[n];
    mass += mu.mass[n];
    tp.a2 = std::max(tp.a2, vp * inv_suffix[n] + mass * p[n]);
  }
  return tp;
}

}  // namespace

std::string_view to_string(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::bounded: return "bounded";
    case BoundVerdict::unbounded_trend: return "unbounded-trend";
    case BoundVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<Index> trend_levels(Index n) {
  std::vector<Index> levels;
  for (Index k : {n / 4, n / 2, n}) {
    k = std::max<Index>(k, 1);
    if (levels.empty() || levels.back() != k) levels.push_back(k);
  }
  return levels;
}

BoundVerdict plateau_verdict(const std::vector<std::vector<Real>>& series, Real growth_tol) {
  bool inconclusive = false;
  for (const auto& s : series) {
    for (Real x : s)
      if (!std::isfinite(x)) return BoundVerdict::unbounded_trend;
    const std::size_t L = s.size();
    if (L < 2) continue;
    const Real last = relative_change(s[L - 2], s[L - 1]);
    if (last < growth_tol) continue;
    const bool sustained = L < 3 || relative_change(s[L - 3], s[L - 2]) >= growth_tol;
    if (sustained) return BoundVerdict::unbounded_trend;
    inconclusive = true;
  }
  return inconclusive ? BoundVerdict::inconclusive : BoundVerdict::bounded;
}

BoundednessReport theorem1_check(const WeightedNodeSet& ns, const AnnulusMeasure& mu, Real growth_tol) {
  ns.require_sparse();
  if (mu.mass.size() != ns.size())
    throw Error(ErrorKind::InvalidArgument, "measure moments not aligned with the node set");

  BoundednessReport r;
  r.basis = "theorem1";
  std::vector<Real> s1, s2;
  for (Index k : trend_levels(ns.size())) {
    r.trend.push_back(theorem1_level(ns, mu, k));
    s1.push_back(r.trend.back().local);
    s2.push_back(r.trend.back().a2);
  }
  r.condition_local = s1.back();
  r.condition_a2 = s2.back();
  r.tail_slack = mu.mass.sum() * node_tail_estimate(ns);
  r.verdict = plateau_verdict({s1, s2}, growth_tol);
  r.beyond_count = mu.beyond_count;
  r.near_boundary_count = mu.near_boundary_count;
  return r;
}

CorollaryRegime detect_corollary_regime(const WeightedNodeSet& ns, const CorollaryThresholds& t) {
  const Index n = ns.size();
  if (n < 2) return CorollaryRegime::none;
  const RealVector& v = ns.weights();
  Real min_v = std::numeric_limits<Real>::infinity(), max_p = 0.0;
  for (Index k = 0; k + 1 < n; ++k) {
    min_v = std::min(min_v, v[k + 1] / v[k]);
    const Real pk = sq_ratio(v[k], ns.nodes().modulus(k));
    const Real pk1 = sq_ratio(v[k + 1], ns.nodes().modulus(k + 1));
    max_p = std::max(max_p, pk1 / pk);
  }
  if (min_v >= t.q_v && max_p <= t.q_p) return CorollaryRegime::growing;
  Real max_tail_ratio = 0.0;
  for (Index k = n / 2; k + 1 < n; ++k) max_tail_ratio = std::max(max_tail_ratio, v[k + 1] / v[k]);
  if (max_tail_ratio <= t.q_sum) return CorollaryRegime::summable;
  return CorollaryRegime::none;
}

BoundednessReport corollary_fast_path(const WeightedNodeSet& ns, const std::vector<Atom>& atoms,
                                      Real growth_tol, const CorollaryThresholds& thresholds) {
  const AnnulusMeasure mu = discrete_measure(atoms, ns);
  const CorollaryRegime regime = detect_corollary_regime(ns, thresholds);
  if (regime == CorollaryRegime::none) return theorem1_check(ns, mu, growth_tol);
  ns.require_sparse();

  BoundednessReport r;
  r.condition_a2 = kNaN;
  r.beyond_count = mu.beyond_count;
  r.near_boundary_count = mu.near_boundary_count;
  std::vector<Real> stat;
  if (regime == CorollaryRegime::growing) {
    r.basis = "corollary1";
    for (Index k : trend_levels(ns.size())) {
      TrendPoint tp{k, 0.0, kNaN};
      for (Index n = 0; n < k; ++n) tp.local = std::max(tp.local, ns.weights()[n] * mu.local[n]);
      r.trend.push_back(tp);
      stat.push_back(tp.local);
    }
  } else {
    r.basis = "corollary2";
    const AnnulusPartition part(ns);
    std::vector<Index> where;
    for (const Atom& a : atoms) where.push_back(part.annulus_of(a.z));
    for (Index k : trend_levels(ns.size())) {
      TrendPoint tp{k, 0.0, kNaN};
      for (Index n = 0; n < k; ++n) {
        Real s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          if (where[i] > k) continue;
          const Real d = std::abs(difference(atoms[i].z, ns.nodes(), n));
          s += sq_ratio(ns.weights()[n] * atoms[i].mass, d);
        }
        tp.local = std::max(tp.local, s);
      }
      r.trend.push_back(tp);
      stat.push_back(tp.local);
    }
  }
  r.condition_local = stat.back();
  r.tail_slack = mu.mass.sum() * node_tail_estimate(ns);
  r.verdict = plateau_verdict({stat}, growth_tol);
  return r;
}

Theorem4Report theorem4_check(const WeightedNodeSet& ns, const TargetSystem& ts, Index count_cap,
                              Real growth_tol, const SplitVerdict* split) {
  ns.require_sparse();
  if (!ts.bessel_weighted())
    throw Error(ErrorKind::NotBesselWeighted, "Theorem-4 conditions need Bessel weights");

  const CumulantTable cum = cumulants(ns);
  SplitVerdict computed;
  if (split == nullptr) {
    computed = classify(ns, ts, cum);
    split = &computed;
  }
  const Index N = ns.size();
  const Index J = ts.size();
  const RealVector& v = ns.weights();

  Theorem4Report out;
  out.count_cap = count_cap;
  out.report.basis = "theorem4";
  out.lacunarity = lacunarity_profile(*split, cum);
  for (PointClass c : split->class_of) {
    out.zero_count += c == PointClass::zero;
    out.v_count += c == PointClass::v;
    out.p_count += c == PointClass::p;
  }

  // Per-annulus contributions, all points and zero-class only.
  std::vector<Index> count(static_cast<std::size_t>(N), 0);
  RealVector local = RealVector::Zero(N), A = RealVector::Zero(N), B = RealVector::Zero(N);
  for (Index j = 0; j < J; ++j) {
    const Index m = split->annulus[static_cast<std::size_t>(j)] - 1;
    const Real d = std::abs(difference(ts.points(), j, ns.nodes(), m));
    count[static_cast<std::size_t>(m)] += 1;
    local[m] += sq_ratio(v[m] * ts.weights()[j], d);
    if (split->class_of[static_cast<std::size_t>(j)] != PointClass::zero) continue;
    const Real lam = ts.points().modulus(j);
    A[m] += sq_ratio(d * d / v[m], lam);
    B[m] += (d / std::sqrt(v[m])) * (d / std::sqrt(v[m]));
  }

  std::vector<Real> s_local, s_sum;
  for (Index k : trend_levels(N)) {
    TrendPoint tp;
    tp.n = k;
    Index maxc = 0;
    for (Index m = 0; m < k; ++m) {
      maxc = std::max(maxc, count[static_cast<std::size_t>(m)]);
      tp.local = std::max(tp.local, local[m]);
    }
    const RealVector p = prefix_tail(ns, k);
    RealVector a_suffix = RealVector::Zero(k);  // sum_{m>=n} A_m within the level
    Real acc = 0.0;
    for (Index n = k - 1; n >= 0; --n) {
      acc += A[n];
      a_suffix[n] = acc;
    }
    Real b_prefix = 0.0;
    for (Index n = 0; n < k; ++n) {
      b_prefix += B[n];
      tp.a2 = std::max(tp.a2, cum.V[n] * a_suffix[n] + p[n] * b_prefix);
    }
    out.count_trend.push_back(maxc);
    out.report.trend.push_back(tp);
    s_local.push_back(tp.local);
    s_sum.push_back(tp.a2);
  }
  out.max_annulus_count = out.count_trend.back();
  out.report.condition_local = s_local.back();
  out.report.condition_a2 = s_sum.back();
  out.report.tail_slack = ts.weights().sum() * node_tail_estimate(ns);

  const bool counts_ok = out.max_annulus_count <= count_cap && out.lacunarity.max_v <= count_cap &&
                         out.lacunarity.max_p <= count_cap;
  out.report.verdict = counts_ok ? plateau_verdict({s_local, s_sum}, growth_tol)
                                 : BoundVerdict::unbounded_trend;
  return out;
}

}  // namespace dht
