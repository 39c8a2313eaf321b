#include "dht/invertibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace dht {

namespace {

constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();
constexpr Real kInf = std::numeric_limits<Real>::infinity();

Complex reciprocal(Complex d) {
  const Real m = std::abs(d);
  return std::conj(d) / m / m;
}

Real sq_ratio(Real num, Real den) {
  const Real r = std::sqrt(num) / den;
  return r * r;
}

// Target element aligned with node index n (1-based) under offset n0, or -1.
Index element_for(int n0, Index n, Index J) {
  const Index k = n - n0;
  return k >= 0 && k < J ? k : -1;
}

IndexList aligned_rows(const TargetSystem& ts, int n0, int first, Index last) {
  IndexList rows;
  for (Index k = 0; k < ts.size(); ++k) {
    const Index n = n0 + k;
    if (n >= first && n <= last) rows.push_back(k);
  }
  return rows;
}

std::vector<Index> study_sizes(const std::vector<Index>& requested, Index N) {
  std::vector<Index> s;
  for (Index x : requested)
    if (x >= 1 && x <= N && (s.empty() || x > s.back())) s.push_back(x);
  if (s.size() >= 3) return s;
  s.clear();
  for (Index x : {N / 8, N / 4, N / 2, N})
    if (x >= 1 && (s.empty() || x > s.back())) s.push_back(x);
  return s;
}

}  // namespace

GeneratingSolution solve_generating(const WeightedNodeSet& ns, const TargetSystem& ts,
                                    const SolveOptions& options) {
  const Index N = ns.size();
  if (ts.size() != N) throw Error(ErrorKind::InvalidArgument, "generating solve needs a square truncation");

  const TruncatedOperator op = truncated_operator(ns, ts);
  const Eigen::PartialPivLU<ComplexMatrix> lu(op.matrix);
  const Real rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<Real>::epsilon()))
    throw Error(ErrorKind::SingularSystem, "truncated system is numerically singular");
  GeneratingSolution gs;
  gs.condition = 1.0 / rcond;
  if (gs.condition > options.cond_cap)
    throw Error(ErrorKind::ConditionCapExceeded, "condition estimate " + std::to_string(gs.condition));

  ComplexVector rhs = ComplexVector::Zero(N);
  rhs[0] = std::sqrt(ts.weights()[0]);
  const ComplexVector b = lu.solve(rhs);
  gs.e.resize(N);
  for (Index n = 0; n < N; ++n) gs.e[n] = b[n] / std::sqrt(ns.weights()[n]);

  const PointList& g = ns.nodes();
  const PointList& l = ts.points();
  gs.residual = 0.0;
  for (Index j = 0; j < N; ++j) {
    Complex he(0.0);
    for (Index n = 0; n < N; ++n) he += gs.e[n] * ns.weights()[n] * reciprocal(difference(l, j, g, n));
    gs.residual = std::max(gs.residual, std::abs(he - Complex(j == 0 ? 1.0 : 0.0)));
  }

  gs.alpha.resize(N);
  gs.varpi.resize(N);
  for (Index j = 0; j < N; ++j) {
    Complex s(0.0), t(0.0);
    for (Index m = 0; m < N; ++m) {
      const Complex r = reciprocal(difference(l, j, g, m));
      const Complex ev = gs.e[m] * ns.weights()[m];
      s += ev * (difference(l, 0, g, m) * r) * r;
      t += ev * r * r;
    }
    gs.alpha[j] = Complex(1.0) / s;
    if (j == 0) {
      gs.varpi[j] = 1.0 / ts.weights()[0];
    } else {
      const Real denom = std::sqrt(ts.weights()[j]) * std::abs(difference(l, j, l, 0)) * std::abs(t);
      gs.varpi[j] = denom > 0.0 ? 1.0 / denom / denom : kInf;
    }
  }
  gs.nu.resize(N);
  for (Index n = 0; n < N; ++n) {
    const Real x = std::abs(b[n]) * std::abs(difference(l, 0, g, n));
    gs.nu[n] = x * x;
  }
  gs.ns = ns;
  gs.ts = ts;
  if (gs.residual > options.solve_tol)
    throw Error(ErrorKind::SingularSystem, "residual " + std::to_string(gs.residual) + " above tolerance");
  return gs;
}

CoefficientVector inverse_apply(const GeneratingSolution& gs, const ComplexVector& b) {
  const Index N = gs.ns.size();
  if (b.size() > gs.ts.size()) throw Error(ErrorKind::InvalidArgument, "b longer than the target prefix");
  const PointList& g = gs.ns.nodes();
  const PointList& l = gs.ts.points();
  ComplexVector a(N);
  for (Index n = 0; n < N; ++n) {
    Complex s(0.0);
    for (Index j = 0; j < b.size(); ++j) {
      if (b[j] == Complex(0.0)) continue;
      // (gamma_n - lambda_1)/(gamma_n - lambda_j), formed as a single ratio.
      s += b[j] * gs.alpha[j] * (difference(g, n, l, 0) * reciprocal(difference(g, n, l, j)));
    }
    a[n] = gs.e[n] * s;
  }
  return CoefficientVector(gs.ns, std::move(a));
}

Complex generating_function_eval(const GeneratingSolution& gs, Complex z) {
  const Evaluation ev = evaluate(gs.ns, CoefficientVector(gs.ns, gs.e), z);
  return difference(z, gs.ts.points(), 0) * ev.value;
}

ResidueWeights residue_weights(const GeneratingSolution& gs) {
  const Index N = gs.ns.size();
  const PointList& g = gs.ns.nodes();
  const PointList& l = gs.ts.points();
  const RealVector& v = gs.ns.weights();
  ResidueWeights rw;
  rw.nu.resize(N);
  rw.varpi.resize(N);
  for (Index n = 0; n < N; ++n) {
    // Residue of Phi at gamma_n equals 1/Psi'(gamma_n).
    const Real res = std::abs(gs.e[n] * v[n]) * std::abs(difference(g, n, l, 0));
    rw.nu[n] = res / std::sqrt(v[n]) * (res / std::sqrt(v[n]));
  }
  for (Index j = 0; j < N; ++j) {
    Complex s(0.0), ds(0.0);
    for (Index m = 0; m < N; ++m) {
      const Complex r = reciprocal(difference(l, j, g, m));
      s += gs.e[m] * v[m] * r;
      ds -= gs.e[m] * v[m] * r * r;
    }
    const Complex dphi = s + difference(l, j, l, 0) * ds;
    const Real x = std::sqrt(gs.ts.weights()[j]) * std::abs(dphi);
    rw.varpi[j] = x > 0.0 ? 1.0 / x / x : kInf;
  }
  return rw;
}

std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::exact: return "exact";
    case PerturbationKind::deficiency: return "deficiency";
    case PerturbationKind::excess: return "excess";
    case PerturbationKind::none: return "none";
  }
  return "unknown";
}

PerturbationClass classify_perturbation(const WeightedNodeSet& ns, const TargetSystem& ts, Real M,
                                        Index exception_cap) {
  const CumulantTable cum = cumulants(ns);
  const Index N = ns.size();
  const Index J = ts.size();
  PerturbationClass best;
  bool have = false;
  for (int n0 = -3; n0 <= 4; ++n0) {
    PerturbationClass pc;
    pc.n0 = n0;
    pc.M_used = M;
    for (Index n = 1; n <= N; ++n) {
      const Index k = element_for(n0, n, J);
      if (k < 0) continue;
      ++pc.aligned;
      const Real d = std::abs(difference(ts.points(), k, ns.nodes(), n - 1));
      const Real local = M * sq_ratio(ns.weights()[n - 1], d);
      const Real rhs = std::max(sq_ratio(cum.V[n - 1], ts.points().modulus(k)), cum.P[n - 1]);
      if (!(local >= rhs)) pc.exceptions.push_back(n);
    }
    if (pc.aligned == 0) continue;
    auto key = [](const PerturbationClass& c) {
      return std::make_tuple(c.exceptions.size(), c.n0 == 1 ? 0 : 1, std::abs(c.n0 - 1), c.n0);
    };
    if (!have || key(pc) < key(best)) {
      best = std::move(pc);
      have = true;
    }
  }
  if (!have) return best;
  if (static_cast<Index>(best.exceptions.size()) > exception_cap) {
    best.kind = PerturbationKind::none;
    best.amount = 0;
  } else if (best.n0 == 1) {
    best.kind = PerturbationKind::exact;
  } else if (best.n0 > 1) {
    best.kind = PerturbationKind::deficiency;
    best.amount = best.n0 - 1;
  } else {
    best.kind = PerturbationKind::excess;
    best.amount = 1 - best.n0;
  }
  return best;
}

RhoProfile rho_profile(const WeightedNodeSet& ns, const TargetSystem& ts, int n0, RhoScale scale) {
  const Index N = ns.size();
  const Index J = ts.size();
  RhoProfile rp;
  rp.n0 = n0;
  rp.start = std::max(1, n0);
  const Index end = std::min<Index>(N, n0 + J - 1);
  rp.exponent_inf = rp.exponent_sup = kNaN;
  if (end < rp.start) return rp;

  rp.log_rho.resize(end - rp.start + 1);
  Real acc = 0.0;
  for (Index n = rp.start; n <= end; ++n) {
    const Index k = n - n0;
    acc += 2.0 * (std::log(ns.nodes().modulus(n - 1)) - std::log(ts.points().modulus(k)));
    rp.log_rho[n - rp.start] = acc;
  }

  const CumulantTable cum = cumulants(ns);
  const Index burn = (N + 7) / 8;
  const Index lo = std::max<Index>(rp.start, burn);
  const Index hi = scale == RhoScale::V ? end : std::min<Index>(end, N - burn);
  Real inf = kInf, sup = -kInf;
  for (Index n = lo; n <= hi; ++n) {
    for (Index m = n + 1; m <= hi; ++m) {
      Real lr;
      if (scale == RhoScale::V) {
        const Real r = cum.V[m - 1] / cum.V[n - 1];
        if (r < 2.0) continue;
        lr = std::log(r);
      } else {
        if (!(cum.P[m - 1] > 0.0)) continue;
        const Real r = cum.P[m - 1] / cum.P[n - 1];
        if (r > 0.5) continue;
        lr = std::log(r);
      }
      const Real x = (rp.log_rho[m - rp.start] - rp.log_rho[n - rp.start]) / lr;
      inf = std::min(inf, x);
      sup = std::max(sup, x);
      ++rp.pair_count;
    }
  }
  if (rp.pair_count > 0) {
    rp.exponent_inf = inf;
    rp.exponent_sup = sup;
  }
  for (Index n = std::max<Index>(rp.start, N / 2); n <= end; ++n)
    rp.drift = std::max(rp.drift, std::abs(rp.log_rho[n - rp.start]) / static_cast<Real>(n));
  return rp;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::v: return "V-regime";
    case Regime::p: return "P-regime";
    case Regime::summable: return "summable";
    case Regime::none: return "none";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::invertible: return "invertible";
    case Verdict::adjust_one_point: return "invertible-after-adjusting-one-point";
    case Verdict::not_invertible: return "not-invertible";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Regime detect_regime(const WeightedNodeSet& ns, Real growth_tol) {
  const Index N = ns.size();
  if (N < 8) return Regime::none;
  const RealVector& v = ns.weights();
  const Real half_mass = v.head(N / 2).sum();
  const Real full_mass = v.sum();
  if (relative_change(half_mass, full_mass) < growth_tol) return Regime::summable;

  const CumulantTable cum = cumulants(ns);
  auto vr = [&](Index n) { return v[n - 1] / cum.V[n - 1]; };
  if (vr(N) <= 0.1 && vr(N) < vr(N / 2) && cum.V[N - 1] >= 16.0) return Regime::v;

  auto pr = [&](Index n) {
    const Real p = cum.P[n - 1];
    return p > 0.0 ? sq_ratio(v[n - 1], ns.nodes().modulus(n - 1)) / p : kInf;
  };
  const Index n3 = (3 * N) / 4;
  if (pr(n3) <= 0.1 && pr(n3) < pr(N / 2)) return Regime::p;
  return Regime::none;
}

Real aligned_sigma_min(const WeightedNodeSet& ns, const TargetSystem& ts, int n0, Index J, int first_aligned) {
  const IndexList rows = aligned_rows(ts, n0, first_aligned, J);
  if (rows.empty()) return 0.0;
  return singular_extremes(truncated_operator(ns.prefix(J), ts.select(rows))).sigma_min;
}

InvertibilityVerdict invertibility_verdict(const WeightedNodeSet& ns, const TargetSystem& ts,
                                           const VerdictParams& params) {
  ns.require_sparse();
  if (!ts.bessel_weighted())
    throw Error(ErrorKind::NotBesselWeighted, "invertibility analysis needs Bessel weights");
  const Index N = ns.size();
  InvertibilityVerdict out;
  out.adjustment = "none";

  out.perturbation = classify_perturbation(ns, ts, params.M, params.exception_cap);
  for (Real M = params.M * 10.0; out.perturbation.kind == PerturbationKind::none && M <= 1e3 * (1 + 1e-12);
       M *= 10.0) {
    PerturbationClass next = classify_perturbation(ns, ts, M, params.exception_cap);
    if (next.exceptions.size() >= out.perturbation.exceptions.size()) break;
    out.perturbation = std::move(next);
  }
  const PerturbationClass& pc = out.perturbation;

  out.regime = detect_regime(ns, params.growth_tol);
  if (out.regime == Regime::none) {
    out.verdict = Verdict::inconclusive;
    out.reason = "RegimeUndetected";
    return out;
  }

  // Aligned statistics over nested prefixes.
  const CumulantTable cum = cumulants(ns);
  const Index J = ts.size();
  std::vector<Real> wq(static_cast<std::size_t>(J));
  for (Index k = 0; k < J; ++k) {
    const Real m = ts.points().modulus(k);
    wq[static_cast<std::size_t>(k)] = m > 0.0 ? sq_ratio(ts.weights()[k], m) : 0.0;
  }
  for (Index level : trend_levels(N)) {
    Real sup = 0.0;
    if (out.regime == Regime::p) {
      out.statistic = "supWP";
      Real p = 0.0;
      std::vector<Real> ptail(static_cast<std::size_t>(level));
      for (Index n = level; n >= 1; --n) {
        ptail[static_cast<std::size_t>(n - 1)] = p;
        p += sq_ratio(ns.weights()[n - 1], ns.nodes().modulus(n - 1));
      }
      for (Index n = 1; n <= level; ++n) {
        Real w = 0.0;
        for (Index k = 0; k < J && pc.n0 + k < n; ++k) w += ts.weights()[k];
        sup = std::max(sup, w * ptail[static_cast<std::size_t>(n - 1)]);
      }
    } else {
      out.statistic = out.regime == Regime::v ? "supVQ" : "supQ";
      for (Index n = 1; n <= level; ++n) {
        Real q = 0.0;
        for (Index k = 0; k < J; ++k) {
          const Index a = pc.n0 + k;
          if (a > n && a <= level) q += wq[static_cast<std::size_t>(k)];
        }
        sup = std::max(sup, out.regime == Regime::v ? cum.V[n - 1] * q : q);
      }
    }
    out.sup_trend.push_back(sup);
  }
  out.sup_stat = out.sup_trend.back();
  out.sup_verdict = plateau_verdict({out.sup_trend}, params.growth_tol);

  const RhoScale scale = out.regime == Regime::p ? RhoScale::P : RhoScale::V;
  out.rho = rho_profile(ns, ts, pc.n0, scale);
  const Real lo = out.rho.exponent_inf, hi = out.rho.exponent_sup;
  const bool below = std::isfinite(hi) && hi <= 1.0 - params.margin;
  const bool above = std::isfinite(lo) && lo >= 1.0 + params.margin;

  auto decide = [&](Verdict v, std::string adj, std::string why) {
    out.verdict = v;
    out.adjustment = std::move(adj);
    out.reason = std::move(why);
  };
  if (out.sup_verdict == BoundVerdict::unbounded_trend) {
    decide(Verdict::not_invertible, "none", out.statistic + " grows");
  } else if (out.sup_verdict == BoundVerdict::inconclusive) {
    decide(Verdict::inconclusive, "none", out.statistic + " trend inconclusive");
  } else if (pc.kind == PerturbationKind::none) {
    decide(Verdict::not_invertible, "none", "not a v-perturbation");
  } else if (pc.amount >= 2) {
    decide(Verdict::not_invertible, "none", "deficiency or excess of two or more");
  } else if (out.regime == Regime::summable) {
    if (pc.kind == PerturbationKind::exact) {
      decide(Verdict::invertible, "none", "exact perturbation with bounded Q");
    } else {
      decide(Verdict::adjust_one_point, pc.kind == PerturbationKind::excess ? "drop-first" : "add-point",
             "one point away from an exact perturbation");
    }
  } else if (!std::isfinite(lo) || !std::isfinite(hi)) {
    decide(Verdict::inconclusive, "none", "no admissible exponent pairs");
  } else {
    // Case (0) wants exponent < 1, case (1) wants exponent > 1. The
    // one-point kind is deficiency in the V-regime and excess in the P-regime.
    const PerturbationKind one = out.regime == Regime::v ? PerturbationKind::deficiency : PerturbationKind::excess;
    const PerturbationKind other = out.regime == Regime::v ? PerturbationKind::excess : PerturbationKind::deficiency;
    const std::string to_one = one == PerturbationKind::deficiency ? "drop-first" : "add-point";
    const std::string to_exact = one == PerturbationKind::deficiency ? "add-point" : "drop-first";
    if (pc.kind == PerturbationKind::exact) {
      if (below) decide(Verdict::invertible, "none", "case (0)");
      else if (above) decide(Verdict::adjust_one_point, to_one, "exponent above 1 with exact alignment");
      else decide(Verdict::inconclusive, "none", "exponent range straddles 1");
    } else if (pc.kind == one) {
      if (above) decide(Verdict::invertible, "none", "case (1)");
      else if (below) decide(Verdict::adjust_one_point, to_exact, "exponent below 1 with shifted alignment");
      else decide(Verdict::inconclusive, "none", "exponent range straddles 1");
    } else if (pc.kind == other) {
      if (below) decide(Verdict::adjust_one_point, other == PerturbationKind::excess ? "drop-first" : "add-point",
                        "exact after one adjustment");
      else decide(Verdict::not_invertible, "none", "alignment incompatible with the regime");
    }
  }

  if (params.run_oracle) {
    OracleCrosscheck& oc = out.oracle;
    oc.sizes = study_sizes(params.sizes, N);
    oc.sigma_min_full.resize(oc.sizes.size());
    const bool drop = out.verdict == Verdict::adjust_one_point && out.adjustment == "drop-first";
    if (drop) oc.sigma_min_adjusted.resize(oc.sizes.size());
    parallel_for(oc.sizes.size(), [&](std::size_t i) {
      oc.sigma_min_full[i] = aligned_sigma_min(ns, ts, pc.n0, oc.sizes[i], pc.n0);
      if (drop) oc.sigma_min_adjusted[i] = aligned_sigma_min(ns, ts, pc.n0, oc.sizes[i], pc.n0 + 1);
    });
    const std::size_t L = oc.sizes.size();
    oc.trend_full = classify_trend(oc.sigma_min_full[L - 2], oc.sigma_min_full[L - 1], params.growth_tol);
    if (drop)
      oc.trend_adjusted =
          classify_trend(oc.sigma_min_adjusted[L - 2], oc.sigma_min_adjusted[L - 1], params.growth_tol);
    switch (out.verdict) {
      case Verdict::invertible: oc.agrees = oc.trend_full == Trend::plateau; break;
      case Verdict::adjust_one_point:
        oc.agrees = oc.trend_full == Trend::decay && (!drop || oc.trend_adjusted == Trend::plateau);
        break;
      case Verdict::not_invertible: oc.agrees = oc.trend_full != Trend::plateau; break;
      case Verdict::inconclusive: oc.agrees = true; break;
    }
  }
  return out;
}

FastVerdict example_fast_tests(const WeightedNodeSet& ns, const TargetSystem& ts, Real margin,
                               Real alignment_cap) {
  FastVerdict fv;
  fv.regime = detect_regime(ns);
  if (fv.regime != Regime::v && fv.regime != Regime::p) {
    fv.reason = "RegimeUndetected";
    return fv;
  }
  const PerturbationClass pc = classify_perturbation(ns, ts);
  const Index N = ns.size();
  const CumulantTable cum = cumulants(ns);
  Real sup = -kInf, inf = kInf, align = 0.0;
  for (Index n = std::max<Index>(N / 2, 1); n <= N; ++n) {
    const Index k = element_for(pc.n0, n, ts.size());
    if (k < 0) continue;
    const Real g = ns.nodes().modulus(n - 1);
    const Real l = ts.points().modulus(k);
    const Real v = ns.weights()[n - 1];
    const Real dist = std::abs(difference(ts.points(), k, ns.nodes(), n - 1)) / g;
    Real c, scale;
    if (fv.regime == Regime::v) {
      scale = cum.V[n - 1] / v;
      c = (g / l - 1.0) * scale;
    } else {
      if (!(cum.P[n - 1] > 0.0)) continue;
      scale = cum.P[n - 1] / sq_ratio(v, g);
      c = (l / g - 1.0) * scale;
    }
    sup = std::max(sup, c);
    inf = std::min(inf, c);
    align = std::max(align, dist * scale);
  }
  if (!std::isfinite(sup)) {
    fv.reason = "no aligned pairs";
    return fv;
  }
  fv.c_limsup = sup;
  fv.c_liminf = inf;
  fv.alignment_constant = align;
  if (align > alignment_cap) {
    fv.reason = "AlignmentViolated";
    return fv;
  }
  const PerturbationKind one = fv.regime == Regime::v ? PerturbationKind::deficiency : PerturbationKind::excess;
  if (pc.kind == PerturbationKind::exact) {
    if (sup <= 0.5 - margin) fv.verdict = Verdict::invertible;
    else if (inf >= 0.5 + margin) fv.verdict = Verdict::adjust_one_point;
  } else if (pc.kind == one) {
    if (inf >= 0.5 + margin) fv.verdict = Verdict::invertible;
    else if (sup <= 0.5 - margin) fv.verdict = Verdict::adjust_one_point;
  } else {
    fv.reason = "alignment is not exact or one-point";
    return fv;
  }
  if (fv.verdict == Verdict::inconclusive) {
    fv.reason = "c_n stays within the margin of 1/2";
    return fv;
  }
  fv.deferred = false;
  return fv;
}

}  // namespace dht
