#include "dht/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dht/boundedness.hpp"
#include "dht/oracle.hpp"
#include "dht/transform.hpp"

namespace dht {

namespace {

Real sq_ratio(Real num, Real den) {
  const Real r = std::sqrt(num) / den;
  return r * r;
}

struct Grouping {
  std::vector<IndexList> thin;   // residues of the selected points
  std::vector<IndexList> block;  // residues of the blocks of the rest
};

// One two-stage pass: points with ratio > delta are dealt round-robin into
// n_thin groups; the rest form consecutive blocks of ratio mass in
// [delta, 2 delta) dealt round-robin into n_block groups.
Grouping two_stage(const IndexList& seq, const std::vector<Real>& ratio, Real delta,
                   Index n_thin, Index n_block) {
  Grouping g;
  g.thin.resize(static_cast<std::size_t>(std::min<Index>(n_thin, static_cast<Index>(seq.size()))));
  std::vector<IndexList> blocks;
  IndexList current;
  Real mass = 0.0;
  Index selected = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (ratio[k] > delta) {
      g.thin[static_cast<std::size_t>(selected % n_thin)].push_back(seq[k]);
      ++selected;
      continue;
    }
    current.push_back(seq[k]);
    mass += ratio[k];
    if (mass >= delta) {
      blocks.push_back(std::move(current));
      current.clear();
      mass = 0.0;
    }
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  g.block.resize(static_cast<std::size_t>(std::min<Index>(n_block, static_cast<Index>(blocks.size()))));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    IndexList& dst = g.block[b % static_cast<std::size_t>(n_block)];
    dst.insert(dst.end(), blocks[b].begin(), blocks[b].end());
  }
  for (auto* groups : {&g.thin, &g.block})
    for (auto& grp : *groups) std::sort(grp.begin(), grp.end());
  return g;
}

}  // namespace

std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::zero: return "zero";
    case PointClass::v: return "V";
    case PointClass::p: return "P";
  }
  return "unknown";
}

IndexList SplitVerdict::members(PointClass c) const {
  IndexList out;
  for (std::size_t j = 0; j < class_of.size(); ++j)
    if (class_of[j] == c) out.push_back(static_cast<Index>(j));
  return out;
}

SplitVerdict classify(const WeightedNodeSet& ns, const TargetSystem& ts, const CumulantTable& cum) {
  const AnnulusPartition part(ns);
  const Index J = ts.size();
  SplitVerdict sv;
  sv.class_of.resize(static_cast<std::size_t>(J));
  sv.annulus.resize(static_cast<std::size_t>(J));
  sv.local_term.resize(J);
  sv.v_term.resize(J);
  sv.p_term.resize(J);
  for (Index j = 0; j < J; ++j) {
    const Index n = part.locate(ts.points().modulus(j)).annulus;
    const Index k = n - 1;
    const Real local = sq_ratio(ns.weights()[k], std::abs(difference(ts.points(), j, ns.nodes(), k)));
    const Real vt = sq_ratio(cum.V[k], ts.points().modulus(j));
    const Real pt = cum.P[k];
    sv.annulus[static_cast<std::size_t>(j)] = n;
    sv.local_term[j] = local;
    sv.v_term[j] = vt;
    sv.p_term[j] = pt;
    PointClass c = PointClass::p;
    if (local >= std::max(vt, pt) * (1.0 - kTieSlack)) {
      c = PointClass::zero;
    } else if (vt >= pt * (1.0 - kTieSlack)) {
      c = PointClass::v;
    }
    sv.class_of[static_cast<std::size_t>(j)] = c;
  }
  return sv;
}

SplitVerdict classify(const WeightedNodeSet& ns, const TargetSystem& ts) {
  return classify(ns, ts, cumulants(ns));
}

LacunarityProfile lacunarity_profile(const IndexList& v_annuli, const IndexList& p_annuli,
                                     const CumulantTable& cum) {
  LacunarityProfile lp;
  for (Index n : v_annuli) {
    const long key = static_cast<long>(std::floor(std::log2(cum.V[n - 1])));
    lp.max_v = std::max(lp.max_v, ++lp.v_blocks[key]);
  }
  for (Index n : p_annuli) {
    const Real p = cum.P[n - 1];
    if (!(p > 0.0)) {
      ++lp.unassigned;
      continue;
    }
    const long key = static_cast<long>(std::floor(-std::log2(p)));
    lp.max_p = std::max(lp.max_p, ++lp.p_blocks[key]);
  }
  return lp;
}

LacunarityProfile lacunarity_profile(const SplitVerdict& split, const CumulantTable& cum) {
  IndexList va, pa;
  for (std::size_t j = 0; j < split.class_of.size(); ++j) {
    if (split.class_of[j] == PointClass::v) va.push_back(split.annulus[j]);
    if (split.class_of[j] == PointClass::p) pa.push_back(split.annulus[j]);
  }
  return lacunarity_profile(va, pa, cum);
}

SplitParameters split_parameters(Real epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
  SplitParameters p;
  p.epsilon = epsilon;
  p.delta = epsilon / 16.0;
  p.n_thin = static_cast<Index>(std::ceil(4.0 / (p.delta * epsilon)));
  p.n_block = static_cast<Index>(std::ceil(4.0 / p.delta));
  const Index s = p.n_thin + p.n_block;
  p.k_bound = 3 * s * s;
  return p;
}

PieceCertificate certify_piece(const WeightedNodeSet& ns, const TargetSystem& ts,
                               const IndexList& piece, const SplitOptions& options) {
  const AnnulusPartition part(ns);
  const Index N = ns.size();
  PieceCertificate c;
  c.level_high = N;
  c.level_low = std::max<Index>(N / 2, 1);

  std::vector<Index> where;
  for (Index j : piece) where.push_back(part.locate(ts.points().modulus(j)).annulus);
  std::sort(where.begin(), where.end());
  // A piece living beyond N/2 is compared at the level holding half of its rows.
  if (!where.empty()) c.level_low = std::max(c.level_low, where[(where.size() - 1) / 2]);

  auto sigma_at = [&](Index level, Index& rows) {
    IndexList sel;
    for (Index j : piece)
      if (part.locate(ts.points().modulus(j)).annulus <= level) sel.push_back(j);
    rows = static_cast<Index>(sel.size());
    if (sel.empty() || rows > level) return Real(0.0);
    return singular_extremes(truncated_operator(ns.prefix(level), ts.select(sel))).sigma_min;
  };
  c.sigma_high = sigma_at(c.level_high, c.rows_high);
  c.sigma_low = sigma_at(c.level_low, c.rows_low);
  c.change = relative_change(c.sigma_low, c.sigma_high);
  c.certified = c.rows_low > 0 && c.sigma_high >= options.floor && std::abs(c.change) < options.change_tol;
  return c;
}

FeichtingerSplit feichtinger_split(const WeightedNodeSet& ns, const TargetSystem& ts, Real epsilon,
                                   const SplitOptions& options) {
  FeichtingerSplit out;
  out.params = split_parameters(epsilon);
  if (!ts.bessel_weighted())
    throw Error(ErrorKind::NotBesselWeighted, "splitting needs Bessel weights");
  if (ts.empty()) return out;

  const CumulantTable cum = cumulants(ns);
  const SplitVerdict split = classify(ns, ts, cum);
  const Theorem4Report pre = theorem4_check(ns, ts, options.count_cap, options.growth_tol, &split);
  if (pre.report.verdict == BoundVerdict::unbounded_trend)
    throw Error(ErrorKind::BoundednessPrecheckFailed, "target system fails the boundedness conditions");

  const Real delta = out.params.delta;
  for (PointClass cls : {PointClass::zero, PointClass::v, PointClass::p}) {
    const IndexList seq = split.members(cls);
    if (seq.empty()) continue;
    if (options.certify_whole_class && certify_piece(ns, ts, seq, options).certified) {
      out.pieces.push_back({seq, {cls, "whole-class", 0, "none", 0}});
      continue;
    }

    // W and Q along the class sequence itself.
    const std::size_t S = seq.size();
    std::vector<Real> w_ratio(S), q_ratio_of(static_cast<std::size_t>(ts.size()), 0.0);
    Real W = 0.0;
    for (std::size_t k = 0; k < S; ++k) {
      const Real w = ts.weights()[seq[k]];
      w_ratio[k] = W > 0.0 ? w / W : std::numeric_limits<Real>::infinity();
      W += w;
    }
    Real Q = 0.0;
    for (std::size_t k = S; k-- > 0;) {
      const Index j = seq[k];
      const Real lam = ts.points().modulus(j);
      const Real term = lam > 0.0 ? sq_ratio(ts.weights()[j], lam) : std::numeric_limits<Real>::infinity();
      q_ratio_of[static_cast<std::size_t>(j)] = Q > 0.0 ? term / Q : std::numeric_limits<Real>::infinity();
      Q += term;
    }

    const Grouping first = two_stage(seq, w_ratio, delta, out.params.n_thin, out.params.n_block);
    auto refine = [&](const IndexList& group, const char* stage_a, Index residue_a) {
      if (group.empty()) return;
      std::vector<Real> ratio;
      for (Index j : group) ratio.push_back(q_ratio_of[static_cast<std::size_t>(j)]);
      const Grouping second = two_stage(group, ratio, delta, out.params.n_thin, out.params.n_block);
      for (std::size_t r = 0; r < second.thin.size(); ++r)
        if (!second.thin[r].empty())
          out.pieces.push_back({second.thin[r], {cls, stage_a, residue_a, "step3", static_cast<Index>(r)}});
      for (std::size_t r = 0; r < second.block.size(); ++r)
        if (!second.block[r].empty())
          out.pieces.push_back({second.block[r], {cls, stage_a, residue_a, "step4", static_cast<Index>(r)}});
    };
    for (std::size_t r = 0; r < first.thin.size(); ++r) refine(first.thin[r], "step1", static_cast<Index>(r));
    for (std::size_t r = 0; r < first.block.size(); ++r) refine(first.block[r], "step2", static_cast<Index>(r));
  }
  return out;
}

}  // namespace dht
