#include "dht/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dht/config.hpp"

namespace dht {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

// (sqrt(v)/|z|)^2 without forming |z|^2.
Real scaled_inverse_square(Real weight, Real modulus) {
  const Real r = std::sqrt(weight) / modulus;
  return r * r;
}

}  // namespace

PointList::PointList(ComplexVector values)
    : anchors_(std::move(values)), offsets_(ComplexVector::Zero(anchors_.size())) {}

PointList::PointList(ComplexVector anchors, ComplexVector offsets)
    : anchors_(std::move(anchors)), offsets_(std::move(offsets)) {
  if (anchors_.size() != offsets_.size())
    throw Error(ErrorKind::InvalidArgument, "anchor and offset lengths differ");
}

ComplexVector PointList::values() const { return anchors_ + offsets_; }

bool PointList::has_offsets() const {
  return (offsets_.array() != Complex(0.0)).any();
}

PointList PointList::select(const IndexList& idx) const {
  ComplexVector a(static_cast<Index>(idx.size())), o(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    a[static_cast<Index>(k)] = anchors_[idx[k]];
    o[static_cast<Index>(k)] = offsets_[idx[k]];
  }
  return PointList(std::move(a), std::move(o));
}

PointList PointList::head(Index n) const {
  return PointList(anchors_.head(n), offsets_.head(n));
}

Complex difference(const PointList& a, Index i, const PointList& b, Index j) {
  return (a.anchor(i) - b.anchor(j)) + (a.offset(i) - b.offset(j));
}

Complex difference(Complex z, const PointList& b, Index j) {
  return (z - b.anchor(j)) - b.offset(j);
}

bool coincident(const PointList& a, Index i, const PointList& b, Index j) {
  const Complex d = difference(a, i, b, j);
  const Real scale = a.anchor(i) == b.anchor(j)
                         ? std::max(std::abs(a.offset(i)), std::abs(b.offset(j)))
                         : std::abs(b[j]);
  return std::abs(d) <= kCoincidenceTol * scale;
}

bool coincident(Complex z, const PointList& b, Index j) {
  return std::abs(difference(z, b, j)) <= kCoincidenceTol * std::abs(b[j]);
}

IndexList modulus_order(const PointList& points) {
  IndexList order(static_cast<std::size_t>(points.size()));
  std::iota(order.begin(), order.end(), Index{0});
  auto key = [&](Index i) {
    const Complex z = points[i];
    return std::make_tuple(std::abs(z), std::arg(z), points.offset(i).real(),
                           points.offset(i).imag());
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return key(x) < key(y); });
  return order;
}

TailPolicy TailPolicy::hard_truncate() { return TailPolicy{}; }

TailPolicy TailPolicy::geometric_extrapolate(Real ratio, int window) {
  TailPolicy p;
  p.kind = Kind::geometric;
  p.ratio = ratio;
  p.window = window;
  return p;
}

TailPolicy TailPolicy::closed_form(std::function<Real(Index)> tail) {
  TailPolicy p;
  p.kind = Kind::closed;
  p.tail = std::move(tail);
  return p;
}

std::string_view to_string(TailPolicy::Kind kind) {
  switch (kind) {
    case TailPolicy::Kind::hard: return "hard-truncate";
    case TailPolicy::Kind::geometric: return "geometric-extrapolate";
    case TailPolicy::Kind::closed: return "closed-form";
  }
  return "unknown";
}

WeightedNodeSet build_node_set(PointList points, RealVector weights, NodeSetOptions options) {
  const Index n = points.size();
  if (n == 0) throw Error(ErrorKind::EmptyInput, "node set needs at least one point");
  if (weights.size() != n)
    throw Error(ErrorKind::InvalidArgument, "points and weights differ in length");
  for (Index i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw Error(ErrorKind::NonPositiveWeight, "weight " + std::to_string(i));
    if (!std::isfinite(points[i].real()) || !std::isfinite(points[i].imag()))
      throw Error(ErrorKind::InvalidArgument, "non-finite point " + std::to_string(i));
  }

  const IndexList order = modulus_order(points);
  WeightedNodeSet ns;
  ns.nodes_ = points.select(order);
  ns.weights_.resize(n);
  for (Index i = 0; i < n; ++i) ns.weights_[i] = weights[order[static_cast<std::size_t>(i)]];

  for (Index i = 0; i + 1 < n; ++i)
    if (coincident(ns.nodes_, i + 1, ns.nodes_, i))
      throw Error(ErrorKind::DuplicatePoint, "nodes " + std::to_string(i) + " and " +
                                                 std::to_string(i + 1) + " coincide");
  if (n > 1 && ns.nodes_[0] == Complex(0.0))
    throw Error(ErrorKind::InvalidArgument, "node at the origin in a set with N > 1");

  ns.sparseness_ = kInf;
  for (Index i = 0; i + 1 < n; ++i)
    ns.sparseness_ = std::min(ns.sparseness_, ns.nodes_.modulus(i + 1) / ns.nodes_.modulus(i));

  ns.admissibility_ = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Real m = ns.nodes_.modulus(i);
    ns.admissibility_ += m > 1.0 ? scaled_inverse_square(ns.weights_[i], m) / (1.0 + 1.0 / (m * m))
                                 : ns.weights_[i] / (1.0 + m * m);
  }
  ns.cluster_exempt_ = options.cluster_exempt;
  ns.tail_ = std::move(options.tail);
  return ns;
}

WeightedNodeSet build_node_set(const ComplexVector& points, const RealVector& weights,
                               NodeSetOptions options) {
  return build_node_set(PointList(points), weights, std::move(options));
}

void WeightedNodeSet::require_sparse() const {
  if (cluster_exempt_)
    throw Error(ErrorKind::SparsenessViolation, "cluster node sets are oracle-only");
  if (!(sparseness_ > 1.0))
    throw Error(ErrorKind::SparsenessViolation,
                "sparseness ratio " + std::to_string(sparseness_) + " is not above 1");
}

WeightedNodeSet WeightedNodeSet::prefix(Index n) const {
  if (n < 1 || n > size()) throw Error(ErrorKind::InvalidArgument, "prefix length out of range");
  NodeSetOptions opts{cluster_exempt_, tail_};
  return build_node_set(nodes_.head(n), weights_.head(n), std::move(opts));
}

AnnulusPartition::AnnulusPartition(const WeightedNodeSet& ns) {
  const Index n = ns.size();
  const PointList& g = ns.nodes();
  radii_.resize(n);
  for (Index i = 0; i + 1 < n; ++i) radii_[i] = 0.5 * (g.modulus(i) + g.modulus(i + 1));
  if (n == 1) {
    radii_[0] = kInf;
  } else {
    const Real s = g.modulus(n - 1) / g.modulus(n - 2);
    radii_[n - 1] = 0.5 * g.modulus(n - 1) * (1.0 + s);
  }
}

AnnulusPartition::Location AnnulusPartition::locate(Real modulus) const {
  const Index n = radii_.size();
  Location loc;
  const Real* begin = radii_.data();
  const Index k = static_cast<Index>(std::upper_bound(begin, begin + n, modulus) - begin);
  if (k >= n) {
    loc.annulus = n;
    loc.beyond = true;
  } else {
    loc.annulus = k + 1;
  }
  for (Index b : {k - 1, k}) {
    if (b < 0 || b >= n || !std::isfinite(radii_[b])) continue;
    if (std::abs(modulus - radii_[b]) <= kBoundaryTol * radii_[b]) loc.near_boundary = true;
  }
  return loc;
}

TailSums tail_sums(const RealVector& terms, const TailPolicy& policy) {
  const Index n = terms.size();
  TailSums out;
  out.sums = RealVector::Zero(n);
  if (n == 0) return out;

  switch (policy.kind) {
    case TailPolicy::Kind::hard: {
      out.tail_mass = 0.0;
      if (n >= 2 && terms[n - 2] > 0.0) {
        const Real r = terms[n - 1] / terms[n - 2];
        out.remainder = r < 1.0 ? terms[n - 1] * r / (1.0 - r) : kInf;
      }
      break;
    }
    case TailPolicy::Kind::closed: {
      if (!policy.tail) throw Error(ErrorKind::InvalidArgument, "closed-form tail without expression");
      out.tail_mass = policy.tail(n);
      if (!(out.tail_mass >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "closed-form tail must be nonnegative");
      break;
    }
    case TailPolicy::Kind::geometric: {
      const Index k = policy.window;
      if (k < 1 || n < k + 1)
        throw Error(ErrorKind::ExtrapolationUnstable, "prefix shorter than the ratio window");
      Real lo = kInf, hi = 0.0, log_sum = 0.0;
      for (Index i = n - k; i < n; ++i) {
        if (!(terms[i - 1] > 0.0))
          throw Error(ErrorKind::ExtrapolationUnstable, "zero term inside the ratio window");
        const Real r = terms[i] / terms[i - 1];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        log_sum += std::log(r);
      }
      if (hi / lo - 1.0 > 0.2)
        throw Error(ErrorKind::ExtrapolationUnstable, "ratios in the window vary by more than 20%");
      const Real r = policy.ratio > 0.0 ? policy.ratio : std::exp(log_sum / static_cast<Real>(k));
      if (!(r < 1.0) || !(hi < 1.0))
        throw Error(ErrorKind::ExtrapolationUnstable, "terms are not decaying geometrically");
      const Real last = terms[n - 1];
      out.tail_mass = last * r / (1.0 - r);
      out.remainder = std::abs(last * hi / (1.0 - hi) - last * lo / (1.0 - lo));
      break;
    }
  }

  Real acc = out.tail_mass;
  out.sums[n - 1] = acc;
  for (Index i = n - 2; i >= 0; --i) {
    acc += terms[i + 1];
    out.sums[i] = acc;
  }
  return out;
}

CumulantTable cumulants(const WeightedNodeSet& ns, const TailPolicy& policy) {
  const Index n = ns.size();
  CumulantTable t;
  t.policy = policy.kind;
  t.V.resize(n);
  Real acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    t.V[i] = i == 0 ? 1.0 : acc;
    acc += ns.weights()[i];
  }
  RealVector terms(n);
  for (Index i = 0; i < n; ++i)
    terms[i] = scaled_inverse_square(ns.weights()[i], ns.nodes().modulus(i));
  TailSums ts = tail_sums(terms, policy);
  t.P = std::move(ts.sums);
  t.tail_mass = ts.tail_mass;
  t.remainder_bound = RealVector::Constant(n, ts.remainder);
  return t;
}

CumulantTable cumulants(const WeightedNodeSet& ns) { return cumulants(ns, ns.default_tail()); }

AnnulusMeasure discrete_measure(const std::vector<Atom>& atoms, const WeightedNodeSet& ns) {
  const Index n = ns.size();
  AnnulusMeasure mu;
  mu.mass = RealVector::Zero(n);
  mu.inv_sq = RealVector::Zero(n);
  mu.local = RealVector::Zero(n);
  const AnnulusPartition part(ns);
  for (const Atom& a : atoms) {
    if (!(a.mass > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "atom mass must be positive");
    for (Index j = 0; j < n; ++j)
      if (coincident(a.z, ns.nodes(), j))
        throw Error(ErrorKind::AtomOnNode, "atom coincides with node " + std::to_string(j + 1));
    const auto loc = part.locate(std::abs(a.z));
    const Index k = loc.annulus - 1;
    mu.beyond_count += loc.beyond ? 1 : 0;
    mu.near_boundary_count += loc.near_boundary ? 1 : 0;
    mu.mass[k] += a.mass;
    mu.inv_sq[k] += scaled_inverse_square(a.mass, std::abs(a.z));
    mu.local[k] += scaled_inverse_square(a.mass, std::abs(difference(a.z, ns.nodes(), k)));
  }
  return mu;
}

TargetSystem make_target_system(PointList points, RealVector weights, int offset,
                                bool bessel_weighted, const TailPolicy& policy) {
  const Index n = points.size();
  if (weights.size() != n)
    throw Error(ErrorKind::InvalidArgument, "points and weights differ in length");
  for (Index i = 0; i < n; ++i)
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw Error(ErrorKind::NonPositiveWeight, "target weight " + std::to_string(i));

  const IndexList order = modulus_order(points);
  TargetSystem ts;
  ts.points_ = points.select(order);
  ts.weights_.resize(n);
  for (Index i = 0; i < n; ++i) ts.weights_[i] = weights[order[static_cast<std::size_t>(i)]];
  for (Index i = 0; i + 1 < n; ++i)
    if (coincident(ts.points_, i + 1, ts.points_, i))
      throw Error(ErrorKind::DuplicatePoint, "target points " + std::to_string(i) + " and " +
                                                 std::to_string(i + 1) + " coincide");
  ts.offset_ = offset;
  ts.bessel_ = bessel_weighted;
  ts.tail_ = policy;

  ts.W_.resize(n);
  Real acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    ts.W_[i] = acc;
    acc += ts.weights_[i];
  }
  RealVector terms(n);
  for (Index i = 0; i < n; ++i) {
    const Real m = ts.points_.modulus(i);
    terms[i] = m > 0.0 ? scaled_inverse_square(ts.weights_[i], m) : 0.0;
  }
  if (n > 0) {
    TailSums q = tail_sums(terms, policy);
    ts.Q_ = std::move(q.sums);
    ts.q_remainder_ = q.remainder;
  }
  return ts;
}

TargetSystem TargetSystem::select(const IndexList& idx) const {
  RealVector w(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) w[static_cast<Index>(k)] = weights_[idx[k]];
  const int off = idx.empty() ? offset_ : offset_ + static_cast<int>(idx.front());
  return make_target_system(points_.select(idx), std::move(w), off, bessel_);
}

TargetSystem target_from_atoms(const std::vector<Atom>& atoms) {
  ComplexVector z(static_cast<Index>(atoms.size()));
  for (std::size_t k = 0; k < atoms.size(); ++k) z[static_cast<Index>(k)] = atoms[k].z;
  const PointList raw(z);
  const IndexList order = modulus_order(raw);
  std::vector<Complex> pts;
  std::vector<Real> mass;
  for (Index i : order) {
    const Atom& a = atoms[static_cast<std::size_t>(i)];
    if (!(a.mass > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "atom mass must be positive");
    if (!pts.empty() && pts.back() == a.z) {
      mass.back() += a.mass;
    } else {
      pts.push_back(a.z);
      mass.push_back(a.mass);
    }
  }
  ComplexVector p = Eigen::Map<ComplexVector>(pts.data(), static_cast<Index>(pts.size()));
  RealVector w = Eigen::Map<RealVector>(mass.data(), static_cast<Index>(mass.size()));
  return make_target_system(PointList(std::move(p)), std::move(w));
}

}  // namespace dht
