#include "dht/transform.hpp"

#include <cmath>
#include <limits>

namespace dht {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

Real node_tail_mass(const WeightedNodeSet& ns) {
  if (ns.default_tail().kind == TailPolicy::Kind::hard) return 0.0;
  return cumulants(ns).tail_mass;
}

// 1/d computed as conj(d)/|d|/|d| so that |d|^2 never overflows.
Complex reciprocal(Complex d) {
  const Real m = std::abs(d);
  return std::conj(d) / m / m;
}

}  // namespace

CoefficientVector::CoefficientVector(const WeightedNodeSet& ns, ComplexVector a)
    : entries(std::move(a)) {
  if (entries.size() != ns.size())
    throw Error(ErrorKind::InvalidArgument, "coefficient length differs from node count");
  Real s = 0.0;
  for (Index n = 0; n < entries.size(); ++n) s += std::norm(entries[n]) * ns.weights()[n];
  norm_v = std::sqrt(s);
}

Evaluation evaluate(const WeightedNodeSet& ns, const CoefficientVector& a, Complex z) {
  const Index n = ns.size();
  if (a.entries.size() != n)
    throw Error(ErrorKind::InvalidArgument, "coefficient length differs from node count");
  Evaluation out{Complex(0.0), 0.0};
  for (Index k = 0; k < n; ++k) {
    if (coincident(z, ns.nodes(), k))
      throw Error(ErrorKind::EvaluationAtNode, "z coincides with node " + std::to_string(k + 1));
    out.value += a.entries[k] * ns.weights()[k] * reciprocal(difference(z, ns.nodes(), k));
  }
  const Real tail = node_tail_mass(ns);
  out.tail_kernel = std::abs(z) <= 0.5 * ns.nodes().modulus(n - 1) ? 4.0 * tail : kInf;
  return out;
}

BesselWeights bessel_weights(const WeightedNodeSet& ns, const PointList& lambda) {
  const Index n = ns.size();
  const Index J = lambda.size();
  const Real tail = node_tail_mass(ns);
  const Real edge = 0.5 * ns.nodes().modulus(n - 1);
  BesselWeights out;
  out.w.resize(J);
  out.tail_truncated.assign(static_cast<std::size_t>(J), false);
  for (Index j = 0; j < J; ++j) {
    Real s = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (coincident(lambda, j, ns.nodes(), k))
        throw Error(ErrorKind::EvaluationAtNode,
                    "target " + std::to_string(j + 1) + " coincides with node " + std::to_string(k + 1));
      const Real r = std::sqrt(ns.weights()[k]) / std::abs(difference(lambda, j, ns.nodes(), k));
      s += r * r;
    }
    if (tail > 0.0 && lambda.modulus(j) <= edge) {
      s += 4.0 * tail;
    } else {
      out.tail_truncated[static_cast<std::size_t>(j)] = true;
    }
    out.w[j] = 1.0 / s;
  }
  return out;
}

TargetSystem make_bessel_target(const WeightedNodeSet& ns, PointList points, int offset) {
  RealVector w = bessel_weights(ns, points).w;
  return make_target_system(std::move(points), std::move(w), offset, true);
}

TruncatedOperator truncated_operator(const WeightedNodeSet& ns, const TargetSystem& ts) {
  const Index J = ts.size();
  const Index N = ns.size();
  TruncatedOperator op;
  op.matrix.resize(J, N);
  for (Index n = 0; n < N; ++n) {
    const Real sv = std::sqrt(ns.weights()[n]);
    for (Index j = 0; j < J; ++j) {
      if (coincident(ts.points(), j, ns.nodes(), n))
        throw Error(ErrorKind::EvaluationAtNode,
                    "target " + std::to_string(j + 1) + " coincides with node " + std::to_string(n + 1));
      const Complex d = difference(ts.points(), j, ns.nodes(), n);
      const Real m = std::abs(d);
      op.matrix(j, n) = (std::sqrt(ts.weights()[j]) / m) * sv * (std::conj(d) / m);
    }
  }
  return op;
}

WitnessBounds witness_lower_bounds(const WeightedNodeSet& ns, const TargetSystem& ts) {
  const Index N = ns.size();
  const Index J = ts.size();
  const RealVector& v = ns.weights();

  // Hc^{(n)}(lambda_j) = sum_{m<n} v_m/(lambda_j - gamma_m): running prefix sums.
  // Ha^{(n)}(lambda_j) = sum_{m>n} v_m/(conj(gamma_m)(lambda_j - gamma_m)): suffix sums.
  RealVector prefix_energy = RealVector::Zero(N + 1);
  RealVector suffix_energy = RealVector::Zero(N + 1);
  for (Index j = 0; j < J; ++j) {
    const Real w = ts.weights()[j];
    Complex acc(0.0);
    for (Index m = 0; m < N; ++m) {
      acc += v[m] * reciprocal(difference(ts.points(), j, ns.nodes(), m));
      prefix_energy[m + 1] += w * std::norm(acc);
    }
    acc = Complex(0.0);
    for (Index m = N - 1; m >= 0; --m) {
      if (ns.nodes()[m] == Complex(0.0)) continue;
      acc += v[m] * reciprocal(std::conj(ns.nodes()[m])) *
             reciprocal(difference(ts.points(), j, ns.nodes(), m));
      suffix_energy[m] += w * std::norm(acc);
    }
  }

  WitnessBounds out;
  out.prefix_quotients = RealVector::Zero(N);
  out.tail_quotients = RealVector::Zero(N);
  Real mass = 0.0;
  for (Index n = 2; n <= N + 1; ++n) {
    mass += v[n - 2];
    // prefix_energy[n-1] holds the energy of the sum over m <= n-1.
    out.prefix_quotients[n - 2] = std::sqrt(prefix_energy[n - 1] / mass);
  }
  Real tail = 0.0;
  for (Index n = N - 1; n >= 0; --n) {
    if (ns.nodes().modulus(n) == 0.0) continue;
    const Real r = std::sqrt(v[n]) / ns.nodes().modulus(n);
    tail += r * r;
    // suffix_energy[n] holds the energy of the sum over m >= n+1 (1-based).
    out.tail_quotients[n] = std::sqrt(suffix_energy[n] / tail);
  }
  out.best = 0.0;
  if (out.prefix_quotients.size() > 0) out.best = out.prefix_quotients.maxCoeff();
  if (out.tail_quotients.size() > 0) out.best = std::max(out.best, out.tail_quotients.maxCoeff());
  return out;
}

WitnessBounds witness_lower_bounds(const WeightedNodeSet& ns, const std::vector<Atom>& atoms) {
  return witness_lower_bounds(ns, target_from_atoms(atoms));
}

}  // namespace dht
