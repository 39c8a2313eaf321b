#include <doctest.h>

#include <cmath>

#include "dht/core.hpp"
#include "dht/generators.hpp"

using namespace dht;

namespace {

WeightedNodeSet powers_of_two(Index N, NodeSetOptions opts = {}) {
  ComplexVector g(N);
  for (Index n = 0; n < N; ++n) g[n] = std::ldexp(1.0, static_cast<int>(n + 1));
  return build_node_set(g, RealVector::Ones(N), opts);
}

}  // namespace

TEST_CASE("build_node_set sorts, measures sparseness and admissibility") {
  ComplexVector g(3);
  g << 8.0, 2.0, 4.0;
  const auto ns = build_node_set(g, RealVector::Ones(3));
  CHECK(ns.nodes()[0] == Complex(2.0));
  CHECK(ns.nodes()[2] == Complex(8.0));
  CHECK(ns.sparseness_ratio() == doctest::Approx(2.0));

  ComplexVector one(1);
  one << 1.0;
  CHECK(std::isinf(build_node_set(one, RealVector::Ones(1)).sparseness_ratio()));

  // Independent sum of 1/(1 + 4^n), n = 1..20, in long double.
  long double adm = 0.0L;
  for (int n = 1; n <= 20; ++n) adm += 1.0L / (1.0L + std::pow(4.0L, n));
  CHECK(static_cast<double>(adm) == doctest::Approx(0.2794002624056570).epsilon(1e-14));
  CHECK(powers_of_two(20).admissibility_sum() == doctest::Approx(static_cast<double>(adm)).epsilon(1e-14));
}

TEST_CASE("build_node_set rejects invalid inputs") {
  ComplexVector g(2);
  g << 2.0, 2.0;
  CHECK_THROWS_AS(build_node_set(g, RealVector::Ones(2)), Error);
  try {
    build_node_set(g, RealVector::Ones(2));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicatePoint);
  }
  g << 2.0, 4.0;
  RealVector w(2);
  w << 1.0, 0.0;
  try {
    build_node_set(g, w);
    FAIL("expected NonPositiveWeight");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveWeight);
  }
  try {
    build_node_set(ComplexVector(0), RealVector(0));
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyInput);
  }
}

TEST_CASE("equal moduli are ordered by argument") {
  ComplexVector g(2);
  g << Complex(0.0, 2.0), Complex(2.0, 0.0);
  const auto ns = build_node_set(g, RealVector::Ones(2), {true, TailPolicy::hard_truncate()});
  CHECK(ns.nodes()[0] == Complex(2.0, 0.0));
  CHECK(ns.nodes()[1] == Complex(0.0, 2.0));
}

TEST_CASE("annulus partition places every node in its own annulus") {
  const auto ns = powers_of_two(30);
  const AnnulusPartition part(ns);
  for (Index n = 0; n < ns.size(); ++n) CHECK(part.annulus_of(ns.nodes()[n]) == n + 1);
  CHECK(part.radii()[0] == doctest::Approx(3.0));
  CHECK(part.radii()[1] == doctest::Approx(6.0));
  // Last edge halfway to the extrapolated next node.
  CHECK(part.radii()[29] == doctest::Approx(std::ldexp(1.0, 30) * 1.5));
  const auto loc = part.locate(3.0);
  CHECK(loc.annulus == 2);
  CHECK(loc.near_boundary);
  CHECK(part.locate(1e40).beyond);
}

TEST_CASE("cumulants under closed-form and hard tails") {
  const auto closed = make_geometric(2.0, 1.0, WeightLaw{}, 20);
  const CumulantTable c = cumulants(closed);
  CHECK(c.V[0] == 1.0);
  CHECK(c.V[4] == 4.0);
  CHECK(c.P[4] == doctest::Approx(std::pow(4.0, -5) / 3.0).epsilon(1e-12));
  for (Index n = 0; n < 20; ++n)
    CHECK(c.P[n] * 3.0 * std::pow(4.0, static_cast<double>(n + 1)) == doctest::Approx(1.0).epsilon(1e-12));

  const CumulantTable h = cumulants(closed, TailPolicy::hard_truncate());
  CHECK(h.P[4] == doctest::Approx((std::pow(4.0, -5) - std::pow(4.0, -20)) / 3.0).epsilon(1e-12));
  CHECK(h.P[19] == 0.0);
  CHECK(h.remainder_bound[0] > 0.0);

  // Naive recomputation of V.
  Real acc = 0.0;
  for (Index n = 1; n < 20; ++n) {
    acc += closed.weights()[n - 1];
    CHECK(c.V[n] == doctest::Approx(acc).epsilon(1e-15));
  }

  ComplexVector one(1);
  one << 2.0;
  const CumulantTable single = cumulants(build_node_set(one, RealVector::Ones(1)));
  CHECK(single.V[0] == 1.0);
  CHECK(single.P[0] == 0.0);
}

TEST_CASE("geometric extrapolation refuses unstable ratios") {
  ComplexVector g(8);
  RealVector v(8);
  for (Index n = 0; n < 8; ++n) {
    g[n] = std::ldexp(1.0, static_cast<int>(n + 1));
    v[n] = (n % 2 == 0) ? 1.0 : 3.0;
  }
  const auto ns = build_node_set(g, v);
  try {
    cumulants(ns, TailPolicy::geometric_extrapolate());
    FAIL("expected ExtrapolationUnstable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ExtrapolationUnstable);
  }
  const auto smooth = powers_of_two(12);
  const CumulantTable c = cumulants(smooth, TailPolicy::geometric_extrapolate());
  CHECK(c.tail_mass == doctest::Approx(std::pow(4.0, -12) / 3.0).epsilon(1e-12));
}

TEST_CASE("discrete measure moments") {
  const auto ns = powers_of_two(20);
  const AnnulusMeasure mu = discrete_measure({{Complex(3.0), 1.0}}, ns);
  CHECK(mu.mass[1] == doctest::Approx(1.0));
  CHECK(mu.inv_sq[1] == doctest::Approx(1.0 / 9.0));
  CHECK(mu.local[1] == doctest::Approx(1.0));
  CHECK(mu.mass[0] == 0.0);

  const AnnulusMeasure empty = discrete_measure({}, ns);
  CHECK(empty.mass.sum() == 0.0);
  CHECK(empty.local.sum() == 0.0);

  try {
    discrete_measure({{Complex(2.0), 1.0}}, ns);
    FAIL("expected AtomOnNode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AtomOnNode);
  }

  // Brute-force moments for a few atoms.
  const std::vector<Atom> atoms = {{Complex(5.0, 1.0), 2.0}, {Complex(-7.0, 0.5), 0.5}, {Complex(0.0, 40.0), 3.0}};
  const AnnulusMeasure m = discrete_measure(atoms, ns);
  const AnnulusPartition part(ns);
  RealVector mass = RealVector::Zero(20), inv = RealVector::Zero(20), loc = RealVector::Zero(20);
  for (const Atom& a : atoms) {
    const Index k = part.annulus_of(a.z) - 1;
    mass[k] += a.mass;
    inv[k] += a.mass / std::norm(a.z);
    loc[k] += a.mass / std::norm(a.z - ns.nodes()[k]);
  }
  for (Index k = 0; k < 20; ++k) {
    CHECK(m.mass[k] == doctest::Approx(mass[k]).epsilon(1e-15));
    CHECK(m.inv_sq[k] == doctest::Approx(inv[k]).epsilon(1e-15));
    CHECK(m.local[k] == doctest::Approx(loc[k]).epsilon(1e-15));
  }
}

TEST_CASE("atoms beyond the outer edge go to the last annulus") {
  const auto ns = powers_of_two(5);
  const AnnulusMeasure mu = discrete_measure({{Complex(1000.0), 1.0}}, ns);
  CHECK(mu.beyond_count == 1);
  CHECK(mu.mass[4] == 1.0);
}

TEST_CASE("target systems carry W and Q") {
  ComplexVector l(3);
  l << 3.0, 5.0, 9.0;
  RealVector w(3);
  w << 1.0, 2.0, 4.0;
  const TargetSystem ts = make_target_system(PointList(l), w, 1);
  CHECK(ts.W()[0] == 0.0);
  CHECK(ts.W()[1] == 1.0);
  CHECK(ts.W()[2] == 3.0);
  CHECK(ts.Q()[0] == doctest::Approx(2.0 / 25.0 + 4.0 / 81.0));
  CHECK(ts.Q()[2] == 0.0);
  const TargetSystem sub = ts.select({1, 2});
  CHECK(sub.size() == 2);
  CHECK(sub.W()[1] == 2.0);
}

TEST_CASE("anchor and offset differences are exact") {
  const Real t = std::ldexp(1.0, 80);
  ComplexVector a(2), o(2);
  a << t, t;
  o << 3.0, -4.0;
  const PointList p(a, o);
  CHECK(difference(p, 0, p, 1) == Complex(7.0));
  CHECK_FALSE(coincident(p, 0, p, 1));
}
