#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "dht/transform.hpp"

namespace dht {

struct WeightLaw {
  enum class Kind { constant, power, geometric };
  Kind kind = Kind::constant;
  Real param = 1.0;  // constant value, power exponent or geometric ratio

  Real value(Index n) const;
  bool summable() const;
  std::string to_string() const;
  /// "const", "const(c)", "power(alpha)" or "geometric(rho)".
  static WeightLaw parse(const std::string& text);
};

struct GeometricSpec {
  Real q = 2.0;
  Real a = 1.0;
  WeightLaw weight;
  Index N = 20;
};

struct Example1Spec {
  Real c = 0.25;
  Real q = 2.0;
  Index N = 200;
};

struct ClusterSpec {
  Real t_ratio = 8.0;
  Index n_max = 40;
  Real t1 = 64.0;
};

struct PerturbationSpec {
  enum class Law { additive, scaled, rotated, relative };
  Real q = 2.0;
  Real a = 1.0;
  WeightLaw weight;
  Index N = 50;
  Law law = Law::additive;
  Real param = 1.0;
  int n0 = 1;
};

/// Several targets per annulus: lambda = gamma_n + offset for n >= start.
struct SatelliteSpec {
  Real q = 2.0;
  Index N = 50;
  std::vector<Real> offsets = {-1.0, 1.0, 2.0};
  Index start = 3;
};

using FamilySpec = std::variant<GeometricSpec, Example1Spec, ClusterSpec, PerturbationSpec, SatelliteSpec>;

struct Instance {
  WeightedNodeSet ns;
  std::optional<TargetSystem> ts;
  bool summable = false;
};

WeightedNodeSet make_geometric(Real q, Real a, const WeightLaw& weight, Index N);
Instance make_example1(Real c, Real q, Index N);
Instance make_cluster(Real t_ratio, Index n_max, Real t1 = 64.0);
Instance make_perturbation(const PerturbationSpec& spec);
Instance make_satellites(const SatelliteSpec& spec);
Instance make_family(const FamilySpec& spec);

/// Same family with its size parameter (N or n_max) replaced.
FamilySpec with_size(const FamilySpec& spec, Index size);
Index family_size(const FamilySpec& spec);
std::string family_name(const FamilySpec& spec);

enum class MeasureLaw {
  bounded,      // mass 4^n k/n^2 per annulus, atoms away from the node
  flat,         // mass k per annulus
  spread,       // mass 4^n k/n: second condition grows
  near_node,    // mass 4^n k/n^2 at relative distance 1/n^2: first condition grows
};

std::string_view to_string(MeasureLaw law);
MeasureLaw parse_measure_law(const std::string& text);

/// Seeded atoms on a geometric set with ratio 2: one or two per annulus at
/// gamma_n rho e^{i theta}. Atom placement uses only the seed and n, so the
/// atoms of annuli 1..K do not depend on N >= K.
std::vector<Atom> make_random_measure(const WeightedNodeSet& ns, MeasureLaw law, std::uint64_t seed);

}  // namespace dht
