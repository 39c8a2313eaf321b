#include "dht/generators.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace dht {

namespace {

void require_ratio(Real q) {
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(ErrorKind::InvalidRatio, "ratio must exceed 1");
}

void require_size(Index N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "size must be at least 1");
}

// V_n with the convention V_1 = 1 and V_n = v_1 + ... + v_{n-1}.
Real prefix_mass(const WeightLaw& law, Index n, Real& running) {
  const Real out = n <= 1 ? 1.0 : std::max<Real>(1.0, running);
  if (n >= 1) running += law.value(n);
  return out;
}

Real unit_draw(std::mt19937_64& rng) { return static_cast<Real>(rng() >> 11) * 0x1p-53; }

}  // namespace

Real WeightLaw::value(Index n) const {
  switch (kind) {
    case Kind::constant: return param;
    case Kind::power: return std::pow(static_cast<Real>(n), param);
    case Kind::geometric: return std::pow(param, static_cast<Real>(n));
  }
  return param;
}

bool WeightLaw::summable() const {
  switch (kind) {
    case Kind::constant: return false;
    case Kind::power: return param < -1.0;
    case Kind::geometric: return param < 1.0;
  }
  return false;
}

std::string WeightLaw::to_string() const {
  char buf[64];
  switch (kind) {
    case Kind::constant:
      if (param == 1.0) return "const";
      std::snprintf(buf, sizeof buf, "const(%.17g)", param);
      return buf;
    case Kind::power: std::snprintf(buf, sizeof buf, "power(%.17g)", param); return buf;
    case Kind::geometric: std::snprintf(buf, sizeof buf, "geometric(%.17g)", param); return buf;
  }
  return "const";
}

WeightLaw WeightLaw::parse(const std::string& text) {
  WeightLaw w;
  if (text == "const") return w;
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    throw Error(ErrorKind::InvalidArgument, "unknown weight law '" + text + "'");
  const std::string name = text.substr(0, open);
  const std::string arg = text.substr(open + 1, text.size() - open - 2);
  char* end = nullptr;
  w.param = std::strtod(arg.c_str(), &end);
  if (arg.empty() || *end != '\0' || !std::isfinite(w.param))
    throw Error(ErrorKind::InvalidArgument, "bad weight-law parameter in '" + text + "'");
  if (name == "const") {
    w.kind = Kind::constant;
    if (!(w.param > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "constant weight must be positive");
  } else if (name == "power") {
    w.kind = Kind::power;
  } else if (name == "geometric") {
    w.kind = Kind::geometric;
    if (!(w.param > 0.0)) throw Error(ErrorKind::NonPositiveWeight, "geometric weight ratio must be positive");
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown weight law '" + text + "'");
  }
  return w;
}

WeightedNodeSet make_geometric(Real q, Real a, const WeightLaw& weight, Index N) {
  require_ratio(q);
  require_size(N);
  if (a == 0.0 || !std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "scale must be nonzero");
  ComplexVector g(N);
  RealVector v(N);
  for (Index n = 1; n <= N; ++n) {
    g[n - 1] = a * std::pow(q, static_cast<Real>(n));
    v[n - 1] = weight.value(n);
    if (!std::isfinite(g[n - 1].real()) || !std::isfinite(v[n - 1]))
      throw Error(ErrorKind::InvalidArgument, "geometric family overflows at n = " + std::to_string(n));
  }

  NodeSetOptions opts;
  const Real r_const = 1.0 / (q * q);
  if (weight.kind == WeightLaw::Kind::constant) {
    const Real c = weight.param / (a * a);
    opts.tail = TailPolicy::closed_form([c, r_const](Index M) {
      return c * std::pow(r_const, static_cast<Real>(M + 1)) / (1.0 - r_const);
    });
  } else if (weight.kind == WeightLaw::Kind::geometric && weight.param * r_const < 1.0) {
    const Real r = weight.param * r_const;
    const Real c = 1.0 / (a * a);
    opts.tail = TailPolicy::closed_form(
        [c, r](Index M) { return c * std::pow(r, static_cast<Real>(M + 1)) / (1.0 - r); });
  } else if (weight.kind == WeightLaw::Kind::power && N >= 5) {
    RealVector terms(N);
    for (Index n = 0; n < N; ++n) {
      const Real r = std::sqrt(v[n]) / std::abs(g[n]);
      terms[n] = r * r;
    }
    try {
      tail_sums(terms, TailPolicy::geometric_extrapolate());
      opts.tail = TailPolicy::geometric_extrapolate();
    } catch (const Error&) {
      opts.tail = TailPolicy::hard_truncate();
    }
  }
  return build_node_set(g, v, opts);
}

Instance make_example1(Real c, Real q, Index N) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "c must be non-negative");
  require_ratio(q);
  require_size(N);
  const WeightLaw one;
  Instance inst;
  inst.ns = make_geometric(q, 1.0, one, N);
  ComplexVector lam(N);
  Real running = 0.0;
  for (Index n = 1; n <= N; ++n) {
    const Real V = prefix_mass(one, n, running);
    const Complex g = inst.ns.nodes()[n - 1];
    lam[n - 1] = c == 0.0 ? g * Complex(1.0, 1e-6) : g / (1.0 + c / V);
  }
  inst.ts = make_bessel_target(inst.ns, PointList(lam), 1);
  return inst;
}

Instance make_cluster(Real t_ratio, Index n_max, Real t1) {
  require_ratio(t_ratio);
  require_size(n_max);
  if (!(t1 > 1.0) || !std::isfinite(t1)) throw Error(ErrorKind::ClusterOverlap, "t1 must exceed 1");

  std::vector<Real> t(static_cast<std::size_t>(n_max));
  for (Index n = 1; n <= n_max; ++n) {
    t[static_cast<std::size_t>(n - 1)] = t1 * std::pow(t_ratio, static_cast<Real>(n - 1));
    if (!std::isfinite(t[static_cast<std::size_t>(n - 1)]))
      throw Error(ErrorKind::InvalidArgument, "cluster anchors overflow");
  }
  auto top_s = [](Index n) { return static_cast<int>(std::floor(std::log2(static_cast<Real>(n)))); };
  // Cluster n spans [t_n, t_n + n - 1]; the targets below cluster n+1 reach down to t_{n+1} - 2^s.
  if (t1 - std::ldexp(1.0, top_s(1)) <= 0.0)
    throw Error(ErrorKind::ClusterOverlap, "first target is not positive");
  for (Index n = 1; n < n_max; ++n) {
    const Real gap = t[static_cast<std::size_t>(n)] - t[static_cast<std::size_t>(n - 1)];
    if (!(gap > static_cast<Real>(n - 1) + std::ldexp(1.0, top_s(n + 1))))
      throw Error(ErrorKind::ClusterOverlap, "cluster " + std::to_string(n) + " overlaps the next targets");
  }

  std::vector<Complex> ga, go, la, lo;
  for (Index n = 1; n <= n_max; ++n) {
    const Real tn = t[static_cast<std::size_t>(n - 1)];
    for (Index l = 1; l <= n; ++l) {
      ga.emplace_back(tn);
      go.emplace_back(static_cast<Real>(l - 1));
    }
    for (int s = 0; s <= top_s(n); ++s) {
      la.emplace_back(tn);
      lo.emplace_back(-std::ldexp(1.0, s));
    }
  }
  auto to_vec = [](const std::vector<Complex>& x) {
    return ComplexVector(Eigen::Map<const ComplexVector>(x.data(), static_cast<Index>(x.size())));
  };
  NodeSetOptions opts;
  opts.cluster_exempt = true;
  Instance inst;
  inst.ns = build_node_set(PointList(to_vec(ga), to_vec(go)), RealVector::Ones(static_cast<Index>(ga.size())), opts);
  inst.ts = make_bessel_target(inst.ns, PointList(to_vec(la), to_vec(lo)), 1);
  return inst;
}

Instance make_perturbation(const PerturbationSpec& spec) {
  require_ratio(spec.q);
  require_size(spec.N);
  if (spec.n0 > spec.N) throw Error(ErrorKind::InvalidArgument, "n0 exceeds N");
  Instance inst;
  inst.ns = make_geometric(spec.q, spec.a, spec.weight, spec.N);
  inst.summable = spec.weight.summable();
  std::vector<Complex> lam, off;
  Real running = 0.0;
  for (Index n = 1; n < spec.n0; ++n) prefix_mass(spec.weight, n, running);
  for (Index n = spec.n0; n <= spec.N; ++n) {
    const Real V = prefix_mass(spec.weight, n, running);
    const Complex g = spec.a * std::pow(spec.q, static_cast<Real>(n));
    off.emplace_back(0.0);
    switch (spec.law) {
      case PerturbationSpec::Law::additive:
        lam.push_back(g);
        off.back() = spec.param;
        break;
      case PerturbationSpec::Law::scaled: lam.push_back(g * spec.param); break;
      case PerturbationSpec::Law::rotated: lam.push_back(g * std::polar(1.0, spec.param)); break;
      case PerturbationSpec::Law::relative: {
        const Real vn = n >= 1 ? spec.weight.value(n) : spec.weight.value(1);
        lam.push_back(g / (1.0 + spec.param * vn / V));
        break;
      }
    }
  }
  const Index J = static_cast<Index>(lam.size());
  const ComplexVector lv = Eigen::Map<const ComplexVector>(lam.data(), J);
  const ComplexVector ov = Eigen::Map<const ComplexVector>(off.data(), J);
  inst.ts = make_bessel_target(inst.ns, PointList(lv, ov), spec.n0);
  return inst;
}

Instance make_satellites(const SatelliteSpec& spec) {
  require_ratio(spec.q);
  require_size(spec.N);
  if (spec.offsets.empty()) throw Error(ErrorKind::EmptyInput, "no satellite offsets");
  Instance inst;
  inst.ns = make_geometric(spec.q, 1.0, WeightLaw{}, spec.N);
  std::vector<Complex> anchors, offsets;
  for (Index n = std::max<Index>(spec.start, 1); n <= spec.N; ++n) {
    for (Real o : spec.offsets) {
      anchors.push_back(inst.ns.nodes()[n - 1]);
      offsets.emplace_back(o);
    }
  }
  const auto J = static_cast<Index>(anchors.size());
  inst.ts = make_bessel_target(inst.ns,
                               PointList(Eigen::Map<const ComplexVector>(anchors.data(), J),
                                         Eigen::Map<const ComplexVector>(offsets.data(), J)),
                               1);
  return inst;
}

Instance make_family(const FamilySpec& spec) {
  struct Visitor {
    Instance operator()(const GeometricSpec& s) const {
      Instance inst;
      inst.ns = make_geometric(s.q, s.a, s.weight, s.N);
      inst.summable = s.weight.summable();
      return inst;
    }
    Instance operator()(const Example1Spec& s) const { return make_example1(s.c, s.q, s.N); }
    Instance operator()(const ClusterSpec& s) const { return make_cluster(s.t_ratio, s.n_max, s.t1); }
    Instance operator()(const PerturbationSpec& s) const { return make_perturbation(s); }
    Instance operator()(const SatelliteSpec& s) const { return make_satellites(s); }
  };
  return std::visit(Visitor{}, spec);
}

FamilySpec with_size(const FamilySpec& spec, Index size) {
  FamilySpec out = spec;
  std::visit(
      [size](auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ClusterSpec>) {
          s.n_max = size;
        } else {
          s.N = size;
        }
      },
      out);
  return out;
}

Index family_size(const FamilySpec& spec) {
  return std::visit(
      [](const auto& s) -> Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ClusterSpec>) {
          return s.n_max;
        } else {
          return s.N;
        }
      },
      spec);
}

std::string family_name(const FamilySpec& spec) {
  static const char* names[] = {"geometric", "example1", "cluster", "perturbation", "satellites"};
  return names[spec.index()];
}

std::string_view to_string(MeasureLaw law) {
  switch (law) {
    case MeasureLaw::bounded: return "bounded";
    case MeasureLaw::flat: return "flat";
    case MeasureLaw::spread: return "spread";
    case MeasureLaw::near_node: return "near-node";
  }
  return "unknown";
}

MeasureLaw parse_measure_law(const std::string& text) {
  for (MeasureLaw m : {MeasureLaw::bounded, MeasureLaw::flat, MeasureLaw::spread, MeasureLaw::near_node})
    if (to_string(m) == text) return m;
  throw Error(ErrorKind::InvalidArgument, "unknown measure law '" + text + "'");
}

std::vector<Atom> make_random_measure(const WeightedNodeSet& ns, MeasureLaw law, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Atom> atoms;
  constexpr Real pi = std::numbers::pi;
  for (Index n = 1; n <= ns.size(); ++n) {
    const Complex g = ns.nodes()[n - 1];
    const Real g2 = std::norm(g);
    const Real nn = static_cast<Real>(n);
    const int count = 1 + static_cast<int>(rng() & 1u);
    for (int k = 0; k < 2; ++k) {
      const Real u_rho = unit_draw(rng), u_theta = unit_draw(rng), u_mass = unit_draw(rng);
      if (k >= count) continue;
      const Real kappa = 0.5 + 1.5 * u_mass;
      const Real theta = pi / 6.0 + u_theta * (5.0 * pi / 3.0);
      Atom a;
      switch (law) {
        case MeasureLaw::bounded:
          a.z = g * std::polar(0.8 + 0.6 * u_rho, theta);
          a.mass = g2 * kappa / (nn * nn);
          break;
        case MeasureLaw::flat:
          a.z = g * std::polar(0.8 + 0.6 * u_rho, theta);
          a.mass = kappa * ns.weights()[n - 1];
          break;
        case MeasureLaw::spread:
          a.z = g * std::polar(0.8 + 0.6 * u_rho, theta);
          a.mass = g2 * kappa / nn;
          break;
        case MeasureLaw::near_node: {
          const Real rel = std::min(0.25, 1.0 / (nn * nn)) * (0.5 + 0.5 * u_rho);
          a.z = g * (1.0 + std::polar(rel, theta));
          a.mass = g2 * kappa / (nn * nn);
          break;
        }
      }
      atoms.push_back(a);
    }
  }
  return atoms;
}

}  // namespace dht
