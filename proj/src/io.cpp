#include "dht/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace dht {

namespace {

template <typename E>
E parse_enum(const std::string& text, std::initializer_list<E> values) {
  for (E e : values)
    if (to_string(e) == text) return e;
  throw Error(ErrorKind::InvalidArgument, "unknown value '" + text + "'");
}

BoundVerdict bound_verdict_of(const std::string& s) {
  return parse_enum(s, {BoundVerdict::bounded, BoundVerdict::unbounded_trend, BoundVerdict::inconclusive});
}
Trend trend_of(const std::string& s) { return parse_enum(s, {Trend::plateau, Trend::growth, Trend::decay}); }
PointClass class_of(const std::string& s) {
  return parse_enum(s, {PointClass::zero, PointClass::v, PointClass::p});
}

Regime regime_of(const std::string& s) {
  return parse_enum(s, {Regime::v, Regime::p, Regime::summable, Regime::none});
}
Verdict verdict_of(const std::string& s) {
  return parse_enum(s, {Verdict::invertible, Verdict::adjust_one_point, Verdict::not_invertible, Verdict::inconclusive});
}

json reals(const std::vector<Real>& x) {
  json a = json::array();
  for (Real r : x) a.push_back(io::number(r));
  return a;
}
std::vector<Real> reals_of(const json& j) {
  std::vector<Real> out;
  for (const auto& e : j) out.push_back(io::number_of(e));
  return out;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::InvalidArgument, std::string("missing field '") + key + "'");
  return j.at(key);
}

Real real_field(const json& j, const char* key, Real fallback) {
  return j.contains(key) ? io::number_of(j.at(key)) : fallback;
}

Index index_field(const json& j, const char* key, Index fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw Error(ErrorKind::InvalidArgument, std::string("'") + key + "' must be an integer");
  return v.get<Index>();
}

ComplexVector to_vector(const std::vector<Complex>& x) {
  return Eigen::Map<const ComplexVector>(x.data(), static_cast<Index>(x.size()));
}

RealVector weights_of(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "weights must be an array");
  RealVector w(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) w[static_cast<Index>(i)] = io::number_of(j[i]);
  return w;
}

json weights_to_json(const RealVector& w) {
  json a = json::array();
  for (Index i = 0; i < w.size(); ++i) a.push_back(io::number(w[i]));
  return a;
}

std::vector<Atom> atoms_of(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "atoms must be an array");
  std::vector<Atom> atoms;
  for (const auto& a : j) {
    if (!a.is_array() || a.size() != 3)
      throw Error(ErrorKind::InvalidArgument, "atom must be [re, im, mass]");
    atoms.push_back({Complex(io::number_of(a[0]), io::number_of(a[1])), io::number_of(a[2])});
  }
  return atoms;
}

WeightedNodeSet nodes_of(const json& j) {
  NodeSetOptions opts;
  opts.cluster_exempt = j.value("cluster_exempt", false);
  return build_node_set(io::points_from_json(field(j, "points")), weights_of(field(j, "weights")), opts);
}

TargetSystem targets_of(const json& j, const WeightedNodeSet& ns) {
  PointList pts = io::points_from_json(field(j, "points"));
  const int offset = static_cast<int>(index_field(j, "offset", 1));
  if (!j.contains("weights")) return make_bessel_target(ns, std::move(pts), offset);
  return make_target_system(std::move(pts), weights_of(j.at("weights")), offset, j.value("bessel", false));
}

}  // namespace

// ---- reports ----

void to_json(json& j, const TrendPoint& t) {
  j = json{{"n", t.n}, {"local", io::number(t.local)}, {"a2", io::number(t.a2)}};
}
void from_json(const json& j, TrendPoint& t) {
  t.n = j.at("n").get<Index>();
  t.local = io::number_of(j.at("local"));
  t.a2 = io::number_of(j.at("a2"));
}

void to_json(json& j, const BoundednessReport& r) {
  j = json{{"basis", r.basis},
           {"condition_local", io::number(r.condition_local)},
           {"condition_a2", io::number(r.condition_a2)},
           {"tail_slack", io::number(r.tail_slack)},
           {"verdict", to_string(r.verdict)},
           {"trend", r.trend},
           {"beyond_count", r.beyond_count},
           {"near_boundary_count", r.near_boundary_count}};
}
void from_json(const json& j, BoundednessReport& r) {
  r.basis = j.at("basis").get<std::string>();
  r.condition_local = io::number_of(j.at("condition_local"));
  r.condition_a2 = io::number_of(j.at("condition_a2"));
  r.tail_slack = io::number_of(j.at("tail_slack"));
  r.verdict = bound_verdict_of(j.at("verdict").get<std::string>());
  r.trend = j.at("trend").get<std::vector<TrendPoint>>();
  r.beyond_count = j.at("beyond_count").get<Index>();
  r.near_boundary_count = j.at("near_boundary_count").get<Index>();
}

void to_json(json& j, const LacunarityProfile& l) {
  auto blocks = [](const std::map<long, Index>& m) {
    json a = json::array();
    for (const auto& [k, c] : m) a.push_back(json::array({k, c}));
    return a;
  };
  j = json{{"v_blocks", blocks(l.v_blocks)}, {"p_blocks", blocks(l.p_blocks)}, {"max_v", l.max_v},
           {"max_p", l.max_p}, {"unassigned", l.unassigned}};
}
void from_json(const json& j, LacunarityProfile& l) {
  auto blocks = [](const json& a) {
    std::map<long, Index> m;
    for (const auto& e : a) m[e.at(0).get<long>()] = e.at(1).get<Index>();
    return m;
  };
  l.v_blocks = blocks(j.at("v_blocks"));
  l.p_blocks = blocks(j.at("p_blocks"));
  l.max_v = j.at("max_v").get<Index>();
  l.max_p = j.at("max_p").get<Index>();
  l.unassigned = j.at("unassigned").get<Index>();
}

void to_json(json& j, const Theorem4Report& r) {
  j = json{{"report", r.report},       {"count_cap", r.count_cap},   {"max_annulus_count", r.max_annulus_count},
           {"count_trend", r.count_trend}, {"lacunarity", r.lacunarity}, {"zero_count", r.zero_count},
           {"v_count", r.v_count},     {"p_count", r.p_count}};
}
void from_json(const json& j, Theorem4Report& r) {
  r.report = j.at("report").get<BoundednessReport>();
  r.count_cap = j.at("count_cap").get<Index>();
  r.max_annulus_count = j.at("max_annulus_count").get<Index>();
  r.count_trend = j.at("count_trend").get<std::vector<Index>>();
  r.lacunarity = j.at("lacunarity").get<LacunarityProfile>();
  r.zero_count = j.at("zero_count").get<Index>();
  r.v_count = j.at("v_count").get<Index>();
  r.p_count = j.at("p_count").get<Index>();
}

void to_json(json& j, const SplitParameters& p) {
  j = json{{"epsilon", io::number(p.epsilon)}, {"delta", io::number(p.delta)}, {"n_thin", p.n_thin},
           {"n_block", p.n_block}, {"k_bound", p.k_bound}};
}
void from_json(const json& j, SplitParameters& p) {
  p.epsilon = io::number_of(j.at("epsilon"));
  p.delta = io::number_of(j.at("delta"));
  p.n_thin = j.at("n_thin").get<Index>();
  p.n_block = j.at("n_block").get<Index>();
  p.k_bound = j.at("k_bound").get<Index>();
}

void to_json(json& j, const Piece& p) {
  const Provenance& pr = p.provenance;
  j = json{{"indices", p.indices},
           {"class", to_string(pr.cls)},
           {"stage_a", pr.stage_a},
           {"residue_a", pr.residue_a},
           {"stage_b", pr.stage_b},
           {"residue_b", pr.residue_b}};
}
void from_json(const json& j, Piece& p) {
  p.indices = j.at("indices").get<IndexList>();
  p.provenance.cls = class_of(j.at("class").get<std::string>());
  p.provenance.stage_a = j.at("stage_a").get<std::string>();
  p.provenance.residue_a = j.at("residue_a").get<Index>();
  p.provenance.stage_b = j.at("stage_b").get<std::string>();
  p.provenance.residue_b = j.at("residue_b").get<Index>();
}

void to_json(json& j, const FeichtingerSplit& s) { j = json{{"params", s.params}, {"pieces", s.pieces}}; }
void from_json(const json& j, FeichtingerSplit& s) {
  s.params = j.at("params").get<SplitParameters>();
  s.pieces = j.at("pieces").get<std::vector<Piece>>();
}

void to_json(json& j, const PieceCertificate& c) {
  j = json{{"level_low", c.level_low},   {"level_high", c.level_high},
           {"rows_low", c.rows_low},     {"rows_high", c.rows_high},
           {"sigma_low", io::number(c.sigma_low)}, {"sigma_high", io::number(c.sigma_high)},
           {"change", io::number(c.change)},       {"certified", c.certified}};
}
void from_json(const json& j, PieceCertificate& c) {
  c.level_low = j.at("level_low").get<Index>();
  c.level_high = j.at("level_high").get<Index>();
  c.rows_low = j.at("rows_low").get<Index>();
  c.rows_high = j.at("rows_high").get<Index>();
  c.sigma_low = io::number_of(j.at("sigma_low"));
  c.sigma_high = io::number_of(j.at("sigma_high"));
  c.change = io::number_of(j.at("change"));
  c.certified = j.at("certified").get<bool>();
}

void to_json(json& j, const PerturbationClass& p) {
  j = json{{"n0", p.n0},       {"kind", to_string(p.kind)},    {"amount", p.amount},
           {"exceptions", p.exceptions}, {"M_used", io::number(p.M_used)}, {"aligned", p.aligned}};
}
void from_json(const json& j, PerturbationClass& p) {
  p.n0 = j.at("n0").get<int>();
  p.kind = parse_enum(j.at("kind").get<std::string>(), {PerturbationKind::exact, PerturbationKind::deficiency,
                                                        PerturbationKind::excess, PerturbationKind::none});
  p.amount = j.at("amount").get<int>();
  p.exceptions = j.at("exceptions").get<IndexList>();
  p.M_used = io::number_of(j.at("M_used"));
  p.aligned = j.at("aligned").get<Index>();
}

void to_json(json& j, const RhoProfile& r) {
  j = json{{"n0", r.n0},
           {"start", r.start},
           {"log_rho", reals(std::vector<Real>(r.log_rho.begin(), r.log_rho.end()))},
           {"exponent_inf", io::number(r.exponent_inf)},
           {"exponent_sup", io::number(r.exponent_sup)},
           {"pair_count", r.pair_count},
           {"drift", io::number(r.drift)}};
}
void from_json(const json& j, RhoProfile& r) {
  r.n0 = j.at("n0").get<int>();
  r.start = j.at("start").get<Index>();
  const std::vector<Real> lr = reals_of(j.at("log_rho"));
  r.log_rho = Eigen::Map<const RealVector>(lr.data(), static_cast<Index>(lr.size()));
  r.exponent_inf = io::number_of(j.at("exponent_inf"));
  r.exponent_sup = io::number_of(j.at("exponent_sup"));
  r.pair_count = j.at("pair_count").get<Index>();
  r.drift = io::number_of(j.at("drift"));
}

void to_json(json& j, const OracleCrosscheck& o) {
  j = json{{"sizes", o.sizes},
           {"sigma_min_full", reals(o.sigma_min_full)},
           {"sigma_min_adjusted", reals(o.sigma_min_adjusted)},
           {"trend_full", to_string(o.trend_full)},
           {"trend_adjusted", to_string(o.trend_adjusted)},
           {"agrees", o.agrees}};
}
void from_json(const json& j, OracleCrosscheck& o) {
  o.sizes = j.at("sizes").get<std::vector<Index>>();
  o.sigma_min_full = reals_of(j.at("sigma_min_full"));
  o.sigma_min_adjusted = reals_of(j.at("sigma_min_adjusted"));
  o.trend_full = trend_of(j.at("trend_full").get<std::string>());
  o.trend_adjusted = trend_of(j.at("trend_adjusted").get<std::string>());
  o.agrees = j.at("agrees").get<bool>();
}

void to_json(json& j, const InvertibilityVerdict& v) {
  j = json{{"regime", to_string(v.regime)},
           {"statistic", v.statistic},
           {"sup_stat", io::number(v.sup_stat)},
           {"sup_trend", reals(v.sup_trend)},
           {"sup_verdict", to_string(v.sup_verdict)},
           {"rho", v.rho},
           {"perturbation", v.perturbation},
           {"verdict", to_string(v.verdict)},
           {"adjustment", v.adjustment},
           {"reason", v.reason},
           {"oracle", v.oracle}};
}
void from_json(const json& j, InvertibilityVerdict& v) {
  v.regime = regime_of(j.at("regime").get<std::string>());
  v.statistic = j.at("statistic").get<std::string>();
  v.sup_stat = io::number_of(j.at("sup_stat"));
  v.sup_trend = reals_of(j.at("sup_trend"));
  v.sup_verdict = bound_verdict_of(j.at("sup_verdict").get<std::string>());
  v.rho = j.at("rho").get<RhoProfile>();
  v.perturbation = j.at("perturbation").get<PerturbationClass>();
  v.verdict = verdict_of(j.at("verdict").get<std::string>());
  v.adjustment = j.at("adjustment").get<std::string>();
  v.reason = j.at("reason").get<std::string>();
  v.oracle = j.at("oracle").get<OracleCrosscheck>();
}

void to_json(json& j, const FastVerdict& f) {
  j = json{{"regime", to_string(f.regime)},
           {"c_limsup", io::number(f.c_limsup)},
           {"c_liminf", io::number(f.c_liminf)},
           {"alignment_constant", io::number(f.alignment_constant)},
           {"verdict", to_string(f.verdict)},
           {"deferred", f.deferred},
           {"reason", f.reason}};
}
void from_json(const json& j, FastVerdict& f) {
  f.regime = regime_of(j.at("regime").get<std::string>());
  f.c_limsup = io::number_of(j.at("c_limsup"));
  f.c_liminf = io::number_of(j.at("c_liminf"));
  f.alignment_constant = io::number_of(j.at("alignment_constant"));
  f.verdict = verdict_of(j.at("verdict").get<std::string>());
  f.deferred = j.at("deferred").get<bool>();
  f.reason = j.at("reason").get<std::string>();
}

void to_json(json& j, const ConvergenceStudy& s) {
  j = json{{"sizes", s.sizes},
           {"sigma_max", reals(s.sigma_max)},
           {"sigma_min", reals(s.sigma_min)},
           {"witness_max", reals(s.witness_max)},
           {"trend_max", to_string(s.trend_max)},
           {"trend_min", to_string(s.trend_min)}};
}
void from_json(const json& j, ConvergenceStudy& s) {
  s.sizes = j.at("sizes").get<std::vector<Index>>();
  s.sigma_max = reals_of(j.at("sigma_max"));
  s.sigma_min = reals_of(j.at("sigma_min"));
  s.witness_max = reals_of(j.at("witness_max"));
  s.trend_max = trend_of(j.at("trend_max").get<std::string>());
  s.trend_min = trend_of(j.at("trend_min").get<std::string>());
}

// ---- family specs ----

namespace {

std::string_view law_name(PerturbationSpec::Law l) {
  switch (l) {
    case PerturbationSpec::Law::additive: return "additive";
    case PerturbationSpec::Law::scaled: return "scaled";
    case PerturbationSpec::Law::rotated: return "rotated";
    case PerturbationSpec::Law::relative: return "relative";
  }
  return "additive";
}

PerturbationSpec::Law law_of(const std::string& s) {
  for (auto l : {PerturbationSpec::Law::additive, PerturbationSpec::Law::scaled, PerturbationSpec::Law::rotated,
                 PerturbationSpec::Law::relative})
    if (law_name(l) == s) return l;
  throw Error(ErrorKind::InvalidArgument, "unknown offset law '" + s + "'");
}

}  // namespace

void to_json(json& j, const FamilySpec& f) {
  struct Visitor {
    json operator()(const GeometricSpec& s) const {
      return {{"family", "geometric"}, {"base", io::number(s.q)}, {"scale", io::number(s.a)},
              {"weight", s.weight.to_string()}, {"N", s.N}};
    }
    json operator()(const Example1Spec& s) const {
      return {{"family", "example1"}, {"c", io::number(s.c)}, {"q", io::number(s.q)}, {"N", s.N}};
    }
    json operator()(const ClusterSpec& s) const {
      return {{"family", "cluster"}, {"t_ratio", io::number(s.t_ratio)}, {"n_max", s.n_max},
              {"t1", io::number(s.t1)}};
    }
    json operator()(const PerturbationSpec& s) const {
      return {{"family", "perturbation"},   {"base", io::number(s.q)},    {"scale", io::number(s.a)},
              {"weight", s.weight.to_string()}, {"N", s.N},               {"law", law_name(s.law)},
              {"param", io::number(s.param)},   {"n0", s.n0}};
    }
    json operator()(const SatelliteSpec& s) const {
      return {{"family", "satellites"}, {"base", io::number(s.q)}, {"N", s.N},
              {"offsets", reals(s.offsets)}, {"start", s.start}};
    }
  };
  j = std::visit(Visitor{}, f);
}

void from_json(const json& j, FamilySpec& f) {
  const std::string name = field(j, "family").get<std::string>();
  if (name == "geometric") {
    GeometricSpec s;
    s.q = real_field(j, "base", s.q);
    s.a = real_field(j, "scale", s.a);
    s.weight = WeightLaw::parse(j.value("weight", std::string("const")));
    s.N = index_field(j, "N", s.N);
    f = s;
  } else if (name == "example1") {
    Example1Spec s;
    s.c = real_field(j, "c", s.c);
    s.q = real_field(j, "q", s.q);
    s.N = index_field(j, "N", s.N);
    f = s;
  } else if (name == "cluster") {
    ClusterSpec s;
    s.t_ratio = real_field(j, "t_ratio", s.t_ratio);
    s.n_max = index_field(j, "n_max", s.n_max);
    s.t1 = real_field(j, "t1", s.t1);
    f = s;
  } else if (name == "perturbation") {
    PerturbationSpec s;
    s.q = real_field(j, "base", s.q);
    s.a = real_field(j, "scale", s.a);
    s.weight = WeightLaw::parse(j.value("weight", std::string("const")));
    s.N = index_field(j, "N", s.N);
    s.law = law_of(j.value("law", std::string("additive")));
    s.param = real_field(j, "param", s.param);
    s.n0 = static_cast<int>(index_field(j, "n0", s.n0));
    f = s;
  } else if (name == "satellites") {
    SatelliteSpec s;
    s.q = real_field(j, "base", s.q);
    s.N = index_field(j, "N", s.N);
    if (j.contains("offsets")) s.offsets = reals_of(j.at("offsets"));
    s.start = index_field(j, "start", s.start);
    f = s;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown family '" + name + "'");
  }
}

namespace io {

json number(Real x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Real number_of(const json& j) {
  if (j.is_number()) return j.get<Real>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<Real>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<Real>::infinity();
    if (s == "-inf") return -std::numeric_limits<Real>::infinity();
  }
  throw Error(ErrorKind::InvalidArgument, "expected a number, got " + j.dump());
}

std::string format_number(Real x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

json points_to_json(const PointList& p) {
  json a = json::array();
  const bool offsets = p.has_offsets();
  for (Index i = 0; i < p.size(); ++i) {
    const Complex z = offsets ? p.anchor(i) : p[i];
    json e = json::array({number(z.real()), number(z.imag())});
    if (offsets) {
      e.push_back(number(p.offset(i).real()));
      e.push_back(number(p.offset(i).imag()));
    }
    a.push_back(std::move(e));
  }
  return a;
}

PointList points_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "points must be an array");
  std::vector<Complex> anchors, offsets;
  bool any_offset = false;
  for (const auto& e : j) {
    if (!e.is_array() || (e.size() != 2 && e.size() != 4))
      throw Error(ErrorKind::InvalidArgument, "point must be [re, im] or [re, im, offset_re, offset_im]");
    anchors.emplace_back(number_of(e[0]), number_of(e[1]));
    offsets.emplace_back(e.size() == 4 ? Complex(number_of(e[2]), number_of(e[3])) : Complex(0.0));
    any_offset = any_offset || e.size() == 4;
  }
  if (!any_offset) return PointList(to_vector(anchors));
  return PointList(to_vector(anchors), to_vector(offsets));
}

Problem load_problem(const json& doc, std::uint64_t seed) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "input must be a JSON object");
  Problem p;
  p.seed = seed;
  if (doc.contains("family")) {
    p.family = doc.get<FamilySpec>();
    Instance inst = make_family(*p.family);
    p.ns = std::move(inst.ns);
    p.ts = std::move(inst.ts);
  } else if (doc.contains("nodes")) {
    p.ns = nodes_of(doc.at("nodes"));
  } else if (doc.contains("points")) {
    p.ns = nodes_of(doc);
  } else {
    throw Error(ErrorKind::InvalidArgument, "input has neither a family, nodes nor points");
  }
  if (doc.contains("targets")) {
    if (p.family) p.family.reset();
    p.ts = targets_of(doc.at("targets"), p.ns);
  }
  if (doc.contains("measure")) {
    const json& m = doc.at("measure");
    if (m.contains("random")) {
      p.random_law = parse_measure_law(m.at("random").get<std::string>());
      p.atoms = make_random_measure(p.ns, *p.random_law, seed);
    } else {
      p.atoms = atoms_of(field(m, "atoms"));
    }
  }
  return p;
}

Problem resize_problem(const Problem& p, Index n) {
  Problem out;
  out.seed = p.seed;
  out.random_law = p.random_law;
  if (p.family) {
    out.family = with_size(*p.family, n);
    Instance inst = make_family(*out.family);
    out.ns = std::move(inst.ns);
    out.ts = std::move(inst.ts);
    if (p.random_law) out.atoms = make_random_measure(out.ns, *p.random_law, p.seed);
    return out;
  }
  const Index k = std::min(n, p.ns.size());
  out.ns = p.ns.prefix(k);
  const AnnulusPartition part(p.ns);
  if (p.ts) {
    IndexList keep;
    for (Index j = 0; j < p.ts->size(); ++j)
      if (part.locate(p.ts->points().modulus(j)).annulus <= k) keep.push_back(j);
    out.ts = p.ts->select(keep);
  }
  if (p.atoms) {
    out.atoms.emplace();
    for (const Atom& a : *p.atoms)
      if (part.annulus_of(a.z) <= k) out.atoms->push_back(a);
  }
  return out;
}

json problem_to_json(const Problem& p) {
  json doc;
  doc["schema"] = 1;
  doc["nodes"] = {{"points", points_to_json(p.ns.nodes())}, {"weights", weights_to_json(p.ns.weights())}};
  if (p.ns.cluster_exempt()) doc["nodes"]["cluster_exempt"] = true;
  if (p.ts) {
    doc["targets"] = {{"points", points_to_json(p.ts->points())},
                      {"weights", weights_to_json(p.ts->weights())},
                      {"offset", p.ts->offset()},
                      {"bessel", p.ts->bessel_weighted()}};
  }
  if (p.atoms) {
    json a = json::array();
    for (const Atom& at : *p.atoms)
      a.push_back(json::array({number(at.z.real()), number(at.z.imag()), number(at.mass)}));
    doc["measure"] = {{"atoms", a}};
  }
  return doc;
}

void write_atomic(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << data;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::InvalidArgument, "cannot rename onto " + path + ": " + ec.message());
  }
}

Csv::Csv(std::initializer_list<std::string> header) {
  for (const auto& h : header) cell(h);
  end_row();
}

Csv& Csv::cell(Real x) { return cell(format_number(x)); }
Csv& Csv::cell(Index x) { return cell(std::to_string(x)); }
Csv& Csv::cell(const std::string& s) {
  if (row_open_) text_ += ',';
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    text_ += s;
  } else {
    text_ += '"';
    for (char ch : s) {
      if (ch == '"') text_ += '"';
      text_ += ch;
    }
    text_ += '"';
  }
  row_open_ = true;
  return *this;
}
void Csv::end_row() {
  text_ += '\n';
  row_open_ = false;
}

}  // namespace io
}  // namespace dht
