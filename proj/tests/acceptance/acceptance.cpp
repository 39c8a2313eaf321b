// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "dht/cli.hpp"
#include "dht/generators.hpp"
#include "dht/invertibility.hpp"
#include "dht/io.hpp"

using namespace dht;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("criterion %d: %s (%.1fs) %s\n", id, pass ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void criterion(int id, const std::function<bool(std::ostringstream&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, pass, detail.str(), s);
}

bool biorthogonality(std::ostringstream& d) {
  const Instance inst = make_example1(0.25, 2.0, 100);
  const GeneratingSolution gs = solve_generating(inst.ns, *inst.ts);
  d << "residual=" << gs.residual;
  return gs.residual <= 1e-8;
}

bool inverse_formula(std::ostringstream& d) {
  const Index N = 50;
  const Instance inst = make_example1(0.25, 2.0, N);
  const GeneratingSolution gs = solve_generating(inst.ns, *inst.ts);
  ComplexMatrix A(N, N);
  for (Index j = 0; j < N; ++j)
    for (Index n = 0; n < N; ++n)
      A(j, n) = inst.ns.weights()[n] / (inst.ts->points()[j] - inst.ns.nodes()[n]);
  const ComplexMatrix inv = A.partialPivLu().inverse();
  ComplexMatrix X(N, N);
  for (Index j = 0; j < N; ++j) {
    ComplexVector b = ComplexVector::Zero(N);
    b[j] = 1.0;
    X.col(j) = inverse_apply(gs, b).entries;
  }
  const Real rel = (X - inv).cwiseAbs().maxCoeff() / inv.cwiseAbs().maxCoeff();
  d << "relative max-norm difference=" << rel;
  return rel <= 1e-6;
}

bool theorem1_sandwich(std::ostringstream& d) {
  const std::vector<Index> sizes = {50, 100, 200, 400};
  const auto full = make_geometric(2.0, 1.0, WeightLaw{}, sizes.back());
  const AnnulusPartition part(full);
  const MeasureLaw laws[] = {MeasureLaw::bounded, MeasureLaw::flat, MeasureLaw::spread, MeasureLaw::near_node};
  Real lo = std::numeric_limits<Real>::infinity(), hi = 0.0;
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MeasureLaw law = laws[seed % 4];
    const std::vector<Atom> atoms = make_random_measure(full, law, seed);
    std::vector<Real> sigma;
    BoundVerdict verdict = BoundVerdict::inconclusive;
    for (Index N : sizes) {
      std::vector<Atom> inside;
      for (const Atom& a : atoms)
        if (part.annulus_of(a.z) <= N) inside.push_back(a);
      const WeightedNodeSet ns = full.prefix(N);
      const BoundednessReport r = theorem1_check(ns, discrete_measure(inside, ns));
      const Real s = singular_extremes(truncated_operator(ns, target_from_atoms(inside))).sigma_max;
      const Real ratio = s * s / std::max(r.condition_local, r.condition_a2);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      sigma.push_back(s);
      verdict = r.verdict;
    }
    const Trend t = classify_trend(sigma[sigma.size() - 2], sigma.back(), kPlateauThreshold);
    const bool match = (verdict == BoundVerdict::bounded && t == Trend::plateau) ||
                       (verdict == BoundVerdict::unbounded_trend && t == Trend::growth);
    agree += match;
    if (!match) d << "[seed " << seed << " " << to_string(law) << ": " << to_string(verdict) << " vs " << to_string(t) << "] ";
  }
  d << "ratio range=[" << lo << ", " << hi << "] verdict agreement=" << agree << "/20";
  return lo >= 1.0 / 64.0 && hi <= 64.0 && agree == 20;
}

bool example1_trichotomy(std::ostringstream& d) {
  VerdictParams params;
  params.sizes = {25, 50, 100, 200};
  bool ok = true;

  const Instance a = make_example1(0.25, 2.0, 200);
  const InvertibilityVerdict va = invertibility_verdict(a.ns, *a.ts, params);
  const auto& sa = va.oracle.sigma_min_full;
  const Real ca = relative_change(sa[2], sa[3]);
  const bool pass_a = std::abs(ca) < 0.1 && va.verdict == Verdict::invertible;
  d << "c=0.25: " << to_string(va.verdict) << ", last-doubling change " << ca << (pass_a ? " ok" : " FAIL") << "; ";
  ok = ok && pass_a;

  const Instance b = make_example1(0.75, 2.0, 200);
  const InvertibilityVerdict vb = invertibility_verdict(b.ns, *b.ts, params);
  const auto& sb = vb.oracle.sigma_min_full;
  const Real fall = sb.front() / sb.back();
  const Real dropped = aligned_sigma_min(b.ns, *b.ts, 1, 200, 2);
  const Real dropped_half = aligned_sigma_min(b.ns, *b.ts, 1, 100, 2);
  const Real cb = relative_change(dropped_half, dropped);
  const bool pass_b = fall >= 2.0 && std::abs(cb) < 0.1 && vb.verdict == Verdict::adjust_one_point;
  d << "c=0.75: " << to_string(vb.verdict) << ", full sigma_min falls x" << fall << " (needs >= 2)"
    << ", dropped change " << cb << (pass_b ? " ok" : " FAIL") << "; ";
  ok = ok && pass_b;

  const Instance c = make_example1(0.5, 2.0, 200);
  const InvertibilityVerdict vc = invertibility_verdict(c.ns, *c.ts, params);
  const auto& sc = vc.oracle.sigma_min_full;
  const Trend full_trend = classify_trend(sc[2], sc[3], kPlateauThreshold);
  const Trend drop_trend = classify_trend(aligned_sigma_min(c.ns, *c.ts, 1, 100, 2),
                                          aligned_sigma_min(c.ns, *c.ts, 1, 200, 2), kPlateauThreshold);
  const bool pass_c = full_trend == Trend::decay && drop_trend == Trend::decay &&
                      (vc.verdict == Verdict::not_invertible || vc.verdict == Verdict::inconclusive);
  d << "c=0.5: " << to_string(vc.verdict) << ", full " << to_string(full_trend) << " ("
    << relative_change(sc[2], sc[3]) << "), dropped " << to_string(drop_trend) << (pass_c ? " ok" : " FAIL");
  return ok && pass_c;
}

bool cluster_claim(std::ostringstream& d) {
  const std::vector<Index> sizes = {5, 10, 20, 40};
  const ConvergenceStudy st = convergence_study(
      [](Index n) {
        const Instance inst = make_cluster(8.0, n);
        return StudySample{truncated_operator(inst.ns, *inst.ts), 0.0};
      },
      sizes);
  const Instance inst = make_cluster(8.0, 40);
  Index j = 0;
  bool counts_ok = true;
  for (Index n = 1; n <= 40; ++n) {
    Index here = 0;
    while (j < inst.ts->size() && inst.ts->points().anchors()[j] == inst.ns.nodes().anchors()[(n * (n - 1)) / 2]) {
      ++here;
      ++j;
    }
    counts_ok = counts_ok && here == static_cast<Index>(std::floor(std::log2(static_cast<Real>(n)))) + 1;
  }
  const Real change = relative_change(st.sigma_max[2], st.sigma_max[3]);
  d << "sigma_max=";
  for (Real s : st.sigma_max) d << s << " ";
  d << "last-doubling change " << change << " (needs < 0.05), per-gap counts log2 n: " << (counts_ok ? "yes" : "no");
  return std::abs(change) < 0.05 && counts_ok;
}

bool split_certificate(std::ostringstream& d) {
  SatelliteSpec s;
  s.N = 60;
  const Instance inst = make_satellites(s);
  const FeichtingerSplit fs = feichtinger_split(inst.ns, *inst.ts, 0.1);
  const SplitOptions opts;
  Index certified = 0;
  Real worst_change = 0.0, min_sigma = std::numeric_limits<Real>::infinity();
  for (const Piece& p : fs.pieces) {
    const PieceCertificate c = certify_piece(inst.ns, *inst.ts, p.indices, opts);
    certified += c.certified && std::abs(c.change) < 0.1 && c.sigma_high > 0.0;
    worst_change = std::max(worst_change, std::abs(c.change));
    min_sigma = std::min(min_sigma, c.sigma_high);
  }
  const Index K = static_cast<Index>(fs.pieces.size());
  d << "pieces=" << K << " K(0.1)=" << fs.params.k_bound << " certified=" << certified << " worst change="
    << worst_change << " min sigma=" << min_sigma << " floor=" << opts.floor;
  return K >= 1 && K <= fs.params.k_bound && certified == K && opts.floor > 0.0;
}

bool partition_invariance(std::ostringstream& d) {
  bool ok = true;

  // Partition: every target lands in exactly one class.
  for (const Instance& inst : {make_satellites(SatelliteSpec{}), make_example1(0.75, 2.0, 100), make_cluster(8.0, 20)}) {
    const SplitVerdict sv = classify(inst.ns, *inst.ts);
    std::vector<int> hits(static_cast<std::size_t>(inst.ts->size()), 0);
    for (PointClass c : {PointClass::zero, PointClass::v, PointClass::p})
      for (Index j : sv.members(c)) ++hits[static_cast<std::size_t>(j)];
    ok = ok && std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
  }
  d << "partition " << (ok ? "ok" : "FAIL") << "; ";

  // Weight equivalences on the exact-perturbation instances.
  PerturbationSpec plus_one;
  plus_one.N = 60;
  Real lo = std::numeric_limits<Real>::infinity(), hi = 0.0;
  for (const Instance& inst : {make_example1(0.25, 2.0, 100), make_perturbation(plus_one)}) {
    const GeneratingSolution gs = solve_generating(inst.ns, *inst.ts);
    const RhoProfile rp = rho_profile(inst.ns, *inst.ts, 1);
    for (Index n = 1; n <= inst.ns.size(); ++n) {
      const Real rho = std::exp(rp.log_rho[n - 1]);
      for (Real x : {gs.nu[n - 1] / (inst.ts->weights()[n - 1] * rho), gs.varpi[n - 1] * rho / inst.ns.weights()[n - 1]}) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  const bool weights_ok = lo >= 1.0 / 16.0 && hi <= 16.0;
  d << "weight ratios in [" << lo << ", " << hi << "] " << (weights_ok ? "ok" : "FAIL") << "; ";
  ok = ok && weights_ok;

  // Rho exponents under rotations that are exact in floating point.
  const Instance e = make_example1(0.25, 2.0, 200);
  const RhoProfile base = rho_profile(e.ns, *e.ts, 1);
  bool rho_ok = true;
  for (Complex phase : {Complex(0.0, 1.0), Complex(-1.0, 0.0), Complex(0.0, -1.0)}) {
    const PointList rot(ComplexVector(e.ts->points().anchors() * phase), ComplexVector(e.ts->points().offsets() * phase));
    const RhoProfile r = rho_profile(e.ns, make_bessel_target(e.ns, rot), 1);
    rho_ok = rho_ok && r.exponent_inf == base.exponent_inf && r.exponent_sup == base.exponent_sup &&
             r.pair_count == base.pair_count;
  }
  d << "rho rotation " << (rho_ok ? "ok" : "FAIL") << "; ";
  ok = ok && rho_ok;

  // Singular values under input permutation.
  const Instance s = make_satellites(SatelliteSpec{2.0, 30, {-1.0, 1.0, 2.0}, 3});
  std::vector<Index> perm_n(static_cast<std::size_t>(s.ns.size())), perm_t(static_cast<std::size_t>(s.ts->size()));
  std::iota(perm_n.begin(), perm_n.end(), 0);
  std::iota(perm_t.begin(), perm_t.end(), 0);
  std::mt19937_64 rng(11);
  std::shuffle(perm_n.begin(), perm_n.end(), rng);
  std::shuffle(perm_t.begin(), perm_t.end(), rng);
  auto permuted = [](const PointList& p, const std::vector<Index>& perm) {
    ComplexVector a(p.size()), o(p.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
      a[static_cast<Index>(k)] = p.anchors()[perm[k]];
      o[static_cast<Index>(k)] = p.offsets()[perm[k]];
    }
    return PointList(a, o);
  };
  RealVector w(s.ns.size());
  for (std::size_t k = 0; k < perm_n.size(); ++k) w[static_cast<Index>(k)] = s.ns.weights()[perm_n[k]];
  const WeightedNodeSet ns2 = build_node_set(permuted(s.ns.nodes(), perm_n), w);
  const TargetSystem ts2 = make_bessel_target(ns2, permuted(s.ts->points(), perm_t));
  const Eigen::VectorXd sv1 = truncated_operator(s.ns, *s.ts).matrix.jacobiSvd().singularValues();
  const Eigen::VectorXd sv2 = truncated_operator(ns2, ts2).matrix.jacobiSvd().singularValues();
  const bool perm_ok = sv1 == sv2;
  d << "permutation " << (perm_ok ? "ok" : "FAIL");
  return ok && perm_ok;
}

bool cli_determinism(std::ostringstream& d) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dht_lab_acceptance";
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  struct Case {
    const char* command;
    const char* family;
  };
  const Case cases[] = {
      {"bounded", R"({"family": "geometric", "N": 200, "measure": {"random": "spread"}})"},
      {"split", R"({"family": "satellites", "N": 60})"},
      {"invert", R"({"family": "example1", "c": 0.75, "N": 200})"},
      {"oracle", R"({"family": "cluster", "t_ratio": 8, "n_max": 40})"},
      {"generate", R"({"family": "perturbation", "N": 40, "law": "relative", "param": 0.25})"},
  };
  int identical = 0, total = 0;
  for (const Case& c : cases) {
    for (const char* format : {"json", "csv"}) {
      std::string first, first_side;
      for (int rep = 0; rep < 2; ++rep) {
        cli::RunConfig cfg;
        cfg.command = c.command;
        cfg.family = c.family;
        cfg.format = format;
        cfg.seed = 3;
        cfg.sizes = {5, 10, 20, 40};
        if (std::string(c.command) == "invert") cfg.sizes = {25, 50, 100, 200};
        cfg.out = (dir / (std::string(c.command) + "." + format)).string();
        std::ostringstream out, err;
        const int code = cli::execute(cfg, out, err);
        const std::string body = slurp(cfg.out);
        const fs::path side = dir / (std::string(c.command) + ".oracle." + format);
        const std::string side_body = fs::exists(side) ? slurp(side) : "";
        if (code == cli::kInputError) d << "[" << c.command << " input error: " << err.str() << "] ";
        if (rep == 0) {
          first = body;
          first_side = side_body;
        } else {
          ++total;
          if (body == first && side_body == first_side && !body.empty()) ++identical;
        }
      }
    }
  }
  d << identical << "/" << total << " command/format pairs byte-identical";
  return identical == total;
}

}  // namespace

int main() {
  criterion(1, biorthogonality);
  criterion(2, inverse_formula);
  criterion(3, theorem1_sandwich);
  criterion(4, example1_trichotomy);
  criterion(5, cluster_claim);
  criterion(6, split_certificate);
  criterion(7, partition_invariance);
  criterion(8, cli_determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
