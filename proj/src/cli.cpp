#include "dht/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dht/io.hpp"

namespace dht::cli {

namespace {

using io::Csv;

struct Output {
  std::string primary;
  std::string secondary;  // optional second CSV table
  int code = kAffirmative;
};

std::string dump(json doc) { return doc.dump(2) + "\n"; }

json header(const std::string& command) { return json{{"schema", 1}, {"command", command}}; }

int verdict_code(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::bounded: return kAffirmative;
    case BoundVerdict::unbounded_trend: return kNegative;
    case BoundVerdict::inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

json load_document(const RunConfig& c) {
  if (!c.family.empty()) return json::parse(c.family);
  std::ifstream in(c.input);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + c.input);
  return json::parse(in);
}

std::vector<Atom> atoms_of_targets(const TargetSystem& ts) {
  std::vector<Atom> atoms;
  for (Index j = 0; j < ts.size(); ++j) atoms.push_back({ts.points()[j], ts.weights()[j]});
  return atoms;
}

Output cmd_bounded(const io::Problem& p, const RunConfig& c) {
  Output o;
  json doc = header("bounded");
  Csv csv({"n", "local", "a2"});
  BoundednessReport report;
  if (!p.atoms && p.ts && p.ts->bessel_weighted()) {
    const Theorem4Report t4 = theorem4_check(p.ns, *p.ts);
    report = t4.report;
    doc["theorem4"] = t4;
  } else {
    std::vector<Atom> atoms;
    if (p.atoms) atoms = *p.atoms;
    else if (p.ts) atoms = atoms_of_targets(*p.ts);
    report = theorem1_check(p.ns, discrete_measure(atoms, p.ns));
  }
  doc["report"] = report;
  for (const TrendPoint& t : report.trend) {
    csv.cell(t.n).cell(t.local).cell(t.a2);
    csv.end_row();
  }
  o.primary = c.format == "csv" ? csv.str() : dump(doc);
  o.code = verdict_code(report.verdict);
  return o;
}

Output cmd_split(const io::Problem& p, const RunConfig& c) {
  if (!p.ts) throw Error(ErrorKind::InvalidArgument, "split needs a target system");
  Output o;
  FeichtingerSplit fs;
  try {
    fs = feichtinger_split(p.ns, *p.ts, c.epsilon);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BoundednessPrecheckFailed) throw;
    json doc = header("split");
    doc["error"] = e.what();
    o.primary = c.format == "csv" ? std::string() : dump(doc);
    o.code = kNegative;
    return o;
  }
  json certs = json::array();
  Csv csv({"piece", "class", "stage_a", "residue_a", "stage_b", "residue_b", "size", "level_low", "level_high",
           "sigma_low", "sigma_high", "change", "certified"});
  bool all = true;
  for (std::size_t k = 0; k < fs.pieces.size(); ++k) {
    const Piece& piece = fs.pieces[k];
    const PieceCertificate cert = certify_piece(p.ns, *p.ts, piece.indices);
    all = all && cert.certified;
    certs.push_back(cert);
    const Provenance& pr = piece.provenance;
    csv.cell(static_cast<Index>(k)).cell(to_string(pr.cls)).cell(pr.stage_a).cell(pr.residue_a);
    csv.cell(pr.stage_b).cell(pr.residue_b).cell(static_cast<Index>(piece.indices.size()));
    csv.cell(cert.level_low).cell(cert.level_high).cell(cert.sigma_low).cell(cert.sigma_high);
    csv.cell(cert.change).cell(cert.certified);
    csv.end_row();
  }
  json doc = header("split");
  doc["split"] = fs;
  doc["piece_count"] = fs.pieces.size();
  doc["certificates"] = certs;
  o.primary = c.format == "csv" ? csv.str() : dump(doc);
  o.code = all ? kAffirmative : kInconclusive;
  return o;
}

Output cmd_invert(const io::Problem& p, const RunConfig& c, std::ostream& err) {
  if (!p.ts) throw Error(ErrorKind::InvalidArgument, "invert needs a target system");
  VerdictParams params;
  params.M = c.big_m;
  params.margin = c.margin;
  params.sizes = c.sizes;
  const InvertibilityVerdict v = invertibility_verdict(p.ns, *p.ts, params);
  const FastVerdict fast = example_fast_tests(p.ns, *p.ts, c.margin);

  Output o;
  json doc = header("invert");
  doc["verdict"] = v;
  doc["fast"] = fast;
  Csv rho({"n", "log_rho", "exponent_inf", "exponent_sup"});
  for (Index k = 0; k < v.rho.log_rho.size(); ++k) {
    rho.cell(v.rho.start + k).cell(v.rho.log_rho[k]).cell(v.rho.exponent_inf).cell(v.rho.exponent_sup);
    rho.end_row();
  }
  Csv oracle({"size", "sigma_min_full", "sigma_min_adjusted"});
  for (std::size_t k = 0; k < v.oracle.sizes.size(); ++k) {
    oracle.cell(v.oracle.sizes[k]).cell(v.oracle.sigma_min_full[k]);
    if (k < v.oracle.sigma_min_adjusted.size()) oracle.cell(v.oracle.sigma_min_adjusted[k]);
    else oracle.cell("");
    oracle.end_row();
  }
  if (c.format == "csv") {
    o.primary = rho.str();
    o.secondary = oracle.str();
  } else {
    o.primary = dump(doc);
  }
  switch (v.verdict) {
    case Verdict::invertible: o.code = kAffirmative; break;
    case Verdict::adjust_one_point:
      o.code = kAffirmative;
      err << "advisory: invertible after " << (v.adjustment == "drop-first" ? "dropping the first target point"
                                                                            : "adding one target point")
          << "\n";
      break;
    case Verdict::not_invertible: o.code = kNegative; break;
    case Verdict::inconclusive: o.code = kInconclusive; break;
  }
  return o;
}

Output cmd_oracle(const io::Problem& p, const RunConfig& c) {
  if (!p.ts && !p.atoms) throw Error(ErrorKind::InvalidArgument, "oracle needs a target system or a measure");
  const ConvergenceStudy st = convergence_study(
      [&](Index n) {
        const io::Problem q = io::resize_problem(p, n);
        const TargetSystem ts = q.ts ? *q.ts : target_from_atoms(*q.atoms);
        StudySample s{truncated_operator(q.ns, ts), 0.0};
        if (!ts.empty()) s.witness_max = witness_lower_bounds(q.ns, ts).best;
        return s;
      },
      c.sizes);
  Output o;
  Csv csv({"size", "sigma_max", "sigma_min", "witness_max"});
  for (std::size_t k = 0; k < st.sizes.size(); ++k) {
    csv.cell(st.sizes[k]).cell(st.sigma_max[k]).cell(st.sigma_min[k]).cell(st.witness_max[k]);
    csv.end_row();
  }
  json doc = header("oracle");
  doc["study"] = st;
  o.primary = c.format == "csv" ? csv.str() : dump(doc);
  return o;
}

Output cmd_generate(const io::Problem& p, const RunConfig& c) {
  Output o;
  if (c.format == "csv") {
    Csv csv({"role", "index", "re", "im", "offset_re", "offset_im", "weight"});
    auto emit = [&](const char* role, const PointList& pts, const RealVector& w) {
      for (Index i = 0; i < pts.size(); ++i) {
        csv.cell(role).cell(i + 1).cell(pts.anchor(i).real()).cell(pts.anchor(i).imag());
        csv.cell(pts.offset(i).real()).cell(pts.offset(i).imag()).cell(w[i]);
        csv.end_row();
      }
    };
    emit("node", p.ns.nodes(), p.ns.weights());
    if (p.ts) emit("target", p.ts->points(), p.ts->weights());
    if (p.atoms) {
      for (std::size_t i = 0; i < p.atoms->size(); ++i) {
        const Atom& a = (*p.atoms)[i];
        csv.cell("atom").cell(static_cast<Index>(i + 1)).cell(a.z.real()).cell(a.z.imag());
        csv.cell(0.0).cell(0.0).cell(a.mass);
        csv.end_row();
      }
    }
    o.primary = csv.str();
  } else {
    json doc = io::problem_to_json(p);
    doc["command"] = "generate";
    if (p.family) doc["family_spec"] = *p.family;
    o.primary = dump(doc);
  }
  return o;
}

std::string sidecar_path(const std::string& out) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of("/\\");
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + ".oracle.csv";
}

}  // namespace

void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (c.input.empty() == c.family.empty()) fail("exactly one of --input and --family is required");
  if (c.format != "json" && c.format != "csv") fail("--format must be csv or json");
  if (!(c.epsilon > 0.0) || !(c.epsilon < 1.0)) fail("--epsilon must lie in (0, 1)");
  if (!(c.big_m > 0.0)) fail("--big-m must be positive");
  if (!(c.margin > 0.0)) fail("--margin must be positive");
  if (c.sizes.size() < 3) fail("--sizes needs at least three entries");
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    if (c.sizes[k] < 1) fail("--sizes entries must be positive");
    if (k > 0 && c.sizes[k] <= c.sizes[k - 1]) fail("--sizes must be increasing");
  }
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    const io::Problem p = io::load_problem(load_document(c), c.seed);
    Output o;
    if (c.command == "bounded") o = cmd_bounded(p, c);
    else if (c.command == "split") o = cmd_split(p, c);
    else if (c.command == "invert") o = cmd_invert(p, c, err);
    else if (c.command == "oracle") o = cmd_oracle(p, c);
    else if (c.command == "generate") o = cmd_generate(p, c);
    else throw Error(ErrorKind::InvalidArgument, "unknown command '" + c.command + "'");

    if (c.out.empty()) {
      out << o.primary;
      if (!o.secondary.empty()) out << "\n" << o.secondary;
    } else {
      io::write_atomic(c.out, o.primary);
      if (!o.secondary.empty()) io::write_atomic(sidecar_path(c.out), o.secondary);
    }
    return o.code;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
  }
  return kInputError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for discrete Hilbert transforms with sparse nodes", "dht-lab"};
  app.require_subcommand(1);
  RunConfig c;
  std::string sizes_text;
  for (const char* name : {"bounded", "split", "invert", "oracle", "generate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--input", c.input, "JSON input file");
    sub->add_option("--family", c.family, "inline JSON family or input document");
    sub->add_option("--epsilon", c.epsilon, "splitting parameter in (0, 1)");
    sub->add_option("--big-m", c.big_m, "neighbourhood constant M for perturbation alignment");
    sub->add_option("--margin", c.margin, "exponent margin around 1");
    sub->add_option("--sizes", sizes_text, "comma-separated increasing truncation sizes");
    sub->add_option("--out", c.out, "output path (stdout if omitted)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", c.seed, "seed for random measures");
    sub->callback([&c, name] { c.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kAffirmative : kInputError;
  }
  if (!sizes_text.empty()) {
    c.sizes.clear();
    std::stringstream ss(sizes_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        c.sizes.push_back(static_cast<Index>(v));
      } catch (const std::exception&) {
        err << "input error: bad --sizes entry '" << item << "'\n";
        return kInputError;
      }
    }
  }
  return execute(c, out, err);
}

}  // namespace dht::cli
