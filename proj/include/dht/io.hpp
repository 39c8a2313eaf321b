#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "dht/boundedness.hpp"
#include "dht/generators.hpp"
#include "dht/invertibility.hpp"
#include "dht/oracle.hpp"
#include "dht/splitting.hpp"

namespace dht {

using json = nlohmann::json;

// Report (de)serialization. Non-finite reals are written as the strings
// "inf", "-inf" and "nan".
void to_json(json& j, const TrendPoint& t);
void from_json(const json& j, TrendPoint& t);
void to_json(json& j, const BoundednessReport& r);
void from_json(const json& j, BoundednessReport& r);
void to_json(json& j, const LacunarityProfile& l);
void from_json(const json& j, LacunarityProfile& l);
void to_json(json& j, const Theorem4Report& r);
void from_json(const json& j, Theorem4Report& r);
void to_json(json& j, const SplitParameters& p);
void from_json(const json& j, SplitParameters& p);
void to_json(json& j, const Piece& p);
void from_json(const json& j, Piece& p);
void to_json(json& j, const FeichtingerSplit& s);
void from_json(const json& j, FeichtingerSplit& s);
void to_json(json& j, const PieceCertificate& c);
void from_json(const json& j, PieceCertificate& c);
void to_json(json& j, const PerturbationClass& p);
void from_json(const json& j, PerturbationClass& p);
void to_json(json& j, const RhoProfile& r);
void from_json(const json& j, RhoProfile& r);
void to_json(json& j, const OracleCrosscheck& o);
void from_json(const json& j, OracleCrosscheck& o);
void to_json(json& j, const InvertibilityVerdict& v);
void from_json(const json& j, InvertibilityVerdict& v);
void to_json(json& j, const FastVerdict& f);
void from_json(const json& j, FastVerdict& f);
void to_json(json& j, const ConvergenceStudy& s);
void from_json(const json& j, ConvergenceStudy& s);
void to_json(json& j, const FamilySpec& f);
void from_json(const json& j, FamilySpec& f);

namespace io {

json number(Real x);
Real number_of(const json& j);

/// 17 significant digits in %g style; round-trips every double.
std::string format_number(Real x);

/// [re, im] per point, or [anchor_re, anchor_im, offset_re, offset_im] when
/// the list carries offsets.
json points_to_json(const PointList& p);
PointList points_from_json(const json& j);

/// Everything an analysis command can consume.
struct Problem {
  WeightedNodeSet ns;
  std::optional<TargetSystem> ts;
  std::optional<std::vector<Atom>> atoms;
  std::optional<FamilySpec> family;
  std::optional<MeasureLaw> random_law;
  std::uint64_t seed = 0;
};

/// Accepts a family spec ({"family": ...}), an explicit node set
/// ({"points", "weights"}) or a document {"nodes", "targets", "measure"}.
/// A measure is {"atoms": [[re, im, mass], ...]} or {"random": law}.
Problem load_problem(const json& doc, std::uint64_t seed);

/// Problem restricted to a prefix of length n (family problems are rebuilt
/// at size n).
Problem resize_problem(const Problem& p, Index n);

/// Explicit document accepted back by load_problem.
json problem_to_json(const Problem& p);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& data);

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header);
  Csv& cell(Real x);
  Csv& cell(Index x);
  Csv& cell(const std::string& s);
  Csv& cell(std::string_view s) { return cell(std::string(s)); }
  Csv& cell(const char* s) { return cell(std::string(s)); }
  Csv& cell(bool b) { return cell(std::string(b ? "true" : "false")); }
  void end_row();
  const std::string& str() const { return text_; }

 private:
  std::string text_;
  bool row_open_ = false;
};

}  // namespace io
}  // namespace dht
