#pragma once

#include <functional>
#include <string_view>

#include "dht/transform.hpp"

namespace dht {

enum class SvdMethod { automatic, dense, iterative };

struct SingularExtremes {
  Real sigma_max = 0.0;
  Real sigma_min = 0.0;
  bool iterative = false;
};

// Above this smaller dimension the automatic method switches to iteration.
inline constexpr Index kDenseSvdLimit = 512;

namespace detail {
SingularExtremes dense_extremes(const ComplexMatrix& m);
SingularExtremes iterative_extremes(const ComplexMatrix& m, Real tol = 1e-9, int max_iter = 20000);
}  // namespace detail

/// Largest and smallest of the min(J, N) singular values.
template <typename Derived>
SingularExtremes singular_extremes(const Eigen::MatrixBase<Derived>& m,
                                   SvdMethod method = SvdMethod::automatic) {
  const ComplexMatrix a = m.template cast<Complex>();
  if (a.rows() == 0 || a.cols() == 0) return {};
  const bool dense = method == SvdMethod::dense ||
                     (method == SvdMethod::automatic && std::min(a.rows(), a.cols()) <= kDenseSvdLimit);
  return dense ? detail::dense_extremes(a) : detail::iterative_extremes(a);
}

inline SingularExtremes singular_extremes(const TruncatedOperator& op,
                                          SvdMethod method = SvdMethod::automatic) {
  return singular_extremes(op.matrix, method);
}

enum class Trend { plateau, growth, decay };
std::string_view to_string(Trend t);

/// Relative change from `previous` to `last` against kPlateauThreshold.
Trend classify_trend(Real previous, Real last, Real threshold);
Real relative_change(Real previous, Real last);

struct StudySample {
  TruncatedOperator op;
  Real witness_max = 0.0;
};

struct ConvergenceStudy {
  std::vector<Index> sizes;
  std::vector<Real> sigma_max;
  std::vector<Real> sigma_min;
  std::vector<Real> witness_max;
  Trend trend_max = Trend::plateau;
  Trend trend_min = Trend::plateau;
};

/// Sizes are evaluated concurrently (bounded by thread_cap()); the result
/// does not depend on the schedule.
ConvergenceStudy convergence_study(const std::function<StudySample(Index)>& builder,
                                   const std::vector<Index>& sizes);

/// Runs fn(i) for i in [0, count) on up to thread_cap() workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace dht
