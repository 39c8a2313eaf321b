#include "dht/oracle.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <Eigen/SVD>

#include "dht/config.hpp"

namespace dht {

namespace detail {

SingularExtremes dense_extremes(const ComplexMatrix& m) {
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  const RealVector& s = svd.singularValues();
  return {s[0], s[s.size() - 1], false};
}

SingularExtremes iterative_extremes(const ComplexMatrix& m, Real tol, int max_iter) {
  const ComplexMatrix g = m.rows() <= m.cols() ? ComplexMatrix(m * m.adjoint())
                                               : ComplexMatrix(m.adjoint() * m);
  const Index k = g.rows();
  const ComplexVector start = ComplexVector::Constant(k, Complex(1.0 / std::sqrt(Real(k))));

  ComplexVector x = start;
  Real lmax = 0.0;
  bool done = false;
  for (int it = 0; it < max_iter; ++it) {
    const ComplexVector y = g * x;
    lmax = x.dot(y).real();
    if ((y - lmax * x).norm() <= tol * std::abs(lmax)) {
      done = true;
      break;
    }
    x = y / y.norm();
  }
  if (!done) throw Error(ErrorKind::IterationStalled, "power iteration did not converge");

  const Eigen::LDLT<ComplexMatrix> ldlt(g);
  Real lmin = 0.0;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
      ldlt.vectorD().real().minCoeff() > 0.0) {
    x = start;
    done = false;
    for (int it = 0; it < max_iter; ++it) {
      const ComplexVector y = ldlt.solve(x);
      lmin = 1.0 / x.dot(y).real();
      if ((g * x - lmin * x).norm() <= tol * lmax) {
        done = true;
        break;
      }
      x = y / y.norm();
    }
    if (!done) throw Error(ErrorKind::IterationStalled, "inverse iteration did not converge");
  }
  return {std::sqrt(std::max(lmax, 0.0)), std::sqrt(std::max(lmin, 0.0)), true};
}

}  // namespace detail

std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::plateau: return "plateau";
    case Trend::growth: return "growth";
    case Trend::decay: return "decay";
  }
  return "unknown";
}

Real relative_change(Real previous, Real last) {
  if (previous == 0.0) return last == 0.0 ? 0.0 : std::numeric_limits<Real>::infinity();
  return (last - previous) / previous;
}

Trend classify_trend(Real previous, Real last, Real threshold) {
  const Real r = relative_change(previous, last);
  if (std::abs(r) < threshold) return Trend::plateau;
  return r > 0.0 ? Trend::growth : Trend::decay;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_cap(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ConvergenceStudy convergence_study(const std::function<StudySample(Index)>& builder,
                                   const std::vector<Index>& sizes) {
  if (sizes.size() < 3) throw Error(ErrorKind::InvalidArgument, "a study needs at least three sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw Error(ErrorKind::InvalidArgument, "sizes must increase");

  ConvergenceStudy st;
  st.sizes = sizes;
  st.sigma_max.resize(sizes.size());
  st.sigma_min.resize(sizes.size());
  st.witness_max.resize(sizes.size());
  parallel_for(sizes.size(), [&](std::size_t i) {
    const StudySample sample = builder(sizes[i]);
    const SingularExtremes e = singular_extremes(sample.op);
    st.sigma_max[i] = e.sigma_max;
    st.sigma_min[i] = e.sigma_min;
    st.witness_max[i] = sample.witness_max;
  });
  const std::size_t n = sizes.size();
  st.trend_max = classify_trend(st.sigma_max[n - 2], st.sigma_max[n - 1], kPlateauThreshold);
  st.trend_min = classify_trend(st.sigma_min[n - 2], st.sigma_min[n - 1], kPlateauThreshold);
  return st;
}

}  // namespace dht
