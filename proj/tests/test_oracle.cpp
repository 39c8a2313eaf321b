#include <doctest.h>

#include <cmath>
#include <random>

#include "dht/config.hpp"
#include "dht/generators.hpp"
#include "dht/oracle.hpp"

using namespace dht;

TEST_CASE("singular extremes of small matrices") {
  ComplexMatrix m(1, 1);
  m << -1.0;
  auto s = singular_extremes(m);
  CHECK(s.sigma_max == doctest::Approx(1.0));
  CHECK(s.sigma_min == doctest::Approx(1.0));

  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 2.0;
  d(2, 2) = 1.0;
  s = singular_extremes(d);
  CHECK(s.sigma_max == doctest::Approx(3.0));
  CHECK(s.sigma_min == doctest::Approx(1.0));

  ComplexMatrix j(2, 2);
  j << 1.0, 1.0, 0.0, 1.0;
  const Real phi = (1.0 + std::sqrt(5.0)) / 2.0;
  for (SvdMethod method : {SvdMethod::dense, SvdMethod::iterative}) {
    s = singular_extremes(j, method);
    CHECK(s.sigma_max == doctest::Approx(phi).epsilon(1e-9));
    CHECK(s.sigma_min == doctest::Approx(1.0 / phi).epsilon(1e-9));
  }
  CHECK(singular_extremes(ComplexMatrix(0, 3)).sigma_max == 0.0);
}

TEST_CASE("dense and iterative paths agree") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (auto [r, c] : {std::pair<Index, Index>{40, 40}, {30, 50}, {60, 20}}) {
    ComplexMatrix m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index k = 0; k < c; ++k) m(i, k) = Complex(nd(rng), nd(rng));
    const auto a = singular_extremes(m, SvdMethod::dense);
    const auto b = singular_extremes(m, SvdMethod::iterative);
    CHECK(b.iterative);
    CHECK(b.sigma_max == doctest::Approx(a.sigma_max).epsilon(1e-7));
    CHECK(b.sigma_min == doctest::Approx(a.sigma_min).epsilon(1e-7));
  }
  const Instance inst = make_example1(0.25, 2.0, 60);
  const ComplexMatrix op = truncated_operator(inst.ns, *inst.ts).matrix;
  const auto a = singular_extremes(op, SvdMethod::dense);
  const auto b = singular_extremes(op, SvdMethod::iterative);
  CHECK(b.sigma_max == doctest::Approx(a.sigma_max).epsilon(1e-7));
  CHECK(b.sigma_min == doctest::Approx(a.sigma_min).epsilon(1e-7));
}

TEST_CASE("singular values are permutation invariant") {
  const Instance inst = make_example1(0.25, 2.0, 50);
  const ComplexMatrix op = truncated_operator(inst.ns, *inst.ts).matrix;
  std::vector<Index> rows(50), cols(50);
  for (Index k = 0; k < 50; ++k) rows[k] = cols[k] = k;
  std::mt19937_64 rng(3);
  std::shuffle(rows.begin(), rows.end(), rng);
  std::shuffle(cols.begin(), cols.end(), rng);
  ComplexMatrix p(50, 50);
  for (Index i = 0; i < 50; ++i)
    for (Index k = 0; k < 50; ++k) p(i, k) = op(rows[i], cols[k]);
  const auto a = singular_extremes(op), b = singular_extremes(p);
  CHECK(b.sigma_max == doctest::Approx(a.sigma_max).epsilon(1e-13));
  CHECK(b.sigma_min == doctest::Approx(a.sigma_min).epsilon(1e-12));
}

TEST_CASE("trend classification") {
  CHECK(classify_trend(1.0, 1.05, 0.1) == Trend::plateau);
  CHECK(classify_trend(1.0, 1.2, 0.1) == Trend::growth);
  CHECK(classify_trend(1.0, 0.8, 0.1) == Trend::decay);
  CHECK(relative_change(0.0, 0.0) == 0.0);
  CHECK(std::isinf(relative_change(0.0, 1.0)));
}

TEST_CASE("convergence studies") {
  CHECK_THROWS_AS(convergence_study([](Index) { return StudySample{}; }, {10, 20}), Error);
  CHECK_THROWS_AS(convergence_study([](Index) { return StudySample{}; }, {10, 20, 20}), Error);

  auto example = [](Real c) {
    return [c](Index n) {
      const Instance inst = make_example1(c, 2.0, n);
      return StudySample{truncated_operator(inst.ns, *inst.ts), witness_lower_bounds(inst.ns, *inst.ts).best};
    };
  };
  const ConvergenceStudy bounded = convergence_study(example(0.25), {25, 50, 100, 200});
  CHECK(bounded.trend_max == Trend::plateau);
  CHECK(bounded.trend_min == Trend::plateau);
  for (std::size_t k = 0; k < bounded.sizes.size(); ++k) {
    CHECK(bounded.witness_max[k] <= bounded.sigma_max[k] + 1e-9);
    if (k > 0) CHECK(bounded.sigma_max[k] >= bounded.sigma_max[k - 1] - 1e-9);
  }

  // Study results do not depend on the worker count.
  const ConvergenceStudy again = convergence_study(example(0.25), {25, 50, 100, 200});
  CHECK(again.sigma_min == bounded.sigma_min);

  ComplexMatrix one(1, 1);
  one << -1.0;
  const ConvergenceStudy trivial = convergence_study(
      [&](Index) { return StudySample{TruncatedOperator{one}, 1.0}; }, {1, 2, 3});
  CHECK(trivial.sigma_max == std::vector<Real>{1.0, 1.0, 1.0});
  CHECK(trivial.trend_max == Trend::plateau);
}

TEST_CASE("boundary instance: smallest singular value decays") {
  // Relative decay per doubling is ~6% at these sizes, under the 10% trend threshold.
  const ConvergenceStudy st = convergence_study(
      [](Index n) {
        const Instance inst = make_example1(0.5, 2.0, n);
        return StudySample{truncated_operator(inst.ns, *inst.ts), 0.0};
      },
      {25, 50, 100, 200});
  for (std::size_t k = 1; k < st.sizes.size(); ++k) CHECK(st.sigma_min[k] < st.sigma_min[k - 1]);
  const Real last = relative_change(st.sigma_min[2], st.sigma_min[3]);
  CHECK(last < -0.03);
  CHECK(last > -kPlateauThreshold);
}

TEST_CASE("adding rows cannot increase the smallest singular value of a wide system") {
  const Instance inst = make_example1(0.25, 2.0, 40);
  Real prev = std::numeric_limits<Real>::infinity();
  for (Index rows = 5; rows <= 40; rows += 5) {
    IndexList sel;
    for (Index j = 0; j < rows; ++j) sel.push_back(j);
    const Real s = singular_extremes(truncated_operator(inst.ns, inst.ts->select(sel))).sigma_min;
    CHECK(s <= prev + 1e-12);
    prev = s;
  }
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(8,
                               [](std::size_t i) {
                                 if (i == 5) throw Error(ErrorKind::InvalidArgument, "boom");
                               }),
                  Error);
}
