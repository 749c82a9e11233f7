#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "ksc/metrics.hpp"
#include "ksc/rng.hpp"

using namespace ksc;

namespace {

// permutation enumeration oracle for the assignment solver
double best_agreement_enumerated(const Matrix& agreement) {
  const int R = static_cast<int>(agreement.rows());
  std::vector<int> perm(static_cast<std::size_t>(R));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double total = 0.0;
    for (int k = 0; k < R; ++k)
      total += agreement(k, perm[static_cast<std::size_t>(k)]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<int> random_labels(int n, int R, Rng& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    labels[static_cast<std::size_t>(i)] =
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(R)));
  return labels;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("misclassification rate on worked examples") {
  const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
  CHECK(misclassification_rate(truth, truth, 3) == 0.0);

  const std::vector<int> swapped = {1, 1, 0, 0, 2, 2};
  CHECK(misclassification_rate(swapped, truth, 3) == 0.0);

  const std::vector<int> one_off = {0, 1, 1, 1, 2, 2};
  CHECK(misclassification_rate(one_off, truth, 3) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-15));

  const std::vector<int> constant = {0, 0, 0, 0, 0, 0};
  CHECK(misclassification_rate(constant, truth, 3) ==
        doctest::Approx(4.0 / 6.0).epsilon(1e-15));
}

namespace {

double assignment_total(const Matrix& agreement, const std::vector<int>& perm) {
  const int R = static_cast<int>(agreement.rows());
  double total = 0.0;
  std::vector<bool> used(static_cast<std::size_t>(R), false);
  for (int k = 0; k < R; ++k) {
    const int j = perm[static_cast<std::size_t>(k)];
    REQUIRE(j >= 0);
    REQUIRE(j < R);
    REQUIRE(!used[static_cast<std::size_t>(j)]);
    used[static_cast<std::size_t>(j)] = true;
    total += agreement(k, j);
  }
  return total;
}

}  // namespace

TEST_CASE("assignment solver matches permutation enumeration") {
  Rng rng(401);
  for (int R = 2; R <= 7; ++R) {
    for (int trial = 0; trial < 50; ++trial) {
      Matrix agreement(R, R);
      for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j)
          agreement(i, j) = static_cast<double>(rng.uniform_index(20));
      const double total =
          assignment_total(agreement, detail::best_assignment(agreement));
      CHECK(total == doctest::Approx(best_agreement_enumerated(agreement))
                         .epsilon(1e-12));
    }
  }
}

TEST_CASE("augmenting-path solver matches enumeration beyond the cutoff") {
  // R = 11 exceeds the enumeration cutoff inside best_assignment, so this
  // pits the augmenting-path code against a full 11! sweep
  Rng rng(405);
  const int R = 11;
  Matrix agreement(R, R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j)
      agreement(i, j) = static_cast<double>(rng.uniform_index(30));
  const double total =
      assignment_total(agreement, detail::best_assignment(agreement));
  CHECK(total ==
        doctest::Approx(best_agreement_enumerated(agreement)).epsilon(1e-12));
}

TEST_CASE("augmenting-path solver certificates at larger sizes") {
  Rng rng(406);
  const int R = 15;
  // a permuted diagonal matrix: total mass n is attainable, so it is optimal
  std::vector<int> relabel(static_cast<std::size_t>(R));
  std::iota(relabel.begin(), relabel.end(), 0);
  for (int i = R - 1; i > 0; --i)
    std::swap(relabel[static_cast<std::size_t>(i)],
              relabel[rng.uniform_index(static_cast<std::uint64_t>(i + 1))]);
  const int n = 20 * R;
  std::vector<int> truth(static_cast<std::size_t>(n));
  std::vector<int> pred(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    truth[static_cast<std::size_t>(i)] = i % R;
    pred[static_cast<std::size_t>(i)] = relabel[static_cast<std::size_t>(i % R)];
  }
  CHECK(misclassification_rate(pred, truth, R) == 0.0);

  // on random weights the solver must beat sampled permutations
  Matrix agreement(R, R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j) agreement(i, j) = rng.uniform(0.0, 10.0);
  const double total =
      assignment_total(agreement, detail::best_assignment(agreement));
  std::vector<int> perm(static_cast<std::size_t>(R));
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 200; ++trial) {
    for (int i = R - 1; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[rng.uniform_index(static_cast<std::uint64_t>(i + 1))]);
    CHECK(total >= assignment_total(agreement, perm) - 1e-12);
  }
}

TEST_CASE("misclassification rate is symmetric and relabel invariant") {
  Rng rng(402);
  const int n = 200, R = 4;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_labels(n, R, rng);
    const auto b = random_labels(n, R, rng);
    const double ab = misclassification_rate(a, b, R);
    CHECK(ab == misclassification_rate(b, a, R));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 - 1.0 / R + 1e-15);

    std::vector<int> relabel = {2, 0, 3, 1};
    std::vector<int> a2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      a2[i] = relabel[static_cast<std::size_t>(a[i])];
    CHECK(misclassification_rate(a2, b, R) == ab);
    CHECK(misclassification_rate(a2, a, R) == 0.0);
  }
}

TEST_CASE("nmi on worked examples") {
  const std::vector<int> truth = {0, 0, 1, 1};
  CHECK(nmi(truth, truth, 2) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<int> swapped = {1, 1, 0, 0};
  CHECK(nmi(swapped, truth, 2) == doctest::Approx(1.0).epsilon(1e-12));

  // independent half/half split: I = 0
  const std::vector<int> cross = {0, 1, 0, 1};
  CHECK(nmi(cross, truth, 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nmi degenerate partitions") {
  const std::vector<int> constant = {0, 0, 0, 0};
  const std::vector<int> split = {0, 0, 1, 1};
  CHECK(nmi(constant, constant, 2) == 1.0);
  CHECK(nmi(constant, split, 2) == 0.0);
  CHECK(nmi(split, constant, 2) == 0.0);
}

TEST_CASE("nmi of independent labelings is near zero") {
  Rng rng(403);
  const auto a = random_labels(10000, 3, rng);
  const auto b = random_labels(10000, 3, rng);
  CHECK(nmi(a, b, 3) <= 0.01);
}

TEST_CASE("nmi is relabel invariant and bounded") {
  Rng rng(404);
  const int n = 300, R = 5;
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_labels(n, R, rng);
    const auto b = random_labels(n, R, rng);
    const double v = nmi(a, b, R);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    std::vector<int> relabel = {4, 2, 0, 1, 3};
    std::vector<int> a2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      a2[i] = relabel[static_cast<std::size_t>(a[i])];
    CHECK(nmi(a2, b, R) == doctest::Approx(v).epsilon(1e-12));
    CHECK(nmi(a, b, R) == nmi(b, a, R));
  }
}

TEST_CASE("label metrics validate their inputs") {
  const std::vector<int> good = {0, 1, 0};
  const std::vector<int> high = {0, 1, 2};
  const std::vector<int> negative = {0, -1, 0};
  CHECK_THROWS_AS(misclassification_rate(good, high, 2), std::invalid_argument);
  CHECK_THROWS_AS(misclassification_rate(negative, good, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(misclassification_rate(good, {0, 1}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(misclassification_rate({}, {}, 2), std::invalid_argument);
  CHECK_THROWS_AS(nmi(good, high, 2), std::invalid_argument);
  CHECK_THROWS_AS(nmi(good, {0, 1}, 2), std::invalid_argument);
}

TEST_SUITE_END();
