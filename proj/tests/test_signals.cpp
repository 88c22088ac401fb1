#include <doctest.h>

#include <set>

#include "test_support.hpp"
#include "tightclass/error.hpp"
#include "tightclass/rng.hpp"
#include "tightclass/signals.hpp"

using namespace tightclass;

TEST_CASE("SparseSignal enforces its sparsity") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
  v(1) = 2.0;
  v(4) = -1.0;
  const SparseSignal s(v, 2);
  CHECK(s.support() == std::vector<Eigen::Index>{1, 4});
  CHECK_THROWS_AS(SparseSignal(v, 1), Error);
}

TEST_CASE("HypothesisSet validates orthogonality and equal norms") {
  auto unit = [](Eigen::Index size, Eigen::Index at, double value = 1.0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
    v(at) = value;
    return SparseSignal(v, 1);
  };
  CHECK_NOTHROW(HypothesisSet({unit(4, 0), unit(4, 2)}));
  CHECK_THROWS_AS(HypothesisSet({unit(4, 0)}), Error);
  CHECK_THROWS_AS(HypothesisSet({unit(4, 0), unit(4, 0)}), Error);
  CHECK_THROWS_AS(HypothesisSet({unit(4, 0), unit(4, 1, 2.0)}), Error);
  CHECK_THROWS_AS(HypothesisSet({unit(4, 0), unit(5, 1)}), Error);
}

TEST_CASE("generate_hypotheses") {
  SUBCASE("two 1-sparse unit vectors") {
    const HypothesisSet h = generate_hypotheses(4, 1, 2, 1.0, 99);
    REQUIRE(h.size() == 2);
    CHECK(h[0].values().dot(h[1].values()) == 0.0);
    CHECK(h[0].support().size() == 1);
    CHECK(h[0].support() != h[1].support());
    CHECK(std::abs(h[0].values().norm() - 1.0) <= 1e-12);
  }
  SUBCASE("simulation scale N=500, k=10, m=10") {
    const HypothesisSet h = generate_hypotheses(500, 10, 10, 1.0, 5);
    std::set<Eigen::Index> used;
    for (const auto& s : h.signals()) {
      CHECK(s.support().size() == 10);
      used.insert(s.support().begin(), s.support().end());
    }
    CHECK(used.size() == 100);
  }
  SUBCASE("infeasible") {
    try {
      generate_hypotheses(10, 4, 3, 1.0, 1);
      FAIL("expected Infeasible");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Infeasible);
    }
  }
  SUBCASE("deterministic per seed and exactly orthogonal") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const int k = 1 + static_cast<int>(seed % 7);
      const int m = 2 + static_cast<int>(seed % 9);
      const double norm = 0.5 + static_cast<double>(seed % 5);
      const HypothesisSet h = generate_hypotheses(80, k, m, norm, seed);
      const HypothesisSet again = generate_hypotheses(80, k, m, norm, seed);
      for (std::size_t i = 0; i < h.size(); ++i) {
        CHECK(h[i].values() == again[i].values());
        CHECK(h[i].support().size() == static_cast<std::size_t>(k));
        CHECK(std::abs(h[i].values().norm() - norm) <= 1e-12 * norm);
        for (std::size_t j = i + 1; j < h.size(); ++j) CHECK(h[i].values().dot(h[j].values()) == 0.0);
      }
    }
  }
}

TEST_CASE("sample_noisy_measurement") {
  const MeasurementMatrix phi = generate_gaussian(3, 6, 4);
  const HypothesisSet h = generate_hypotheses(6, 2, 2, 1.0, 4);

  SUBCASE("noiseless limit") {
    const Eigen::VectorXd y = sample_noisy_measurement(phi, h[0], NoiseModel(1e-300, 6), 1);
    const Eigen::VectorXd clean = phi.entries() * h[0].values();
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(y(i) == clean(i));
  }
  SUBCASE("deterministic per seed") {
    const NoiseModel noise(0.3, 6);
    CHECK(sample_noisy_measurement(phi, h[0], noise, 17) ==
          sample_noisy_measurement(phi, h[0], noise, 17));
    CHECK(sample_noisy_measurement(phi, h[0], noise, 17) !=
          sample_noisy_measurement(phi, h[0], noise, 18));
  }
  SUBCASE("dimension mismatch") {
    const HypothesisSet other = generate_hypotheses(7, 1, 2, 1.0, 1);
    CHECK_THROWS_AS(sample_noisy_measurement(phi, other[0], NoiseModel(1.0, 7), 1), Error);
    CHECK_THROWS_AS(sample_noisy_measurement(phi, h[0], NoiseModel(1.0, 7), 1), Error);
  }
  SUBCASE("empirical mean and covariance over 1e5 draws") {
    const double sigma = 0.7;
    const NoiseModel noise(sigma, 6);
    const int draws = 100000;
    const Eigen::VectorXd clean = phi.entries() * h[0].values();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(3, 3);
    for (int d = 0; d < draws; ++d) {
      const Eigen::VectorXd y = sample_noisy_measurement(phi, h[0], noise, derive_seed(123, {std::uint64_t(d)}));
      sum += y;
      const Eigen::VectorXd e = y - clean;
      scatter += e * e.transpose();
    }
    const Eigen::VectorXd mean = sum / draws;
    const double op_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(phi.entries()).singularValues()(0);
    for (Eigen::Index i = 0; i < 3; ++i) {
      CHECK(std::abs(mean(i) - clean(i)) <= 4.0 * sigma * op_norm / std::sqrt(double(draws)));
    }
    const Eigen::MatrixXd expected = sigma * sigma * phi.entries() * phi.entries().transpose();
    const Eigen::MatrixXd empirical = scatter / draws;
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        const double scale = std::sqrt(expected(i, i) * expected(j, j));
        CHECK(std::abs(empirical(i, j) - expected(i, j)) <= 0.05 * scale);
      }
    }
  }
}

TEST_CASE("snr_to_sigma") {
  CHECK(snr_to_sigma(0.0, 1.0) == 1.0);
  CHECK(snr_to_sigma(20.0, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(snr_to_sigma(10.0, 2.0) == doctest::Approx(0.6324555320336759).epsilon(1e-14));
  CHECK_THROWS_AS(snr_to_sigma(10.0, 0.0), Error);
  for (double snr = -40.0; snr <= 40.0; snr += 0.37) {
    for (double norm : {0.1, 1.0, 7.5}) {
      CHECK(std::abs(sigma_to_snr_db(snr_to_sigma(snr, norm), norm) - snr) <= 1e-12);
    }
  }
}

TEST_CASE("Rng streams") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));

  Rng rng(42);
  double sum = 0.0;
  double sq = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / count) < 0.01);
  CHECK(std::abs(sq / count - 1.0) < 0.01);

  std::vector<int> buckets(7, 0);
  for (int i = 0; i < 70000; ++i) ++buckets[rng.below(7)];
  for (int b : buckets) CHECK(std::abs(b - 10000) < 500);
}
