#include <doctest.h>

#include <random>

#include "ramda/param_space.hpp"
#include "ramda/regularizers.hpp"

using namespace ramda;

namespace {

GroupLayout single_group(int size, double weight) {
  Group g;
  g.indices = Eigen::VectorXi::LinSpaced(size, 0, size - 1);
  g.weight = weight;
  return {{g}, size};
}

// Independent oracle: the group prox is radial, so scan the scale factor
// on a fine grid and keep the best objective.
Eigen::VectorXd radial_grid_prox(const Eigen::VectorXd& x, double weight,
                                 double tau, double grid_step) {
  const double n = x.norm();
  double best_alpha = 0.0, best_obj = tau * weight * 0.0 + 0.5 * n * n;
  for (double a = grid_step; a <= 1.0 + 1e-12; a += grid_step) {
    const double obj =
        tau * weight * a * n + 0.5 * (a - 1.0) * (a - 1.0) * n * n;
    if (obj < best_obj) {
      best_obj = obj;
      best_alpha = a;
    }
  }
  return best_alpha * x;
}

}  // namespace

TEST_CASE("group lasso value") {
  GroupLassoRegularizer reg(single_group(2, 2.0));
  Eigen::VectorXd w(2);
  w << 3, 4;
  CHECK(reg.value(w) == doctest::Approx(10.0));
  CHECK(reg.value(Eigen::VectorXd::Zero(2)) == 0.0);
  CHECK_THROWS_AS(reg.value(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("l1 value and prox") {
  L1Regularizer reg(3, 1.0);
  Eigen::VectorXd w(3);
  w << 1, -2, 0;
  CHECK(reg.value(w) == doctest::Approx(3.0));

  Eigen::VectorXd x(3);
  x << 2.5, -0.4, 1.0;
  const Eigen::VectorXd z = reg.prox(x, 0.5);
  CHECK(z[0] == doctest::Approx(2.0));
  CHECK(z[1] == 0.0);
  CHECK(z[2] == doctest::Approx(0.5));
}

TEST_CASE("group lasso prox boundary and identity cases") {
  GroupLassoRegularizer reg(single_group(2, 1.0));
  Eigen::VectorXd x(2);
  x << 3, 4;

  CHECK((reg.prox(x, 0.0) - x).cwiseAbs().maxCoeff() == 0.0);

  // ||x|| = 5 <= tau * weight: full shrink, exact zeros
  Eigen::VectorXd z = reg.prox(x, 5.0);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);

  z = reg.prox(x, 2.5);
  CHECK(z[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(z[1] == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(reg.prox(x, -1.0), std::invalid_argument);
}

TEST_CASE("group prox matches the radial grid oracle") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  for (int rep = 0; rep < 25; ++rep) {
    const int size = 1 + static_cast<int>(rng() % 2);
    const double weight = unif(rng);
    GroupLassoRegularizer reg(single_group(size, weight));
    Eigen::VectorXd x(size);
    for (int i = 0; i < size; ++i) x[i] = 3.0 * normal(rng);
    const double tau = unif(rng);
    const Eigen::VectorXd z = reg.prox(x, tau);
    const Eigen::VectorXd oracle = radial_grid_prox(x, weight, tau, 1e-4);
    CHECK((z - oracle).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("prox optimality certificate and nonexpansiveness") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;

  std::vector<Group> gs;
  Group g1, g2;
  g1.indices = Eigen::VectorXi::LinSpaced(3, 0, 2);
  g1.weight = 1.3;
  g2.indices = Eigen::VectorXi::LinSpaced(4, 3, 6);
  g2.weight = 0.4;
  GroupLassoRegularizer reg({{g1, g2}, 8});  // coord 7 unpenalized

  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd x(8), y(8);
    for (int i = 0; i < 8; ++i) {
      x[i] = 2.0 * normal(rng);
      y[i] = 2.0 * normal(rng);
    }
    const double tau = 0.05 + 0.5 * std::abs(normal(rng));
    const Eigen::VectorXd zx = reg.prox(x, tau);
    const Eigen::VectorXd zy = reg.prox(y, tau);
    CHECK((zx - zy).norm() <= (x - y).norm() + 1e-12);
    // 0 in d[tau psi + 0.5 || . - x ||^2] at the prox point
    CHECK(reg.dist_to_subdiff(zx, (zx - x) / tau) <= 1e-10);
  }

  // l1 prox optimality as well
  L1Regularizer l1(5, 0.7);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd x(5), y(5);
    for (int i = 0; i < 5; ++i) {
      x[i] = normal(rng);
      y[i] = normal(rng);
    }
    const double tau = 0.3;
    CHECK((l1.prox(x, tau) - l1.prox(y, tau)).norm() <=
          (x - y).norm() + 1e-12);
    CHECK(l1.dist_to_subdiff(l1.prox(x, tau), (l1.prox(x, tau) - x) / tau) <=
          1e-10);
  }
}

TEST_CASE("dist to subdifferential, group lasso") {
  GroupLassoRegularizer reg(single_group(2, 1.0));

  Eigen::VectorXd w = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd v(2);
  v << 0.3, -0.4;  // ||v|| = 0.5 <= 1: inside the ball
  CHECK(reg.dist_to_subdiff(w, v) == doctest::Approx(0.0));

  v << 3, 0;
  CHECK(reg.dist_to_subdiff(w, v) == doctest::Approx(2.0));

  w << 1, 0;
  v << 0, 0;
  CHECK(reg.dist_to_subdiff(w, v) == doctest::Approx(1.0));

  // sampling the ball never beats the closed form at a zero group
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  w.setZero();
  v << 1.7, -0.9;
  const double closed = reg.dist_to_subdiff(w, v);
  for (int rep = 0; rep < 2000; ++rep) {
    Eigen::VectorXd s(2);
    s << normal(rng), normal(rng);
    if (s.norm() > 1.0) s /= s.norm();
    CHECK((v + s).norm() >= closed - 1e-12);
  }
}

TEST_CASE("nuclear norm value and prox") {
  auto layout = std::make_shared<const ModelLayout>(std::vector<LayerSpec>{
      {"weight", {2, 2}, true},
  });
  NuclearNormRegularizer reg(layout, 1.0);

  Eigen::VectorXd w(4);
  w << 1, 0, 0, 1;  // identity
  CHECK(reg.value(w) == doctest::Approx(2.0));

  // diag(3,1) with tau*lambda = 2 -> diag(1,0)
  Eigen::VectorXd x(4);
  x << 3, 0, 0, 1;
  const Eigen::VectorXd z = reg.prox(x, 2.0);
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(z[1]) < 1e-12);
  CHECK(std::abs(z[2]) < 1e-12);
  CHECK(std::abs(z[3]) < 1e-12);

  CHECK_THROWS_AS(reg.dist_to_subdiff(w, w), UnsupportedOperation);
}

TEST_CASE("nuclear prox is never beaten by random candidates") {
  auto layout = std::make_shared<const ModelLayout>(std::vector<LayerSpec>{
      {"weight", {16, 16}, true},
  });
  NuclearNormRegularizer reg(layout, 0.8);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal;

  Eigen::VectorXd x(256);
  for (int i = 0; i < 256; ++i) x[i] = normal(rng);
  const double tau = 1.1;
  const Eigen::VectorXd z = reg.prox(x, tau);
  const double obj_z = tau * reg.value(z) + 0.5 * (z - x).squaredNorm();
  for (int rep = 0; rep < 1000; ++rep) {
    Eigen::VectorXd cand = z;
    for (int i = 0; i < 256; ++i) cand[i] += 0.3 * normal(rng);
    const double obj_c = tau * reg.value(cand) + 0.5 * (cand - x).squaredNorm();
    CHECK(obj_c >= obj_z - 1e-9);
  }
}

TEST_CASE("pattern extraction") {
  GroupLassoRegularizer reg(single_group(2, 1.0));
  Eigen::VectorXd x(2);
  x << 3, 4;

  StructurePattern p = reg.extract_pattern(reg.prox(x, 10.0));
  REQUIRE(p.group_zero.size() == 1);
  CHECK(p.group_zero[0] == 1);

  p = reg.extract_pattern(x);
  CHECK(p.group_zero[0] == 0);

  // zero vector maps to the all-zero pattern
  p = reg.extract_pattern(Eigen::VectorXd::Zero(2));
  CHECK(p.group_zero[0] == 1);

  auto layout = std::make_shared<const ModelLayout>(std::vector<LayerSpec>{
      {"weight", {2, 2}, true},
  });
  NuclearNormRegularizer nuc(layout, 1.0);
  Eigen::VectorXd eye(4);
  eye << 1, 0, 0, 1;
  StructurePattern pn = nuc.extract_pattern(eye, 1e-8);
  REQUIRE(pn.layer_rank.size() == 1);
  CHECK(pn.layer_rank[0] == 2);
  CHECK(nuc.extract_pattern(Eigen::VectorXd::Zero(4), 1e-8).layer_rank[0] == 0);

  // distinct patterns hash differently
  StructurePattern a, b;
  a.group_zero = {1, 0};
  b.group_zero = {0, 1};
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == StructurePattern{{1, 0}, {}}.hash());
}
