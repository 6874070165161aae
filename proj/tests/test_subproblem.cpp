#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "nonconvex_penalty.hpp"
#include "ramda/subproblem.hpp"

using namespace ramda;

namespace {

struct RandomInstance {
  QuadraticSubproblem sub;
  std::unique_ptr<GroupLassoRegularizer> reg;
};

RandomInstance random_group_instance(std::mt19937_64& rng, int num_groups,
                                     int max_group_size,
                                     double weight_scale = 1.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.5, 3.0);

  std::vector<Group> groups;
  int dim = 0;
  for (int g = 0; g < num_groups; ++g) {
    const int size = 1 + static_cast<int>(rng() % max_group_size);
    Group gr;
    gr.indices = Eigen::VectorXi::LinSpaced(size, dim, dim + size - 1);
    gr.weight = weight_scale * unif(rng);
    groups.push_back(std::move(gr));
    dim += size;
  }

  RandomInstance inst;
  inst.reg = std::make_unique<GroupLassoRegularizer>(
      GroupLayout{std::move(groups), dim});
  inst.sub.linear.resize(dim);
  inst.sub.precond.resize(dim);
  inst.sub.anchor.resize(dim);
  for (int i = 0; i < dim; ++i) {
    inst.sub.linear[i] = normal(rng);
    inst.sub.precond[i] = unif(rng);
    inst.sub.anchor[i] = normal(rng);
  }
  inst.sub.psi_scale = 1.0;
  inst.sub.reg = inst.reg.get();
  return inst;
}

// dist(0, dQ(z)) for group-separable convex psi, via the exact
// per-group minimizer over the subdifferential.
double exact_stationarity(const QuadraticSubproblem& sub,
                          const Eigen::VectorXd& z) {
  return sub.psi_scale *
         sub.reg->dist_to_subdiff(z, sub.smooth_grad(z) / sub.psi_scale);
}

}  // namespace

TEST_CASE("objective evaluation") {
  NoneRegularizer none;
  QuadraticSubproblem sub;
  sub.linear = Eigen::VectorXd::Zero(3);
  sub.precond = Eigen::VectorXd::Constant(3, 2.0);
  sub.anchor = Eigen::VectorXd::Constant(3, 1.0);
  sub.reg = &none;

  CHECK(eval_objective(sub, sub.anchor) == 0.0);

  sub.linear << 1, -2, 0.5;
  CHECK(eval_objective(sub, sub.anchor) ==
        doctest::Approx(sub.linear.dot(sub.anchor)));

  std::mt19937_64 rng(1);
  auto inst = random_group_instance(rng, 4, 3);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(inst.sub.dim());
  for (int i = 0; i < z.size(); ++i) z[i] = normal(rng);
  // term-by-term recomputation
  double expected = inst.reg->value(z) + inst.sub.linear.dot(z);
  for (int i = 0; i < z.size(); ++i)
    expected += 0.5 * inst.sub.precond[i] * (z[i] - inst.sub.anchor[i]) *
                (z[i] - inst.sub.anchor[i]);
  CHECK(eval_objective(inst.sub, z) == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(eval_objective(sub, Eigen::VectorXd::Zero(5)),
                  std::invalid_argument);
}

TEST_CASE("pg step") {
  NoneRegularizer none;
  QuadraticSubproblem sub;
  sub.linear.resize(2);
  sub.linear << 1, -1;
  sub.precond.resize(2);
  sub.precond << 2, 4;
  sub.anchor.setZero(2);
  sub.reg = &none;

  // psi = none: exact gradient step
  Eigen::VectorXd z(2);
  z << 0.5, 0.5;
  const double theta = 0.1;
  const Eigen::VectorXd step = pg_step(sub, z, theta);
  CHECK(step.isApprox(z - theta * (sub.linear + sub.precond.cwiseProduct(z)),
                      1e-15));

  // fixed point at the unconstrained minimizer
  const Eigen::VectorXd zstar = -sub.linear.cwiseQuotient(sub.precond);
  CHECK(pg_step(sub, zstar, theta).isApprox(zstar, 1e-15));

  CHECK_THROWS_AS(pg_step(sub, z, 0.0), std::invalid_argument);

  // group-lasso toy: prox of the gradient step by hand
  GroupLassoRegularizer gl(
      GroupLayout{{Group{Eigen::VectorXi::LinSpaced(2, 0, 1), 1.5}}, 2});
  sub.reg = &gl;
  sub.psi_scale = 2.0;
  const Eigen::VectorXd g = sub.linear + sub.precond.cwiseProduct(z);
  Eigen::VectorXd y = z - theta * g;
  const double n = y.norm(), t = theta * sub.psi_scale * 1.5;
  const Eigen::VectorXd expect = n <= t ? Eigen::VectorXd::Zero(2).eval()
                                        : ((1.0 - t / n) * y).eval();
  CHECK(pg_step(sub, z, theta).isApprox(expect, 1e-15));
}

TEST_CASE("certificate basics") {
  std::mt19937_64 rng(2);
  auto inst = random_group_instance(rng, 3, 4);
  Eigen::VectorXd z = Eigen::VectorXd::Random(inst.sub.dim());
  CHECK(certificate(inst.sub, z, z, 0.3) == 0.0);

  // operator cancellation when Pdiag == 1/theta
  QuadraticSubproblem flat = inst.sub;
  flat.precond.setConstant(2.0);
  Eigen::VectorXd z2 = Eigen::VectorXd::Random(flat.dim());
  CHECK(certificate(flat, z, z2, 0.5) == doctest::Approx(0.0));

  CHECK_THROWS_AS(certificate(inst.sub, z, z, -1.0), std::invalid_argument);
}

TEST_CASE("certificate upper-bounds the exact subgradient distance") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    auto inst = random_group_instance(rng, 1 + static_cast<int>(rng() % 6), 8);
    const double theta = 1.0 / inst.sub.precond.maxCoeff();
    Eigen::VectorXd z = Eigen::VectorXd::Random(inst.sub.dim());
    const Eigen::VectorXd z_new = pg_step(inst.sub, z, theta);
    const double cert = certificate(inst.sub, z, z_new, theta);
    const double exact = exact_stationarity(inst.sub, z_new);
    CHECK(cert >= exact - 1e-10);
  }
}

TEST_CASE("screening") {
  std::mt19937_64 rng(6);

  SUBCASE("all screened at the origin instance") {
    auto inst = random_group_instance(rng, 5, 3);
    inst.sub.linear.setZero();
    inst.sub.anchor.setZero();
    CHECK(screen_zero_groups(inst.sub).size() == 5);
  }

  SUBCASE("boundary group is not screened") {
    GroupLassoRegularizer gl(
        GroupLayout{{Group{Eigen::VectorXi::LinSpaced(1, 0, 0), 1.0}}, 1});
    QuadraticSubproblem sub;
    sub.linear = Eigen::VectorXd::Constant(1, 1.0 + 1e-9);
    sub.precond = Eigen::VectorXd::Constant(1, 1.0);
    sub.anchor = Eigen::VectorXd::Zero(1);
    sub.psi_scale = 1.0;
    sub.reg = &gl;
    CHECK(screen_zero_groups(sub).empty());
    sub.linear[0] = 1.0;  // exactly on the boundary: zero is optimal
    CHECK(screen_zero_groups(sub).size() == 1);
  }

  SUBCASE("matches the zero set of a long PG run") {
    for (int rep = 0; rep < 50; ++rep) {
      auto inst = random_group_instance(rng, 6, 4, /*weight_scale=*/2.0);
      const auto screened = screen_zero_groups(inst.sub);
      const double theta = 1.0 / inst.sub.precond.maxCoeff();
      Eigen::VectorXd z = Eigen::VectorXd::Random(inst.sub.dim());
      for (int j = 0; j < 10000; ++j) z = pg_step(inst.sub, z, theta);
      const StructurePattern pat = inst.reg->extract_pattern(z);
      for (int g = 0; g < inst.reg->groups().num_groups(); ++g) {
        const bool is_screened =
            std::find(screened.begin(), screened.end(), g) != screened.end();
        CHECK(is_screened == (pat.group_zero[g] == 1));
      }
    }
  }

  NoneRegularizer none;
  QuadraticSubproblem sub;
  sub.linear = sub.precond = sub.anchor = Eigen::VectorXd::Ones(1);
  sub.reg = &none;
  CHECK_THROWS_AS(screen_zero_groups(sub), std::invalid_argument);
}

TEST_CASE("solve on a diagonal quadratic") {
  NoneRegularizer none;
  QuadraticSubproblem sub;
  sub.linear.resize(3);
  sub.linear << 1, -2, 0.5;
  sub.precond.resize(3);
  sub.precond << 1, 2, 4;
  sub.anchor.resize(3);
  sub.anchor << 0.3, -0.1, 0.8;
  sub.reg = &none;

  const Eigen::VectorXd zstar =
      sub.anchor - sub.linear.cwiseQuotient(sub.precond);
  const double theta = 1.0 / sub.precond.maxCoeff();
  auto [z, rep] = solve(sub, Eigen::VectorXd::Zero(3), theta,
                        {.max_iters = 10000, .tol = 1e-12,
                         .early_stop = false, .min_iters = 1});
  CHECK(rep.stop_reason == StopReason::kCertificate);
  CHECK((z - zstar).norm() < 1e-10);

  // geometric certificate decay: successive certificates shrink
  Eigen::VectorXd zi = Eigen::VectorXd::Zero(3);
  double prev_cert = -1.0;
  for (int j = 0; j < 20; ++j) {
    const Eigen::VectorXd zn = pg_step(sub, zi, theta);
    const double cert = certificate(sub, zi, zn, theta);
    if (j > 0 && prev_cert > 0) CHECK(cert < prev_cert);
    prev_cert = cert;
    zi = zn;
  }
}

TEST_CASE("solve respects iteration cap and early stop") {
  std::mt19937_64 rng(8);
  auto inst = random_group_instance(rng, 4, 4);
  const double theta = 1.0 / inst.sub.precond.maxCoeff();
  Eigen::VectorXd z0 = Eigen::VectorXd::Random(inst.sub.dim());

  auto [z_cap, rep_cap] =
      solve(inst.sub, z0, theta,
            {.max_iters = 1, .tol = 1e-14, .early_stop = false, .min_iters = 1});
  CHECK(rep_cap.iterations == 1);
  CHECK(rep_cap.stop_reason == StopReason::kIterationCap);

  auto [z_es, rep_es] =
      solve(inst.sub, z0, theta,
            {.max_iters = 100000, .tol = 1e-300, .early_stop = true,
             .min_iters = 2});
  CHECK(rep_es.stop_reason == StopReason::kEarlyStop);
  CHECK(rep_es.iterations >= 2);

  // objective never increases past the entry value
  CHECK(rep_es.objective <= eval_objective(inst.sub, z0) + 1e-12);
}

TEST_CASE("solve iterations grow like log(1/eps) for convex psi") {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 10; ++rep) {
    auto inst = random_group_instance(rng, 5, 6);
    const double theta = 1.0 / inst.sub.precond.maxCoeff();
    Eigen::VectorXd z0 = Eigen::VectorXd::Random(inst.sub.dim());

    std::vector<double> iters;
    for (double tol : {1e-2, 1e-4, 1e-6, 1e-8}) {
      auto [z, r] = solve(inst.sub, z0, theta,
                          {.max_iters = 100000, .tol = tol,
                           .early_stop = false, .min_iters = 1});
      CHECK(r.stop_reason == StopReason::kCertificate);
      iters.push_back(r.iterations);
    }
    // doubling log(1/eps) should not much more than double iterations
    const double growth01 = iters[1] - iters[0];
    const double growth12 = iters[2] - iters[1];
    const double growth23 = iters[3] - iters[2];
    const double max_growth = std::max({growth01, growth12, growth23});
    const double min_growth = std::min({growth01, growth12, growth23});
    CHECK(max_growth - min_growth <= 3.0 + 0.5 * max_growth);
  }
}

TEST_CASE("nonconvex branch halves the step and meets the eps^-2 budget") {
  testing::McpPenalty mcp(6, /*lambda=*/1.0, /*gamma=*/50.0);
  QuadraticSubproblem sub;
  sub.linear.resize(6);
  sub.linear << 2, -1, 0.5, -2.5, 3, 0.1;
  sub.precond = Eigen::VectorXd::Constant(6, 1.5);
  sub.anchor.setZero(6);
  sub.reg = &mcp;

  const double theta = 1.0 / sub.precond.maxCoeff();
  Eigen::VectorXd z0 = Eigen::VectorXd::Constant(6, 0.2);

  double c_bound = 0.0;
  for (double tol : {1e-1, 3e-2, 1e-2}) {
    auto [z, r] = solve(sub, z0, theta,
                        {.max_iters = 1000000, .tol = tol,
                         .early_stop = false, .min_iters = 1});
    CHECK(r.stop_reason == StopReason::kCertificate);
    // iterations <= c / tol^2 for a shared constant c
    c_bound = std::max(c_bound, r.iterations * tol * tol);
  }
  CHECK(c_bound <= 100.0);
}

TEST_CASE("degenerate uniform preconditioner still certifies correctly") {
  GroupLassoRegularizer gl(
      GroupLayout{{Group{Eigen::VectorXi::LinSpaced(2, 0, 1), 0.5}}, 2});
  QuadraticSubproblem sub;
  sub.linear.resize(2);
  sub.linear << 1.0, -0.7;
  sub.precond = Eigen::VectorXd::Constant(2, 2.0);
  sub.anchor.setZero(2);
  sub.reg = &gl;

  // theta = 1/maxP makes Pdiag == 1/theta exactly
  auto [z, r] = solve(sub, Eigen::VectorXd::Ones(2), 0.5,
                      {.max_iters = 10000, .tol = 1e-10, .early_stop = false,
                       .min_iters = 1});
  CHECK(r.stop_reason == StopReason::kCertificate);
  // the returned point is genuinely stationary
  CHECK(exact_stationarity(sub, z) <= 1e-9);
}
