#include "cobo/acquisition.hpp"

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace cobo;
using cobo::testing::Gen;

namespace {

DiscretizedGP scalar_model(double var) { return {Vector::Zero(1), Matrix::Constant(1, 1, var)}; }

JointDecision decision(std::initializer_list<std::size_t> idx) { return JointDecision{std::vector<std::size_t>(idx)}; }

std::size_t argmax_local(const DiscretizedGP& model, const FantasyDraws& draws, int column, double noise,
                         double* gap) {
  std::vector<double> v;
  for (std::size_t x = 0; x < model.size(); ++x) v.push_back(local_term(model, x, draws, column, noise));
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  double second = -INFINITY;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i != best) second = std::max(second, v[i]);
  *gap = v[best] - second;
  return best;
}

}  // namespace

TEST_CASE("beta schedules") {
  const BetaSchedule log_inc(BetaSchedule::Kind::log_increasing);
  const BetaSchedule exp_dec(BetaSchedule::Kind::exp_decreasing);
  const BetaSchedule constant(BetaSchedule::Kind::constant);
  for (int t = 1; t <= 50; ++t) {
    CHECK(log_inc.value(t) == std::log(2.0 * t + 1.0));
    CHECK(exp_dec.value(t) == std::exp(-t / 2.0));
    CHECK(constant.value(t) == 1.0);
    CHECK(exp_dec.value(t) > 0.0);
  }
  CHECK_THROWS(log_inc.value(0));
  CHECK(parse_beta_kind("exp_decreasing") == BetaSchedule::Kind::exp_decreasing);
  CHECK(to_string(BetaSchedule::Kind::log_increasing) == "log_increasing");
  try {
    parse_beta_kind("quadratic");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("quadratic") != std::string::npos);
  }
}

TEST_CASE("fantasy draws are deterministic and antithetic") {
  const FantasyDraws a = FantasyDraws::generate(8, 3, 99);
  const FantasyDraws b = FantasyDraws::generate(8, 3, 99);
  CHECK(a.xi == b.xi);
  CHECK(a.antithetic);
  CHECK(a.xi.bottomRows(4) == -a.xi.topRows(4));
  CHECK(FantasyDraws::generate(8, 3, 100).xi != a.xi);
  CHECK_THROWS(FantasyDraws::generate(7, 3, 1));
  CHECK_NOTHROW(FantasyDraws::generate(7, 3, 1, false));
  CHECK(FantasyDraws::from_matrix(a.xi).antithetic);
}

TEST_CASE("acquisition config validation") {
  AcqConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.samples = 3;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.restarts = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("sigma_central in the scalar case") {
  DiscretizedGP c{Vector::Zero(2), Matrix::Identity(2, 2)};
  c.cov(0, 1) = c.cov(1, 0) = 0.3;
  CHECK(sigma_central(c, decision({0}), 1, 0.0)(0) == doctest::Approx(0.3).epsilon(1e-15));
  const double noise = 0.02;
  CHECK(sigma_central(c, decision({0}), 0, noise)(0) == doctest::Approx(1.0 / std::sqrt(1.0 + noise)).epsilon(1e-15));
}

TEST_CASE("sigma_central squared norm matches a dense solve") {
  Gen gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscretizedGP c = gen.model(9);
    const double noise = 0.02;
    const JointDecision x = decision({gen.index(9), gen.index(9)});
    Matrix sigma(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        sigma(a, b) = c.cov(static_cast<Eigen::Index>(x.indices[a]), static_cast<Eigen::Index>(x.indices[b]));
    sigma.diagonal().array() += noise;
    const Matrix inv = oracle::inverse(sigma);
    for (std::size_t z = 0; z < 9; ++z) {
      Vector k(2);
      for (int a = 0; a < 2; ++a)
        k(a) = c.cov(static_cast<Eigen::Index>(x.indices[a]), static_cast<Eigen::Index>(z));
      const double want = k.dot(inv * k);
      CHECK(std::abs(sigma_central(c, x, z, noise).squaredNorm() - want) <= 1e-10);
    }
  }
}

TEST_CASE("sigma_local formula") {
  CHECK(sigma_local(scalar_model(1.0), 0, 0, 0.0) == 1.0);
  DiscretizedGP m{Vector::Zero(2), Matrix::Zero(2, 2)};
  m.cov(0, 0) = 0.5;
  m.cov(0, 1) = m.cov(1, 0) = 0.25;
  m.cov(1, 1) = 0.5;
  CHECK(sigma_local(m, 0, 1, 0.02) == doctest::Approx(0.25 / std::sqrt(0.52)).epsilon(1e-15));
  m.cov(0, 1) = m.cov(1, 0) = 0.0;
  CHECK(sigma_local(m, 0, 1, 0.02) == 0.0);
  m.cov(0, 0) = -1e-6;
  CHECK_THROWS(sigma_local(m, 0, 1, 0.02));
}

TEST_CASE("cokg_estimate with zero draws is the sum of posterior maxima") {
  Gen gen(32);
  const DiscretizedGP c = gen.model(6);
  const std::vector<DiscretizedGP> locals{gen.model(6), gen.model(6)};
  const FantasyDraws zero = FantasyDraws::from_matrix(Matrix::Zero(4, 2));
  const double beta = 0.7;
  const double want = c.mean.maxCoeff() + beta * (locals[0].mean.maxCoeff() + locals[1].mean.maxCoeff());
  CHECK(cokg_estimate(c, locals, decision({1, 4}), beta, zero, 0.02) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("cokg_estimate with beta zero is the central estimate bit for bit") {
  Gen gen(33);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscretizedGP c = gen.model(12);
    const std::vector<DiscretizedGP> locals{gen.model(12), gen.model(12), gen.model(12)};
    const FantasyDraws draws = FantasyDraws::generate(16, 3, static_cast<std::uint64_t>(trial));
    const JointDecision x = decision({gen.index(12), gen.index(12), gen.index(12)});
    CHECK(cokg_estimate(c, locals, x, 0.0, draws, 0.02) == qkg_estimate(c, x, draws, 0.02));
  }
}

TEST_CASE("cokg_estimate matches a hand enumeration on a small instance") {
  DiscretizedGP c{Vector(4), Matrix(4, 4)};
  c.mean << 0.1, 0.4, -0.2, 0.3;
  c.cov << 1.0, 0.5, 0.2, 0.1,  //
      0.5, 1.0, 0.3, 0.2,       //
      0.2, 0.3, 1.0, 0.4,       //
      0.1, 0.2, 0.4, 1.0;
  DiscretizedGP l1{Vector(4), Matrix(4, 4)};
  l1.mean << 0.0, 0.2, 0.5, -0.1;
  l1.cov = 0.8 * c.cov;
  DiscretizedGP l2{Vector(4), Matrix(4, 4)};
  l2.mean << 0.3, -0.3, 0.1, 0.0;
  l2.cov = Matrix::Identity(4, 4) * 0.6;
  l2.cov(0, 3) = l2.cov(3, 0) = 0.2;
  const std::vector<DiscretizedGP> locals{l1, l2};
  Matrix xi(2, 2);
  xi << 0.7, -1.2, -0.7, 1.2;
  const FantasyDraws draws = FantasyDraws::from_matrix(xi);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const double got = cokg_estimate(c, locals, decision({a, b}), 1.5, draws, 0.02);
      const double want = oracle::cokg_value(c, locals, {a, b}, 1.5, xi, 0.02);
      CHECK(std::abs(got - want) <= 1e-12);
    }
}

TEST_CASE("beta enters linearly") {
  Gen gen(34);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscretizedGP c = gen.model(10);
    const std::vector<DiscretizedGP> locals{gen.model(10), gen.model(10)};
    const FantasyDraws draws = FantasyDraws::generate(8, 2, 5 + static_cast<std::uint64_t>(trial));
    const JointDecision x = decision({gen.index(10), gen.index(10)});
    const double noise = 0.02;
    const double locals_sum = local_term(locals[0], x.indices[0], draws, 0, noise) +
                              local_term(locals[1], x.indices[1], draws, 1, noise);
    const double b1 = gen.uniform(0.0, 3.0);
    const double b2 = gen.uniform(0.0, 3.0);
    const double diff = cokg_estimate(c, locals, x, b2, draws, noise) - cokg_estimate(c, locals, x, b1, draws, noise);
    CHECK(std::abs(diff - (b2 - b1) * locals_sum) <= 1e-12);
  }
}

TEST_CASE("repeated estimates are bit-identical") {
  Gen gen(35);
  const DiscretizedGP c = gen.model(10);
  const std::vector<DiscretizedGP> locals{gen.model(10), gen.model(10)};
  const FantasyDraws draws = FantasyDraws::generate(8, 2, 3);
  const JointDecision x = decision({2, 7});
  CHECK(cokg_estimate(c, locals, x, 1.1, draws, 0.02) == cokg_estimate(c, locals, x, 1.1, draws, 0.02));
}

TEST_CASE("optimize_cokg with one agent scans the grid") {
  Gen gen(36);
  const DiscretizedGP c = gen.model(15);
  const std::vector<DiscretizedGP> locals{gen.model(15)};
  const FantasyDraws draws = FantasyDraws::generate(8, 1, 4);
  const AcqResult r = optimize_cokg(c, locals, 0.9, AcqConfig{}, draws, 0.02, 1);
  CHECK(r.exhaustive);
  double best = -INFINITY;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < 15; ++i) {
    const double v = cokg_estimate(c, locals, decision({i}), 0.9, draws, 0.02);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  CHECK(r.value == best);
  CHECK(r.best == decision({arg}));
}

TEST_CASE("exhaustive optimize_cokg matches an independent enumeration") {
  Gen gen(37);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscretizedGP c = gen.model(16, 6);
    const std::vector<DiscretizedGP> locals{gen.model(16, 5), gen.model(16, 5)};
    const FantasyDraws draws = FantasyDraws::generate(8, 2, 40 + static_cast<std::uint64_t>(trial));
    const AcqResult r = optimize_cokg(c, locals, 1.2, AcqConfig{}, draws, 0.02, 0);
    const oracle::Enumerated want = oracle::enumerate_cokg(c, locals, 1.2, draws.xi, 0.02);
    CHECK(r.exhaustive);
    CHECK(r.best.indices == want.best);
    CHECK(std::abs(r.value - want.value) <= 1e-12);
  }
}

TEST_CASE("coordinate ascent never beats enumeration and its steps never decrease") {
  Gen gen(38);
  int matches = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const DiscretizedGP c = gen.model(16, 6);
    const std::vector<DiscretizedGP> locals{gen.model(16, 5), gen.model(16, 5)};
    const FantasyDraws draws = FantasyDraws::generate(8, 2, static_cast<std::uint64_t>(seed));
    AcqConfig cfg;
    cfg.exhaustive_threshold = 0;
    const AcqResult ca = optimize_cokg(c, locals, 1.0, cfg, draws, 0.02, static_cast<std::uint64_t>(seed));
    cfg.exhaustive_threshold = 1u << 20;
    const AcqResult ex = optimize_cokg(c, locals, 1.0, cfg, draws, 0.02, 0);
    CHECK_FALSE(ca.exhaustive);
    CHECK(ca.value <= ex.value);
    if (ca.value == ex.value) ++matches;
    CHECK(ca.value == cokg_estimate(c, locals, ca.best, 1.0, draws, 0.02));
    for (const auto& restart : ca.trace)
      for (std::size_t i = 1; i < restart.size(); ++i) CHECK(restart[i] >= restart[i - 1]);
  }
  CHECK(matches >= 18);
}

TEST_CASE("large beta picks each agent's own knowledge-gradient maximizer") {
  Gen gen(39);
  int checked = 0;
  for (int trial = 0; trial < 20 && checked < 3; ++trial) {
    const DiscretizedGP c = gen.model(9, 4);
    const std::vector<DiscretizedGP> locals{gen.model(9, 3), gen.model(9, 3)};
    const FantasyDraws draws = FantasyDraws::generate(16, 2, static_cast<std::uint64_t>(trial));
    double gap0 = 0.0, gap1 = 0.0;
    const std::size_t a0 = argmax_local(locals[0], draws, 0, 0.02, &gap0);
    const std::size_t a1 = argmax_local(locals[1], draws, 1, 0.02, &gap1);
    if (gap0 < 1e-4 || gap1 < 1e-4) continue;  // local maximizers must be unique
    const AcqResult r = optimize_cokg(c, locals, 1e6, AcqConfig{}, draws, 0.02, 0);
    CHECK(r.best == decision({a0, a1}));
    ++checked;
  }
  CHECK(checked == 3);
}

TEST_CASE("knowledge gradient of an uninformative point is zero") {
  DiscretizedGP m{Vector(3), Matrix::Zero(3, 3)};
  m.mean << 0.2, 0.9, -0.4;
  const std::vector<double> draws{0.3, -0.3, 1.5, -1.5};
  CHECK(kg_local_estimate(m, 1, draws, 0.02) == 0.0);
}

TEST_CASE("antithetic pairs give a non-negative knowledge gradient") {
  Gen gen(40);
  for (int trial = 0; trial < 200; ++trial) {
    const DiscretizedGP m = gen.model(6, gen.integer(1, 6));
    const double z = gen.normal();
    const std::vector<double> pair{z, -z};
    CHECK(kg_local_estimate(m, gen.index(6), pair, gen.uniform(0.0, 0.1)) >= -1e-12);
  }
}

TEST_CASE("knowledge gradient converges to its quadrature value") {
  Gen gen(41);
  const DiscretizedGP m = gen.model(8, 4);
  const std::size_t x = 3;
  const FantasyDraws draws = FantasyDraws::generate(100000, 1, 17);
  const std::vector<double> col(draws.xi.col(0).data(), draws.xi.col(0).data() + draws.xi.rows());
  const double mc = kg_local_estimate(m, x, col, 0.02);
  const double quad = oracle::kg_quadrature(m, x, 0.02, 201);
  CHECK(std::abs(mc - quad) <= 1e-2);
}

TEST_CASE("baselines") {
  Gen gen(42);
  const DiscretizedGP shared = gen.model(12, 5);
  const std::vector<DiscretizedGP> same(3, shared);
  const FantasyDraws draws = FantasyDraws::generate(16, 3, 8);
  const AcqResult nc = select_no_collaboration(same, draws, 0.02);
  CHECK(nc.best.indices[0] == nc.best.indices[1]);
  CHECK(nc.best.indices[1] == nc.best.indices[2]);

  const DiscretizedGP c = gen.model(12, 5);
  const std::vector<DiscretizedGP> locals{gen.model(12, 5), gen.model(12, 5)};
  const FantasyDraws d2 = FantasyDraws::generate(16, 2, 9);
  const AcqResult q = select_barycenter_qkg(c, locals, AcqConfig{}, d2, 0.02, 5);
  const AcqResult direct = optimize_cokg(c, locals, 0.0, AcqConfig{}, d2, 0.02, 5);
  CHECK(q.best == direct.best);
  CHECK(q.value == direct.value);

  const std::vector<DiscretizedGP> one{shared};
  const FantasyDraws d1 = FantasyDraws::generate(16, 1, 10);
  const AcqResult dc = select_data_communication(shared, 1, AcqConfig{}, d1, 0.02, 0);
  const AcqResult nc1 = select_no_collaboration(one, d1, 0.02);
  CHECK(dc.best == nc1.best);
}
