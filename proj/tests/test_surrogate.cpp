#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "gosh/surrogate/bundle.hpp"
#include "test_util.hpp"

using namespace gosh;
using nn::Matrix;

TEST_CASE("value at risk closed forms") {
  CHECK(surrogate::value_at_risk(10.0, 2.0) == doctest::Approx(13.3).epsilon(1e-12));
  CHECK(surrogate::value_at_risk(4.2, 0.0) == 4.2);
  CHECK(surrogate::value_at_risk(0.5, 0.1) == doctest::Approx(0.665).epsilon(1e-12));
  CHECK_THROWS_AS(surrogate::value_at_risk(0.0, -0.1), std::invalid_argument);
}

TEST_CASE("epistemic uncertainty is zero for a constant teacher") {
  std::mt19937_64 rng(1);
  auto g = nn::FcnModel::make(3, 0.5, rng);
  for (auto& w : g.weights) w.setZero();  // dropout cannot change the output
  std::mt19937_64 sampler(2);
  CHECK(surrogate::epistemic_uncertainty(g, {0.1, 0.2, 0.3}, 10, sampler) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(
      surrogate::epistemic_uncertainty(g, {0.1, 0.2, 0.3}, 1, sampler),
      std::invalid_argument);
}

TEST_CASE("epistemic uncertainty is deterministic given the rng state") {
  std::mt19937_64 rng(3);
  auto g = nn::FcnModel::make(4, 0.5, rng);
  std::mt19937_64 a(77), b(77);
  double xa = surrogate::epistemic_uncertainty(g, {0.1, 0.4, 0.2, 0.9}, 25, a);
  double xb = surrogate::epistemic_uncertainty(g, {0.1, 0.4, 0.2, 0.9}, 25, b);
  CHECK(xa == xb);
  CHECK(xa > 0.0);
}

TEST_CASE("sampled uncertainty matches the exhaustive dropout-mask oracle") {
  std::mt19937_64 rng(5);
  // one hidden layer of 4 units so all 2^4 masks can be enumerated
  auto g = nn::FcnModel::make_sized({2, 4, 1},
                                    {nn::Act::Softplus, nn::Act::Sigmoid}, 0.5,
                                    rng);
  std::vector<double> x = {0.7, -0.3};
  Matrix xr(1, 2);
  xr << x[0], x[1];

  // population std over the 16 equally likely masks
  Matrix pre = xr * g.weights[0] + g.biases[0];
  Matrix hidden(1, 4);
  for (int i = 0; i < 4; ++i) {
    double v = pre(0, i);
    hidden(0, i) = v > 30 ? v : std::log1p(std::exp(v));  // softplus
  }
  std::vector<double> outs;
  for (int mask = 0; mask < 16; ++mask) {
    Matrix hm = hidden;
    for (int i = 0; i < 4; ++i) hm(0, i) *= (mask >> i & 1) ? 2.0 : 0.0;
    double o = (hm * g.weights[1] + g.biases[1])(0, 0);
    outs.push_back(1.0 / (1.0 + std::exp(-o)));
  }
  double mu = 0;
  for (double o : outs) mu += o;
  mu /= outs.size();
  double var = 0;
  for (double o : outs) var += (o - mu) * (o - mu);
  double sigma_pop = std::sqrt(var / outs.size());

  std::mt19937_64 sampler(11);
  double xi = surrogate::epistemic_uncertainty(g, x, 10000, sampler);
  CHECK(std::abs(xi - sigma_pop) / sigma_pop < 0.05);
}

TEST_CASE("lcb combines VaR and the student prediction") {
  std::mt19937_64 rng(7);
  auto b = surrogate::SurrogateBundle::make(6, false, rng);
  std::vector<double> x = {0.1, 0.9, 0.3, 0.5, 0.2, 0.7};

  auto c0 = b.lcb(x, 0.0);
  CHECK(c0.lcb ==
        doctest::Approx(surrogate::value_at_risk(c0.mu, c0.sigma)).epsilon(1e-12));
  auto c5 = b.lcb(x, 5.0);
  CHECK(c5.lcb == doctest::Approx(c0.lcb - 5.0 * c5.xi_hat).epsilon(1e-12));
  CHECK(c5.xi_hat == c0.xi_hat);

  // the graph node agrees with the plain computation
  nn::Tape tape;
  Matrix xr(1, 6);
  for (int i = 0; i < 6; ++i) xr(0, i) = x[i];
  nn::Value node = b.lcb_node(tape, tape.leaf(xr), 5.0);
  CHECK(node.val()(0, 0) == doctest::Approx(c5.lcb).epsilon(1e-10));

  CHECK_THROWS_AS(b.lcb({0.1, 0.2}, 1.0), std::invalid_argument);
}

TEST_CASE("lcb input gradient matches finite differences") {
  std::mt19937_64 rng(9);
  auto b = surrogate::SurrogateBundle::make(5, false, rng);
  Matrix x = testutil::random_matrix(1, 5, rng);
  nn::Tape tape;
  nn::Value xin = tape.leaf(x);
  nn::Value node = b.lcb_node(tape, xin, 2.0);
  Matrix analytic = nn::grad(node, std::vector<nn::Value>{xin})[0].val();
  Matrix numeric = testutil::numeric_grad(
      [&](const Matrix& xp) {
        std::vector<double> v(xp.data(), xp.data() + xp.size());
        return b.lcb(v, 2.0).lcb;
      },
      x);
  CHECK(testutil::rel_err(analytic, numeric) < 1e-4);
}

TEST_CASE("exploration weight update rule") {
  surrogate::ExplorationState s;  // k=5, xi_ma=0, psi=0.9, delta=0.1
  auto s1 = surrogate::update_exploration(s, 1.0);
  // xi_ma first: 0.9*0 + 0.1*1 = 0.1; 1.0 > 1.1*0.1 -> k increases
  CHECK(s1.xi_ma == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s1.k == doctest::Approx(5.5).epsilon(1e-12));

  // dead zone: xi equal to the updated moving average leaves k alone
  surrogate::ExplorationState mid;
  mid.xi_ma = 1.0;
  auto s2 = surrogate::update_exploration(mid, 1.0);
  CHECK(s2.k == 5.0);
  CHECK(s2.xi_ma == doctest::Approx(1.0));

  // decrease branch
  surrogate::ExplorationState hi;
  hi.xi_ma = 1.0;
  auto s3 = surrogate::update_exploration(hi, 0.1);
  // xi_ma -> 0.91; 0.1 < 0.9*0.91 -> k decreases
  CHECK(s3.k == doctest::Approx(4.5).epsilon(1e-12));

  // psi = 1 freezes the moving average entirely
  surrogate::ExplorationState frozen;
  frozen.psi = 1.0;
  frozen.xi_ma = 0.5;
  auto s4 = surrogate::update_exploration(frozen, 10.0);
  CHECK(s4.xi_ma == 0.5);

  // repeated high surprise compounds multiplicatively: k0 (1+delta)^n
  surrogate::ExplorationState rep;
  for (int i = 0; i < 4; ++i) rep = surrogate::update_exploration(rep, 100.0);
  CHECK(rep.k == doctest::Approx(5.0 * std::pow(1.1, 4)).epsilon(1e-12));

  CHECK_THROWS_AS(surrogate::update_exploration(s, -1.0),
                  std::invalid_argument);
}

TEST_CASE("literal decrease rule shrinks k inside the dead zone") {
  // with the decrease threshold printed as (1+delta), anything below the
  // increase threshold shrinks k — the dead zone disappears
  surrogate::ExplorationState s;
  s.literal_decrease_rule = true;
  s.xi_ma = 1.0;
  auto s1 = surrogate::update_exploration(s, 1.0);
  CHECK(s1.k == doctest::Approx(4.5));
  s.literal_decrease_rule = false;
  auto s2 = surrogate::update_exploration(s, 1.0);  // same inputs, default rule
  CHECK(s2.k == 5.0);
}

TEST_CASE("tune drives the surrogate toward the observed objective") {
  std::mt19937_64 rng(13);
  nn::AdamWConfig oc;
  oc.lr = 1e-2;
  auto b = surrogate::SurrogateBundle::make(4, false, rng, oc);
  surrogate::IntervalRecord rec{{0.2, 0.8, 0.4, 0.6}, 0.9};
  std::deque<surrogate::IntervalRecord> replay;

  Matrix xr(1, 4);
  for (int i = 0; i < 4; ++i) xr(0, i) = rec.x[i];
  double before = std::abs(b.f.infer(xr).first(0, 0) - rec.y);
  std::mt19937_64 tr(17);
  double xi = 0.0;
  for (int i = 0; i < 200; ++i) xi = b.tune(rec, replay, rec.x, tr);
  double after = std::abs(b.f.infer(xr).first(0, 0) - rec.y);
  CHECK(after < before);
  CHECK(after < 0.05);  // overfits a single repeated record
  CHECK(xi >= 0.0);

  // the student chases the sampled uncertainty at the tuned point
  double xi_hat = b.h.infer(xr)(0, 0);
  CHECK(std::abs(xi_hat - xi) < 0.25);
  CHECK_THROWS_AS(
      b.tune({{0.1}, 0.5}, replay, rec.x, tr), std::invalid_argument);
}

TEST_CASE("bundle checkpoint round trip") {
  std::mt19937_64 rng(19);
  auto b = surrogate::SurrogateBundle::make(7, true, rng);
  surrogate::ExplorationState e;
  e.k = 6.05;
  e.xi_ma = 0.33;
  auto j = surrogate::bundle_checkpoint(b, e);
  auto [b2, e2] = surrogate::bundle_from_checkpoint(j);
  CHECK(b2.input_dim == 7);
  CHECK(b2.starred);
  CHECK(e2.k == 6.05);
  CHECK(e2.xi_ma == 0.33);
  std::vector<double> x(7, 0.3);
  CHECK(b2.lcb(x, 2.0).lcb == doctest::Approx(b.lcb(x, 2.0).lcb).epsilon(1e-12));

  j["kind"] = "other";
  CHECK_THROWS_AS(surrogate::bundle_from_checkpoint(j), std::runtime_error);
}
