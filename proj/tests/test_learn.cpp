#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "descspace/errors.hpp"
#include "descspace/estimators.hpp"
#include "descspace/nn.hpp"
#include "descspace/numeric.hpp"
#include "descspace/objective.hpp"
#include "descspace/rng.hpp"
#include "descspace/table.hpp"
#include "descspace/trainer.hpp"

using namespace descspace;

namespace {

JointTable xor_triple() {
  return JointTable({2, 2, 2}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}},
                    {0.25, 0.25, 0.25, 0.25});
}

trainer::TrainConfig tiny_config() {
  trainer::TrainConfig config;
  config.latent_dim = 1;
  config.critic_hidden = {4};
  config.embed_dim = 3;
  config.batch = 6;
  config.steps = 40;
  config.encoder_lr = 1e-2;
  config.critic_lr = 1e-3;
  config.eval_samples = 2000;
  config.checkpoints = 4;
  config.seed = 11;
  return config;
}

bool close_grad(double analytic, double fd) {
  return std::abs(analytic - fd) <= 1e-6 + 1e-4 * std::abs(fd);
}

}  // namespace

TEST_SUITE("nn") {
  TEST_CASE("construction fixes shapes, zero biases and glorot bounds") {
    RngStream rng(1);
    const auto net = nn::make_mlp(5, {7, 3}, 2, 0.2, rng);
    REQUIRE(net.layers() == 3);
    CHECK(net.weights[0].rows() == 5);
    CHECK(net.weights[0].cols() == 7);
    CHECK(net.weights[2].cols() == 2);
    CHECK(net.input_dim() == 5);
    CHECK(net.output_dim() == 2);
    for (const auto& b : net.biases) CHECK(b.cwiseAbs().maxCoeff() == 0.0);
    const double bound0 = std::sqrt(6.0 / (5 + 7));
    CHECK(net.weights[0].cwiseAbs().maxCoeff() <= bound0);
    RngStream again(1);
    const auto copy = nn::make_mlp(5, {7, 3}, 2, 0.2, again);
    CHECK(net.weights[1] == copy.weights[1]);
  }

  TEST_CASE("a single linear layer is an affine map") {
    RngStream rng(2);
    auto net = nn::make_mlp(2, {}, 2, 0.2, rng);
    net.weights[0] << 1.0, 2.0, 3.0, 4.0;
    net.biases[0] << 0.5, -0.5;
    Eigen::MatrixXd x(1, 2);
    x << 1.0, 1.0;
    const auto y = nn::forward(net, x);
    CHECK(y(0, 0) == doctest::Approx(4.5).epsilon(1e-14));
    CHECK(y(0, 1) == doctest::Approx(5.5).epsilon(1e-14));
  }

  TEST_CASE("hidden layers leak negative activations") {
    RngStream rng(3);
    auto net = nn::make_mlp(1, {1}, 1, 0.2, rng);
    net.weights[0](0, 0) = 1.0;
    net.biases[0](0, 0) = 0.0;
    net.weights[1](0, 0) = 1.0;
    net.biases[1](0, 0) = 0.0;
    Eigen::MatrixXd x(2, 1);
    x << 2.0, -2.0;
    const auto y = nn::forward(net, x);
    CHECK(y(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(y(1, 0) == doctest::Approx(-0.4).epsilon(1e-14));
  }

  TEST_CASE("backward matches central finite differences") {
    RngStream rng(4);
    auto net = nn::make_mlp(3, {4}, 2, 0.2, rng);
    Eigen::MatrixXd x(5, 3), v(5, 2);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
      for (int j = 0; j < 2; ++j) v(i, j) = rng.uniform(-1.0, 1.0);
    }
    auto loss = [&](const nn::Mlp& m) {
      return (nn::forward(m, x).array() * v.array()).sum();
    };
    nn::MlpTape tape;
    nn::forward(net, x, &tape);
    auto grads = nn::zero_grads(net);
    const Eigen::MatrixXd dx = nn::backward(net, tape, v, grads);

    const double h = 1e-6;
    for (int layer = 0; layer < net.layers(); ++layer) {
      for (int r = 0; r < net.weights[layer].rows(); ++r) {
        for (int c = 0; c < net.weights[layer].cols(); ++c) {
          auto perturbed = net;
          perturbed.weights[layer](r, c) += h;
          const double up = loss(perturbed);
          perturbed.weights[layer](r, c) -= 2 * h;
          const double down = loss(perturbed);
          CHECK(close_grad(grads.weights[layer](r, c), (up - down) / (2 * h)));
        }
      }
      for (int c = 0; c < net.biases[layer].cols(); ++c) {
        auto perturbed = net;
        perturbed.biases[layer](0, c) += h;
        const double up = loss(perturbed);
        perturbed.biases[layer](0, c) -= 2 * h;
        const double down = loss(perturbed);
        CHECK(close_grad(grads.biases[layer](0, c), (up - down) / (2 * h)));
      }
    }
    for (int i = 0; i < 2; ++i) {
      Eigen::MatrixXd xp = x;
      xp(i, i) += h;
      const double up = (nn::forward(net, xp).array() * v.array()).sum();
      xp(i, i) -= 2 * h;
      const double down = (nn::forward(net, xp).array() * v.array()).sum();
      CHECK(close_grad(dx(i, i), (up - down) / (2 * h)));
    }
  }

  TEST_CASE("sgd takes plain descent steps") {
    Eigen::MatrixXd p(1, 2), g(1, 2);
    p << 1.0, -2.0;
    g << 0.5, 0.25;
    nn::Sgd opt(0.1);
    opt.step({&p}, {&g});
    CHECK(p(0, 0) == doctest::Approx(0.95).epsilon(1e-14));
    CHECK(p(0, 1) == doctest::Approx(-2.025).epsilon(1e-14));
  }

  TEST_CASE("adam's first step follows the bias-corrected closed form") {
    Eigen::MatrixXd p(1, 2), g(1, 2);
    p << 0.0, 0.0;
    g << 0.3, -2.0;
    nn::Adam opt(0.01);
    opt.step({&p}, {&g});
    for (int j = 0; j < 2; ++j) {
      const double expected = -0.01 * g(0, j) / (std::abs(g(0, j)) + 1e-8);
      CHECK(p(0, j) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_SUITE("estimators") {
  TEST_CASE("contrastive loss at a pinned two-row batch") {
    Eigen::MatrixXd a(2, 1), b(2, 1);
    a << 0.3, -0.7;
    b << 0.1, -0.2;
    const auto r = estimators::infonce_from_embeddings(a, b, 1.0);
    CHECK(r.loss_nats == doctest::Approx(0.55534498885860499).epsilon(1e-12));
    CHECK(r.bound_bits == doctest::Approx(0.19880653859115305).epsilon(1e-12));
  }

  TEST_CASE("the bound never exceeds the batch log and reaches it when aligned") {
    RngStream rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd a(8, 4), b(8, 4);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 4; ++j) {
          a(i, j) = rng.normal();
          b(i, j) = rng.normal();
        }
      const auto r = estimators::infonce_from_embeddings(a, b, 1.0);
      CHECK(r.bound_bits <= std::log2(8.0) + 1e-12);
    }
    Eigen::MatrixXd far(8, 1), same(8, 1);
    for (int i = 0; i < 8; ++i) far(i, 0) = 100.0 * i;
    same = far;
    const auto aligned = estimators::infonce_from_embeddings(far, same, 1.0);
    CHECK(aligned.bound_bits == doctest::Approx(3.0).epsilon(1e-9));
  }

  TEST_CASE("temperature rescales like shrinking the embeddings") {
    RngStream rng(9);
    Eigen::MatrixXd a(4, 2), b(4, 2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
      }
    const auto hot = estimators::infonce_from_embeddings(a, b, 2.0);
    const double s = 1.0 / std::sqrt(2.0);
    const auto scaled = estimators::infonce_from_embeddings(s * a, s * b, 1.0);
    CHECK(hot.loss_nats == doctest::Approx(scaled.loss_nats).epsilon(1e-12));
  }

  TEST_CASE("embedding gradients match central finite differences") {
    RngStream rng(10);
    Eigen::MatrixXd a(4, 3), b(4, 3);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) {
        a(i, j) = rng.uniform(-1.0, 1.0);
        b(i, j) = rng.uniform(-1.0, 1.0);
      }
    Eigen::MatrixXd da, db;
    estimators::infonce_from_embeddings(a, b, 1.5, &da, &db);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) {
        Eigen::MatrixXd ap = a;
        ap(i, j) += h;
        const double up = estimators::infonce_from_embeddings(ap, b, 1.5).loss_nats;
        ap(i, j) -= 2 * h;
        const double down =
            estimators::infonce_from_embeddings(ap, b, 1.5).loss_nats;
        CHECK(close_grad(da(i, j), (up - down) / (2 * h)));
        Eigen::MatrixXd bp = b;
        bp(i, j) += h;
        const double upb = estimators::infonce_from_embeddings(a, bp, 1.5).loss_nats;
        bp(i, j) -= 2 * h;
        const double downb =
            estimators::infonce_from_embeddings(a, bp, 1.5).loss_nats;
        CHECK(close_grad(db(i, j), (upb - downb) / (2 * h)));
      }
    }
  }

  TEST_CASE("critic pairs propagate gradients into the latent input") {
    RngStream rng(15);
    estimators::NcePair pair;
    pair.term = {0, 1};
    pair.critic_u = nn::make_mlp(2, {5}, 3, 0.2, rng);
    pair.critic_x = nn::make_mlp(4, {5}, 3, 0.2, rng);
    Eigen::MatrixXd u(4, 2), x(4, 4);
    x.setZero();
    for (int i = 0; i < 4; ++i) {
      u(i, 0) = rng.normal();
      u(i, 1) = rng.normal();
      x(i, i % 2) = 1.0;
      x(i, 2 + i % 2) = 1.0;
    }
    const auto eval = estimators::evaluate_pair(pair, u, x);
    CHECK(eval.result.bound_bits <= 2.0 + 1e-12);
    REQUIRE(eval.d_u_in.rows() == 4);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Eigen::MatrixXd up = u;
      up(i, i) += h;
      const double hi = estimators::evaluate_pair(pair, up, x).result.loss_nats;
      up(i, i) -= 2 * h;
      const double lo = estimators::evaluate_pair(pair, up, x).result.loss_nats;
      CHECK(close_grad(eval.d_u_in(i, i), (hi - lo) / (2 * h)));
    }
  }

  TEST_CASE("channel bound at a pinned batch") {
    channels::SoftEncoder enc;
    enc.mu = Eigen::MatrixXd(2, 1);
    enc.mu << 0.0, 1.0;
    enc.log_sigma = Eigen::MatrixXd(2, 1);
    enc.log_sigma << 0.0, 0.5;
    Eigen::MatrixXd eps(2, 1);
    eps << 0.25, -0.5;
    const auto eval =
        estimators::component_info_bound(enc, {0, 1}, eps, false);
    CHECK(eval.bound_nats == doctest::Approx(-0.052404016582703818).epsilon(1e-12));
    CHECK(eval.bound_bits ==
          doctest::Approx(eval.bound_nats / kLn2).epsilon(1e-12));
  }

  TEST_CASE("channel bound saturates to the value split of the batch") {
    channels::SoftEncoder enc;
    enc.mu = Eigen::MatrixXd(2, 1);
    enc.mu << -10.0, 10.0;
    enc.log_sigma = Eigen::MatrixXd::Zero(2, 1);
    const Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(4, 1);
    const auto eval =
        estimators::component_info_bound(enc, {0, 1, 0, 1}, eps, false);
    CHECK(eval.bound_nats == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(eval.bound_bits <= 2.0 + 1e-12);
  }

  TEST_CASE("channel bound is invariant under batch reordering") {
    RngStream rng(21);
    channels::SoftEncoder enc;
    enc.mu = Eigen::MatrixXd(3, 2);
    enc.log_sigma = Eigen::MatrixXd(3, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) {
        enc.mu(i, j) = rng.normal();
        enc.log_sigma(i, j) = 0.3 * rng.normal();
      }
    std::vector<int> x = {0, 1, 2, 2, 1, 0};
    Eigen::MatrixXd eps(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 2; ++j) eps(i, j) = rng.normal();
    const auto base = estimators::component_info_bound(enc, x, eps, false);
    std::vector<int> xr = {1, 0, 2, 0, 1, 2};
    Eigen::MatrixXd epsr(6, 2);
    epsr.row(0) = eps.row(1);
    epsr.row(1) = eps.row(5);
    epsr.row(2) = eps.row(2);
    epsr.row(3) = eps.row(0);
    epsr.row(4) = eps.row(4);
    epsr.row(5) = eps.row(3);
    const auto shuffled = estimators::component_info_bound(enc, xr, epsr, false);
    CHECK(base.bound_nats == shuffled.bound_nats);
  }

  TEST_CASE("channel bound gradients match central finite differences") {
    RngStream rng(22);
    channels::SoftEncoder enc;
    enc.mu = Eigen::MatrixXd(3, 2);
    enc.log_sigma = Eigen::MatrixXd(3, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) {
        enc.mu(i, j) = rng.uniform(-1.0, 1.0);
        enc.log_sigma(i, j) = 0.2 * rng.uniform(-1.0, 1.0);
      }
    std::vector<int> x = {0, 1, 2, 1, 0, 2};
    Eigen::MatrixXd eps(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 2; ++j) eps(i, j) = rng.normal();
    const auto eval = estimators::component_info_bound(enc, x, eps, true);
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 2; ++j) {
        auto perturbed = enc;
        perturbed.mu(i, j) += h;
        const double up =
            estimators::component_info_bound(perturbed, x, eps, false).bound_nats;
        perturbed.mu(i, j) -= 2 * h;
        const double down =
            estimators::component_info_bound(perturbed, x, eps, false).bound_nats;
        CHECK(close_grad(eval.d_mu(i, j), (up - down) / (2 * h)));
        perturbed = enc;
        perturbed.log_sigma(i, j) += h;
        const double up_ls =
            estimators::component_info_bound(perturbed, x, eps, false).bound_nats;
        perturbed.log_sigma(i, j) -= 2 * h;
        const double down_ls =
            estimators::component_info_bound(perturbed, x, eps, false).bound_nats;
        CHECK(close_grad(eval.d_log_sigma(i, j), (up_ls - down_ls) / (2 * h)));
      }
    }
  }
}

TEST_SUITE("trainer") {
  TEST_CASE("constraint strength holds then ramps geometrically") {
    trainer::GammaSchedule ramp{2.0, 10.0};
    CHECK(trainer::gamma_at(ramp, 0, 100) == doctest::Approx(2.0));
    CHECK(trainer::gamma_at(ramp, 50, 100) == doctest::Approx(2.0));
    CHECK(trainer::gamma_at(ramp, 75, 100) ==
          doctest::Approx(4.4721359549995796).epsilon(1e-12));
    CHECK(trainer::gamma_at(ramp, 100, 100) == doctest::Approx(10.0).epsilon(1e-12));
    trainer::GammaSchedule flat{1.0, 1.0};
    CHECK(trainer::gamma_at(flat, 90, 100) == doctest::Approx(1.0));
  }

  TEST_CASE("state attaches critics only to weighted multi-component terms") {
    const auto table = xor_triple();
    const auto config = tiny_config();
    const auto tc_max = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 1.0), 3);
    trainer::TrainState state(table, tc_max, config);
    CHECK(state.n_components() == 3);
    CHECK(state.n_pairs() == 1);
    CHECK(state.encoders().size() == 3);
    CHECK(state.encoders()[0].outcomes() == 2);
    CHECK(state.encoders()[0].dim() == config.latent_dim);
    CHECK(state.total_component_entropy_bits() == doctest::Approx(3.0).epsilon(1e-12));

    objective::ObjectiveSpec singles;
    singles.terms = {{0}, {1}, {2}};
    singles.weights = {1.0, 1.0, 1.0};
    singles.iin_bits = 1.0;
    trainer::TrainState bare(table, objective::validate(singles, 3), config);
    CHECK(bare.n_pairs() == 0);

    objective::ObjectiveSpec zeroed = objective::tc_objective(
        3, objective::Direction::Maximize, 1.0);
    zeroed.weights.back() = 0.0;
    trainer::TrainState unweighted(table, objective::validate(zeroed, 3), config);
    CHECK(unweighted.n_pairs() == 0);
  }

  TEST_CASE("batches are reproducible and within the alphabet") {
    const auto table = xor_triple();
    const auto config = tiny_config();
    const auto obj = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 1.0), 3);
    trainer::TrainState state(table, obj, config);
    RngStream a(5), b(5);
    const auto batch_a = state.sample_batch(a);
    const auto batch_b = state.sample_batch(b);
    CHECK(batch_a.x == batch_b.x);
    REQUIRE(batch_a.eps.size() == 3);
    CHECK(batch_a.eps[0] == batch_b.eps[0]);
    CHECK(batch_a.x.size() == static_cast<std::size_t>(config.batch * 3));
    for (int v : batch_a.x) {
      CHECK(v >= 0);
      CHECK(v < 2);
    }
    CHECK(batch_a.eps[1].rows() == config.batch);
    CHECK(batch_a.eps[1].cols() == config.latent_dim);
  }

  TEST_CASE("encoder and critic gradients match finite differences") {
    const auto table = xor_triple();
    auto config = tiny_config();
    const auto obj = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 1.0), 3);
    trainer::TrainState state(table, obj, config);
    RngStream rng(19);
    const auto batch = state.sample_batch(rng);
    const double gamma = 0.7;
    const double target = 3.0;  // far from the current I so the |.| is smooth
    state.loss_and_grads(batch, gamma, target, true);

    auto encoder_fd = [&](Eigen::MatrixXd* param, int r, int c) {
      const double h = 1e-5;
      const double saved = (*param)(r, c);
      (*param)(r, c) = saved + h;
      const double up =
          state.loss_and_grads(batch, gamma, target, false).encoder_nats;
      (*param)(r, c) = saved - h;
      const double down =
          state.loss_and_grads(batch, gamma, target, false).encoder_nats;
      (*param)(r, c) = saved;
      return (up - down) / (2 * h);
    };
    {
      const auto params = state.encoder_params();
      state.loss_and_grads(batch, gamma, target, true);
      std::vector<Eigen::MatrixXd> analytic;
      for (const auto* g : state.encoder_grads()) analytic.push_back(*g);
      for (std::size_t p = 0; p < params.size(); ++p) {
        for (int r = 0; r < params[p]->rows(); ++r) {
          for (int c = 0; c < params[p]->cols(); ++c) {
            const double fd = encoder_fd(params[p], r, c);
            CHECK(std::abs(analytic[p](r, c) - fd) <=
                  1e-5 + 1e-4 * std::abs(fd));
          }
        }
      }
    }
    {
      const auto params = state.critic_params();
      state.loss_and_grads(batch, gamma, target, false);
      std::vector<Eigen::MatrixXd> analytic;
      for (const auto* g : state.critic_grads()) analytic.push_back(*g);
      const double h = 1e-5;
      for (std::size_t p = 0; p < params.size(); ++p) {
        for (int r = 0; r < params[p]->rows(); ++r) {
          for (int c = 0; c < params[p]->cols(); ++c) {
            const double saved = (*params[p])(r, c);
            (*params[p])(r, c) = saved + h;
            const double up =
                state.loss_and_grads(batch, gamma, target, false).critic_nats;
            (*params[p])(r, c) = saved - h;
            const double down =
                state.loss_and_grads(batch, gamma, target, false).critic_nats;
            (*params[p])(r, c) = saved;
            const double fd = (up - down) / (2 * h);
            CHECK(std::abs(analytic[p](r, c) - fd) <=
                  1e-5 + 1e-4 * std::abs(fd));
          }
        }
      }
    }
  }

  TEST_CASE("evaluation recovers the separable limit of the parity system") {
    const auto table = xor_triple();
    const auto obj = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 3.0), 3);
    std::vector<channels::SoftEncoder> encoders;
    for (int c = 0; c < 3; ++c) {
      channels::SoftEncoder enc;
      enc.mu = Eigen::MatrixXd(2, 1);
      enc.mu << -4.0, 4.0;
      enc.log_sigma = Eigen::MatrixXd::Zero(2, 1);
      encoders.push_back(enc);
    }
    const auto eval = trainer::evaluate(table, obj, encoders, 20000, 99);
    REQUIRE(eval.terms.size() == 4);
    CHECK(eval.terms[0].term == Subset{0});
    CHECK(eval.terms[3].term == Subset{0, 1, 2});
    for (int k = 0; k < 3; ++k) {
      CHECK(eval.terms[k].bits > 0.95);
      CHECK(eval.terms[k].bits < 1.0 + 3.0 * eval.terms[k].se_bits + 1e-9);
    }
    CHECK(eval.terms[3].bits > 1.9);
    CHECK(eval.iin_bits ==
          doctest::Approx(eval.terms[0].bits + eval.terms[1].bits +
                          eval.terms[2].bits)
              .epsilon(1e-12));
    CHECK(eval.quantity_bits ==
          doctest::Approx(eval.iin_bits - eval.terms[3].bits).epsilon(1e-9));
    CHECK(eval.quantity_se_bits > 0.0);

    const auto again = trainer::evaluate(table, obj, encoders, 20000, 99);
    CHECK(again.quantity_bits == eval.quantity_bits);
    setenv("DESCSPACE_THREADS", "4", 1);
    const auto threaded = trainer::evaluate(table, obj, encoders, 20000, 99);
    unsetenv("DESCSPACE_THREADS");
    CHECK(threaded.quantity_bits == eval.quantity_bits);
    CHECK(threaded.iin_se_bits == eval.iin_se_bits);
  }

  TEST_CASE("point runs finish, evaluate and reproduce bit for bit") {
    const auto table = xor_triple();
    auto config = tiny_config();
    config.steps = 60;
    config.batch = 16;
    const auto obj = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 2.0), 3);
    const auto run = trainer::run_point(table, obj, config);
    CHECK(run.steps_run == 60);
    CHECK(run.iin_target_bits == doctest::Approx(2.0));
    CHECK(run.encoders.size() == 3);
    REQUIRE(run.eval.terms.size() == 4);
    CHECK(std::isfinite(run.eval.quantity_bits));
    const auto rerun = trainer::run_point(table, obj, config);
    CHECK(rerun.eval.quantity_bits == run.eval.quantity_bits);
    CHECK(rerun.eval.iin_bits == run.eval.iin_bits);
  }

  TEST_CASE("scans ramp the target and snapshot evenly spaced checkpoints") {
    const auto table = xor_triple();
    auto config = tiny_config();
    config.steps = 50;
    config.checkpoints = 5;
    config.batch = 8;
    config.eval_samples = 500;
    const auto obj = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 0.0), 3);
    const auto scan = trainer::run_scan(table, obj, config);
    REQUIRE(scan.records.size() == 5);
    long prev = 0;
    for (const auto& record : scan.records) {
      CHECK(record.step > prev);
      prev = record.step;
      CHECK(record.iin_target_bits ==
            doctest::Approx(3.0 * record.step / 50.0).epsilon(1e-12));
      CHECK(record.encoders.size() == 3);
      CHECK(record.eval.terms.size() == 4);
    }
    CHECK(scan.records.back().step == 50);
  }

  TEST_CASE("an unreachable information target trips the guard") {
    const auto table = xor_triple();
    auto config = tiny_config();
    config.steps = 5000;
    config.guard_patience = 3;
    config.guard_slack_bits = 0.5;
    const auto obj = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 50.0), 3);
    CHECK_THROWS_AS(trainer::run_point(table, obj, config), DivergenceError);
  }

  TEST_CASE("repeat selection keeps the extremal run") {
    const auto table = xor_triple();
    auto config = tiny_config();
    config.steps = 30;
    config.batch = 8;
    config.eval_samples = 500;
    const auto obj = objective::validate(
        objective::tc_objective(3, objective::Direction::Maximize, 1.0), 3);
    const auto best = trainer::best_of_points(table, obj, config, 3);
    REQUIRE(best.quantities_bits.size() == 3);
    int arg = 0;
    for (int r = 1; r < 3; ++r) {
      if (best.quantities_bits[r] > best.quantities_bits[arg]) arg = r;
    }
    CHECK(best.chosen == arg);
    CHECK(best.best.eval.quantity_bits ==
          doctest::Approx(best.quantities_bits[arg]));
  }
}
