#include <gtest/gtest.h>

#include <cmath>

#include "firenav/errors.hpp"
#include "firenav/qnet.hpp"
#include "firenav/text.hpp"
#include "support/fixtures.hpp"

namespace firenav {
namespace {

using testing::random_observation;

QNetShape small_shape() { return {.window = 3, .feature_width = 6, .hidden = 10, .actions = kNumActions}; }

TEST(QNetShape, DefaultsMatchArchitecture) {
  const QNetShape shape;
  EXPECT_EQ(shape.hidden, 512);
  EXPECT_EQ(shape.actions, 5);
  EXPECT_EQ(shape.feature_width, 64);
  EXPECT_EQ(shape.input_width(), 4 * 64);
  const QNetwork net(shape, 1);
  EXPECT_EQ(net.parameters().w1.rows(), 512);
  EXPECT_EQ(net.parameters().w1.cols(), 256);
  EXPECT_EQ(net.parameters().w2.rows(), 5);
  EXPECT_EQ(net.parameters().w2.cols(), 512);
  EXPECT_EQ(net.projector().matrix().rows(), 64);
  EXPECT_EQ(net.projector().matrix().cols(), 81);
}

TEST(Forward, ZeroWeightsGiveZeroQ) {
  const QNetShape shape;
  const QNetwork seeded(shape, 3);
  const QNetwork net(seeded.shared_projector(), Parameters::zeros(shape));
  Rng rng(5);
  const QValues q = net.forward(random_observation(9, rng));
  for (double v : q) EXPECT_EQ(v, 0.0);
}

TEST(Forward, DeterministicForSeed) {
  Rng rng(9);
  const Observation obs = random_observation(9, rng);
  const QNetwork a(QNetShape{}, 77);
  const QNetwork b(QNetShape{}, 77);
  EXPECT_EQ(a.forward(obs), b.forward(obs));
  EXPECT_EQ(a.projector().matrix(), b.projector().matrix());
  const QNetwork c(QNetShape{}, 78);
  EXPECT_NE(a.forward(obs), c.forward(obs));
}

TEST(Forward, HandComputedSingleHiddenUnit) {
  const QNetShape shape{.window = 1, .feature_width = 1, .hidden = 1, .actions = kNumActions};
  const QNetwork seeded(shape, 11);
  const double p = seeded.projector().matrix()(0, 0);

  Parameters params = Parameters::zeros(shape);
  params.w1 << 1.0, -2.0, 0.5, 3.0;
  params.b1 << 0.1;
  params.w2 << 1.0, 2.0, -1.0, 0.0, 0.5;
  params.b2 << 0.0, 0.1, 0.2, 0.3, 0.4;
  const QNetwork net(seeded.shared_projector(), params);

  Observation obs;
  const double v[4] = {0.25, 0.5, 1.0, 0.0};
  for (int i = 0; i < 4; ++i) obs.frames[std::size_t(i)] = std::make_shared<Frame>(Frame{1, {v[i]}});

  const double z = p * (0.25 - 2.0 * 0.5 + 0.5 * 1.0 + 3.0 * 0.0) + 0.1;
  const double h = z > 0 ? z : 0.0;
  const QValues q = net.forward(obs);
  EXPECT_NEAR(q[0], h + 0.0, 1e-15);
  EXPECT_NEAR(q[1], 2.0 * h + 0.1, 1e-15);
  EXPECT_NEAR(q[2], -h + 0.2, 1e-15);
  EXPECT_NEAR(q[3], 0.3, 1e-15);
  EXPECT_NEAR(q[4], 0.5 * h + 0.4, 1e-15);

  // A strongly negative pre-activation leaves only the output biases.
  params.b1 << -100.0;
  const QNetwork dead(seeded.shared_projector(), params);
  const QValues qd = dead.forward(obs);
  for (int a = 0; a < 5; ++a) EXPECT_DOUBLE_EQ(qd[std::size_t(a)], params.b2(a));
}

TEST(Forward, BatchMatchesSingle) {
  Rng rng(21);
  const QNetwork net(QNetShape{}, 4);
  std::vector<Observation> obs;
  for (int i = 0; i < 7; ++i) obs.push_back(random_observation(9, rng));
  std::vector<const Observation*> ptrs;
  for (const auto& o : obs) ptrs.push_back(&o);
  const Eigen::MatrixXd q = net.forward_batch(ptrs);
  for (int i = 0; i < 7; ++i) {
    const QValues single = net.forward(obs[std::size_t(i)]);
    for (int a = 0; a < 5; ++a) EXPECT_NEAR(q(a, i), single[std::size_t(a)], 1e-12);
  }
}

TEST(Loss, Examples) {
  EXPECT_EQ(squared_error(2.5, 2.5), 0.0);
  EXPECT_EQ(squared_error(0.0, 1.0), 1.0);

  const QNetShape shape = small_shape();
  const QNetwork seeded(shape, 1);
  const QNetwork zero(seeded.shared_projector(), Parameters::zeros(shape));
  Rng rng(2);
  const Observation a = random_observation(3, rng), b = random_observation(3, rng);
  const std::vector<TrainingExample> batch = {{&a, Action::Forward, 1.0}, {&b, Action::Jump, 3.0}};
  EXPECT_DOUBLE_EQ(zero.backward(batch).loss, 5.0);
}

TEST(Backward, MatchesFiniteDifferencesOnEveryEntry) {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    QNetwork net(small_shape(), 100 + trial);
    std::vector<Observation> obs;
    for (int i = 0; i < 6; ++i) obs.push_back(random_observation(3, rng));
    const auto batch = testing::random_batch(obs, rng);
    const auto check = testing::finite_difference_check(net, batch, 1e-5, [](int, Eigen::Index) { return true; });
    EXPECT_LT(check.max_relative_error, 1e-4) << "trial " << trial;
    EXPECT_GT(check.checked, net.parameters().count() * 9 / 10);
  }
}

TEST(Backward, UntakenActionRowsHaveZeroGradient) {
  Rng rng(32);
  QNetwork net(small_shape(), 7);
  std::vector<Observation> obs;
  for (int i = 0; i < 4; ++i) obs.push_back(random_observation(3, rng));
  std::vector<TrainingExample> batch;
  for (const auto& o : obs) batch.push_back({&o, Action::Left, 5.0});
  const Gradients g = net.backward(batch).gradients;
  for (int a = 0; a < 5; ++a) {
    if (a == index_of(Action::Left)) continue;
    EXPECT_EQ(g.w2.row(a).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.b2(a), 0.0);
  }
  EXPECT_GT(g.w1.cwiseAbs().maxCoeff(), 0.0);
  // The shared hidden layer still receives the signal, and it agrees with differences.
  const auto check = testing::finite_difference_check(net, batch, 1e-5, [](int, Eigen::Index) { return true; });
  EXPECT_LT(check.max_relative_error, 1e-4);
}

TEST(Backward, SampledEntriesAtFullWidth) {
  Rng rng(33);
  QNetwork net(QNetShape{}, 12);
  std::vector<Observation> obs;
  for (int i = 0; i < 32; ++i) obs.push_back(random_observation(9, rng));
  const auto batch = testing::random_batch(obs, rng);
  Rng pick_rng(34);
  const auto check = testing::finite_difference_check(
      net, batch, 1e-5, [&](int, Eigen::Index) { return pick_rng.uniform() < 0.002; });
  EXPECT_LT(check.max_relative_error, 1e-4);
  EXPECT_GT(check.checked, 200u);
}

TEST(Backward, ZeroWhenTargetsEqualPredictions) {
  Rng rng(35);
  const QNetwork net(small_shape(), 8);
  std::vector<Observation> obs;
  for (int i = 0; i < 5; ++i) obs.push_back(random_observation(3, rng));
  std::vector<const Observation*> ptrs;
  for (const auto& o : obs) ptrs.push_back(&o);
  const Eigen::MatrixXd q = net.forward_batch(ptrs);
  std::vector<TrainingExample> batch;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Action a = kActions[rng.below(5)];
    batch.push_back({&obs[i], a, q(index_of(a), Eigen::Index(i))});
  }
  const BackwardResult r = net.backward(batch);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.gradients, Parameters::zeros(small_shape()));
}

TEST(RmsProp, ZeroGradientLeavesParameters) {
  QNetwork net(small_shape(), 9);
  const Parameters before = net.parameters();
  RmsProp opt(small_shape());
  opt.apply(net.mutable_parameters(), Parameters::zeros(small_shape()));
  EXPECT_EQ(net.parameters(), before);
}

TEST(RmsProp, ZeroLearningRateLeavesParameters) {
  Rng rng(36);
  QNetwork net(small_shape(), 10);
  const Observation o = random_observation(3, rng);
  const std::vector<TrainingExample> batch = {{&o, Action::Back, 4.0}};
  const Parameters before = net.parameters();
  RmsProp opt(small_shape(), {.learning_rate = 0.0});
  opt.apply(net.mutable_parameters(), net.backward(batch).gradients);
  EXPECT_EQ(net.parameters(), before);
  EXPECT_GT(opt.mean_square().w1.maxCoeff(), 0.0);
}

TEST(RmsProp, SingleStepArithmetic) {
  const QNetShape shape{.window = 1, .feature_width = 1, .hidden = 1, .actions = kNumActions};
  Parameters p = Parameters::zeros(shape);
  Gradients g = Parameters::zeros(shape);
  g.b1(0) = 2.0;
  g.b2(1) = -0.5;
  RmsProp opt(shape, {.learning_rate = 1e-3, .decay = 0.9, .epsilon = 1e-8});
  opt.apply(p, g);
  EXPECT_DOUBLE_EQ(opt.mean_square().b1(0), 0.1 * 4.0);
  EXPECT_DOUBLE_EQ(p.b1(0), -1e-3 * 2.0 / (std::sqrt(0.4) + 1e-8));
  EXPECT_DOUBLE_EQ(p.b2(1), 1e-3 * 0.5 / (std::sqrt(0.025) + 1e-8));
  opt.apply(p, g);
  EXPECT_DOUBLE_EQ(opt.mean_square().b1(0), 0.9 * 0.4 + 0.1 * 4.0);
}

TEST(RmsProp, OverfitsFixedBatch) {
  Rng rng(37);
  QNetwork net(QNetShape{}, 13);
  std::vector<Observation> obs;
  for (int i = 0; i < 32; ++i) obs.push_back(random_observation(9, rng));
  const auto batch = testing::random_batch(obs, rng);
  RmsProp opt(net.shape());
  const Eigen::MatrixXd projector = net.projector().matrix();
  double first = 0.0, at_1000 = 0.0, loss = 0.0;
  int updates = 0;
  for (; updates < 5000; ++updates) {
    const BackwardResult r = net.backward(batch);
    loss = r.loss;
    if (updates == 0) first = loss;
    if (updates == 1000) at_1000 = loss;
    if (loss < 1e-3) break;
    opt.apply(net.mutable_parameters(), r.gradients);
  }
  EXPECT_LT(loss, 1e-3) << "after " << updates << " updates";
  EXPECT_LT(at_1000, first);
  EXPECT_EQ(net.projector().matrix(), projector);
  for (double v : opt.mean_square().w1.reshaped()) EXPECT_GE(v, 0.0);
}

TEST(Snapshot, RoundTripAndIsolation) {
  Rng rng(38);
  QNetwork net(small_shape(), 14);
  const Observation o = random_observation(3, rng);
  const ParameterSnapshot snap = net.snapshot();
  const QValues before = net.forward(o);

  RmsProp opt(small_shape(), {.learning_rate = 1e-2});
  const std::vector<TrainingExample> batch = {{&o, Action::Right, 9.0}};
  for (int i = 0; i < 10; ++i) opt.apply(net.mutable_parameters(), net.backward(batch).gradients);
  EXPECT_NE(net.forward(o), before);
  EXPECT_EQ(QNetwork(net.shared_projector(), snap).forward(o), before);

  net.load(snap);
  EXPECT_EQ(net.forward(o), before);
  EXPECT_EQ(net.parameters(), snap);
}

TEST(Checkpoint, RoundTripsBytes) {
  Rng rng(39);
  QNetwork net(small_shape(), 15);
  RmsProp opt(small_shape());
  const Observation o = random_observation(3, rng);
  const std::vector<TrainingExample> batch = {{&o, Action::Jump, -3.0}};
  for (int i = 0; i < 3; ++i) opt.apply(net.mutable_parameters(), net.backward(batch).gradients);

  const auto path = testing::temp_path("roundtrip.qnet");
  save_checkpoint(path, net, opt);
  const Checkpoint loaded = load_checkpoint(path);
  EXPECT_EQ(loaded.net.parameters(), net.parameters());
  EXPECT_EQ(loaded.net.projector().matrix(), net.projector().matrix());
  EXPECT_EQ(loaded.optimizer.mean_square(), opt.mean_square());
  EXPECT_EQ(loaded.net.forward(o), net.forward(o));
  EXPECT_EQ(encode_checkpoint(loaded.net, loaded.optimizer), read_file(path));

  const CheckpointHeader h = read_checkpoint_header(read_file(path));
  EXPECT_EQ(h.version, kCheckpointVersion);
  EXPECT_EQ(h.shape, small_shape());
  EXPECT_EQ(h.projector_seed, net.projector().seed());
  std::filesystem::remove(path);
}

TEST(Checkpoint, LayoutSize) {
  const QNetwork net(small_shape(), 16);
  const RmsProp opt(small_shape());
  const std::string bytes = encode_checkpoint(net, opt);
  EXPECT_EQ(bytes.substr(0, 4), "QNET");
  EXPECT_EQ(bytes.size(), 4 + 4 + 16 + 8 + 2 * 8 * net.parameters().count());
}

TEST(Checkpoint, RejectsCorruption) {
  const QNetwork net(small_shape(), 17);
  const RmsProp opt(small_shape());
  const std::string bytes = encode_checkpoint(net, opt);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 1)), CheckpointError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, 10)), CheckpointError);
  EXPECT_THROW(decode_checkpoint(bytes + "x"), CheckpointError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic), CheckpointError);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(decode_checkpoint(bad_version), CheckpointError);
  EXPECT_THROW(load_checkpoint(testing::temp_path("does_not_exist.qnet")), CheckpointError);
}

TEST(Argmax, LowestIndexWinsTies) {
  EXPECT_EQ(argmax_lowest({1, 0, 0, 0, 0}), 0u);
  EXPECT_EQ(argmax_lowest({0, 0, 0, 0, 0}), 0u);
  EXPECT_EQ(argmax_lowest({0, 2, 1, 2, 0}), 1u);
  EXPECT_EQ(argmax_lowest({-5, -4, -3, -2, -1}), 4u);
}

}  // namespace
}  // namespace firenav
