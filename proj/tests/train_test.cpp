#include "mindgauge/train.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

namespace mindgauge {
namespace {

TEST(Adam, MatchesScalarReferenceUpdate) {
  ParameterSet ps;
  ps.add("w", {2});
  ps.at("w").value = {0.5, -1.25};
  AdamState st = AdamState::init(ps);
  TrainConfig tc;
  tc.learning_rate = 0.004;

  // Hand-rolled update with running bias-correction products.
  std::vector<double> w = ps.at("w").value;
  std::vector<double> m(2, 0.0), v(2, 0.0);
  double b1t = 1.0, b2t = 1.0;

  for (int step = 1; step <= 5; ++step) {
    const std::vector<double> g = {0.3 * step, -0.2};
    ps.at("w").grad = g;
    adam_step(ps, st, tc);

    b1t *= tc.beta1;
    b2t *= tc.beta2;
    for (size_t j = 0; j < 2; ++j) {
      m[j] = tc.beta1 * m[j] + (1.0 - tc.beta1) * g[j];
      v[j] = tc.beta2 * v[j] + (1.0 - tc.beta2) * g[j] * g[j];
      const double mhat = m[j] / (1.0 - b1t);
      const double vhat = v[j] / (1.0 - b2t);
      w[j] -= tc.learning_rate * mhat / (std::sqrt(vhat) + tc.epsilon);
    }
    for (size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(ps.at("w").value[j], w[j], 1e-12)
          << "step " << step << " slot " << j;
    }
  }
  EXPECT_EQ(st.t, 5);
}

TEST(Adam, FirstStepMovesEachWeightByTheLearningRate) {
  ParameterSet ps;
  ps.add("w", {3});
  ps.at("w").value = {1.0, 2.0, 3.0};
  ps.at("w").grad = {0.5, -3.0, 0.001};
  AdamState st = AdamState::init(ps);
  TrainConfig tc;
  tc.learning_rate = 0.004;
  adam_step(ps, st, tc);
  EXPECT_NEAR(ps.at("w").value[0], 1.0 - 0.004, 1e-6);
  EXPECT_NEAR(ps.at("w").value[1], 2.0 + 0.004, 1e-6);
  EXPECT_NEAR(ps.at("w").value[2], 3.0 - 0.004, 1e-6);
}

TEST(Adam, ZeroLearningRateFreezesParameters) {
  ParameterSet ps;
  ps.add("w", {2});
  ps.at("w").value = {0.25, -0.75};
  ps.at("w").grad = {1.0, 2.0};
  AdamState st = AdamState::init(ps);
  TrainConfig tc;
  tc.learning_rate = 0.0;
  adam_step(ps, st, tc);
  EXPECT_DOUBLE_EQ(ps.at("w").value[0], 0.25);
  EXPECT_DOUBLE_EQ(ps.at("w").value[1], -0.75);
}

TEST(Adam, RejectsNonFiniteGradientsBeforeTouchingState) {
  ParameterSet ps;
  ps.add("w", {2});
  ps.at("w").grad = {1.0, std::numeric_limits<double>::quiet_NaN()};
  AdamState st = AdamState::init(ps);
  const TrainConfig tc;
  try {
    adam_step(ps, st, tc);
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "numeric");
  }
  EXPECT_EQ(st.t, 0);
  EXPECT_DOUBLE_EQ(st.m[0][0], 0.0);
  EXPECT_DOUBLE_EQ(st.v[0][0], 0.0);
}

TEST(Adam, MismatchedStateIsAShapeError) {
  ParameterSet a;
  a.add("w", {2});
  ParameterSet b;
  b.add("w", {2});
  b.add("extra", {1});
  AdamState st = AdamState::init(a);
  const TrainConfig tc;
  EXPECT_THROW(adam_step(b, st, tc), Error);
}

TEST(Clip, ScalesGradientsToMaxNormExactly) {
  ParameterSet ps;
  ps.add("a", {1});
  ps.add("b", {1});
  ps.at("a").grad = {6.0};
  ps.at("b").grad = {8.0};
  const double pre = clip_gradients(ps, 5.0);
  EXPECT_DOUBLE_EQ(pre, 10.0);
  EXPECT_DOUBLE_EQ(ps.at("a").grad[0], 3.0);
  EXPECT_DOUBLE_EQ(ps.at("b").grad[0], 4.0);
  EXPECT_DOUBLE_EQ(ps.grad_norm(), 5.0);
}

TEST(Clip, LeavesGradientsBelowTheThresholdAlone) {
  ParameterSet ps;
  ps.add("w", {2});
  ps.at("w").grad = {0.6, 0.8};
  const double pre = clip_gradients(ps, 5.0);
  EXPECT_DOUBLE_EQ(pre, 1.0);
  EXPECT_DOUBLE_EQ(ps.at("w").grad[0], 0.6);
  EXPECT_DOUBLE_EQ(ps.at("w").grad[1], 0.8);
}

TEST(Clip, ZeroMaxNormDisablesClipping) {
  ParameterSet ps;
  ps.add("w", {2});
  ps.at("w").grad = {30.0, 40.0};
  const double pre = clip_gradients(ps, 0.0);
  EXPECT_DOUBLE_EQ(pre, 50.0);
  EXPECT_DOUBLE_EQ(ps.at("w").grad[0], 30.0);
  EXPECT_DOUBLE_EQ(ps.at("w").grad[1], 40.0);
}

TEST(TrainConfigDefaults, FamiliesDifferInRateScheduleAndClipping) {
  const TrainConfig lstm = TrainConfig::lstm_defaults();
  EXPECT_DOUBLE_EQ(lstm.learning_rate, 0.005);
  EXPECT_EQ(lstm.num_epochs, 25);
  EXPECT_DOUBLE_EQ(lstm.clip_norm, 5.0);

  const TrainConfig tf = TrainConfig::transformer_defaults();
  EXPECT_DOUBLE_EQ(tf.learning_rate, 1e-3);
  EXPECT_EQ(tf.num_epochs, 10);
  EXPECT_DOUBLE_EQ(tf.clip_norm, 0.0);
}

TEST(TrainConfigValidate, RejectsBadValues) {
  TrainConfig tc;
  tc.learning_rate = -0.1;
  EXPECT_THROW(tc.validate(), Error);
  tc = TrainConfig{};
  tc.beta1 = 1.0;
  EXPECT_THROW(tc.validate(), Error);
  tc = TrainConfig{};
  tc.epsilon = 0.0;
  EXPECT_THROW(tc.validate(), Error);
  tc = TrainConfig{};
  tc.batch_size = 0;
  EXPECT_THROW(tc.validate(), Error);
}

ModelConfig toy_model() {
  ModelConfig cfg = ModelConfig::lstm_defaults(8, 4);
  cfg.embedding_dim = 4;
  cfg.hidden_dim = 4;
  cfg.num_layers = 1;
  cfg.dropout_prob = 0.2;
  return cfg;
}

EncodedSample toy_sample(int cls) {
  EncodedSample s;
  s.ids = {cls + 2, cls + 2, cls + 2, 0};
  s.label = cls;
  return s;
}

std::vector<EncodedSample> toy_set(int per_class) {
  std::vector<EncodedSample> out;
  for (int r = 0; r < per_class; ++r) {
    for (int c = 0; c < 6; ++c) out.push_back(toy_sample(c));
  }
  return out;
}

TrainConfig toy_train() {
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.num_epochs = 3;
  tc.batch_size = 4;
  tc.clip_norm = 1.0;
  tc.seed = 9;
  return tc;
}

TEST(TrainModel, DeterministicUnderSeed) {
  const ModelConfig cfg = toy_model();
  const auto train = toy_set(4);
  const auto val = toy_set(1);
  const TrainConfig tc = toy_train();

  ParameterSet p1 = init_params(cfg, 1);
  ParameterSet p2 = init_params(cfg, 1);
  const TrainResult r1 = train_model(train, val, cfg, tc, p1);
  const TrainResult r2 = train_model(train, val, cfg, tc, p2);

  ASSERT_EQ(r1.history.size(), r2.history.size());
  for (size_t i = 0; i < r1.history.size(); ++i) {
    EXPECT_DOUBLE_EQ(r1.history[i].train_loss, r2.history[i].train_loss);
    EXPECT_DOUBLE_EQ(r1.history[i].val_accuracy, r2.history[i].val_accuracy);
  }
  for (size_t i = 0; i < p1.count(); ++i) {
    EXPECT_EQ(p1.param(i).value, p2.param(i).value) << p1.names()[i];
  }
}

TEST(TrainModel, DifferentSeedsTakeDifferentPaths) {
  const ModelConfig cfg = toy_model();
  const auto train = toy_set(4);
  const auto val = toy_set(1);
  TrainConfig tc = toy_train();

  ParameterSet p1 = init_params(cfg, 1);
  const TrainResult r1 = train_model(train, val, cfg, tc, p1);
  tc.seed = 10;
  ParameterSet p2 = init_params(cfg, 1);
  const TrainResult r2 = train_model(train, val, cfg, tc, p2);

  bool any_differs = false;
  for (size_t i = 0; i < r1.history.size(); ++i) {
    if (r1.history[i].train_loss != r2.history[i].train_loss) any_differs = true;
  }
  EXPECT_TRUE(any_differs);
}

TEST(TrainModel, LeavesBestEpochWeightsInPlace) {
  const ModelConfig cfg = toy_model();
  const auto train = toy_set(4);
  const auto val = toy_set(1);
  ParameterSet params = init_params(cfg, 2);
  const TrainResult result = train_model(train, val, cfg, toy_train(), params);

  ASSERT_FALSE(result.history.empty());
  double best = -1.0;
  int best_epoch = 0;
  for (const EpochRecord& r : result.history) {
    if (r.val_accuracy > best) {
      best = r.val_accuracy;
      best_epoch = r.epoch;
    }
  }
  EXPECT_DOUBLE_EQ(result.best_val_accuracy, best);
  EXPECT_EQ(result.best_epoch, best_epoch);
  // The weights left behind evaluate to exactly the reported best.
  EXPECT_DOUBLE_EQ(accuracy(val, cfg, params), result.best_val_accuracy);
}

TEST(TrainModel, EpochCallbackSeesEveryRecordInOrder) {
  const ModelConfig cfg = toy_model();
  const auto train = toy_set(2);
  const auto val = toy_set(1);
  ParameterSet params = init_params(cfg, 3);
  std::vector<int> seen;
  const TrainResult result = train_model(
      train, val, cfg, toy_train(), params,
      [&seen](const EpochRecord& r) { seen.push_back(r.epoch); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(result.status, "ok");
}

TEST(TrainModel, OverflowingLossReportsDivergenceAndKeepsStartWeights) {
  const ModelConfig cfg = toy_model();
  // All-padding inputs read a zero hidden state, so the logits equal the
  // head bias. A bias span wider than the double range makes the loss of a
  // class-1 sample overflow to infinity while every logit stays finite.
  std::vector<EncodedSample> train;
  for (int c = 0; c < 6; ++c) {
    EncodedSample s;
    s.ids = {0, 0, 0, 0};
    s.label = c;
    train.push_back(s);
  }
  const auto val = train;
  ParameterSet params = init_params(cfg, 4);
  params.at("head.b").value[0] = 1e308;
  params.at("head.b").value[1] = -8e307;

  const TrainResult result = train_model(train, val, cfg, toy_train(), params);
  EXPECT_EQ(result.status, "diverged");
  EXPECT_TRUE(result.history.empty());
  EXPECT_EQ(result.best_epoch, 0);
  EXPECT_DOUBLE_EQ(result.best_val_accuracy, 0.0);
  // No epoch finished, so the starting weights come back untouched.
  EXPECT_DOUBLE_EQ(params.at("head.b").value[0], 1e308);
  EXPECT_DOUBLE_EQ(params.at("head.b").value[1], -8e307);
}

TEST(TrainModel, EmptySetsAreErrors) {
  const ModelConfig cfg = toy_model();
  const auto val = toy_set(1);
  ParameterSet params = init_params(cfg, 6);
  EXPECT_THROW(train_model({}, val, cfg, toy_train(), params), Error);
  EXPECT_THROW(train_model(val, {}, cfg, toy_train(), params), Error);
}

TEST(HistoryCsv, UsesFixedSixDecimalFormat) {
  std::vector<EpochRecord> history;
  history.push_back({1, 1.791759, 0.166667});
  history.push_back({2, 0.5, 1.0});
  EXPECT_EQ(history_to_csv(history),
            "epoch,train_loss,val_acc\n"
            "1,1.791759,0.166667\n"
            "2,0.500000,1.000000\n");
}

}  // namespace
}  // namespace mindgauge
