#include "support/gradcheck.hpp"
#include "wsnf/autodiff/adam.hpp"
#include "wsnf/autodiff/checkpoint.hpp"
#include "wsnf/autodiff/mlp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace wsnf::ad {
namespace {

using testing::check_gradients;

MatrixXd random_matrix(Index r, Index c, Rng& rng) {
  MatrixXd m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

// ---- forward --------------------------------------------------------------

TEST(Mlp, ZeroNetGivesZeros) {
  Mlp<double> net("n", {3, {4}, 2});
  ParamStore<double> ps;
  Rng rng(0);
  net.init(ps, rng);
  for (auto& [name, v] : ps.values()) v.setZero();
  Rng xr(1);
  EXPECT_TRUE(net(ps, random_matrix(5, 3, xr)).isZero(0.0));
}

TEST(Mlp, IdentityLinearLayer) {
  Mlp<double> net("n", {3, {}, 3, Activation::LeakyRelu, Activation::Identity});
  ParamStore<double> ps;
  ps.add("n.w0", MatrixXd::Identity(3, 3));
  ps.add("n.b0", MatrixXd::Zero(1, 3));
  Rng rng(2);
  const MatrixXd x = random_matrix(4, 3, rng);
  EXPECT_EQ(net(ps, x), x);
}

TEST(Mlp, ParameterCount) {
  Mlp<double> net("n", {5, {128, 128}, 7});
  EXPECT_EQ(net.parameter_count(), (5 + 1) * 128 + (128 + 1) * 128 + (128 + 1) * 7);
  ParamStore<double> ps;
  Rng rng(0);
  net.init(ps, rng);
  EXPECT_EQ(ps.parameter_count(), net.parameter_count());
}

TEST(Mlp, MatchesHandRolledOracle) {
  const double slope = 0.01;
  Mlp<double> net("n", {3, {5}, 2, Activation::LeakyRelu, Activation::Tanh, slope});
  ParamStore<double> ps;
  Rng rng(7);
  net.init(ps, rng);
  Rng xr(8);
  const MatrixXd x = random_matrix(6, 3, xr);
  const MatrixXd got = net(ps, x);
  const MatrixXd &w0 = ps.value("n.w0"), &b0 = ps.value("n.b0"), &w1 = ps.value("n.w1"), &b1 = ps.value("n.b1");
  for (Index r = 0; r < 6; ++r) {
    double h[5];
    for (int j = 0; j < 5; ++j) {
      double acc = b0(0, j);
      for (int i = 0; i < 3; ++i) acc += x(r, i) * w0(i, j);
      h[j] = acc > 0 ? acc : slope * acc;
    }
    for (int k = 0; k < 2; ++k) {
      double acc = b1(0, k);
      for (int j = 0; j < 5; ++j) acc += h[j] * w1(j, k);
      EXPECT_NEAR(got(r, k), std::tanh(acc), 1e-12);
    }
  }
}

TEST(Mlp, RejectsWrongInputWidth) {
  Mlp<double> net("n", {3, {4}, 2});
  ParamStore<double> ps;
  Rng rng(0);
  net.init(ps, rng);
  EXPECT_THROW(net(ps, MatrixXd::Zero(2, 4)), ShapeError);
}

// ---- backward -------------------------------------------------------------

TEST(Backward, SumOfSquares) {
  ParamStore<double> ps;
  MatrixXd p(1, 3);
  p << 1.0, -2.0, 0.5;
  ps.add("p", p);
  Tape<double> tape(ps);
  tape.backward(sum(square(tape.param("p"))));
  EXPECT_TRUE(ps.grad("p").isApprox(2.0 * p));
}

TEST(Backward, ExpOfDotAtZero) {
  ParamStore<double> ps;
  ps.add("w", MatrixXd::Zero(3, 1));
  MatrixXd x(1, 3);
  x << 0.3, -1.2, 2.0;
  Tape<double> tape(ps);
  tape.backward(sum(exp(matmul(tape.constant(x), tape.param("w")))));
  EXPECT_TRUE(ps.grad("w").isApprox(x.transpose()));
}

TEST(Backward, TwiceThrows) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Ones(1, 1));
  Tape<double> tape(ps);
  auto loss = sum(square(tape.param("p")));
  tape.backward(loss);
  EXPECT_THROW(tape.backward(loss), Error);
}

TEST(Backward, RejectsNonScalarAndFrozenTapes) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Ones(2, 1));
  {
    Tape<double> tape(ps);
    EXPECT_THROW(tape.backward(square(tape.param("p"))), Error);
  }
  Tape<double> frozen(ps, Tape<double>::no_grad);
  EXPECT_THROW(frozen.backward(sum(frozen.param("p"))), Error);
}

TEST(Backward, NonFiniteValuesAreErrors) {
  Tape<double> tape;
  auto big = tape.constant(MatrixXd::Constant(1, 1, 1000.0));
  EXPECT_THROW(exp(big), NonFiniteError);
  EXPECT_THROW(tape.constant(MatrixXd::Constant(1, 1, std::nan(""))), NonFiniteError);
}

TEST(Backward, VariableGradientsOnTape) {
  Tape<double> tape;
  MatrixXd a(2, 2);
  a << 1, 2, 3, 4;
  auto v = tape.variable(a);
  tape.backward(sum(cwise_product(v, v)));
  EXPECT_TRUE(tape.grad(v).isApprox(2.0 * a));
}

// Every op on random inputs against central differences.
class OpGradient : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(11);
    ps.add("a", random_matrix(4, 3, rng));
    ps.add("b", random_matrix(4, 3, rng));
    ps.add("m", random_matrix(3, 5, rng));
    ps.add("r", random_matrix(1, 3, rng));
    ps.add("s", random_matrix(1, 1, rng));
    ps.add("t", random_matrix(5, 3, rng));
  }
  void expect_ok(const std::function<Var<double>(Tape<double>&)>& f) {
    const auto res = check_gradients(ps, ps.names(), f);
    EXPECT_LT(res.worst_relative, 1e-4) << res.worst_name << "[" << res.worst_index << "]";
  }
  ParamStore<double> ps;
};

TEST_F(OpGradient, Arithmetic) {
  expect_ok([](Tape<double>& t) {
    auto a = t.param("a"), b = t.param("b");
    return sum(cwise_product(a + b, a - b) + (-a));
  });
}

TEST_F(OpGradient, MatmulAndBroadcast) {
  expect_ok([](Tape<double>& t) {
    return sum(tanh(matmul(add_row(t.param("a"), t.param("r")), t.param("m"))));
  });
}

TEST_F(OpGradient, ScalesAndPointwise) {
  expect_ok([](Tape<double>& t) {
    auto x = scale(t.param("a"), t.param("s"));
    return mean(add_scalar(exp(scale(leaky_relu(x, 0.1), 0.5)), 1.5));
  });
}

TEST_F(OpGradient, ColumnAndRowOps) {
  const std::vector<Index> even{0, 2}, odd{1};
  const std::vector<Index> rows{4, 0, 4, 2};
  expect_ok([&](Tape<double>& t) {
    auto a = t.param("a");
    auto merged = merge_cols(gather_cols(a, even), even, square(gather_cols(a, odd)), odd);
    auto joined = concat_cols(merged, gather_rows(t.param("t"), rows));
    return sum(square(row_sum(joined)));
  });
}

TEST_F(OpGradient, SoftmaxCrossEntropy) {
  const std::vector<Index> labels{0, 4, 2, 2};
  expect_ok([&](Tape<double>& t) { return softmax_cross_entropy(matmul(t.param("a"), t.param("m")), labels); });
}

TEST(Gradient, RandomMlpWithNllLoss) {
  Mlp<double> net("n", {3, {6, 5}, 2, Activation::LeakyRelu, Activation::Identity, 0.01});
  ParamStore<double> ps;
  Rng rng(13);
  net.init(ps, rng);
  const MatrixXd x = random_matrix(7, 3, rng);
  const auto res = check_gradients<double>(ps, ps.names(), [&](Tape<double>& t) {
    auto z = net.forward(t, t.constant(x));
    return scale(sum(square(z)), 0.5 / 7.0);
  });
  EXPECT_LT(res.worst_relative, 1e-4) << res.worst_name;
  EXPECT_EQ(res.checked, net.parameter_count());
}

TEST(Gradient, SharedParameterNodesAccumulate) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Constant(1, 1, 3.0));
  Tape<double> tape(ps);
  auto a = tape.param("p");
  auto b = tape.param("p");
  EXPECT_EQ(a.id(), b.id());
  tape.backward(sum(cwise_product(a, b)));
  EXPECT_DOUBLE_EQ(ps.grad("p")(0, 0), 6.0);
}

// ---- adam -----------------------------------------------------------------

TEST(Adam, ZeroGradientNoDecayLeavesParameters) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Constant(2, 2, 1.5));
  ps.zero_grad();
  AdamState<double> st;
  adam_step(st, ps);
  EXPECT_EQ(ps.value("p"), MatrixXd::Constant(2, 2, 1.5));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Zero(1, 2));
  MatrixXd g(1, 2);
  g << 0.3, -7.0;
  ps.accumulate_grad("p", g);
  AdamState<double> st;
  st.learning_rate = 0.01;
  adam_step(st, ps);
  EXPECT_NEAR(ps.value("p")(0, 0), -0.01, 1e-8);
  EXPECT_NEAR(ps.value("p")(0, 1), 0.01, 1e-8);
  EXPECT_TRUE(ps.grad("p").isZero(0.0));
}

TEST(Adam, MissingGradientThrows) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Zero(1, 1));
  AdamState<double> st;
  EXPECT_THROW(adam_step(st, ps), Error);
}

TEST(Adam, QuadraticMatchesScalarRecursion) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Zero(1, 1));
  AdamState<double> st;
  st.learning_rate = 0.1;
  // Independent scalar recursion.
  double p = 0, m = 0, v = 0;
  for (int k = 1; k <= 200; ++k) {
    Tape<double> tape(ps);
    tape.backward(sum(square(add_scalar(tape.param("p"), -3.0))));
    adam_step(st, ps);
    const double g = 2 * (p - 3);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    p -= 0.1 * (m / (1 - std::pow(0.9, k))) / (std::sqrt(v / (1 - std::pow(0.999, k))) + 1e-8);
  }
  EXPECT_NEAR(ps.value("p")(0, 0), p, 1e-12);
  EXPECT_NEAR(p, 3.0, 0.1);
}

TEST(Adam, DecoupledWeightDecay) {
  ParamStore<double> ps;
  ps.add("p", MatrixXd::Constant(1, 1, 2.0));
  ps.zero_grad();
  AdamState<double> st;
  st.learning_rate = 0.1;
  st.weight_decay = 0.5;
  adam_step(st, ps);
  EXPECT_DOUBLE_EQ(ps.value("p")(0, 0), 2.0 * (1 - 0.05));
}

TEST(Adam, DeterministicTraining) {
  auto run = [] {
    Mlp<double> net("n", {2, {8}, 1});
    ParamStore<double> ps;
    Rng rng(21);
    net.init(ps, rng);
    const MatrixXd x = random_matrix(16, 2, rng);
    AdamState<double> st;
    st.learning_rate = 1e-2;
    st.weight_decay = 1e-3;
    ps.zero_grad();
    for (int i = 0; i < 20; ++i) {
      Tape<double> tape(ps);
      tape.backward(mean(square(net.forward(tape, tape.constant(x)))));
      adam_step(st, ps);
    }
    return ps;
  };
  const auto a = run(), b = run();
  for (const auto& name : a.names()) EXPECT_EQ(a.value(name), b.value(name));
}

// ---- param store / checkpoint ---------------------------------------------

TEST(ParamStore, NamesAreUniqueAndGradientsShaped) {
  ParamStore<double> ps;
  ps.add("a", MatrixXd::Zero(2, 3));
  EXPECT_THROW(ps.add("a", MatrixXd::Zero(1, 1)), Error);
  EXPECT_THROW(ps.accumulate_grad("a", MatrixXd::Zero(3, 2)), ShapeError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Checkpoint ck;
  Rng rng(5);
  ck.params.add("x", random_matrix(3, 7, rng));
  MatrixXd odd(1, 4);
  odd << -0.0, 1e-310, std::numeric_limits<double>::max(), 0.1;
  ck.params.add("odd", odd);
  ck.meta["variant"] = "S";
  ck.meta["note"] = "two words";
  std::stringstream buf;
  write_checkpoint(buf, ck);
  const Checkpoint back = read_checkpoint(buf);
  EXPECT_EQ(back.meta, ck.meta);
  for (const auto& name : ck.params.names()) {
    const auto &a = ck.params.value(name), &b = back.params.value(name);
    ASSERT_EQ(a.rows(), b.rows());
    EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())));
  }
}

TEST(Checkpoint, RejectsBadHeader) {
  std::stringstream buf("not-a-checkpoint 1\n");
  EXPECT_THROW(read_checkpoint(buf), IoError);
}

}  // namespace
}  // namespace wsnf::ad
