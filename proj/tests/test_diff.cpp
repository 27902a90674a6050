#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wavefield/diff/adam.hpp"
#include "wavefield/diff/ops.hpp"
#include "wavefield/errors.hpp"

using namespace wf;
using diff::Tensor;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Tensor, FromChecksLength) {
  EXPECT_THROW(Tensor::from({2, 3}, std::vector<double>(5)), DimensionError);
  const Tensor t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_TRUE(t.is_leaf());
  EXPECT_FALSE(t.requires_grad());
}

TEST(Tensor, GradStartsAtZero) {
  const Tensor t = Tensor::zeros({3}, true);
  for (double g : t.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Tensor id = Tensor::from({2, 2}, {1, 0, 0, 1});
  const Tensor b = Tensor::from({2, 3}, {1.5, -2, 3, 0.25, 7, -8});
  EXPECT_EQ(vec(diff::matmul(id, b).values()), vec(b.values()));
}

TEST(Matmul, OneByOne) {
  EXPECT_EQ(diff::matmul(Tensor::from({1, 1}, {2}), Tensor::from({1, 1}, {3})).item(), 6.0);
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 rng(1);
  const Tensor a = oracle::random_tensor(rng, {5, 4});
  const Tensor b = oracle::random_tensor(rng, {4, 3});
  const auto ref = oracle::matmul(vec(a.values()), vec(b.values()), 5, 4, 3);
  const Tensor c = diff::matmul(a, b);
  ASSERT_EQ(c.shape(), (diff::Shape{5, 3}));
  EXPECT_LE(oracle::max_abs_diff(c.values(), ref), 1e-12);
}

TEST(Matmul, LargeMatchesTripleLoop) {
  std::mt19937_64 rng(2);
  const Tensor a = oracle::random_tensor(rng, {37, 29});
  const Tensor b = oracle::random_tensor(rng, {29, 41});
  const auto ref = oracle::matmul(vec(a.values()), vec(b.values()), 37, 29, 41);
  EXPECT_LE(oracle::max_abs_diff(diff::matmul(a, b).values(), ref), 1e-12);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  try {
    diff::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos) << msg;
  }
}

TEST(Linear, MatchesLoop) {
  std::mt19937_64 rng(3);
  const Tensor x = oracle::random_tensor(rng, {13, 5});
  const Tensor w = oracle::random_tensor(rng, {7, 5});
  const Tensor b = oracle::random_tensor(rng, {7});
  const Tensor y = diff::linear(x, w, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < 13; ++i)
    for (std::size_t o = 0; o < 7; ++o) {
      double s = b.at(o);
      for (std::size_t k = 0; k < 5; ++k) s += x.at(i * 5 + k) * w.at(o * 5 + k);
      worst = std::max(worst, std::abs(y.at(i * 7 + o) - s));
    }
  EXPECT_LE(worst, 1e-12);
}

TEST(Linear, RowsAreIndependentOfBatch) {
  std::mt19937_64 rng(4);
  const Tensor x = oracle::random_tensor(rng, {23, 9});
  const Tensor w = oracle::random_tensor(rng, {17, 9});
  const Tensor b = oracle::random_tensor(rng, {17});
  const Tensor all = diff::linear(x, w, b);
  for (std::size_t i = 0; i < 23; ++i) {
    const Tensor one = diff::linear(diff::slice_rows(x, i, i + 1), w, b);
    for (std::size_t o = 0; o < 17; ++o) ASSERT_EQ(one.at(o), all.at(i * 17 + o));
  }
}

TEST(Elementwise, SinOfZeroIsZero) {
  const Tensor y = diff::sin(Tensor::zeros({4}));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Elementwise, Abs) {
  EXPECT_EQ(vec(diff::abs(Tensor::from({2}, {-1.5, 2.0})).values()), (std::vector<double>{1.5, 2.0}));
}

TEST(Elementwise, MatchLoopOracles) {
  std::mt19937_64 rng(5);
  const Tensor a = oracle::random_tensor(rng, {6, 7});
  const Tensor b = oracle::random_tensor(rng, {6, 7});
  const auto va = vec(a.values()), vb = vec(b.values());
  const auto mul = diff::mul(a, b), add = diff::add(a, b), sub = diff::sub(a, b);
  const auto s = diff::sin(a, 3.0), c = diff::cos(a, 3.0), sc = diff::scale(a, -2.5), ab = diff::abs(a);
  const auto sg = diff::sigmoid(a);
  for (std::size_t i = 0; i < va.size(); ++i) {
    EXPECT_NEAR(mul.at(i), va[i] * vb[i], 1e-12);
    EXPECT_NEAR(add.at(i), va[i] + vb[i], 1e-12);
    EXPECT_NEAR(sub.at(i), va[i] - vb[i], 1e-12);
    EXPECT_NEAR(s.at(i), std::sin(3.0 * va[i]), 1e-12);
    EXPECT_NEAR(c.at(i), std::cos(3.0 * va[i]), 1e-12);
    EXPECT_NEAR(sc.at(i), -2.5 * va[i], 1e-12);
    EXPECT_NEAR(ab.at(i), std::abs(va[i]), 1e-12);
    EXPECT_NEAR(sg.at(i), 1.0 / (1.0 + std::exp(-va[i])), 1e-12);
  }
}

TEST(Elementwise, SinCosLongVectorsMatchStd) {
  std::mt19937_64 rng(6);
  const Tensor a = oracle::random_tensor(rng, {1003}, false, -40.0, 40.0);
  const auto s = diff::sin(a, 30.0), c = diff::cos(a, 30.0);
  for (std::size_t i = 0; i < a.numel(); ++i) {
    ASSERT_NEAR(s.at(i), std::sin(30.0 * a.at(i)), 1e-12);
    ASSERT_NEAR(c.at(i), std::cos(30.0 * a.at(i)), 1e-12);
  }
}

TEST(Elementwise, ShapeMismatchThrows) {
  EXPECT_THROW(diff::add(Tensor::zeros({2, 3}), Tensor::zeros({3, 2})), DimensionError);
  EXPECT_THROW(diff::mul(Tensor::zeros({4}), Tensor::zeros({5})), DimensionError);
}

TEST(Elementwise, ScalarBroadcasts) {
  const Tensor x = Tensor::from({3}, {1, 2, 3});
  EXPECT_EQ(vec(diff::mul(x, Tensor::scalar(2.0)).values()), (std::vector<double>{2, 4, 6}));
  EXPECT_EQ(vec(diff::sub(Tensor::scalar(1.0), x).values()), (std::vector<double>{0, -1, -2}));
}

TEST(ReduceMean, Values) {
  EXPECT_EQ(diff::reduce_mean(Tensor::from({3}, {1, 2, 3})).item(), 2.0);
  EXPECT_DOUBLE_EQ(diff::reduce_mean(Tensor::full({4, 5}, 0.37)).item(), 0.37);
}

TEST(ReduceMean, GradientIsOneOverCount) {
  const Tensor x = Tensor::zeros({7}, true);
  diff::backward(diff::reduce_mean(x));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0 / 7.0);
}

TEST(ReduceMean, EmptyThrows) { EXPECT_THROW(diff::reduce_mean(Tensor::zeros({0})), DomainError); }

TEST(Backward, SinAtZero) {
  const Tensor x = Tensor::scalar(0.0, true);
  diff::backward(diff::sin(x));
  EXPECT_EQ(x.grad()[0], 1.0);
}

TEST(Backward, MeanOfSquares) {
  std::mt19937_64 rng(7);
  const Tensor x = oracle::random_tensor(rng, {9}, true);
  diff::backward(diff::reduce_mean(diff::mul(x, x)));
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(x.grad()[i], 2.0 * x.at(i) / 9.0, 1e-15);
}

TEST(Backward, NonScalarLossThrows) {
  const Tensor x = Tensor::zeros({2}, true);
  EXPECT_THROW(diff::backward(diff::sin(x)), ContractError);
}

TEST(Backward, UnreachableLeafGetsZero) {
  const Tensor x = Tensor::full({3}, 1.0, true);
  const Tensor y = Tensor::full({3}, 2.0, true);
  diff::backward(diff::reduce_sum(diff::mul(x, x)));
  for (double g : y.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Backward, AccumulatesUntilReset) {
  Tensor x = Tensor::from({2}, {1.0, -2.0}, true);
  diff::backward(diff::reduce_sum(diff::scale(x, 3.0)));
  diff::backward(diff::reduce_sum(diff::scale(x, 3.0)));
  EXPECT_EQ(x.grad()[0], 6.0);
  x.zero_grad();
  EXPECT_EQ(x.grad()[1], 0.0);
}

TEST(Backward, SharedSubexpressionSumsBothPaths) {
  const Tensor x = Tensor::scalar(1.5, true);
  const Tensor y = diff::mul(x, x);
  diff::backward(diff::add(y, diff::scale(y, 2.0)));
  EXPECT_DOUBLE_EQ(x.grad()[0], 3.0 * 2.0 * 1.5);
}

// Every differentiable op against central differences, through a small
// random composition ending in a weighted sum.
TEST(Backward, EveryOpMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  const Tensor a = oracle::random_tensor(rng, {4, 3}, true);
  const Tensor b = oracle::random_tensor(rng, {3, 5}, true);
  const Tensor w = oracle::random_tensor(rng, {5, 3}, true);
  const Tensor bias = oracle::random_tensor(rng, {5}, true);
  const Tensor v = oracle::random_tensor(rng, {5}, true);
  const Tensor weights = oracle::random_tensor(rng, {8, 5});

  auto build = [&] {
    const Tensor m = diff::matmul(a, b);                            // [4,5]
    const Tensor l = diff::linear(a, w, bias);                      // [4,5]
    const Tensor s = diff::sine_layer(a, w, bias, 2.0);             // [4,5]
    const Tensor e = diff::mul(diff::sin(m, 1.3), diff::cos(l, 0.7));
    const Tensor f = diff::add(diff::abs(diff::add_scalar(l, 0.05)), diff::sigmoid(diff::sub(m, l)));
    const Tensor g = diff::mul_rows(diff::add(e, f), v);
    const Tensor h = diff::concat_rows(std::vector<Tensor>{g, diff::scale(s, 0.5)});  // [8,5]
    const Tensor k = diff::concat_cols(std::vector<Tensor>{diff::column(h, 1), diff::slice_rows(h, 0, 8)});
    const Tensor r = diff::reshape(diff::repeat_rows(diff::slice_rows(k, 2, 6), 2), {8, 6});
    const Tensor lhs = diff::concat_cols(std::vector<Tensor>{diff::slice_rows(r, 0, 8)});
    return diff::add(diff::reduce_mean(diff::mul(diff::slice_rows(lhs, 0, 8),
                                                 diff::concat_cols(std::vector<Tensor>{weights, diff::column(weights, 0)}))),
                     diff::reduce_sum(diff::mul(h, h)));
  };
  const Tensor loss = build();
  diff::backward(loss);
  auto f = [&] { return build().item(); };
  for (const Tensor& leaf : {a, b, w, bias, v}) EXPECT_LT(oracle::fd_check(leaf, f), 1e-6);
}

TEST(Backward, TwoLayerMlpMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const Tensor x = oracle::random_tensor(rng, {16, 3});
  const Tensor w1 = oracle::random_tensor(rng, {8, 3}, true);
  const Tensor b1 = oracle::random_tensor(rng, {8}, true);
  const Tensor w2 = oracle::random_tensor(rng, {2, 8}, true);
  const Tensor b2 = oracle::random_tensor(rng, {2}, true);
  const Tensor target = oracle::random_tensor(rng, {16, 2});
  auto build = [&] {
    const Tensor h = diff::sin(diff::linear(x, w1, b1), 2.0);
    const Tensor y = diff::linear(h, w2, b2);
    const Tensor r = diff::sub(y, target);
    return diff::reduce_mean(diff::mul(r, r));
  };
  diff::backward(build());
  auto f = [&] { return build().item(); };
  for (const Tensor& leaf : {w1, b1, w2, b2}) EXPECT_LT(oracle::fd_check(leaf, f), 1e-6);
}

TEST(Backward, HundredRandomPointsPerOp) {
  std::mt19937_64 rng(10);
  using Unary = std::function<Tensor(const Tensor&)>;
  const std::vector<std::pair<std::string, Unary>> ops = {
      {"sin", [](const Tensor& t) { return diff::sin(t, 1.7); }},
      {"cos", [](const Tensor& t) { return diff::cos(t, 1.7); }},
      {"abs", [](const Tensor& t) { return diff::abs(t); }},
      {"scale", [](const Tensor& t) { return diff::scale(t, -0.3); }},
      {"sigmoid", [](const Tensor& t) { return diff::sigmoid(t); }},
      {"square", [](const Tensor& t) { return diff::mul(t, t); }},
  };
  for (const auto& [name, op] : ops) {
    const Tensor x = oracle::random_tensor(rng, {100}, true, -2.0, 2.0);
    diff::backward(diff::reduce_sum(op(x)));
    auto f = [&] { return diff::reduce_sum(op(x)).item(); };
    EXPECT_LT(oracle::fd_check(x, f), 1e-6) << name;
  }
}

TEST(Backward, DeterministicGraphs) {
  auto run = [] {
    std::mt19937_64 rng(11);
    const Tensor x = oracle::random_tensor(rng, {31, 4});
    const Tensor w = oracle::random_tensor(rng, {19, 4}, true);
    const Tensor b = oracle::random_tensor(rng, {19}, true);
    const Tensor y = diff::reduce_mean(diff::sine_layer(x, w, b, 30.0));
    diff::backward(y);
    auto out = vec(w.grad());
    out.push_back(y.item());
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, ZeroGradientLeavesParameterUnchanged) {
  const Tensor p = Tensor::from({3}, {1.0, -2.0, 0.5}, true);
  diff::Adam adam({{"p", p}}, {});
  adam.step();
  EXPECT_EQ(vec(p.values()), (std::vector<double>{1.0, -2.0, 0.5}));
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, FirstStepHandValue) {
  std::vector<double> p{0.0}, m{0.0}, v{0.0};
  const std::vector<double> g{2.0};
  diff::AdamOptions o;
  o.learning_rate = 1e-3;
  diff::adam_update(p, g, m, v, 1, o, "x");
  // m_hat = 2, v_hat = 4, so the step is lr * 2 / (2 + 1e-8).
  EXPECT_NEAR(p[0], -1e-3, 1e-11);
  EXPECT_NEAR(p[0], -1e-3 * 2.0 / (2.0 + 1e-8), 1e-18);
}

TEST(Adam, TwoStepsMatchRecurrence) {
  const Tensor p = Tensor::from({2}, {0.3, -0.7}, true);
  diff::AdamOptions o;
  o.learning_rate = 0.01;
  diff::Adam adam({{"p", p}}, o);
  const std::vector<double> g{1.5, -0.25};
  std::vector<double> ref{0.3, -0.7}, m(2, 0.0), v(2, 0.0);
  for (int step = 1; step <= 2; ++step) {
    adam.zero_grad();
    diff::backward(diff::reduce_sum(diff::mul(p, Tensor::from({2}, g))));
    adam.step();
    for (std::size_t i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1.0 - std::pow(0.9, step));
      const double vh = v[i] / (1.0 - std::pow(0.999, step));
      ref[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  EXPECT_LE(oracle::max_abs_diff(p.values(), ref), 1e-12);
  EXPECT_EQ(adam.steps(), 2);
}

TEST(Adam, NanGradientNamesParameter) {
  const Tensor p = Tensor::from({1}, {1.0}, true);
  diff::Adam adam({{"height.l0.weight", p}}, {});
  diff::backward(diff::reduce_sum(diff::scale(p, std::nan(""))));
  try {
    adam.step();
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("height.l0.weight"), std::string::npos);
  }
  EXPECT_EQ(adam.steps(), 0);
}

TEST(Adam, RejectsBadHyperparameters) {
  diff::AdamOptions o;
  o.beta1 = 1.0;
  EXPECT_THROW(diff::validate(o), DomainError);
  o = {};
  o.learning_rate = 0.0;
  EXPECT_THROW(diff::validate(o), DomainError);
}
