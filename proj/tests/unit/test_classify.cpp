#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "opgram/classify.hpp"

using namespace opgram;

namespace {

LabeledInstance inst(std::string label, std::vector<std::pair<std::uint32_t, std::uint64_t>> entries,
                     Mode mode = Mode::Binary) {
  LabeledInstance i;
  i.label = std::move(label);
  i.app_id = i.label + "/" + std::to_string(entries.size());
  i.vector.mode = mode;
  i.vector.entries = std::move(entries);
  return i;
}

SparseVector vec(std::vector<std::pair<std::uint32_t, std::uint64_t>> entries,
                 Mode mode = Mode::Binary) {
  SparseVector v;
  v.mode = mode;
  v.entries = std::move(entries);
  return v;
}

// Linearly separable two-class corpus: feature 0 marks malware, feature 1
// marks benign, features 2+ are noise.
std::vector<LabeledInstance> separable_corpus(std::size_t per_class, std::uint64_t seed,
                                              Mode mode = Mode::Binary) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledInstance> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> m{{0, mode == Mode::Binary ? 1u : 2u}};
    std::vector<std::pair<std::uint32_t, std::uint64_t>> b{{1, 1}};
    for (std::uint32_t f = 2; f < 6; ++f) {
      if (rng() % 2) m.emplace_back(f, 1);
      if (rng() % 2) b.emplace_back(f, 1);
    }
    out.push_back(inst("malware", std::move(m), mode));
    out.push_back(inst("benign", std::move(b), mode));
  }
  return out;
}

}  // namespace

TEST_CASE("bernoulli parameters use Laplace smoothing") {
  std::vector<LabeledInstance> train{
      inst("malware", {{0, 1}}),
      inst("malware", {{0, 1}}),
      inst("benign", {{1, 1}}),
      inst("benign", {}),
  };
  auto model = train_nb(train, Mode::Binary, 2, 1.0);
  REQUIRE(model.classes == std::vector<std::string>{"benign", "malware"});
  CHECK(model.prior[0] == 0.5);
  CHECK(model.prior[1] == 0.5);
  // benign: feature0 never present -> (0+1)/(2+2); feature1 once -> (1+1)/(2+2)
  CHECK(model.prob[0][0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(model.prob[0][1] == doctest::Approx(0.5).epsilon(1e-15));
  // malware: feature0 always -> (2+1)/(2+2)
  CHECK(model.prob[1][0] == doctest::Approx(0.75).epsilon(1e-15));

  for (const auto& row : model.prob) {
    for (double p : row) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
}

TEST_CASE("single-class naive Bayes always predicts that class") {
  std::vector<LabeledInstance> train{inst("malware", {{0, 1}}), inst("malware", {})};
  auto model = train_nb(train, Mode::Binary, 1, 1.0);
  CHECK(predict_nb(model, vec({{0, 1}})).label == "malware");
  CHECK(predict_nb(model, vec({})).label == "malware");
}

TEST_CASE("a perfectly separating feature classifies the training set") {
  auto train = separable_corpus(10, 5);
  auto model = train_nb(train, Mode::Binary, 6, 1.0);
  for (const auto& i : train) {
    CHECK(predict_nb(model, i.vector).label == i.label);
  }
}

TEST_CASE("bernoulli posteriors match the exact rational oracle") {
  // 4 instances x 2 features; labels fixed benign,benign,malware,malware.
  for (unsigned bits = 0; bits < 256; ++bits) {
    std::vector<LabeledInstance> train;
    std::vector<std::vector<bool>> rows(4, std::vector<bool>(2));
    for (int r = 0; r < 4; ++r) {
      rows[r][0] = (bits >> (2 * r)) & 1;
      rows[r][1] = (bits >> (2 * r + 1)) & 1;
      std::vector<std::pair<std::uint32_t, std::uint64_t>> entries;
      if (rows[r][0]) entries.emplace_back(0, 1);
      if (rows[r][1]) entries.emplace_back(1, 1);
      train.push_back(inst(r < 2 ? "benign" : "malware", std::move(entries)));
    }
    auto model = train_nb(train, Mode::Binary, 2, 1.0);

    // class-conditional presence counts for the oracle
    std::vector<std::int64_t> benign_present{rows[0][0] + rows[1][0], rows[0][1] + rows[1][1]};
    std::vector<std::int64_t> malware_present{rows[2][0] + rows[3][0], rows[2][1] + rows[3][1]};

    for (unsigned q = 0; q < 4; ++q) {
      std::vector<bool> query{static_cast<bool>(q & 1), static_cast<bool>(q >> 1)};
      std::vector<std::pair<std::uint32_t, std::uint64_t>> entries;
      if (query[0]) entries.emplace_back(0, 1);
      if (query[1]) entries.emplace_back(1, 1);
      auto prediction = predict_nb(model, vec(std::move(entries)));

      const long double benign_ref = oracle::bernoulli_log_posterior(2, 4, benign_present, query);
      const long double malware_ref = oracle::bernoulli_log_posterior(2, 4, malware_present, query);
      CHECK(std::abs(prediction.log_posterior[0] - static_cast<double>(benign_ref)) <= 1e-12);
      CHECK(std::abs(prediction.log_posterior[1] - static_cast<double>(malware_ref)) <= 1e-12);
    }
  }
}

TEST_CASE("symmetric model ties break to the lexicographically first class") {
  std::vector<LabeledInstance> train{
      inst("alpha", {{0, 1}}),
      inst("beta", {{1, 1}}),
  };
  auto model = train_nb(train, Mode::Binary, 2, 1.0);
  CHECK(predict_nb(model, vec({})).label == "alpha");
}

TEST_CASE("multinomial log-posterior is affine in the count vector") {
  std::vector<LabeledInstance> train{
      inst("benign", {{0, 3}, {1, 1}}, Mode::Frequency),
      inst("benign", {{1, 2}}, Mode::Frequency),
      inst("malware", {{0, 1}, {2, 5}}, Mode::Frequency),
      inst("malware", {{2, 2}}, Mode::Frequency),
  };
  auto model = train_nb(train, Mode::Frequency, 3, 1.0);
  // multinomial parameters sum to 1 per class
  for (const auto& row : model.prob) {
    double sum = 0.0;
    for (double p : row) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  std::mt19937_64 rng(17);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> a, b, sum;
    for (std::uint32_t f = 0; f < 3; ++f) {
      std::uint64_t va = rng() % 4, vb = rng() % 4;
      if (va) a.emplace_back(f, va);
      if (vb) b.emplace_back(f, vb);
      if (va + vb) sum.emplace_back(f, va + vb);
    }
    auto pa = predict_nb(model, vec(a, Mode::Frequency));
    auto pb = predict_nb(model, vec(b, Mode::Frequency));
    auto psum = predict_nb(model, vec(sum, Mode::Frequency));
    auto pzero = predict_nb(model, vec({}, Mode::Frequency));
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
      const double lhs = psum.log_posterior[c] - pzero.log_posterior[c];
      const double rhs = (pa.log_posterior[c] - pzero.log_posterior[c]) +
                         (pb.log_posterior[c] - pzero.log_posterior[c]);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("hand-built 2x2 bernoulli model posteriors") {
  std::vector<LabeledInstance> train{
      inst("benign", {{0, 1}}),
      inst("benign", {}),
      inst("malware", {{0, 1}, {1, 1}}),
      inst("malware", {{1, 1}}),
  };
  auto model = train_nb(train, Mode::Binary, 2, 1.0);
  auto p = predict_nb(model, vec({{1, 1}}));
  // direct formula: log(1/2) + log(theta or 1-theta) per feature
  const double benign_expected = std::log(0.5) + std::log(1.0 - 0.5) + std::log(0.25);
  const double malware_expected = std::log(0.5) + std::log(1.0 - 0.5) + std::log(0.75);
  CHECK(std::abs(p.log_posterior[0] - benign_expected) <= 1e-12);
  CHECK(std::abs(p.log_posterior[1] - malware_expected) <= 1e-12);
  CHECK(p.label == "malware");
}

TEST_CASE("nb rejects bad inputs") {
  std::vector<LabeledInstance> train{inst("a", {{0, 1}}), inst("b", {})};
  CHECK_THROWS_AS((void)train_nb({}, Mode::Binary, 2, 1.0), Error);
  CHECK_THROWS_AS((void)train_nb(train, Mode::Binary, 2, 0.0), Error);
  CHECK_THROWS_AS((void)train_nb(train, Mode::Binary, 0, 1.0), Error);  // id 0 out of range

  auto model = train_nb(train, Mode::Binary, 1, 1.0);
  CHECK_THROWS_AS((void)predict_nb(model, vec({{5, 1}})), Error);
  CHECK_THROWS_AS((void)predict_nb(model, vec({}, Mode::Frequency)), Error);
}

TEST_CASE("svm separates a planted-feature corpus") {
  auto train = separable_corpus(20, 11);
  TrainConfig config;
  config.seed = 3;
  auto model = train_linear(train, 6, config);
  for (const auto& i : train) {
    CHECK(predict_linear(model, i.vector) == i.label);
  }
}

TEST_CASE("huge regularization collapses to the tie rule") {
  auto train = separable_corpus(10, 13);
  TrainConfig config;
  config.lambda = 1e9;
  config.epochs = 5;
  auto model = train_linear(train, 6, config);
  for (double b : model.bias) CHECK(std::abs(b) < 1e-6);
  for (const auto& w : model.weights) {
    for (double x : w) CHECK(std::abs(x) < 1e-6);
  }
  // zero scores everywhere -> lexicographically first class
  CHECK(predict_linear(model, vec({{0, 1}})) == "benign");
}

TEST_CASE("svm training is deterministic for a fixed seed") {
  auto train = separable_corpus(15, 17);
  TrainConfig config;
  config.seed = 99;
  auto a = train_linear(train, 6, config);
  auto b = train_linear(train, 6, config);
  CHECK(a.weights == b.weights);  // bit-for-bit
  CHECK(a.bias == b.bias);

  config.threads = 4;
  auto c = train_linear(train, 6, config);
  CHECK(a.weights == c.weights);
  CHECK(a.bias == c.bias);
}

TEST_CASE("mean hinge objective shrinks over epochs on separable data") {
  auto train = separable_corpus(15, 19);
  TrainConfig config;
  config.seed = 5;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t epochs : {1, 5, 25}) {
    config.epochs = epochs;
    auto model = train_linear(train, 6, config);
    const double objective = hinge_objective(model, train, "malware");
    CHECK(objective <= previous + 1e-6);
    previous = objective;
  }
}

TEST_CASE("zero model predicts the lexicographically first class") {
  LinearModel model;
  model.feature_count = 3;
  model.classes = {"benign", "malware"};
  model.weights = {{0, 0, 0}, {0, 0, 0}};
  model.bias = {0, 0};
  CHECK(predict_linear(model, vec({{1, 1}})) == "benign");
}

TEST_CASE("three-class one-vs-rest argmax by hand") {
  LinearModel model;
  model.feature_count = 2;
  model.classes = {"a", "b", "c"};
  model.weights = {{1.0, 0.0}, {0.0, 2.0}, {0.5, 0.5}};
  model.bias = {0.0, -1.0, 0.25};
  // x = (1, 1): scores a=1.0, b=1.0, c=1.25
  CHECK(predict_linear(model, vec({{0, 1}, {1, 1}})) == "c");
  // x = (1, 0): scores a=1.0, b=-1.0, c=0.75
  CHECK(predict_linear(model, vec({{0, 1}})) == "a");
  // x = (0, 1): scores a=0.0, b=1.0, c=0.75
  CHECK(predict_linear(model, vec({{1, 1}})) == "b");
}

TEST_CASE("svm rejects single-class corpora and bad dimensions") {
  std::vector<LabeledInstance> one{inst("a", {{0, 1}}), inst("a", {})};
  CHECK_THROWS_AS((void)train_linear(one, 1, TrainConfig{}), Error);

  auto train = separable_corpus(5, 23);
  CHECK_THROWS_AS((void)train_linear(train, 2, TrainConfig{}), Error);  // ids reach 5
  auto model = train_linear(train, 6, TrainConfig{});
  CHECK_THROWS_AS((void)predict_linear(model, vec({{9, 1}})), Error);
}
