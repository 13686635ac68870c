#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opgram/ngram.hpp"

namespace opgram {

enum class Algorithm { NaiveBayes, LinearSvm };

std::string_view to_string(Algorithm a) noexcept;
Algorithm algorithm_from_string(std::string_view s);

/// Naive Bayes over selected sparse features: Bernoulli event model for
/// binary vectors, multinomial for frequency vectors. `prob[c][f]` holds the
/// Bernoulli presence probability or the smoothed multinomial term
/// probability of feature f under class c.
struct NBModel {
  Mode mode = Mode::Binary;
  double alpha = 1.0;
  std::size_t feature_count = 0;
  std::vector<std::string> classes;  // sorted; prediction ties go to the first
  std::vector<double> prior;
  std::vector<std::vector<double>> prob;

  // Derived log-space caches; rebuilt by finalize(), never serialized.
  std::vector<double> log_prior;
  std::vector<std::vector<double>> log_prob;
  std::vector<std::vector<double>> log_not_prob;  // Bernoulli only
  std::vector<double> bernoulli_base;             // log prior + sum log(1-theta)

  void finalize();
};

NBModel train_nb(std::span<const LabeledInstance> instances, Mode mode,
                 std::size_t feature_count, double alpha = 1.0);

struct Prediction {
  std::string label;
  std::vector<double> log_posterior;  // unnormalized, aligned with model classes
};

Prediction predict_nb(const NBModel& model, const SparseVector& vector);

enum class LearningRate { InverseScaled };  // eta_t = 1 / (lambda * t)

struct TrainConfig {
  Algorithm algorithm = Algorithm::LinearSvm;
  std::uint64_t seed = 1;
  std::size_t epochs = 50;
  double lambda = 0.01;
  double alpha = 1.0;  // naive Bayes smoothing
  LearningRate schedule = LearningRate::InverseScaled;
  unsigned threads = 1;
};

/// One-vs-rest linear classifiers trained by seeded stochastic subgradient
/// descent on the hinge loss. Class c uses seed + c, so results do not
/// depend on how many classes train concurrently.
struct LinearModel {
  std::size_t feature_count = 0;
  std::vector<std::string> classes;  // sorted
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  TrainConfig config;
};

LinearModel train_linear(std::span<const LabeledInstance> instances,
                         std::size_t feature_count, const TrainConfig& config);

std::string predict_linear(const LinearModel& model, const SparseVector& vector);

/// Regularized mean hinge objective of one one-vs-rest class; exposed so the
/// training-loss trend is observable.
double hinge_objective(const LinearModel& model, std::span<const LabeledInstance> instances,
                       std::string_view cls);

}  // namespace opgram
