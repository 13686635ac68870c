#include "opgram/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "parallel.hpp"
#include "rng.hpp"

namespace opgram {

namespace {

std::vector<std::string> sorted_labels(std::span<const LabeledInstance> instances) {
  std::set<std::string> labels;
  for (const auto& inst : instances) labels.insert(inst.label);
  return {labels.begin(), labels.end()};
}

std::size_t class_index(const std::vector<std::string>& classes, std::string_view label) {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  return static_cast<std::size_t>(it - classes.begin());
}

void check_dimensions(std::span<const LabeledInstance> instances, std::size_t feature_count) {
  for (const auto& inst : instances) {
    if (!inst.vector.entries.empty() && inst.vector.entries.back().first >= feature_count) {
      fail(ErrorKind::DimensionMismatch,
           "instance '" + inst.app_id + "' references feature id " +
               std::to_string(inst.vector.entries.back().first) + " >= feature count " +
               std::to_string(feature_count));
    }
  }
}

std::size_t argmax_first(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

double dot_sparse(const std::vector<double>& w, const SparseVector& x) {
  double acc = 0.0;
  for (const auto& [id, value] : x.entries) {
    acc += w[id] * static_cast<double>(value);
  }
  return acc;
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
  return a == Algorithm::NaiveBayes ? "nb" : "svm";
}

Algorithm algorithm_from_string(std::string_view s) {
  if (s == "nb") return Algorithm::NaiveBayes;
  if (s == "svm") return Algorithm::LinearSvm;
  fail(ErrorKind::FormatError, "unknown algorithm '" + std::string(s) + "' (expected nb|svm)");
}

void NBModel::finalize() {
  const std::size_t num_classes = classes.size();
  log_prior.resize(num_classes);
  log_prob.assign(num_classes, {});
  log_not_prob.assign(num_classes, {});
  bernoulli_base.assign(num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    log_prior[c] = std::log(prior[c]);
    log_prob[c].resize(feature_count);
    if (mode == Mode::Binary) log_not_prob[c].resize(feature_count);
    double base = log_prior[c];
    for (std::size_t f = 0; f < feature_count; ++f) {
      log_prob[c][f] = std::log(prob[c][f]);
      if (mode == Mode::Binary) {
        log_not_prob[c][f] = std::log(1.0 - prob[c][f]);
        base += log_not_prob[c][f];
      }
    }
    bernoulli_base[c] = base;
  }
}

NBModel train_nb(std::span<const LabeledInstance> instances, Mode mode,
                 std::size_t feature_count, double alpha) {
  if (instances.empty()) fail(ErrorKind::EmptyClass, "no training instances");
  if (alpha <= 0.0) fail(ErrorKind::InvalidArgument, "smoothing alpha must be > 0");
  check_dimensions(instances, feature_count);

  NBModel model;
  model.mode = mode;
  model.alpha = alpha;
  model.feature_count = feature_count;
  model.classes = sorted_labels(instances);

  const std::size_t num_classes = model.classes.size();
  std::vector<std::uint64_t> class_count(num_classes, 0);
  // Bernoulli: presence counts. Multinomial: summed term counts.
  std::vector<std::vector<std::uint64_t>> feature_count_by_class(
      num_classes, std::vector<std::uint64_t>(feature_count, 0));
  std::vector<std::uint64_t> terms_by_class(num_classes, 0);

  for (const auto& inst : instances) {
    if (inst.vector.mode != mode) {
      fail(ErrorKind::ModeMismatch, "instance '" + inst.app_id + "' does not match training mode");
    }
    const std::size_t c = class_index(model.classes, inst.label);
    ++class_count[c];
    for (const auto& [id, value] : inst.vector.entries) {
      if (mode == Mode::Binary) {
        feature_count_by_class[c][id] += value >= 1 ? 1 : 0;
      } else {
        feature_count_by_class[c][id] += value;
        terms_by_class[c] += value;
      }
    }
  }

  model.prior.resize(num_classes);
  model.prob.assign(num_classes, std::vector<double>(feature_count, 0.0));
  const double total = static_cast<double>(instances.size());
  for (std::size_t c = 0; c < num_classes; ++c) {
    model.prior[c] = static_cast<double>(class_count[c]) / total;
    for (std::size_t f = 0; f < feature_count; ++f) {
      const double count = static_cast<double>(feature_count_by_class[c][f]);
      if (mode == Mode::Binary) {
        model.prob[c][f] = (count + alpha) / (static_cast<double>(class_count[c]) + 2.0 * alpha);
      } else {
        model.prob[c][f] = (count + alpha) /
                           (static_cast<double>(terms_by_class[c]) +
                            alpha * static_cast<double>(feature_count));
      }
    }
  }
  model.finalize();
  return model;
}

Prediction predict_nb(const NBModel& model, const SparseVector& vector) {
  if (vector.mode != model.mode) {
    fail(ErrorKind::ModeMismatch, "vector mode does not match model mode");
  }
  if (!vector.entries.empty() && vector.entries.back().first >= model.feature_count) {
    fail(ErrorKind::DimensionMismatch, "vector references a feature outside the model");
  }

  const std::size_t num_classes = model.classes.size();
  Prediction out;
  out.log_posterior.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    double score;
    if (model.mode == Mode::Binary) {
      score = model.bernoulli_base[c];
      for (const auto& [id, value] : vector.entries) {
        if (value >= 1) score += model.log_prob[c][id] - model.log_not_prob[c][id];
      }
    } else {
      score = model.log_prior[c];
      for (const auto& [id, value] : vector.entries) {
        score += static_cast<double>(value) * model.log_prob[c][id];
      }
    }
    out.log_posterior[c] = score;
  }
  out.label = model.classes[argmax_first(out.log_posterior)];
  return out;
}

LinearModel train_linear(std::span<const LabeledInstance> instances,
                         std::size_t feature_count, const TrainConfig& config) {
  if (instances.empty()) fail(ErrorKind::EmptyClass, "no training instances");
  if (config.lambda <= 0.0) fail(ErrorKind::InvalidArgument, "lambda must be > 0");
  if (config.epochs == 0) fail(ErrorKind::InvalidArgument, "epochs must be >= 1");
  check_dimensions(instances, feature_count);

  LinearModel model;
  model.feature_count = feature_count;
  model.classes = sorted_labels(instances);
  model.config = config;
  if (model.classes.size() < 2) {
    fail(ErrorKind::EmptyClass, "linear training needs at least two classes");
  }

  const std::size_t num_classes = model.classes.size();
  model.weights.assign(num_classes, std::vector<double>(feature_count, 0.0));
  model.bias.assign(num_classes, 0.0);

  detail::parallel_for(num_classes, config.threads, [&](std::size_t c) {
    std::vector<double>& w = model.weights[c];
    double b = 0.0;
    const std::string& positive = model.classes[c];

    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), 0);
    detail::SplitMix64 rng(config.seed + static_cast<std::uint64_t>(c));

    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      detail::shuffle(order, rng);
      for (std::size_t idx : order) {
        const LabeledInstance& inst = instances[idx];
        const double y = inst.label == positive ? 1.0 : -1.0;
        ++t;
        const double eta = 1.0 / (config.lambda * static_cast<double>(t));
        const double margin = y * (dot_sparse(w, inst.vector) + b);

        const double scale = 1.0 - eta * config.lambda;
        for (double& wf : w) wf *= scale;
        if (margin < 1.0) {
          for (const auto& [id, value] : inst.vector.entries) {
            w[id] += eta * y * static_cast<double>(value);
          }
          b += eta * y;
        }
      }
    }
    model.bias[c] = b;
  });
  return model;
}

std::string predict_linear(const LinearModel& model, const SparseVector& vector) {
  if (!vector.entries.empty() && vector.entries.back().first >= model.feature_count) {
    fail(ErrorKind::DimensionMismatch, "vector references a feature outside the model");
  }
  std::vector<double> scores(model.classes.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    scores[c] = dot_sparse(model.weights[c], vector) + model.bias[c];
  }
  return model.classes[argmax_first(scores)];
}

double hinge_objective(const LinearModel& model, std::span<const LabeledInstance> instances,
                       std::string_view cls) {
  auto it = std::find(model.classes.begin(), model.classes.end(), cls);
  if (it == model.classes.end()) {
    fail(ErrorKind::InvalidArgument, "unknown class '" + std::string(cls) + "'");
  }
  const std::size_t c = static_cast<std::size_t>(it - model.classes.begin());
  const std::vector<double>& w = model.weights[c];

  double norm_sq = 0.0;
  for (double wf : w) norm_sq += wf * wf;

  double loss = 0.0;
  for (const auto& inst : instances) {
    const double y = inst.label == *it ? 1.0 : -1.0;
    const double margin = y * (dot_sparse(w, inst.vector) + model.bias[c]);
    loss += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * model.config.lambda * norm_sq + loss / static_cast<double>(instances.size());
}

}  // namespace opgram
