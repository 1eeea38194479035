#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sdmrt/corpus.hpp"
#include "sdmrt/generator.hpp"
#include "sdmrt/models.hpp"

namespace sdmrt {

enum class LossKind { ZeroOne, Ter };

std::string_view to_string(LossKind loss);

// L(y, y'): cost of predicting y when the truth is y'. TER uses y as the
// hypothesis and y' as the reference.
double task_loss(LossKind loss, const Sentence& predicted, const Sentence& truth);

struct Outcome {
  Sentence y;
  double prob = 0.0;  // P(y | x); zero for candidates outside the support
};

struct TaskInput {
  Sentence x;
  double prior = 0.0;
  std::vector<Outcome> outputs;  // Y(x), sorted lexicographically, distinct
};

// Finite decision problem with known P(x) and P(y'|x).
class EnumerableTask {
 public:
  EnumerableTask(std::vector<TaskInput> inputs, LossKind loss, double loss_scale = 1.0);

  const std::vector<TaskInput>& inputs() const noexcept { return inputs_; }
  LossKind loss_kind() const noexcept { return loss_; }
  double loss_scale() const noexcept { return scale_; }
  double loss(const Sentence& predicted, const Sentence& truth) const {
    return scale_ * task_loss(loss_, predicted, truth);
  }

  const TaskInput& input(const Sentence& x) const;
  // Adds zero-probability candidates to Y(x).
  void add_candidates(const Sentence& x, std::span<const Sentence> ys);

  EnumerableTask with_loss(LossKind loss, double loss_scale = 1.0) const;

 private:
  std::vector<TaskInput> inputs_;
  std::map<Sentence, std::size_t> index_;
  LossKind loss_;
  double scale_;
};

using Hypothesis = std::map<Sentence, Sentence>;

// r(y|x) = sum_{y'} P(y'|x) L(y, y').
double conditional_risk(const EnumerableTask& task, const Sentence& x, const Sentence& y);
// h*(x) = argmin_y r(y|x); ties go to the lexicographically smallest y.
Hypothesis bayes_optimal(const EnumerableTask& task);
// R(h) = sum_x P(x) r(h(x)|x).
double overall_risk(const EnumerableTask& task, const Hypothesis& h);

// Every function x -> Y(x); the count is the product of |Y(x)|.
std::vector<Hypothesis> enumerate_hypotheses(const EnumerableTask& task, std::size_t limit = 1u << 20);

// x -> decode(model, x) over the task's inputs.
Hypothesis empirical_hypothesis(const TranslationModel& model, const EnumerableTask& task);

// Exact P(y|x) under the generator: synonym choice, then the swap pass.
std::vector<Outcome> true_conditional(const TaskSpec& spec, const Sentence& x);
// Uniform prior over the distinct inputs.
EnumerableTask task_from_spec(const TaskSpec& spec, std::span<const Sentence> inputs, LossKind loss);

// TSV with one row per (hypothesis, x): name, x, h(x), r(h(x)|x),
// followed by one "overall" row per hypothesis.
std::string format_risk_table(const EnumerableTask& task,
                              const std::vector<std::pair<std::string, Hypothesis>>& hypotheses,
                              const Vocabulary& source_vocab, const Vocabulary& target_vocab);

}  // namespace sdmrt
