#include <cmath>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "sdmrt/bayes.hpp"
#include "sdmrt/error.hpp"
#include "sdmrt/metrics.hpp"

using namespace sdmrt;

namespace {

GeneratorConfig noisy(std::size_t n, std::uint64_t seed = 1) {
  return {.source_vocab_size = 2, .synonyms_per_token = 2, .p_consistent = 0.5, .p_swap = 0.3,
          .min_length = 2, .max_length = 3, .corpus_size = n, .seed = seed};
}

std::vector<Sentence> distinct_sources(const ParallelCorpus& c, std::size_t limit) {
  std::vector<Sentence> out;
  for (const auto& p : c) {
    if (std::find(out.begin(), out.end(), p.source) == out.end()) out.push_back(p.source);
    if (out.size() == limit) break;
  }
  return out;
}

}  // namespace

TEST_CASE("true conditional matches generator frequencies") {
  auto data = generate_synthetic(noisy(40000, 5));
  std::map<Sentence, std::map<Sentence, double>> freq;
  std::map<Sentence, double> seen;
  for (const auto& p : data.corpus) {
    freq[p.source][p.target] += 1;
    seen[p.source] += 1;
  }
  for (const auto& [x, n] : seen) {
    auto dist = true_conditional(data.task, x);
    double total = 0;
    for (const auto& o : dist) {
      total += o.prob;
      const double f = freq[x][o.y] / n;
      const double sd = std::sqrt(o.prob * (1 - o.prob) / n);
      CHECK(std::abs(f - o.prob) < 4 * sd + 1e-12);
    }
    CHECK(total == doctest::Approx(1.0));
    // Nothing observed falls outside the support.
    for (const auto& [y, c] : freq[x]) {
      bool in = std::any_of(dist.begin(), dist.end(), [&](const Outcome& o) { return o.y == y; });
      CHECK(in);
    }
  }
}

TEST_CASE("the Bayes-optimal hypothesis has minimal risk among all hypotheses") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto data = generate_synthetic(noisy(50, seed));
    auto xs = distinct_sources(data.corpus, 3);
    for (auto loss : {LossKind::ZeroOne, LossKind::Ter}) {
      auto task = task_from_spec(data.task, xs, loss);
      auto hstar = bayes_optimal(task);
      const double best = overall_risk(task, hstar);
      for (const auto& h : enumerate_hypotheses(task)) CHECK(overall_risk(task, h) >= best - 1e-12);
      // Risk is the prior-weighted sum of conditional risks.
      double sum = 0;
      for (const auto& in : task.inputs()) sum += in.prior * conditional_risk(task, in.x, hstar.at(in.x));
      CHECK(sum == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero-one Bayes decision is the conditional mode") {
  auto data = generate_synthetic(noisy(50, 7));
  auto xs = distinct_sources(data.corpus, 4);
  auto task = task_from_spec(data.task, xs, LossKind::ZeroOne);
  auto h = bayes_optimal(task);
  for (const auto& in : task.inputs()) {
    const Outcome* mode = &in.outputs.front();
    for (const auto& o : in.outputs)
      if (o.prob > mode->prob) mode = &o;
    CHECK(h.at(in.x) == mode->y);
    CHECK(conditional_risk(task, in.x, mode->y) == doctest::Approx(1.0 - mode->prob));
  }
}

TEST_CASE("scaling the loss scales risks and keeps the decision") {
  auto data = generate_synthetic(noisy(50, 8));
  auto xs = distinct_sources(data.corpus, 3);
  auto task = task_from_spec(data.task, xs, LossKind::Ter);
  auto scaled = task.with_loss(LossKind::Ter, 3.0);
  auto h = bayes_optimal(task);
  CHECK(bayes_optimal(scaled) == h);
  CHECK(overall_risk(scaled, h) == doctest::Approx(3.0 * overall_risk(task, h)));
}

TEST_CASE("zero-probability candidates enlarge the action set without changing risks") {
  auto data = generate_synthetic(noisy(50, 9));
  auto xs = distinct_sources(data.corpus, 2);
  auto task = task_from_spec(data.task, xs, LossKind::Ter);
  const Sentence x = task.inputs().front().x;
  const Sentence y = task.inputs().front().outputs.front().y;
  const double r = conditional_risk(task, x, y);
  // One token longer than x, so outside the support.
  Sentence odd(x.size() + 1, y.front());
  task.add_candidates(x, std::vector<Sentence>{odd, y});
  CHECK(conditional_risk(task, x, y) == doctest::Approx(r));
  auto expected = 0.0;
  for (const auto& o : task.input(x).outputs) expected += o.prob * ter(odd, o.y);
  CHECK(conditional_risk(task, x, odd) == doctest::Approx(expected));
  CHECK(std::is_sorted(task.input(x).outputs.begin(), task.input(x).outputs.end(),
                       [](const Outcome& a, const Outcome& b) { return a.y < b.y; }));
}

TEST_CASE("a deterministic task has zero Bayes risk") {
  GeneratorConfig g{.source_vocab_size = 3, .synonyms_per_token = 1, .p_consistent = 1.0,
                    .p_swap = 0.0, .min_length = 2, .max_length = 3, .corpus_size = 30, .seed = 2};
  auto data = generate_synthetic(g);
  auto task = task_from_spec(data.task, data.corpus.sources(), LossKind::Ter);
  CHECK(overall_risk(task, bayes_optimal(task)) == 0.0);
  auto model = TranslationModel::train(ModelKind::NAT, data.corpus);
  auto h = empirical_hypothesis(model, task);
  for (const auto& in : task.inputs()) CHECK(h.at(in.x) == in.outputs.front().y);
}

TEST_CASE("invalid tasks are rejected") {
  CHECK_THROWS_AS(EnumerableTask({}, LossKind::Ter), Error);
  std::vector<TaskInput> bad{{Sentence{5}, 1.0, {{Sentence{5}, 0.4}}}};
  CHECK_THROWS_AS(EnumerableTask(bad, LossKind::Ter), Error);
  std::vector<TaskInput> prior{{Sentence{5}, 0.5, {{Sentence{5}, 1.0}}}};
  CHECK_THROWS_AS(EnumerableTask(prior, LossKind::Ter), Error);
}

TEST_CASE("risk table lists every hypothesis and input") {
  auto data = generate_synthetic(noisy(50, 3));
  auto xs = distinct_sources(data.corpus, 3);
  auto task = task_from_spec(data.task, xs, LossKind::Ter);
  auto text = format_risk_table(task, {{"h*", bayes_optimal(task)}}, *data.task.source_vocab,
                                *data.task.target_vocab);
  std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  CHECK(lines >= task.inputs().size() + 1);
  CHECK(text.find("overall") != std::string::npos);
}
