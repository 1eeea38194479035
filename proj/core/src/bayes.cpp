#include "sdmrt/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdmrt/error.hpp"
#include "sdmrt/metrics.hpp"

namespace sdmrt {

std::string_view to_string(LossKind loss) {
  return loss == LossKind::ZeroOne ? "zero-one" : "ter";
}

double task_loss(LossKind loss, const Sentence& predicted, const Sentence& truth) {
  if (loss == LossKind::ZeroOne) return predicted == truth ? 0.0 : 1.0;
  return ter(predicted, truth);
}

EnumerableTask::EnumerableTask(std::vector<TaskInput> inputs, LossKind loss, double loss_scale)
    : inputs_(std::move(inputs)), loss_(loss), scale_(loss_scale) {
  if (inputs_.empty()) throw Error("task: no inputs");
  if (!(scale_ > 0)) throw Error("task: loss scale must be positive");
  double prior_sum = 0.0;
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    auto& in = inputs_[i];
    if (in.prior < 0) throw Error("task: negative prior");
    prior_sum += in.prior;
    if (!index_.emplace(in.x, i).second) throw Error("task: duplicate input");
    std::sort(in.outputs.begin(), in.outputs.end(),
              [](const Outcome& a, const Outcome& b) { return a.y < b.y; });
    double s = 0.0;
    for (std::size_t j = 0; j < in.outputs.size(); ++j) {
      if (in.outputs[j].prob < 0) throw Error("task: negative probability");
      if (j && in.outputs[j].y == in.outputs[j - 1].y) throw Error("task: duplicate output");
      s += in.outputs[j].prob;
    }
    if (std::abs(s - 1.0) > 1e-9) throw Error("task: P(.|x) does not sum to 1");
  }
  if (std::abs(prior_sum - 1.0) > 1e-9) throw Error("task: P(x) does not sum to 1");
}

const TaskInput& EnumerableTask::input(const Sentence& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) throw Error("task: unknown input");
  return inputs_[it->second];
}

void EnumerableTask::add_candidates(const Sentence& x, std::span<const Sentence> ys) {
  auto it = index_.find(x);
  if (it == index_.end()) throw Error("task: unknown input");
  auto& outs = inputs_[it->second].outputs;
  for (const auto& y : ys) {
    auto pos = std::lower_bound(outs.begin(), outs.end(), y,
                                [](const Outcome& o, const Sentence& s) { return o.y < s; });
    if (pos == outs.end() || pos->y != y) outs.insert(pos, Outcome{y, 0.0});
  }
}

EnumerableTask EnumerableTask::with_loss(LossKind loss, double loss_scale) const {
  return EnumerableTask(inputs_, loss, loss_scale);
}

double conditional_risk(const EnumerableTask& task, const Sentence& x, const Sentence& y) {
  const auto& in = task.input(x);
  bool known = std::binary_search(in.outputs.begin(), in.outputs.end(), Outcome{y, 0.0},
                                  [](const Outcome& a, const Outcome& b) { return a.y < b.y; });
  if (!known) throw Error("conditional_risk: y is not in Y(x)");
  double r = 0.0;
  for (const auto& o : in.outputs)
    if (o.prob > 0) r += o.prob * task.loss(y, o.y);
  return r;
}

Hypothesis bayes_optimal(const EnumerableTask& task) {
  Hypothesis h;
  for (const auto& in : task.inputs()) {
    const Sentence* best = nullptr;
    double best_r = 0.0;
    for (const auto& cand : in.outputs) {
      double r = conditional_risk(task, in.x, cand.y);
      if (!best || r < best_r) {
        best = &cand.y;
        best_r = r;
      }
    }
    if (!best) throw Error("bayes_optimal: empty output set");
    h.emplace(in.x, *best);
  }
  return h;
}

double overall_risk(const EnumerableTask& task, const Hypothesis& h) {
  double total = 0.0;
  for (const auto& in : task.inputs()) {
    auto it = h.find(in.x);
    if (it == h.end()) throw Error("overall_risk: hypothesis undefined on an input");
    double r = 0.0;
    for (const auto& o : in.outputs)
      if (o.prob > 0) r += o.prob * task.loss(it->second, o.y);
    total += in.prior * r;
  }
  return total;
}

std::vector<Hypothesis> enumerate_hypotheses(const EnumerableTask& task, std::size_t limit) {
  std::size_t count = 1;
  for (const auto& in : task.inputs()) {
    if (in.outputs.empty()) return {};
    if (count > limit / in.outputs.size()) throw Error("enumerate_hypotheses: too many functions");
    count *= in.outputs.size();
  }
  std::vector<Hypothesis> out;
  out.reserve(count);
  std::vector<std::size_t> choice(task.inputs().size(), 0);
  for (std::size_t n = 0; n < count; ++n) {
    Hypothesis h;
    for (std::size_t i = 0; i < choice.size(); ++i)
      h.emplace(task.inputs()[i].x, task.inputs()[i].outputs[choice[i]].y);
    out.push_back(std::move(h));
    for (std::size_t i = 0; i < choice.size(); ++i) {
      if (++choice[i] < task.inputs()[i].outputs.size()) break;
      choice[i] = 0;
    }
  }
  return out;
}

Hypothesis empirical_hypothesis(const TranslationModel& model, const EnumerableTask& task) {
  Hypothesis h;
  for (const auto& in : task.inputs()) {
    try {
      h.emplace(in.x, decode(model, in.x));
    } catch (const Error& e) {
      throw Error(std::string("empirical_hypothesis: decode failed: ") + e.what());
    }
  }
  return h;
}

namespace {

void swap_patterns(const Sentence& y, std::size_t t, double p, double p_swap,
                   std::map<Sentence, double>& out, Sentence& work) {
  if (t + 1 >= work.size()) {
    out[work] += p;
    return;
  }
  if (p_swap < 1.0) swap_patterns(y, t + 1, p * (1.0 - p_swap), p_swap, out, work);
  if (p_swap > 0.0) {
    std::swap(work[t], work[t + 1]);
    swap_patterns(y, t + 2, p * p_swap, p_swap, out, work);
    std::swap(work[t], work[t + 1]);
  }
}

}  // namespace

std::vector<Outcome> true_conditional(const TaskSpec& spec, const Sentence& x) {
  if (x.empty()) throw Error("true_conditional: empty source");
  const auto m = spec.config.synonyms_per_token;
  const auto pc = spec.config.p_consistent;
  // Synonym index assignment -> probability.
  std::map<std::vector<std::size_t>, double> assignments;
  if (pc > 0)
    for (std::size_t j = 0; j < m; ++j)
      assignments[std::vector<std::size_t>(x.size(), j)] += pc / static_cast<double>(m);
  if (pc < 1) {
    double total = std::pow(static_cast<double>(m), static_cast<double>(x.size()));
    if (total > 1e6) throw Error("true_conditional: too many synonym assignments to enumerate");
    std::vector<std::size_t> a(x.size(), 0);
    for (;;) {
      assignments[a] += (1.0 - pc) / total;
      std::size_t i = 0;
      for (; i < a.size(); ++i) {
        if (++a[i] < m) break;
        a[i] = 0;
      }
      if (i == a.size()) break;
    }
  }
  std::map<Sentence, double> dist;
  for (const auto& [a, p] : assignments) {
    Sentence y(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) y[t] = spec.synonyms_of(x[t])[a[t]];
    Sentence work = y;
    swap_patterns(y, 0, p, spec.config.p_swap, dist, work);
  }
  std::vector<Outcome> out;
  out.reserve(dist.size());
  for (auto& [y, p] : dist) out.push_back({y, p});
  return out;
}

EnumerableTask task_from_spec(const TaskSpec& spec, std::span<const Sentence> inputs, LossKind loss) {
  std::vector<Sentence> distinct(inputs.begin(), inputs.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.empty()) throw Error("task_from_spec: no inputs");
  std::vector<TaskInput> out;
  const double prior = 1.0 / static_cast<double>(distinct.size());
  for (auto& x : distinct) out.push_back({x, prior, true_conditional(spec, x)});
  return EnumerableTask(std::move(out), loss);
}

std::string format_risk_table(const EnumerableTask& task,
                              const std::vector<std::pair<std::string, Hypothesis>>& hypotheses,
                              const Vocabulary& source_vocab, const Vocabulary& target_vocab) {
  std::ostringstream out;
  out << "hypothesis\tx\th(x)\trisk\n";
  for (const auto& [name, h] : hypotheses) {
    for (const auto& in : task.inputs()) {
      const auto& y = h.at(in.x);
      double r = 0.0;
      for (const auto& o : in.outputs)
        if (o.prob > 0) r += o.prob * task.loss(y, o.y);
      out << name << '\t' << sentence_text(source_vocab, in.x) << '\t'
          << sentence_text(target_vocab, y) << '\t' << format_fixed(r, 6) << '\n';
    }
    out << name << "\toverall\t-\t" << format_fixed(overall_risk(task, h), 6) << '\n';
  }
  return out.str();
}

}  // namespace sdmrt
