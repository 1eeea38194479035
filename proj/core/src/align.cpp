#include "sdmrt/align.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdmrt/error.hpp"

namespace sdmrt {

LexicalTable::LexicalTable(VocabPtr source_vocab, VocabPtr target_vocab)
    : source_vocab_(std::move(source_vocab)), target_vocab_(std::move(target_vocab)) {
  if (!source_vocab_ || !target_vocab_) throw Error("lexical table: vocabularies required");
  counts_.resize(source_vocab_->size());
  rows_.resize(source_vocab_->size());
  trained_.assign(source_vocab_->size(), false);
}

double LexicalTable::prob(TokenId target, TokenId source) const {
  if (!in_support(target)) target = Vocabulary::kUnk;
  if (source >= rows_.size()) source = Vocabulary::kUnk;
  if (!trained_[source]) return 1.0 / static_cast<double>(support_size());
  const auto& row = rows_[source];
  auto it = std::lower_bound(row.begin(), row.end(), target,
                             [](const auto& e, TokenId t) { return e.first < t; });
  return it != row.end() && it->first == target ? it->second : 0.0;
}

void LexicalTable::add_row(TokenId source, double weight, std::span<double> out) const {
  if (source >= rows_.size()) source = Vocabulary::kUnk;
  if (!trained_[source]) {
    const double u = weight / static_cast<double>(support_size());
    for (TokenId y = 0; y < out.size(); ++y)
      if (in_support(y)) out[y] += u;
    return;
  }
  for (const auto& [y, p] : rows_[source]) out[y] += weight * p;
}

LexicalTable::CountRows LexicalTable::expected_counts(const ParallelCorpus& corpus,
                                                      double weight) const {
  CountRows counts(source_vocab_->size());
  std::vector<double> post;
  for (const auto& pair : corpus) {
    post.resize(pair.source.size() + 1);
    for (auto y : pair.target) {
      post[0] = floored(y, Vocabulary::kNull);
      double den = post[0];
      for (std::size_t i = 0; i < pair.source.size(); ++i) {
        post[i + 1] = floored(y, pair.source[i]);
        den += post[i + 1];
      }
      const TokenId ty = in_support(y) ? y : Vocabulary::kUnk;
      counts[Vocabulary::kNull][ty] += weight * post[0] / den;
      for (std::size_t i = 0; i < pair.source.size(); ++i) {
        auto x = pair.source[i] < counts.size() ? pair.source[i] : Vocabulary::kUnk;
        counts[x][ty] += weight * post[i + 1] / den;
      }
    }
  }
  return counts;
}

void LexicalTable::set_counts(CountRows counts) {
  if (counts.size() != source_vocab_->size()) throw Error("lexical table: count rows mismatch");
  counts_ = std::move(counts);
  for (std::size_t x = 0; x < counts_.size(); ++x) {
    double total = 0.0;
    for (const auto& [y, c] : counts_[x]) total += c;
    rows_[x].clear();
    trained_[x] = total > 0.0;
    if (!trained_[x]) continue;
    rows_[x].reserve(counts_[x].size());
    for (const auto& [y, c] : counts_[x]) rows_[x].emplace_back(y, c / total);
  }
}

double LexicalTable::corpus_loglik(const ParallelCorpus& corpus) const {
  double ll = 0.0;
  for (const auto& pair : corpus) {
    const double prior = 1.0 / static_cast<double>(pair.source.size() + 1);
    for (auto y : pair.target) {
      double s = floored(y, Vocabulary::kNull);
      for (auto x : pair.source) s += floored(y, x);
      ll += std::log(prior * s);
    }
  }
  return ll;
}

std::string LexicalTable::serialize() const {
  std::size_t rows = 0, entries = 0;
  for (const auto& r : counts_) {
    rows += !r.empty();
    entries += r.size();
  }
  std::ostringstream out;
  out << "lexical " << rows << ' ' << entries << '\n';
  for (TokenId x = 0; x < counts_.size(); ++x)
    for (const auto& [y, c] : counts_[x])
      out << "count " << source_vocab_->token(x) << ' ' << target_vocab_->token(y) << ' '
          << format_exact(c) << '\n';
  return out.str();
}

LexicalTable LexicalTable::parse(LineReader& in, VocabPtr source_vocab, VocabPtr target_vocab) {
  auto head = in.expect("lexical", 2);
  auto entries = static_cast<std::size_t>(parse_int(head[1]));
  LexicalTable table(source_vocab, target_vocab);
  CountRows counts(source_vocab->size());
  for (std::size_t e = 0; e < entries; ++e) {
    auto f = in.expect("count", 3);
    auto x = source_vocab->find(f[0]);
    auto y = target_vocab->find(f[1]);
    if (!x || !y) in.fail("lexical: unknown token");
    counts[*x][*y] = parse_double(f[2]);
  }
  table.set_counts(std::move(counts));
  return table;
}

LexicalTable train_ibm1(const ParallelCorpus& corpus, int iterations) {
  if (iterations < 1) throw Error("ibm1: iterations must be at least 1");
  if (corpus.empty()) throw Error("ibm1: empty corpus");
  LexicalTable table(corpus.source_vocab(), corpus.target_vocab());
  for (int it = 0; it < iterations; ++it) table.set_counts(table.expected_counts(corpus));
  return table;
}

void LengthModel::accumulate(const ParallelCorpus& corpus, double weight) {
  for (const auto& p : corpus) {
    counts_[p.source.size()][p.target.size()] += weight;
    totals_[p.source.size()] += weight;
    max_length_ = std::max(max_length_, p.target.size());
  }
}

double LengthModel::prob(std::size_t target_length, std::size_t source_length) const {
  if (target_length < 1 || target_length > max_length_) return 0.0;
  const auto L = static_cast<double>(max_length_);
  auto it = counts_.find(source_length);
  if (it == counts_.end()) return 1.0 / L;
  auto c = it->second.find(target_length);
  double n = c == it->second.end() ? 0.0 : c->second;
  return (n + 1.0) / (totals_.at(source_length) + L);
}

double LengthModel::log_prob(std::size_t target_length, std::size_t source_length) const {
  return std::log(std::max(prob(target_length, source_length), 1e-12));
}

std::size_t LengthModel::argmax(std::size_t source_length) const {
  return top_k(source_length, 1).front();
}

std::vector<std::size_t> LengthModel::top_k(std::size_t source_length, std::size_t k) const {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t L = 1; L <= max_length_; ++L) scored.emplace_back(prob(L, source_length), L);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

std::string LengthModel::serialize() const {
  std::size_t entries = 0;
  for (const auto& [s, row] : counts_) entries += row.size();
  std::ostringstream out;
  out << "length " << max_length_ << ' ' << entries << '\n';
  for (const auto& [s, row] : counts_)
    for (const auto& [l, c] : row) out << "len " << s << ' ' << l << ' ' << format_exact(c) << '\n';
  return out.str();
}

LengthModel LengthModel::parse(LineReader& in) {
  auto head = in.expect("length", 2);
  LengthModel m;
  m.max_length_ = static_cast<std::size_t>(parse_int(head[0]));
  auto entries = static_cast<std::size_t>(parse_int(head[1]));
  for (std::size_t e = 0; e < entries; ++e) {
    auto f = in.expect("len", 3);
    auto s = static_cast<std::size_t>(parse_int(f[0]));
    auto l = static_cast<std::size_t>(parse_int(f[1]));
    double c = parse_double(f[2]);
    m.counts_[s][l] = c;
    m.totals_[s] += c;
  }
  return m;
}

LengthModel train_length_model(const ParallelCorpus& corpus) {
  LengthModel m;
  m.accumulate(corpus);
  return m;
}

double ibm1_logprob(const LexicalTable& table, const LengthModel& length_model, const Sentence& x,
                    const Sentence& y) {
  if (y.empty()) throw Error("ibm1_logprob: empty target");
  if (x.empty()) throw Error("ibm1_logprob: empty source");
  double score = length_model.log_prob(y.size(), x.size());
  const double prior = 1.0 / static_cast<double>(x.size() + 1);
  for (auto yj : y) {
    double s = table.floored(yj, Vocabulary::kNull);
    for (auto xi : x) s += table.floored(yj, xi);
    score += std::log(prior * s);
  }
  return score;
}

}  // namespace sdmrt
