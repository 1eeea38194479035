#include "sdmrt/lm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdmrt/error.hpp"

namespace sdmrt {

NGramLM::NGramLM(VocabPtr vocab, int order, double discount)
    : vocab_(std::move(vocab)), order_(order), discount_(discount) {
  if (!vocab_) throw Error("lm: vocabulary required");
  if (order < 1) throw Error("lm: order must be at least 1");
  if (!(discount > 0.0 && discount < 1.0)) throw Error("lm: discount must lie in (0, 1)");
  tables_.resize(static_cast<std::size_t>(order));
}

TokenId NGramLM::normalize_token(TokenId id) const noexcept {
  return predictable(id) ? id : Vocabulary::kUnk;
}

void NGramLM::accumulate(std::span<const Sentence> sentences, double weight) {
  if (weight < 0) throw Error("lm: negative weight");
  const auto history = static_cast<std::size_t>(order_ - 1);
  std::vector<TokenId> padded;
  for (const auto& s : sentences) {
    padded.assign(history, Vocabulary::kBos);
    for (auto id : s) padded.push_back(normalize_token(id));
    padded.push_back(Vocabulary::kEos);
    for (std::size_t p = history; p < padded.size(); ++p) {
      for (std::size_t k = 0; k <= history; ++k) {
        std::vector<TokenId> ctx(padded.begin() + static_cast<std::ptrdiff_t>(p - k),
                                 padded.begin() + static_cast<std::ptrdiff_t>(p));
        auto& stats = tables_[k][ctx];
        stats.counts[padded[p]] += weight;
        stats.total += weight;
      }
    }
  }
  refresh();
}

void NGramLM::refresh() {
  for (auto& table : tables_)
    for (auto& [ctx, stats] : table) {
      stats.held_out = 0.0;
      for (const auto& [w, c] : stats.counts) stats.held_out += std::min(c, discount_);
    }
}

namespace {

// Last `history` tokens of `context`, BOS-padded on the left.
std::vector<TokenId> effective_context(std::span<const TokenId> context, std::size_t history) {
  std::vector<TokenId> out(history, Vocabulary::kBos);
  auto take = std::min(history, context.size());
  std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(),
            out.end() - static_cast<std::ptrdiff_t>(take));
  return out;
}

}  // namespace

double NGramLM::prob(std::span<const TokenId> context, TokenId word) const {
  if (!vocab_->contains(word) || (!predictable(word) && word != Vocabulary::kBos))
    word = Vocabulary::kUnk;
  if (!predictable(word)) return 0.0;
  const auto history = static_cast<std::size_t>(order_ - 1);
  auto ctx = effective_context(context, history);
  for (auto& id : ctx)
    if (id != Vocabulary::kBos) id = normalize_token(id);
  double p = 1.0 / static_cast<double>(support_size());
  for (std::size_t k = 0; k <= history; ++k) {
    std::vector<TokenId> key(ctx.end() - static_cast<std::ptrdiff_t>(k), ctx.end());
    auto it = tables_[k].find(key);
    if (it == tables_[k].end() || it->second.total <= 0) continue;
    const auto& st = it->second;
    auto c = st.counts.find(word);
    double n = c == st.counts.end() ? 0.0 : c->second;
    p = std::max(n - discount_, 0.0) / st.total + st.held_out / st.total * p;
  }
  return p;
}

double NGramLM::log_prob(std::span<const TokenId> context, TokenId word) const {
  return std::log(prob(context, word));
}

std::vector<double> NGramLM::distribution(std::span<const TokenId> context) const {
  const auto history = static_cast<std::size_t>(order_ - 1);
  auto ctx = effective_context(context, history);
  for (auto& id : ctx)
    if (id != Vocabulary::kBos) id = normalize_token(id);
  std::vector<double> p(vocab_->size(), 0.0);
  const double uniform = 1.0 / static_cast<double>(support_size());
  for (TokenId w = 0; w < p.size(); ++w)
    if (predictable(w)) p[w] = uniform;
  for (std::size_t k = 0; k <= history; ++k) {
    std::vector<TokenId> key(ctx.end() - static_cast<std::ptrdiff_t>(k), ctx.end());
    auto it = tables_[k].find(key);
    if (it == tables_[k].end() || it->second.total <= 0) continue;
    const auto& st = it->second;
    const double scale = st.held_out / st.total;
    for (auto& v : p) v *= scale;
    for (const auto& [w, n] : st.counts) p[w] += std::max(n - discount_, 0.0) / st.total;
  }
  return p;
}

double NGramLM::count(std::span<const TokenId> context, TokenId word) const {
  if (context.size() >= tables_.size()) return 0.0;
  std::vector<TokenId> key(context.begin(), context.end());
  auto it = tables_[context.size()].find(key);
  if (it == tables_[context.size()].end()) return 0.0;
  auto c = it->second.counts.find(word);
  return c == it->second.counts.end() ? 0.0 : c->second;
}

double NGramLM::sentence_logprob(const Sentence& sentence) const {
  std::vector<TokenId> history;
  history.reserve(sentence.size() + 1);
  double total = 0.0;
  for (auto id : sentence) {
    total += log_prob(history, id);
    history.push_back(id);
  }
  total += log_prob(history, Vocabulary::kEos);
  return total;
}

std::string NGramLM::serialize() const {
  std::size_t entries = 0;
  for (const auto& table : tables_)
    for (const auto& [ctx, st] : table) entries += st.counts.size();
  std::ostringstream out;
  out << "lm " << order_ << ' ' << format_exact(discount_) << ' ' << entries << '\n';
  for (std::size_t k = 0; k < tables_.size(); ++k)
    for (const auto& [ctx, st] : tables_[k])
      for (const auto& [w, c] : st.counts) {
        out << "ngram " << k;
        for (auto id : ctx) out << ' ' << vocab_->token(id);
        out << ' ' << vocab_->token(w) << ' ' << format_exact(c) << '\n';
      }
  return out.str();
}

NGramLM NGramLM::parse(LineReader& in, VocabPtr vocab) {
  auto head = in.expect("lm", 3);
  NGramLM lm(vocab, static_cast<int>(parse_int(head[0])), parse_double(head[1]));
  auto entries = static_cast<std::size_t>(parse_int(head[2]));
  auto id_of = [&](std::string_view tok) {
    auto id = vocab->find(tok);
    if (!id) in.fail("lm: unknown token '" + std::string(tok) + "'");
    return *id;
  };
  for (std::size_t e = 0; e < entries; ++e) {
    auto f = in.expect("ngram", 3);
    auto k = static_cast<std::size_t>(parse_int(f[0]));
    if (k >= lm.tables_.size() || f.size() != k + 3) in.fail("lm: malformed ngram line");
    std::vector<TokenId> ctx;
    for (std::size_t i = 0; i < k; ++i) ctx.push_back(id_of(f[1 + i]));
    auto& st = lm.tables_[k][ctx];
    double c = parse_double(f[k + 2]);
    st.counts[id_of(f[k + 1])] = c;
    st.total += c;
  }
  lm.refresh();
  return lm;
}

bool operator==(const NGramLM& a, const NGramLM& b) {
  if (a.order_ != b.order_ || a.discount_ != b.discount_ || !same_vocab(a.vocab_, b.vocab_))
    return false;
  for (std::size_t k = 0; k < a.tables_.size(); ++k) {
    if (a.tables_[k].size() != b.tables_[k].size()) return false;
    auto ia = a.tables_[k].begin();
    auto ib = b.tables_[k].begin();
    for (; ia != a.tables_[k].end(); ++ia, ++ib)
      if (ia->first != ib->first || ia->second.counts != ib->second.counts) return false;
  }
  return true;
}

NGramLM train_lm(std::span<const Sentence> targets, VocabPtr vocab, int order, double discount) {
  if (targets.empty()) throw Error("lm: empty training corpus");
  NGramLM lm(std::move(vocab), order, discount);
  lm.accumulate(targets);
  return lm;
}

NGramLM train_lm(const ParallelCorpus& corpus, int order, double discount) {
  auto targets = corpus.targets();
  return train_lm(targets, corpus.target_vocab(), order, discount);
}

double lm_logprob(const NGramLM& lm, const Sentence& sentence) {
  return lm.sentence_logprob(sentence);
}

double perplexity(const NGramLM& lm, std::span<const Sentence> sentences) {
  if (sentences.empty()) throw Error("perplexity of an empty corpus");
  double logprob = 0.0;
  double tokens = 0.0;
  for (const auto& s : sentences) {
    logprob += lm.sentence_logprob(s);
    tokens += static_cast<double>(s.size() + 1);
  }
  return std::exp(-logprob / tokens);
}

std::string serialize_vocab(const Vocabulary& vocab, std::string_view name) {
  std::ostringstream out;
  out << "vocab " << name << ' ' << vocab.size() << '\n';
  for (const auto& tok : vocab.tokens()) out << tok << '\n';
  return out.str();
}

VocabPtr parse_vocab(LineReader& in, std::string_view name) {
  auto head = in.expect("vocab", 2);
  if (head[0] != name) in.fail("expected vocab '" + std::string(name) + "'");
  auto n = static_cast<std::size_t>(parse_int(head[1]));
  auto vocab = std::make_shared<Vocabulary>();
  for (std::size_t i = 0; i < n; ++i) {
    auto f = in.next_fields();
    if (f.size() != 1) in.fail("vocab: one token per line expected");
    if (i < Vocabulary::kNumReserved) {
      if (f[0] != vocab->token(static_cast<TokenId>(i))) in.fail("vocab: reserved symbols out of order");
      continue;
    }
    if (vocab->add(f[0]) != i) in.fail("vocab: duplicate token '" + std::string(f[0]) + "'");
  }
  return vocab;
}

}  // namespace sdmrt
