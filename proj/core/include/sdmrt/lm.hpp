#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sdmrt/corpus.hpp"
#include "sdmrt/text_io.hpp"

namespace sdmrt {

// Count-based n-gram model with interpolated absolute discounting:
//
//   p(w|c) = max(n(c,w) - d, 0) / n(c) + lambda(c) * p(w|c')
//   lambda(c) = sum_w min(n(c,w), d) / n(c)
//
// where c' drops the oldest context token. The recursion bottoms out in a
// uniform distribution over the predictable set: every non-reserved token
// plus UNK and EOS. Contexts never seen in training defer to c' unchanged.
// Counts are doubles so weighted (fine-tune) accumulation is exact.
class NGramLM {
 public:
  NGramLM(VocabPtr vocab, int order = 2, double discount = 0.4);

  // Adds the n-gram counts of BOS^(n-1) s EOS for every sentence, scaled by weight.
  void accumulate(std::span<const Sentence> sentences, double weight = 1.0);

  // `context` holds the preceding tokens (most recent last). Only the last
  // order-1 entries are used; missing history is padded with BOS.
  double prob(std::span<const TokenId> context, TokenId word) const;
  double log_prob(std::span<const TokenId> context, TokenId word) const;
  // Full distribution indexed by token id; zero on non-predictable ids.
  std::vector<double> distribution(std::span<const TokenId> context) const;

  // Natural-log probability of s followed by EOS.
  double sentence_logprob(const Sentence& sentence) const;

  int order() const noexcept { return order_; }
  double discount() const noexcept { return discount_; }
  const VocabPtr& vocab() const noexcept { return vocab_; }
  std::size_t support_size() const noexcept { return vocab_->size() - Vocabulary::kNumReserved + 2; }
  bool predictable(TokenId id) const noexcept {
    return id == Vocabulary::kEos || id == Vocabulary::kUnk ||
           (id >= Vocabulary::kNumReserved && id < vocab_->size());
  }
  // Exact count n(context, word) at the order implied by context length.
  double count(std::span<const TokenId> context, TokenId word) const;

  // Text schema: "lm <order> <discount> <entries>" then one
  // "ngram <k> <context tokens...> <word> <count>" line per nonzero count.
  std::string serialize() const;
  static NGramLM parse(LineReader& in, VocabPtr vocab);

  friend bool operator==(const NGramLM& a, const NGramLM& b);

 private:
  struct ContextStats {
    double total = 0.0;
    double held_out = 0.0;  // sum_w min(n(c,w), d)
    std::map<TokenId, double> counts;
  };
  using Table = std::map<std::vector<TokenId>, ContextStats>;

  TokenId normalize_token(TokenId id) const noexcept;
  void refresh();

  VocabPtr vocab_;
  int order_;
  double discount_;
  std::vector<Table> tables_;  // tables_[k]: contexts of length k
};

NGramLM train_lm(std::span<const Sentence> targets, VocabPtr vocab, int order = 2,
                 double discount = 0.4);
NGramLM train_lm(const ParallelCorpus& corpus, int order = 2, double discount = 0.4);

double lm_logprob(const NGramLM& lm, const Sentence& sentence);

// exp(-(sum of sentence log-probs) / (tokens + one EOS per sentence)).
double perplexity(const NGramLM& lm, std::span<const Sentence> sentences);

// Vocabulary section shared by serialized artifacts: "vocab <name> <size>"
// followed by one token per line, reserved symbols included.
std::string serialize_vocab(const Vocabulary& vocab, std::string_view name);
VocabPtr parse_vocab(LineReader& in, std::string_view name);

}  // namespace sdmrt
