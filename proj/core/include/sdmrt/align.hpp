#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdmrt/corpus.hpp"
#include "sdmrt/text_io.hpp"

namespace sdmrt {

// IBM Model 1 translation table t(y|x), with x ranging over the source
// vocabulary (NULL included). A source row never touched by training is
// implicitly uniform over the target support: non-reserved tokens plus UNK.
//
// The table keeps the expected counts of the E-step that produced it, so
// t is always exactly normalize(counts). Fine-tuning adds weighted counts.
class LexicalTable {
 public:
  static constexpr double kFloor = 1e-12;
  using CountRows = std::vector<std::map<TokenId, double>>;

  LexicalTable(VocabPtr source_vocab, VocabPtr target_vocab);

  double prob(TokenId target, TokenId source) const;
  double floored(TokenId target, TokenId source) const { return std::max(prob(target, source), kFloor); }
  // out[y] += weight * t(y|source) for every target id y.
  void add_row(TokenId source, double weight, std::span<double> out) const;

  bool in_support(TokenId target) const noexcept {
    return target == Vocabulary::kUnk ||
           (target >= Vocabulary::kNumReserved && target < target_vocab_->size());
  }
  std::size_t support_size() const noexcept {
    return target_vocab_->size() - Vocabulary::kNumReserved + 1;
  }

  // Expected alignment counts of `corpus` under the current table, scaled by weight.
  CountRows expected_counts(const ParallelCorpus& corpus, double weight = 1.0) const;
  // Replaces the stored counts and renormalizes every touched row.
  void set_counts(CountRows counts);
  const CountRows& counts() const noexcept { return counts_; }

  // sum over pairs of sum_j log( 1/(|x|+1) * sum_{i in NULL+x} t(y_j|x_i) ).
  double corpus_loglik(const ParallelCorpus& corpus) const;

  const VocabPtr& source_vocab() const noexcept { return source_vocab_; }
  const VocabPtr& target_vocab() const noexcept { return target_vocab_; }

  // "lexical <rows> <entries>" then "count <source> <target> <expected count>".
  std::string serialize() const;
  static LexicalTable parse(LineReader& in, VocabPtr source_vocab, VocabPtr target_vocab);

  friend bool operator==(const LexicalTable& a, const LexicalTable& b) {
    return same_vocab(a.source_vocab_, b.source_vocab_) &&
           same_vocab(a.target_vocab_, b.target_vocab_) && a.counts_ == b.counts_;
  }

 private:
  using Row = std::vector<std::pair<TokenId, double>>;  // sorted by target id

  VocabPtr source_vocab_;
  VocabPtr target_vocab_;
  CountRows counts_;
  std::vector<Row> rows_;
  std::vector<bool> trained_;
};

// Standard EM from a uniform start; deterministic.
LexicalTable train_ibm1(const ParallelCorpus& corpus, int iterations);

// p(|y| = L given |x| = S), add-one smoothed over L in 1..max_length, where
// max_length is the longest target seen. Unseen S is uniform.
class LengthModel {
 public:
  LengthModel() = default;

  void accumulate(const ParallelCorpus& corpus, double weight = 1.0);

  double prob(std::size_t target_length, std::size_t source_length) const;
  double log_prob(std::size_t target_length, std::size_t source_length) const;
  std::size_t argmax(std::size_t source_length) const;
  // Most probable lengths first; ties go to the shorter length.
  std::vector<std::size_t> top_k(std::size_t source_length, std::size_t k) const;
  std::size_t max_length() const noexcept { return max_length_; }

  // "length <max_length> <entries>" then "len <S> <L> <count>".
  std::string serialize() const;
  static LengthModel parse(LineReader& in);

  friend bool operator==(const LengthModel&, const LengthModel&) = default;

 private:
  std::map<std::size_t, std::map<std::size_t, double>> counts_;
  std::map<std::size_t, double> totals_;
  std::size_t max_length_ = 1;
};

LengthModel train_length_model(const ParallelCorpus& corpus);

// log p_len(|y| given |x|) + sum_j log( 1/(|x|+1) * sum_{i in NULL+x} t(y_j|x_i) ),
// with every table lookup floored at LexicalTable::kFloor.
double ibm1_logprob(const LexicalTable& table, const LengthModel& length_model, const Sentence& x,
                    const Sentence& y);

}  // namespace sdmrt
