#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdmrt/align.hpp"
#include "sdmrt/lm.hpp"
#include "sdmrt/models.hpp"

namespace sdmrt {

enum class RerankVariant { None, Lm, Align };

std::string_view to_string(RerankVariant variant);
RerankVariant parse_rerank_variant(std::string_view name);

// External scorer M_r for k-best candidates. The LM variant ranks by
// ascending per-token perplexity of the candidate; the alignment variant by
// descending ibm1_logprob(x, y).
class Reranker {
 public:
  // Trains on the original data: the LM on its target side, the alignment
  // model (IBM-1 + length model) on the pairs.
  static Reranker train(RerankVariant variant, const ParallelCorpus& original, int lm_order = 2,
                        double lm_discount = 0.4, int em_iterations = 5);

  RerankVariant variant() const noexcept { return variant_; }
  double score(const Sentence& x, const Sentence& y) const;
  // True when score a ranks strictly ahead of score b.
  bool better(double a, double b) const noexcept;

  const NGramLM& lm() const;
  const LexicalTable& lexical() const;
  const LengthModel& length_model() const;

  std::string serialize() const;
  static Reranker parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Reranker load(const std::filesystem::path& path);

 private:
  Reranker() = default;

  RerankVariant variant_ = RerankVariant::None;
  std::shared_ptr<const NGramLM> lm_;
  std::shared_ptr<const LexicalTable> lexical_;
  std::shared_ptr<const LengthModel> length_;
};

// Stable permutation of the candidates: reranker score, then original model
// score, then original position. rerank_score is filled in on every entry.
CandidateList rerank(const CandidateList& candidates, const Reranker& reranker);

// Self-distillation through the reranker: the student's k-best per source,
// reranked, top-1 kept. Output order equals input order.
ParallelCorpus rerank_distill(const TranslationModel& student, const Reranker& reranker,
                              const ParallelCorpus& source_corpus, std::size_t k,
                              std::vector<CandidateList>* lists = nullptr);

// TSV: source, candidate, model_score, rerank_score, rank (1-based).
std::string format_candidate_dump(std::span<const CandidateList> lists, const Vocabulary& source_vocab,
                                  const Vocabulary& target_vocab);

}  // namespace sdmrt
