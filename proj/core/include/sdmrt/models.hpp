#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdmrt/align.hpp"
#include "sdmrt/corpus.hpp"
#include "sdmrt/lm.hpp"

namespace sdmrt {

enum class ModelKind { AT, NAT, IterNAT };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelHyperparams {
  double lambda_lm = 1.0;
  double lambda_lex = 1.0;
  double sigma = 0.2;  // width of the diagonal position prior
  std::size_t beam_width = 5;
  std::size_t refine_steps = 10;
  int em_iterations = 5;
  double lm_discount = 0.4;

  friend bool operator==(const ModelHyperparams&, const ModelHyperparams&) = default;
};

// Count-based translation model. AT, NAT and IterNAT share one estimator
// (lexical table, length model, target bigram LM) and differ only in how
// they decode.
class TranslationModel {
 public:
  static TranslationModel train(ModelKind kind, const ParallelCorpus& corpus,
                                const ModelHyperparams& hyper = {});

  // Adds weight x the component counts of `corpus`; the lexical table gets
  // one extra EM pass on top of its stored counts.
  void fine_tune(const ParallelCorpus& corpus, double weight);

  // Same components, different decoder.
  TranslationModel with_kind(ModelKind kind) const;

  ModelKind kind() const noexcept { return kind_; }
  const ModelHyperparams& hyper() const noexcept { return hyper_; }
  ModelHyperparams& mutable_hyper() noexcept { return hyper_; }
  const LexicalTable& lexical() const noexcept { return lexical_; }
  const LengthModel& length_model() const noexcept { return length_; }
  const NGramLM& lm() const noexcept { return lm_; }
  const VocabPtr& source_vocab() const noexcept { return lexical_.source_vocab(); }
  const VocabPtr& target_vocab() const noexcept { return lexical_.target_vocab(); }

  std::string serialize() const;
  static TranslationModel parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static TranslationModel load(const std::filesystem::path& path);

  friend bool operator==(const TranslationModel& a, const TranslationModel& b);

 private:
  TranslationModel(ModelKind kind, ModelHyperparams hyper, LexicalTable lexical,
                   LengthModel length, NGramLM lm);

  ModelKind kind_;
  ModelHyperparams hyper_;
  LexicalTable lexical_;
  LengthModel length_;
  NGramLM lm_;
};

struct Candidate {
  Sentence hypothesis;
  double model_score = 0.0;
  std::optional<double> rerank_score;
};

struct CandidateList {
  Sentence source;
  std::vector<Candidate> entries;

  const Candidate& best() const;
};

// Normalized alignment weights a(i|t) for 1-based target position t under
// a length estimate; index 0 is NULL, index i is source position i.
std::vector<double> position_prior(std::size_t source_length, std::size_t position,
                                   std::size_t length_estimate, double sigma);

// Dense e_t(w) = sum_i a(i|t) t(w|x_i) for positions 1..positions.
std::vector<std::vector<double>> emission_table(const TranslationModel& model, const Sentence& x,
                                                std::size_t length_estimate, std::size_t positions);

std::size_t at_length_cap(std::size_t source_length);
// Positions re-masked at refinement iteration `iteration` of `steps`.
std::size_t mask_count(std::size_t length, std::size_t steps, std::size_t iteration);

CandidateList at_k_best(const TranslationModel& model, const Sentence& x, std::size_t k);
CandidateList nat_decode(const TranslationModel& model, const Sentence& x, std::size_t k);

struct RefinementTrace {
  Sentence output;
  std::vector<Sentence> steps;                   // output after each iteration
  std::vector<std::vector<std::size_t>> masked;  // masked positions per iteration (0-based)
  std::vector<std::vector<double>> confidence;
};

// Mask-predict. `length` overrides the argmax length when given.
RefinementTrace iter_nat_decode(const TranslationModel& model, const Sentence& x,
                                std::size_t steps, std::optional<std::size_t> length = {});

// Forced scoring under the model's own factorization.
double model_score(const TranslationModel& model, const Sentence& x, const Sentence& y);

// k-best list for whichever decoder the model kind uses.
CandidateList k_best(const TranslationModel& model, const Sentence& x, std::size_t k);
// Top-1 translation: AT beam, NAT argmax length, IterNAT refine_steps iterations.
Sentence decode(const TranslationModel& model, const Sentence& x);

}  // namespace sdmrt
