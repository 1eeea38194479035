#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdmrt/corpus.hpp"
#include "sdmrt/lm.hpp"

namespace sdmrt {

// Corpus-level clipped n-gram statistics for BLEU-4.
struct BleuStats {
  std::array<double, 4> matches{};
  std::array<double, 4> totals{};
  double hypothesis_length = 0;
  double reference_length = 0;
};

BleuStats bleu_stats(std::span<const Sentence> hypotheses, std::span<const Sentence> references);
double bleu_from_stats(const BleuStats& stats);

// Corpus BLEU-4 in [0, 100] with brevity penalty. An order with zero
// matches gets add-one smoothing on its numerator and denominator.
double bleu(std::span<const Sentence> hypotheses, std::span<const Sentence> references);

std::size_t levenshtein(std::span<const TokenId> a, std::span<const TokenId> b);
// Word error rate: Levenshtein distance over reference length.
double wer(const Sentence& hypothesis, const Sentence& reference);

struct TerResult {
  std::size_t shifts = 0;
  std::size_t edits = 0;  // insertions + deletions + substitutions after shifting
  std::size_t reference_length = 0;

  double rate() const {
    return static_cast<double>(shifts + edits) / static_cast<double>(reference_length);
  }
};

inline constexpr std::size_t kTerMaxShiftSpan = 10;

// Greedy block-shift TER: repeatedly apply the shift of a hypothesis span
// (length <= 10, matching some reference substring) that most reduces the
// edit distance, until none does. Ties prefer the smaller distance, then
// the shorter span, then the leftmost origin, then the leftmost destination.
TerResult ter_details(const Sentence& hypothesis, const Sentence& reference);
double ter(const Sentence& hypothesis, const Sentence& reference);

// Positions t >= 1 with y_t == y_{t-1}, over all tokens.
double repeated_token_rate(std::span<const Sentence> sentences);

struct MetricsRow {
  std::string system;
  std::string dataset;
  std::optional<std::size_t> iteration;
  double bleu = 0;
  double ter = 0;  // mean sentence TER
  double repeated_rate = 0;
  double ppl = 0;
  std::uint64_t seed = 0;
  std::string config_hash;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

// Scores `outputs` against the targets of `references`; ppl is the corpus
// perplexity of the outputs under `lm`.
MetricsRow evaluate_system(std::span<const Sentence> outputs, const ParallelCorpus& references,
                           const NGramLM& lm);

}  // namespace sdmrt
