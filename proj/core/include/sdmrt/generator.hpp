#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sdmrt/corpus.hpp"
#include "sdmrt/random.hpp"

namespace sdmrt {

struct GeneratorConfig {
  std::size_t source_vocab_size = 20;
  std::size_t synonyms_per_token = 2;
  double p_consistent = 1.0;
  double p_swap = 0.0;
  std::size_t min_length = 3;
  std::size_t max_length = 10;
  std::size_t corpus_size = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

// The true generating process: source token `s<i>` translates to one of the
// target synonyms `t<i>_<j>`, j = 1..m.
struct TaskSpec {
  GeneratorConfig config;
  VocabPtr source_vocab;
  VocabPtr target_vocab;
  // Indexed by source id; rows for reserved ids are empty.
  std::vector<std::vector<TokenId>> synonyms;

  const std::vector<TokenId>& synonyms_of(TokenId source) const;

  std::string serialize() const;
  static TaskSpec parse(std::string_view text);
};

// Per-pair record of the random choices, kept for verification.
struct GenerationTrace {
  bool consistent = false;
  std::vector<std::size_t> synonym_index;  // 0-based, one per token
  Sentence pre_swap_target;
  std::size_t swap_trials = 0;            // Bernoulli draws made by the swap pass
  std::vector<std::size_t> swap_positions;  // left index of each swapped pair
};

struct SyntheticData {
  ParallelCorpus corpus;
  TaskSpec task;
  std::vector<GenerationTrace> trace;
};

SyntheticData generate_synthetic(const GeneratorConfig& config);

// Draws one source sentence per the config's length and token distribution.
Sentence sample_source(const TaskSpec& task, Rng& rng);

}  // namespace sdmrt
