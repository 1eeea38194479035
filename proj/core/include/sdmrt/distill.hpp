#pragma once

#include <vector>

#include "sdmrt/corpus.hpp"
#include "sdmrt/models.hpp"
#include "sdmrt/rerank.hpp"

namespace sdmrt {

struct DistillSpec {
  std::size_t k = 5;
  const Reranker* reranker = nullptr;  // optional
};

// Sequence-level KD: each source is paired with the top-1 of the teacher's
// k-best (after the optional rerank). Sources are kept verbatim.
ParallelCorpus distill_corpus(const TranslationModel& teacher, const ParallelCorpus& source_corpus,
                              const DistillSpec& spec = {},
                              std::vector<CandidateList>* lists = nullptr);

// raw ++ distilled.
ParallelCorpus build_sdm(const ParallelCorpus& raw, const ParallelCorpus& distilled);

// Test sources with the teacher's predictions as targets.
ParallelCorpus build_dtest(const TranslationModel& teacher, const ParallelCorpus& test,
                           const DistillSpec& spec = {});

// Keeps (x, y_hat) from `distilled` iff TER(y_hat, y) < tau, where y is the
// aligned target in `raw`. Optionally reports every pair's TER.
ParallelCorpus filter_by_ter(const ParallelCorpus& raw, const ParallelCorpus& distilled, double tau,
                             std::vector<double>* ter_scores = nullptr);

}  // namespace sdmrt
