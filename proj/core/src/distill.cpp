#include "sdmrt/distill.hpp"

#include "sdmrt/error.hpp"
#include "sdmrt/metrics.hpp"

namespace sdmrt {

ParallelCorpus distill_corpus(const TranslationModel& teacher, const ParallelCorpus& source_corpus,
                              const DistillSpec& spec, std::vector<CandidateList>* lists) {
  if (spec.k < 1) throw Error("distill: k must be at least 1");
  if (!same_vocab(teacher.source_vocab(), source_corpus.source_vocab()))
    throw Error("distill: corpus source vocabulary differs from the teacher's");
  std::vector<Sentence> targets;
  targets.reserve(source_corpus.size());
  if (lists) lists->clear();
  for (std::size_t i = 0; i < source_corpus.size(); ++i) {
    CandidateList cands;
    try {
      cands = k_best(teacher, source_corpus[i].source, spec.k);
      if (spec.reranker && spec.reranker->variant() != RerankVariant::None)
        cands = rerank(cands, *spec.reranker);
      if (cands.entries.empty()) throw Error("no candidates");
    } catch (const Error& e) {
      throw Error("distill: pair " + std::to_string(i) + ": " + e.what());
    }
    targets.push_back(cands.best().hypothesis);
    if (lists) lists->push_back(std::move(cands));
  }
  return source_corpus.with_targets(std::move(targets), teacher.target_vocab());
}

ParallelCorpus build_sdm(const ParallelCorpus& raw, const ParallelCorpus& distilled) {
  if (!same_vocab(raw.source_vocab(), distilled.source_vocab()) ||
      !same_vocab(raw.target_vocab(), distilled.target_vocab()))
    throw Error("build_sdm: vocabulary mismatch between raw and distilled corpora");
  return concat(raw, distilled);
}

ParallelCorpus build_dtest(const TranslationModel& teacher, const ParallelCorpus& test,
                           const DistillSpec& spec) {
  return distill_corpus(teacher, test, spec);
}

ParallelCorpus filter_by_ter(const ParallelCorpus& raw, const ParallelCorpus& distilled, double tau,
                             std::vector<double>* ter_scores) {
  if (raw.size() != distilled.size())
    throw Error("filter: corpora differ in size (" + std::to_string(raw.size()) + " vs " +
                std::to_string(distilled.size()) + ")");
  if (!same_vocab(raw.target_vocab(), distilled.target_vocab()))
    throw Error("filter: target vocabularies differ");
  if (ter_scores) ter_scores->clear();
  std::vector<SentencePair> kept;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].source != distilled[i].source)
      throw Error("filter: pair " + std::to_string(i) + " has different sources");
    double score = ter(distilled[i].target, raw[i].target);
    if (ter_scores) ter_scores->push_back(score);
    if (score < tau) kept.push_back(distilled[i]);
  }
  return ParallelCorpus(distilled.source_vocab(), distilled.target_vocab(), std::move(kept));
}

}  // namespace sdmrt
