#include "sdmrt/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sdmrt/distill.hpp"
#include "sdmrt/error.hpp"

namespace sdmrt {

std::string_view to_string(RerankVariant variant) {
  switch (variant) {
    case RerankVariant::None: return "none";
    case RerankVariant::Lm: return "lm";
    case RerankVariant::Align: return "align";
  }
  return "?";
}

RerankVariant parse_rerank_variant(std::string_view name) {
  if (name == "none") return RerankVariant::None;
  if (name == "lm" || name == "LM") return RerankVariant::Lm;
  if (name == "align" || name == "Align") return RerankVariant::Align;
  throw Error("unknown reranker '" + std::string(name) + "' (expected lm, align or none)");
}

Reranker Reranker::train(RerankVariant variant, const ParallelCorpus& original, int lm_order,
                         double lm_discount, int em_iterations) {
  Reranker r;
  r.variant_ = variant;
  switch (variant) {
    case RerankVariant::Lm:
      r.lm_ = std::make_shared<NGramLM>(train_lm(original, lm_order, lm_discount));
      break;
    case RerankVariant::Align:
      r.lexical_ = std::make_shared<LexicalTable>(train_ibm1(original, em_iterations));
      r.length_ = std::make_shared<LengthModel>(train_length_model(original));
      break;
    case RerankVariant::None:
      throw Error("reranker: cannot train variant 'none'");
  }
  return r;
}

const NGramLM& Reranker::lm() const {
  if (!lm_) throw Error("reranker has no language model");
  return *lm_;
}

const LexicalTable& Reranker::lexical() const {
  if (!lexical_) throw Error("reranker has no lexical table");
  return *lexical_;
}

const LengthModel& Reranker::length_model() const {
  if (!length_) throw Error("reranker has no length model");
  return *length_;
}

double Reranker::score(const Sentence& x, const Sentence& y) const {
  if (variant_ == RerankVariant::Lm)
    return std::exp(-lm_->sentence_logprob(y) / static_cast<double>(y.size() + 1));
  return ibm1_logprob(*lexical_, *length_, x, y);
}

bool Reranker::better(double a, double b) const noexcept {
  return variant_ == RerankVariant::Lm ? a < b : a > b;
}

std::string Reranker::serialize() const {
  std::ostringstream out;
  out << "# sdmrt reranker v1\n";
  out << "variant " << to_string(variant_) << '\n';
  if (variant_ == RerankVariant::Lm) {
    out << serialize_vocab(*lm_->vocab(), "target");
    out << lm_->serialize();
  } else {
    out << serialize_vocab(*lexical_->source_vocab(), "source");
    out << serialize_vocab(*lexical_->target_vocab(), "target");
    out << lexical_->serialize();
    out << length_->serialize();
  }
  return out.str();
}

Reranker Reranker::parse(std::string_view text) {
  LineReader in(text, "reranker");
  Reranker r;
  r.variant_ = parse_rerank_variant(in.expect("variant")[0]);
  if (r.variant_ == RerankVariant::Lm) {
    auto tgt = parse_vocab(in, "target");
    r.lm_ = std::make_shared<NGramLM>(NGramLM::parse(in, tgt));
  } else if (r.variant_ == RerankVariant::Align) {
    auto src = parse_vocab(in, "source");
    auto tgt = parse_vocab(in, "target");
    r.lexical_ = std::make_shared<LexicalTable>(LexicalTable::parse(in, src, tgt));
    r.length_ = std::make_shared<LengthModel>(LengthModel::parse(in));
  } else {
    in.fail("reranker variant 'none' has no artifact");
  }
  return r;
}

void Reranker::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

Reranker Reranker::load(const std::filesystem::path& path) { return parse(read_file(path)); }

CandidateList rerank(const CandidateList& candidates, const Reranker& reranker) {
  std::vector<std::size_t> order(candidates.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> scores(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    scores[i] = reranker.score(candidates.source, candidates.entries[i].hypothesis);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return reranker.better(scores[a], scores[b]);
    const auto ma = candidates.entries[a].model_score;
    const auto mb = candidates.entries[b].model_score;
    if (ma != mb) return ma > mb;
    return a < b;
  });
  CandidateList out{candidates.source, {}};
  out.entries.reserve(order.size());
  for (auto i : order) {
    auto c = candidates.entries[i];
    c.rerank_score = scores[i];
    out.entries.push_back(std::move(c));
  }
  return out;
}

ParallelCorpus rerank_distill(const TranslationModel& student, const Reranker& reranker,
                              const ParallelCorpus& source_corpus, std::size_t k,
                              std::vector<CandidateList>* lists) {
  if (k < 1) throw Error("rerank_distill: k must be at least 1");
  DistillSpec spec{k, &reranker};
  return distill_corpus(student, source_corpus, spec, lists);
}

std::string format_candidate_dump(std::span<const CandidateList> lists, const Vocabulary& source_vocab,
                                  const Vocabulary& target_vocab) {
  std::ostringstream out;
  out << "source\tcandidate\tmodel_score\trerank_score\trank\n";
  for (const auto& list : lists) {
    auto src = sentence_text(source_vocab, list.source);
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
      const auto& c = list.entries[r];
      out << src << '\t' << sentence_text(target_vocab, c.hypothesis) << '\t'
          << format_fixed(c.model_score, 6) << '\t'
          << (c.rerank_score ? format_fixed(*c.rerank_score, 6) : std::string("-")) << '\t'
          << r + 1 << '\n';
    }
  }
  return out.str();
}

}  // namespace sdmrt
