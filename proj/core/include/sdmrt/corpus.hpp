#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sdmrt/vocabulary.hpp"

namespace sdmrt {

// Token ids only; BOS/EOS are implicit.
using Sentence = std::vector<TokenId>;
using VocabPtr = std::shared_ptr<const Vocabulary>;

struct SentencePair {
  Sentence source;
  Sentence target;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

enum class Side { Source, Target };

// Immutable ordered bitext over two shared vocabularies. Every sentence is
// non-empty and every id is valid in its vocabulary.
class ParallelCorpus {
 public:
  ParallelCorpus(VocabPtr source_vocab, VocabPtr target_vocab, std::vector<SentencePair> pairs);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::vector<SentencePair>& pairs() const noexcept { return pairs_; }
  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  const VocabPtr& source_vocab() const noexcept { return source_vocab_; }
  const VocabPtr& target_vocab() const noexcept { return target_vocab_; }

  std::vector<Sentence> sources() const;
  std::vector<Sentence> targets() const;

  // Same sources and vocabularies, new target side (one per pair, in order).
  ParallelCorpus with_targets(std::vector<Sentence> targets, VocabPtr target_vocab) const;

  std::string source_text(std::size_t i) const;
  std::string target_text(std::size_t i) const;

  friend bool operator==(const ParallelCorpus& a, const ParallelCorpus& b);

 private:
  VocabPtr source_vocab_;
  VocabPtr target_vocab_;
  std::vector<SentencePair> pairs_;
};

bool same_vocab(const VocabPtr& a, const VocabPtr& b);

std::string sentence_text(const Vocabulary& vocab, const Sentence& sentence);
Sentence parse_sentence(const Vocabulary& vocab, std::string_view text);

// One pair per line: source TAB target, tokens separated by single spaces.
// Vocabularies are built in first-occurrence order.
ParallelCorpus load_corpus(const std::filesystem::path& path);
// Same format, encoded against fixed vocabularies; unknown tokens become UNK.
ParallelCorpus load_corpus(const std::filesystem::path& path, VocabPtr source_vocab,
                           VocabPtr target_vocab);
void save_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path);
std::string format_corpus(const ParallelCorpus& corpus);

// Re-encodes a corpus into other vocabularies via the token strings.
ParallelCorpus remap(const ParallelCorpus& corpus, VocabPtr source_vocab, VocabPtr target_vocab);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct CorpusSplit {
  ParallelCorpus train;
  ParallelCorpus valid;
  ParallelCorpus test;
};

// Random disjoint partition; each part keeps the input's relative order.
CorpusSplit split(const ParallelCorpus& corpus, SplitRatios ratios, std::uint64_t seed);

Vocabulary build_vocab(const ParallelCorpus& corpus, Side side);

// Concatenation; vocabularies must agree.
ParallelCorpus concat(const ParallelCorpus& first, const ParallelCorpus& second);

}  // namespace sdmrt
