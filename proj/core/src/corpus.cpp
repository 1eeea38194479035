#include "sdmrt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdmrt/error.hpp"
#include "sdmrt/random.hpp"
#include "sdmrt/text_io.hpp"

namespace sdmrt {

namespace {

void check_sentence(const Sentence& s, const Vocabulary& vocab, std::size_t index,
                    const char* side) {
  if (s.empty())
    throw Error("pair " + std::to_string(index) + ": empty " + side + " sentence");
  for (auto id : s)
    if (!vocab.contains(id))
      throw Error("pair " + std::to_string(index) + ": " + side + " id " + std::to_string(id) +
                  " outside vocabulary");
}

struct RawPair {
  std::vector<std::string_view> source;
  std::vector<std::string_view> target;
};

// Parses the whole file into string tokens; `text` must outlive the result.
std::vector<RawPair> parse_lines(const std::string& text, const std::filesystem::path& path) {
  if (!valid_utf8(text)) {
    // Find the offending line for the diagnostic.
    std::size_t line = 1, start = 0;
    for (;;) {
      auto nl = text.find('\n', start);
      auto piece = std::string_view(text).substr(start, nl == std::string::npos ? std::string::npos
                                                                                : nl - start);
      if (!valid_utf8(piece)) throw FormatError(path.string(), line, "invalid UTF-8");
      if (nl == std::string::npos) break;
      start = nl + 1;
      ++line;
    }
  }
  std::vector<RawPair> out;
  std::size_t line_no = 0;
  auto lines = split_on(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto line : lines) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw FormatError(path.string(), line_no, "missing TAB");
    if (line.find('\t', tab + 1) != std::string_view::npos)
      throw FormatError(path.string(), line_no, "more than one TAB");
    RawPair p{split_tokens(line.substr(0, tab)), split_tokens(line.substr(tab + 1))};
    if (p.source.empty()) throw FormatError(path.string(), line_no, "empty source side");
    if (p.target.empty()) throw FormatError(path.string(), line_no, "empty target side");
    for (const auto* side : {&p.source, &p.target})
      for (auto tok : *side)
        if (Vocabulary::is_reserved_symbol(tok))
          throw FormatError(path.string(), line_no,
                            "reserved symbol '" + std::string(tok) + "' in corpus");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

ParallelCorpus::ParallelCorpus(VocabPtr source_vocab, VocabPtr target_vocab,
                               std::vector<SentencePair> pairs)
    : source_vocab_(std::move(source_vocab)),
      target_vocab_(std::move(target_vocab)),
      pairs_(std::move(pairs)) {
  if (!source_vocab_ || !target_vocab_) throw Error("corpus requires both vocabularies");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    check_sentence(pairs_[i].source, *source_vocab_, i, "source");
    check_sentence(pairs_[i].target, *target_vocab_, i, "target");
  }
}

std::vector<Sentence> ParallelCorpus::sources() const {
  std::vector<Sentence> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(p.source);
  return out;
}

std::vector<Sentence> ParallelCorpus::targets() const {
  std::vector<Sentence> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(p.target);
  return out;
}

ParallelCorpus ParallelCorpus::with_targets(std::vector<Sentence> targets,
                                            VocabPtr target_vocab) const {
  if (targets.size() != pairs_.size())
    throw Error("with_targets: expected " + std::to_string(pairs_.size()) + " targets, got " +
                std::to_string(targets.size()));
  std::vector<SentencePair> pairs;
  pairs.reserve(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i)
    pairs.push_back({pairs_[i].source, std::move(targets[i])});
  return ParallelCorpus(source_vocab_, std::move(target_vocab), std::move(pairs));
}

std::string ParallelCorpus::source_text(std::size_t i) const {
  return sentence_text(*source_vocab_, pairs_.at(i).source);
}

std::string ParallelCorpus::target_text(std::size_t i) const {
  return sentence_text(*target_vocab_, pairs_.at(i).target);
}

bool operator==(const ParallelCorpus& a, const ParallelCorpus& b) {
  return same_vocab(a.source_vocab_, b.source_vocab_) &&
         same_vocab(a.target_vocab_, b.target_vocab_) && a.pairs_ == b.pairs_;
}

bool same_vocab(const VocabPtr& a, const VocabPtr& b) {
  return a == b || (a && b && *a == *b);
}

std::string sentence_text(const Vocabulary& vocab, const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (i) out += ' ';
    out += vocab.token(sentence[i]);
  }
  return out;
}

Sentence parse_sentence(const Vocabulary& vocab, std::string_view text) {
  Sentence out;
  for (auto tok : split_tokens(text)) out.push_back(vocab.lookup_or_unk(tok));
  return out;
}

ParallelCorpus load_corpus(const std::filesystem::path& path) {
  auto text = read_file(path);
  auto raw = parse_lines(text, path);
  auto src = std::make_shared<Vocabulary>();
  auto tgt = std::make_shared<Vocabulary>();
  std::vector<SentencePair> pairs;
  pairs.reserve(raw.size());
  for (auto& r : raw) {
    SentencePair p;
    for (auto tok : r.source) p.source.push_back(src->add(tok));
    for (auto tok : r.target) p.target.push_back(tgt->add(tok));
    pairs.push_back(std::move(p));
  }
  return ParallelCorpus(std::move(src), std::move(tgt), std::move(pairs));
}

ParallelCorpus load_corpus(const std::filesystem::path& path, VocabPtr source_vocab,
                           VocabPtr target_vocab) {
  auto text = read_file(path);
  auto raw = parse_lines(text, path);
  std::vector<SentencePair> pairs;
  pairs.reserve(raw.size());
  for (auto& r : raw) {
    SentencePair p;
    for (auto tok : r.source) p.source.push_back(source_vocab->lookup_or_unk(tok));
    for (auto tok : r.target) p.target.push_back(target_vocab->lookup_or_unk(tok));
    pairs.push_back(std::move(p));
  }
  return ParallelCorpus(std::move(source_vocab), std::move(target_vocab), std::move(pairs));
}

std::string format_corpus(const ParallelCorpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out += corpus.source_text(i);
    out += '\t';
    out += corpus.target_text(i);
    out += '\n';
  }
  return out;
}

void save_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path) {
  write_file_atomic(path, format_corpus(corpus));
}

ParallelCorpus remap(const ParallelCorpus& corpus, VocabPtr source_vocab, VocabPtr target_vocab) {
  if (same_vocab(corpus.source_vocab(), source_vocab) &&
      same_vocab(corpus.target_vocab(), target_vocab))
    return ParallelCorpus(std::move(source_vocab), std::move(target_vocab), corpus.pairs());
  std::vector<SentencePair> pairs;
  pairs.reserve(corpus.size());
  for (const auto& p : corpus) {
    SentencePair q;
    for (auto id : p.source)
      q.source.push_back(source_vocab->lookup_or_unk(corpus.source_vocab()->token(id)));
    for (auto id : p.target)
      q.target.push_back(target_vocab->lookup_or_unk(corpus.target_vocab()->token(id)));
    pairs.push_back(std::move(q));
  }
  return ParallelCorpus(std::move(source_vocab), std::move(target_vocab), std::move(pairs));
}

CorpusSplit split(const ParallelCorpus& corpus, SplitRatios ratios, std::uint64_t seed) {
  if (corpus.size() < 3) throw Error("split needs at least 3 pairs");
  if (ratios.train <= 0 || ratios.valid <= 0 || ratios.test <= 0)
    throw Error("split ratios must be positive");
  if (std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9)
    throw Error("split ratios must sum to 1");
  const auto n = corpus.size();
  auto n_train = static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n)));
  auto n_valid = static_cast<std::size_t>(std::llround(ratios.valid * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 2);
  n_valid = std::clamp<std::size_t>(n_valid, 1, n - n_train - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  auto take = [&](std::size_t from, std::size_t to) {
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(from),
                                 order.begin() + static_cast<std::ptrdiff_t>(to));
    std::sort(idx.begin(), idx.end());
    std::vector<SentencePair> pairs;
    pairs.reserve(idx.size());
    for (auto i : idx) pairs.push_back(corpus[i]);
    return ParallelCorpus(corpus.source_vocab(), corpus.target_vocab(), std::move(pairs));
  };
  return {take(0, n_train), take(n_train, n_train + n_valid), take(n_train + n_valid, n)};
}

Vocabulary build_vocab(const ParallelCorpus& corpus, Side side) {
  if (corpus.empty()) throw Error("build_vocab on empty corpus");
  const auto& source = side == Side::Source ? *corpus.source_vocab() : *corpus.target_vocab();
  Vocabulary out;
  for (const auto& p : corpus)
    for (auto id : side == Side::Source ? p.source : p.target)
      if (!Vocabulary::is_reserved(id)) out.add(source.token(id));
  return out;
}

ParallelCorpus concat(const ParallelCorpus& first, const ParallelCorpus& second) {
  if (!same_vocab(first.source_vocab(), second.source_vocab()))
    throw Error("concat: source vocabularies differ");
  if (!same_vocab(first.target_vocab(), second.target_vocab()))
    throw Error("concat: target vocabularies differ");
  auto pairs = first.pairs();
  pairs.insert(pairs.end(), second.begin(), second.end());
  return ParallelCorpus(first.source_vocab(), first.target_vocab(), std::move(pairs));
}

}  // namespace sdmrt
