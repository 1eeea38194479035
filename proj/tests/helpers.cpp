#include "helpers.hpp"

#include <memory>

#include "sdmrt/text_io.hpp"

namespace testing {

sdmrt::ParallelCorpus corpus_of(const std::vector<std::string>& lines) {
  auto src = std::make_shared<sdmrt::Vocabulary>();
  auto tgt = std::make_shared<sdmrt::Vocabulary>();
  std::vector<sdmrt::SentencePair> pairs;
  for (const auto& line : lines) {
    auto tab = line.find('\t');
    sdmrt::SentencePair p;
    for (auto t : sdmrt::split_tokens(std::string_view(line).substr(0, tab)))
      p.source.push_back(src->add(t));
    for (auto t : sdmrt::split_tokens(std::string_view(line).substr(tab + 1)))
      p.target.push_back(tgt->add(t));
    pairs.push_back(std::move(p));
  }
  return sdmrt::ParallelCorpus(src, tgt, std::move(pairs));
}

oracle::Words words(const sdmrt::Vocabulary& vocab, const sdmrt::Sentence& s) {
  oracle::Words out;
  for (auto id : s) out.push_back(vocab.token(id));
  return out;
}

std::vector<oracle::Words> words(const sdmrt::Vocabulary& vocab,
                                 const std::vector<sdmrt::Sentence>& s) {
  std::vector<oracle::Words> out;
  for (const auto& x : s) out.push_back(words(vocab, x));
  return out;
}

sdmrt::VocabPtr numbered_vocab(std::size_t n, const std::string& prefix) {
  auto v = std::make_shared<sdmrt::Vocabulary>();
  for (std::size_t i = 0; i < n; ++i) v->add(prefix + std::to_string(i));
  return v;
}

sdmrt::Sentence random_sentence(sdmrt::Rng& rng, std::size_t min_len, std::size_t max_len,
                                std::size_t alphabet) {
  auto len = min_len + rng.below(max_len - min_len + 1);
  sdmrt::Sentence s;
  for (std::size_t i = 0; i < len; ++i)
    s.push_back(static_cast<sdmrt::TokenId>(sdmrt::Vocabulary::kNumReserved + rng.below(alphabet)));
  return s;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sdmrt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
