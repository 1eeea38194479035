#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdmrt/corpus.hpp"
#include "sdmrt/random.hpp"

namespace testing {

// Builds a corpus from "src\ttgt" lines.
sdmrt::ParallelCorpus corpus_of(const std::vector<std::string>& lines);

oracle::Words words(const sdmrt::Vocabulary& vocab, const sdmrt::Sentence& s);
std::vector<oracle::Words> words(const sdmrt::Vocabulary& vocab,
                                 const std::vector<sdmrt::Sentence>& s);

// Interns "w0".."w{n-1}" into a fresh vocabulary.
sdmrt::VocabPtr numbered_vocab(std::size_t n, const std::string& prefix = "w");

// Random sentence of ids over the first `alphabet` non-reserved tokens.
sdmrt::Sentence random_sentence(sdmrt::Rng& rng, std::size_t min_len, std::size_t max_len,
                                std::size_t alphabet);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace testing
