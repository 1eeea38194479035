#include <cmath>
#include <fstream>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "sdmrt/error.hpp"
#include "sdmrt/generator.hpp"
#include "sdmrt/text_io.hpp"

using namespace sdmrt;

TEST_CASE("vocabulary reserves the special symbols") {
  Vocabulary v;
  CHECK(v.size() == Vocabulary::kNumReserved);
  auto a = v.add("a");
  CHECK(a == Vocabulary::kNumReserved);
  CHECK(v.add("a") == a);
  CHECK(v.token(a) == "a");
  CHECK(v.lookup_or_unk("zzz") == Vocabulary::kUnk);
  CHECK_THROWS_AS(v.add("<s>"), Error);
  CHECK_THROWS_AS(v.add("a b"), Error);
}

TEST_CASE("corpus round-trips through its text form") {
  auto c = testing::corpus_of({"a b c\tx y", "c a\ty y z"});
  auto dir = testing::scratch_dir("corpus_rt");
  save_corpus(c, dir / "c.tsv");
  auto back = load_corpus(dir / "c.tsv");
  CHECK(back == c);
  CHECK(read_file(dir / "c.tsv") == "a b c\tx y\nc a\ty y z\n");
}

TEST_CASE("malformed corpus lines are reported with their line number") {
  auto dir = testing::scratch_dir("corpus_bad");
  auto write = [&](const std::string& text) {
    std::ofstream(dir / "bad.tsv") << text;
    return dir / "bad.tsv";
  };
  auto line_of = [&](const std::string& text) -> std::size_t {
    try {
      load_corpus(write(text));
    } catch (const FormatError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("a\tb\nno tab here\n") == 2);
  CHECK(line_of("a\tb\nc\t\n") == 2);
  CHECK(line_of("a\tb\nc\td\n\tq\n") == 3);
  CHECK(line_of("a\tb\tc\n") == 1);
  CHECK(line_of("a\t\xff\xfe\n") == 1);
  CHECK_THROWS_AS(load_corpus(dir / "missing.tsv"), Error);
}

TEST_CASE("split is a disjoint cover that keeps relative order") {
  std::vector<std::string> lines;
  for (int i = 0; i < 100; ++i) lines.push_back("s" + std::to_string(i) + "\tt" + std::to_string(i));
  auto c = testing::corpus_of(lines);
  auto parts = split(c, {0.8, 0.1, 0.1}, 7);
  CHECK(parts.train.size() == 80);
  CHECK(parts.valid.size() == 10);
  CHECK(parts.test.size() == 10);
  std::set<std::string> seen;
  for (const auto* part : {&parts.train, &parts.valid, &parts.test}) {
    int last = -1;
    for (std::size_t i = 0; i < part->size(); ++i) {
      auto text = part->source_text(i);
      int idx = std::stoi(text.substr(1));
      CHECK(idx > last);
      last = idx;
      CHECK(seen.insert(text).second);
    }
  }
  CHECK(seen.size() == 100);
  auto again = split(c, {0.8, 0.1, 0.1}, 7);
  CHECK(again.train == parts.train);
  auto other = split(c, {0.8, 0.1, 0.1}, 8);
  CHECK_FALSE(other.train == parts.train);
}

TEST_CASE("concat requires shared vocabularies") {
  auto a = testing::corpus_of({"a\tb"});
  auto b = testing::corpus_of({"c\td"});
  CHECK_THROWS_AS(concat(a, b), Error);
  auto ab = concat(a, a);
  CHECK(ab.size() == 2);
}

namespace {

std::vector<std::string> texts(const ParallelCorpus& c) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.push_back(c.source_text(i) + "\t" + c.target_text(i));
  return out;
}

}  // namespace

TEST_CASE("generator: one synonym, no swaps gives a fixed word mapping") {
  GeneratorConfig g{.source_vocab_size = 4, .synonyms_per_token = 1, .p_consistent = 1.0,
                    .p_swap = 0.0, .min_length = 2, .max_length = 4, .corpus_size = 50, .seed = 3};
  auto data = generate_synthetic(g);
  for (const auto& line : texts(data.corpus)) {
    auto tab = line.find('\t');
    auto src = split_tokens(std::string_view(line).substr(0, tab));
    auto tgt = split_tokens(std::string_view(line).substr(tab + 1));
    REQUIRE(src.size() == tgt.size());
    for (std::size_t i = 0; i < src.size(); ++i)
      CHECK(std::string(tgt[i]) == "t" + std::string(src[i].substr(1)) + "_1");
    CHECK(src.size() >= 2);
    CHECK(src.size() <= 4);
  }
}

TEST_CASE("generator: a consistent sentence uses one synonym index throughout") {
  GeneratorConfig g{.source_vocab_size = 6, .synonyms_per_token = 3, .p_consistent = 1.0,
                    .p_swap = 0.0, .min_length = 3, .max_length = 6, .corpus_size = 200, .seed = 5};
  auto data = generate_synthetic(g);
  std::set<std::size_t> used;
  for (const auto& tr : data.trace) {
    CHECK(tr.consistent);
    for (auto j : tr.synonym_index) CHECK(j == tr.synonym_index.front());
    used.insert(tr.synonym_index.front());
  }
  CHECK(used.size() == 3);
  for (std::size_t i = 0; i < data.corpus.size(); ++i) {
    const auto& p = data.corpus[i];
    for (std::size_t t = 0; t < p.source.size(); ++t) {
      const auto& syn = data.task.synonyms_of(p.source[t]);
      CHECK(p.target[t] == syn[data.trace[i].synonym_index[t]]);
    }
  }
}

TEST_CASE("generator: swap pass fraction is within three standard deviations") {
  const double p = 0.3;
  GeneratorConfig g{.source_vocab_size = 10, .synonyms_per_token = 2, .p_consistent = 0.5,
                    .p_swap = p, .min_length = 3, .max_length = 10, .corpus_size = 2000, .seed = 11};
  auto data = generate_synthetic(g);
  double trials = 0, swaps = 0;
  for (std::size_t i = 0; i < data.trace.size(); ++i) {
    const auto& tr = data.trace[i];
    trials += static_cast<double>(tr.swap_trials);
    swaps += static_cast<double>(tr.swap_positions.size());
    // Replaying the recorded swaps on the pre-swap target reproduces the target.
    auto y = tr.pre_swap_target;
    for (auto pos : tr.swap_positions) std::swap(y[pos], y[pos + 1]);
    CHECK(y == data.corpus[i].target);
    // Swapped pairs do not overlap.
    for (std::size_t k = 1; k < tr.swap_positions.size(); ++k)
      CHECK(tr.swap_positions[k] >= tr.swap_positions[k - 1] + 2);
  }
  REQUIRE(trials > 0);
  const double frac = swaps / trials;
  const double sd = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(frac - p) < 3 * sd);
}

TEST_CASE("generator is deterministic in its seed") {
  GeneratorConfig g;
  g.corpus_size = 100;
  auto a = generate_synthetic(g);
  auto b = generate_synthetic(g);
  CHECK(a.corpus == b.corpus);
  g.seed = 2;
  auto c = generate_synthetic(g);
  CHECK_FALSE(a.corpus == c.corpus);
}

TEST_CASE("generator: task spec round-trips") {
  GeneratorConfig g;
  g.corpus_size = 10;
  auto data = generate_synthetic(g);
  auto back = TaskSpec::parse(data.task.serialize());
  CHECK(back.serialize() == data.task.serialize());
  CHECK(*back.target_vocab == *data.task.target_vocab);
}

TEST_CASE("generator rejects invalid configurations") {
  GeneratorConfig g;
  g.min_length = 5;
  g.max_length = 4;
  CHECK_THROWS_AS(generate_synthetic(g), Error);
  g = {};
  g.p_swap = 1.5;
  CHECK_THROWS_AS(generate_synthetic(g), Error);
  g = {};
  g.synonyms_per_token = 0;
  CHECK_THROWS_AS(generate_synthetic(g), Error);
}
