#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "sdmrt/error.hpp"
#include "sdmrt/metrics.hpp"
#include "sdmrt/text_io.hpp"

using namespace sdmrt;

namespace {

struct Words2Ids {
  std::shared_ptr<Vocabulary> vocab = std::make_shared<Vocabulary>();
  Sentence operator()(std::string_view text) {
    Sentence s;
    for (auto t : split_tokens(text)) s.push_back(vocab->add(t));
    return s;
  }
};

}  // namespace

TEST_CASE("clipped unigram precision") {
  Words2Ids ids;
  std::vector<Sentence> hyp{ids("the the the the the the the")};
  std::vector<Sentence> ref{ids("the cat sat")};
  auto st = bleu_stats(hyp, ref);
  CHECK(st.matches[0] == 1);
  CHECK(st.totals[0] == 7);
  CHECK(st.matches[1] == 0);
  CHECK(st.totals[1] == 6);
}

TEST_CASE("BLEU of identical long text is 100 and of disjoint text is small") {
  Words2Ids ids;
  std::vector<Sentence> a{ids("a b c d e f")};
  CHECK(bleu(a, a) == doctest::Approx(100.0));
  std::vector<Sentence> z{ids("p q r s t u")};
  CHECK(bleu(z, a) < 20.0);
  CHECK(bleu(z, a) > 0.0);
}

TEST_CASE("BLEU smoothing and brevity penalty by hand") {
  Words2Ids ids;
  std::vector<Sentence> hyp{ids("a b c")};
  std::vector<Sentence> ref{ids("a b c d")};
  // p1 = 3/3, p2 = 2/2, p3 = 1/1, p4: 0 of 0 -> 1/1; BP = exp(1 - 4/3)
  const double expect = 100.0 * std::exp(1.0 - 4.0 / 3.0);
  CHECK(bleu(hyp, ref) == doctest::Approx(expect).epsilon(1e-12));
  std::vector<Sentence> empty{Sentence{}};
  CHECK(bleu(empty, ref) == 0.0);
}

TEST_CASE("BLEU statistics agree with the reference counter") {
  Rng rng(41);
  auto vocab = testing::numbered_vocab(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Sentence> hyps, refs;
    const std::size_t n = 1 + rng.below(5);
    for (std::size_t i = 0; i < n; ++i) {
      hyps.push_back(testing::random_sentence(rng, 1, 8, 3));
      refs.push_back(testing::random_sentence(rng, 1, 8, 3));
    }
    auto st = bleu_stats(hyps, refs);
    auto ref = oracle::bleu_counts(testing::words(*vocab, hyps), testing::words(*vocab, refs));
    for (int k = 0; k < 4; ++k) {
      CHECK(st.matches[k] == ref.matches[k]);
      CHECK(st.totals[k] == ref.totals[k]);
    }
    CHECK(st.hypothesis_length == ref.hyp_len);
    CHECK(st.reference_length == ref.ref_len);
    CHECK(bleu(hyps, refs) ==
          doctest::Approx(oracle::bleu(testing::words(*vocab, hyps), testing::words(*vocab, refs)))
              .epsilon(1e-12));
  }
}

TEST_CASE("BLEU properties: bounded, permutation of pairs leaves it unchanged") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Sentence> hyps, refs;
    for (int i = 0; i < 4; ++i) {
      hyps.push_back(testing::random_sentence(rng, 1, 6, 3));
      refs.push_back(testing::random_sentence(rng, 1, 6, 3));
    }
    double b = bleu(hyps, refs);
    CHECK(b >= 0.0);
    CHECK(b <= 100.0 + 1e-9);
    std::swap(hyps[0], hyps[3]);
    std::swap(refs[0], refs[3]);
    CHECK(bleu(hyps, refs) == doctest::Approx(b).epsilon(1e-12));
    CHECK(bleu(refs, refs) == doctest::Approx(100.0));
  }
}

TEST_CASE("BLEU demands aligned inputs") {
  std::vector<Sentence> one{{5}}, two{{5}, {6}};
  CHECK_THROWS_AS(bleu(one, two), Error);
}

TEST_CASE("TER examples") {
  Words2Ids ids;
  auto r = ter_details(ids("b a c d"), ids("a b c d"));
  CHECK(r.shifts == 1);
  CHECK(r.edits == 0);
  CHECK(r.rate() == doctest::Approx(0.25));
  CHECK(ter(ids("a b c d"), ids("a b c d")) == 0.0);
  CHECK(ter(ids("a b"), ids("a b c d")) == doctest::Approx(0.5));
  CHECK(ter(ids("c d a b"), ids("a b c d")) == doctest::Approx(0.25));
  CHECK(ter(ids("x y z"), ids("a b")) == doctest::Approx(1.5));
}

TEST_CASE("greedy TER lies between the exhaustive optimum and WER") {
  Rng rng(47);
  auto vocab = testing::numbered_vocab(3);
  std::size_t above_optimum = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto h = testing::random_sentence(rng, 1, 5, 3);
    auto r = testing::random_sentence(rng, 1, 5, 3);
    auto d = ter_details(h, r);
    const auto cost = d.shifts + d.edits;
    const auto opt = oracle::min_shift_edit_cost(testing::words(*vocab, h), testing::words(*vocab, r), h.size());
    CHECK(cost >= opt);
    CHECK(cost <= oracle::edit_distance(testing::words(*vocab, h), testing::words(*vocab, r)));
    CHECK(levenshtein(h, r) == oracle::edit_distance(testing::words(*vocab, h), testing::words(*vocab, r)));
    CHECK(d.reference_length == r.size());
    CHECK(wer(h, r) == doctest::Approx(static_cast<double>(levenshtein(h, r)) / static_cast<double>(r.size())));
    if (cost > opt) ++above_optimum;
  }
  MESSAGE("greedy TER above exhaustive optimum on " << above_optimum << " of 200 pairs");
}

TEST_CASE("TER of identical sentences is zero and TER is non-negative") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    auto h = testing::random_sentence(rng, 1, 12, 4);
    auto r = testing::random_sentence(rng, 1, 12, 4);
    CHECK(ter(h, h) == 0.0);
    CHECK(ter(h, r) >= 0.0);
  }
}

TEST_CASE("repeated-token rate agrees with the reference") {
  Words2Ids ids;
  std::vector<Sentence> s{ids("a a b b b"), ids("c")};
  CHECK(repeated_token_rate(s) == doctest::Approx(3.0 / 6));
  Rng rng(59);
  auto vocab = testing::numbered_vocab(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Sentence> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(testing::random_sentence(rng, 1, 6, 2));
    CHECK(repeated_token_rate(xs) == doctest::Approx(oracle::repeated_rate(testing::words(*vocab, xs))).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_system fills every metric") {
  auto c = testing::corpus_of({"a b\tx y", "a\tx", "b b\ty y"});
  auto lm = train_lm(c);
  auto outs = c.targets();
  auto row = evaluate_system(outs, c, lm);
  CHECK(row.bleu == doctest::Approx(100.0));
  CHECK(row.ter == 0.0);
  CHECK(row.repeated_rate == doctest::Approx(1.0 / 5));
  CHECK(row.ppl == doctest::Approx(perplexity(lm, outs)));
}
