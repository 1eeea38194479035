#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "sdmrt/align.hpp"
#include "sdmrt/error.hpp"

using namespace sdmrt;

namespace {

std::vector<std::pair<oracle::Words, oracle::Words>> word_pairs(const ParallelCorpus& c) {
  std::vector<std::pair<oracle::Words, oracle::Words>> out;
  for (const auto& p : c)
    out.emplace_back(testing::words(*c.source_vocab(), p.source),
                     testing::words(*c.target_vocab(), p.target));
  return out;
}

ParallelCorpus random_corpus(Rng& rng, std::size_t pairs, std::size_t src_alpha, std::size_t tgt_alpha) {
  auto sv = testing::numbered_vocab(src_alpha, "s");
  auto tv = testing::numbered_vocab(tgt_alpha, "t");
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < pairs; ++i)
    out.push_back({testing::random_sentence(rng, 1, 5, src_alpha),
                   testing::random_sentence(rng, 1, 5, tgt_alpha)});
  return ParallelCorpus(sv, tv, std::move(out));
}

}  // namespace

TEST_CASE("EM agrees with the reference IBM-1 on random corpora") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    auto c = random_corpus(rng, 1 + rng.below(12), 2 + rng.below(4), 2 + rng.below(4));
    const int iters = 1 + static_cast<int>(rng.below(6));
    auto table = train_ibm1(c, iters);
    const std::size_t support = c.target_vocab()->size() - Vocabulary::kNumReserved + 1;
    auto ref = oracle::ibm1(word_pairs(c), iters, support);
    const auto& sv = *c.source_vocab();
    const auto& tv = *c.target_vocab();
    for (TokenId s = Vocabulary::kNumReserved; s < sv.size(); ++s) {
      for (TokenId t = Vocabulary::kNumReserved; t < tv.size(); ++t) {
        auto row = ref.find(sv.token(s));
        double expect = 0.0;
        if (row != ref.end()) {
          auto cell = row->second.find(tv.token(t));
          expect = cell == row->second.end() ? 0.0 : cell->second;
        } else {
          expect = 1.0 / static_cast<double>(support);
        }
        CHECK(table.prob(t, s) == doctest::Approx(expect).epsilon(1e-10));
      }
    }
    for (TokenId t = Vocabulary::kNumReserved; t < tv.size(); ++t)
      CHECK(table.prob(t, Vocabulary::kNull) ==
            doctest::Approx(ref["<null>"][tv.token(t)]).epsilon(1e-10));
  }
}

TEST_CASE("translation rows are normalized over the target support") {
  Rng rng(4);
  auto c = random_corpus(rng, 20, 4, 5);
  auto table = train_ibm1(c, 4);
  for (TokenId s = 0; s < c.source_vocab()->size(); ++s) {
    if (s != Vocabulary::kNull && Vocabulary::is_reserved(s)) continue;
    double total = 0;
    for (TokenId t = 0; t < c.target_vocab()->size(); ++t)
      if (table.in_support(t)) total += table.prob(t, s);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("EM never decreases the corpus likelihood") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_corpus(rng, 15, 4, 4);
    double prev = -INFINITY;
    for (int it = 1; it <= 6; ++it) {
      double ll = train_ibm1(c, it).corpus_loglik(c);
      CHECK(ll >= prev - 1e-9);
      prev = ll;
    }
  }
}

TEST_CASE("a one-to-one corpus concentrates the table on the pairing") {
  auto c = testing::corpus_of({"a b\tx y", "a c\tx z", "b c\ty z", "a\tx"});
  auto table = train_ibm1(c, 20);
  const auto& sv = *c.source_vocab();
  const auto& tv = *c.target_vocab();
  CHECK(table.prob(*tv.find("x"), *sv.find("a")) > 0.8);
  CHECK(table.prob(*tv.find("y"), *sv.find("b")) > 0.5);
  CHECK(table.prob(*tv.find("z"), *sv.find("c")) > 0.5);
}

TEST_CASE("length model is add-one smoothed") {
  auto c = testing::corpus_of({"a b\tx y", "a b\tx y z", "a b\tx y", "a\tx"});
  auto lm = train_length_model(c);
  CHECK(lm.max_length() == 3);
  // S = 2: counts L2:2, L3:1, total 3, + 3 slots
  CHECK(lm.prob(2, 2) == doctest::Approx(3.0 / 6));
  CHECK(lm.prob(3, 2) == doctest::Approx(2.0 / 6));
  CHECK(lm.prob(1, 2) == doctest::Approx(1.0 / 6));
  CHECK(lm.prob(4, 2) == 0.0);
  CHECK(lm.prob(2, 7) == doctest::Approx(1.0 / 3));
  CHECK(lm.argmax(2) == 2);
  CHECK(lm.top_k(2, 3) == std::vector<std::size_t>{2, 3, 1});
  CHECK(lm.top_k(9, 2) == std::vector<std::size_t>{1, 2});
  double total = 0;
  for (std::size_t L = 1; L <= 3; ++L) total += lm.prob(L, 1);
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("alignment log-probability decomposes into length and lexical terms") {
  Rng rng(31);
  auto c = random_corpus(rng, 12, 3, 3);
  auto table = train_ibm1(c, 3);
  auto len = train_length_model(c);
  for (const auto& p : c) {
    double expect = std::log(len.prob(p.target.size(), p.source.size()));
    for (auto y : p.target) {
      double sum = table.floored(y, Vocabulary::kNull);
      for (auto x : p.source) sum += table.floored(y, x);
      expect += std::log(sum / static_cast<double>(p.source.size() + 1));
    }
    CHECK(ibm1_logprob(table, len, p.source, p.target) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("lexical table and length model round-trip") {
  Rng rng(2);
  auto c = random_corpus(rng, 10, 3, 4);
  auto table = train_ibm1(c, 3);
  auto text = table.serialize();
  LineReader in(text, "lex");
  auto back = LexicalTable::parse(in, c.source_vocab(), c.target_vocab());
  CHECK(back == table);
  auto len = train_length_model(c);
  auto ltext = len.serialize();
  LineReader lin(ltext, "len");
  CHECK(LengthModel::parse(lin) == len);
}

TEST_CASE("EM rejects a non-positive iteration count") {
  auto c = testing::corpus_of({"a\tb"});
  CHECK_THROWS_AS(train_ibm1(c, 0), Error);
}
