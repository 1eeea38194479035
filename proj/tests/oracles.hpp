#pragma once

// Slow reference implementations used as test oracles. They work on token
// strings and share no code with the library.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Words = std::vector<std::string>;

struct BleuCounts {
  double matches[4] = {0, 0, 0, 0};
  double totals[4] = {0, 0, 0, 0};
  double hyp_len = 0;
  double ref_len = 0;
};

BleuCounts bleu_counts(const std::vector<Words>& hyps, const std::vector<Words>& refs);
double bleu(const std::vector<Words>& hyps, const std::vector<Words>& refs);

std::size_t edit_distance(const Words& a, const Words& b);

// Minimum of (#shifts + edit distance) over every sequence of at most
// `max_shifts` unrestricted block moves. Breadth-first over permutations.
std::size_t min_shift_edit_cost(const Words& hyp, const Words& ref, std::size_t max_shifts);

double repeated_rate(const std::vector<Words>& sentences);

// Interpolated absolute discounting LM, written directly from the recursive
// definition over raw n-gram lists.
class DiscountLm {
 public:
  DiscountLm(std::vector<Words> corpus, std::vector<std::string> vocabulary, int order, double d);
  double prob(const Words& history, const std::string& w) const;
  double sentence_logprob(const Words& s) const;
  double perplexity(const std::vector<Words>& sentences) const;

 private:
  double prob_at(const Words& context, const std::string& w) const;
  std::vector<Words> padded_;
  std::vector<std::string> support_;
  int order_;
  double d_;
};

// IBM Model 1 with NULL, EM from uniform over the target words seen in `corpus`
// plus one extra unseen-token slot, returned as t[source][target].
using Table = std::map<std::string, std::map<std::string, double>>;
Table ibm1(const std::vector<std::pair<Words, Words>>& corpus, int iterations,
           std::size_t support_size);

}  // namespace oracle
