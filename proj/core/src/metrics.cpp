#include "sdmrt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "sdmrt/error.hpp"

namespace sdmrt {

namespace {

using NgramCounts = std::map<std::span<const TokenId>, double,
                             decltype([](std::span<const TokenId> a, std::span<const TokenId> b) {
                               return std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                                                   b.end());
                             })>;

NgramCounts count_ngrams(const Sentence& s, std::size_t n) {
  NgramCounts counts;
  if (s.size() < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) counts[std::span(s).subspan(i, n)] += 1.0;
  return counts;
}

}  // namespace

BleuStats bleu_stats(std::span<const Sentence> hypotheses, std::span<const Sentence> references) {
  if (hypotheses.size() != references.size())
    throw Error("bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                std::to_string(references.size()) + " references");
  BleuStats st;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& h = hypotheses[s];
    const auto& r = references[s];
    if (r.empty()) throw Error("bleu: empty reference at index " + std::to_string(s));
    st.hypothesis_length += static_cast<double>(h.size());
    st.reference_length += static_cast<double>(r.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      auto hc = count_ngrams(h, n);
      auto rc = count_ngrams(r, n);
      for (const auto& [gram, c] : hc) {
        auto it = rc.find(gram);
        if (it != rc.end()) st.matches[n - 1] += std::min(c, it->second);
      }
      if (h.size() >= n) st.totals[n - 1] += static_cast<double>(h.size() - n + 1);
    }
  }
  return st;
}

double bleu_from_stats(const BleuStats& st) {
  if (st.hypothesis_length == 0) return 0.0;
  double log_p = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double m = st.matches[n];
    double t = st.totals[n];
    if (m == 0) {
      m += 1;
      t += 1;
    }
    log_p += std::log(m / t);
  }
  double bp = st.hypothesis_length < st.reference_length
                  ? std::exp(1.0 - st.reference_length / st.hypothesis_length)
                  : 1.0;
  return 100.0 * bp * std::exp(log_p / 4.0);
}

double bleu(std::span<const Sentence> hypotheses, std::span<const Sentence> references) {
  return bleu_from_stats(bleu_stats(hypotheses, references));
}

std::size_t levenshtein(std::span<const TokenId> a, std::span<const TokenId> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double wer(const Sentence& hypothesis, const Sentence& reference) {
  if (reference.empty()) throw Error("wer: empty reference");
  return static_cast<double>(levenshtein(hypothesis, reference)) /
         static_cast<double>(reference.size());
}

namespace {

bool occurs_in(std::span<const TokenId> needle, const Sentence& hay) {
  if (needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i)
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i)))
      return true;
  return false;
}

}  // namespace

TerResult ter_details(const Sentence& hypothesis, const Sentence& reference) {
  if (reference.empty()) throw Error("ter: empty reference");
  TerResult res;
  res.reference_length = reference.size();
  Sentence h = hypothesis;
  std::size_t dist = levenshtein(h, reference);
  Sentence rest, moved;
  while (dist > 0) {
    // (distance, span length, origin, destination)
    std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> best{dist, 0, 0, 0};
    bool found = false;
    for (std::size_t i = 0; i < h.size(); ++i) {
      for (std::size_t len = 1; len <= kTerMaxShiftSpan && i + len <= h.size(); ++len) {
        auto span = std::span<const TokenId>(h).subspan(i, len);
        if (!occurs_in(span, reference)) break;  // longer spans cannot match either
        rest.assign(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(i));
        rest.insert(rest.end(), h.begin() + static_cast<std::ptrdiff_t>(i + len), h.end());
        for (std::size_t p = 0; p <= rest.size(); ++p) {
          if (p == i) continue;
          moved.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(p));
          moved.insert(moved.end(), span.begin(), span.end());
          moved.insert(moved.end(), rest.begin() + static_cast<std::ptrdiff_t>(p), rest.end());
          auto d = levenshtein(moved, reference);
          std::tuple cand{d, len, i, p};
          if (d < dist && (!found || cand < best)) {
            best = cand;
            found = true;
          }
        }
      }
    }
    if (!found) break;
    auto [d, len, i, p] = best;
    rest.assign(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(i));
    rest.insert(rest.end(), h.begin() + static_cast<std::ptrdiff_t>(i + len), h.end());
    moved.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(p));
    moved.insert(moved.end(), h.begin() + static_cast<std::ptrdiff_t>(i),
                 h.begin() + static_cast<std::ptrdiff_t>(i + len));
    moved.insert(moved.end(), rest.begin() + static_cast<std::ptrdiff_t>(p), rest.end());
    h.swap(moved);
    dist = d;
    ++res.shifts;
  }
  res.edits = dist;
  return res;
}

double ter(const Sentence& hypothesis, const Sentence& reference) {
  return ter_details(hypothesis, reference).rate();
}

double repeated_token_rate(std::span<const Sentence> sentences) {
  std::size_t repeats = 0, tokens = 0;
  for (const auto& s : sentences) {
    tokens += s.size();
    for (std::size_t t = 1; t < s.size(); ++t) repeats += s[t] == s[t - 1];
  }
  return tokens == 0 ? 0.0 : static_cast<double>(repeats) / static_cast<double>(tokens);
}

MetricsRow evaluate_system(std::span<const Sentence> outputs, const ParallelCorpus& references,
                           const NGramLM& lm) {
  if (outputs.size() != references.size())
    throw Error("evaluate: " + std::to_string(outputs.size()) + " outputs for " +
                std::to_string(references.size()) + " references");
  if (outputs.empty()) throw Error("evaluate: empty test set");
  auto refs = references.targets();
  MetricsRow row;
  row.bleu = bleu(outputs, refs);
  double ter_sum = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) ter_sum += ter(outputs[i], refs[i]);
  row.ter = ter_sum / static_cast<double>(outputs.size());
  row.repeated_rate = repeated_token_rate(outputs);
  row.ppl = perplexity(lm, outputs);
  return row;
}

}  // namespace sdmrt
