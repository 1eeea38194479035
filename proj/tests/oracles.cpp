#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace oracle {

namespace {

std::vector<Words> ngrams(const Words& s, std::size_t n) {
  std::vector<Words> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) out.emplace_back(s.begin() + i, s.begin() + i + n);
  return out;
}

std::size_t count_of(const std::vector<Words>& list, const Words& g) {
  return static_cast<std::size_t>(std::count(list.begin(), list.end(), g));
}

}  // namespace

BleuCounts bleu_counts(const std::vector<Words>& hyps, const std::vector<Words>& refs) {
  BleuCounts c;
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    c.hyp_len += static_cast<double>(hyps[k].size());
    c.ref_len += static_cast<double>(refs[k].size());
    for (std::size_t n = 1; n <= 4; ++n) {
      auto h = ngrams(hyps[k], n);
      auto r = ngrams(refs[k], n);
      c.totals[n - 1] += static_cast<double>(h.size());
      std::set<Words> distinct(h.begin(), h.end());
      for (const auto& g : distinct)
        c.matches[n - 1] += static_cast<double>(std::min(count_of(h, g), count_of(r, g)));
    }
  }
  return c;
}

double bleu(const std::vector<Words>& hyps, const std::vector<Words>& refs) {
  auto c = bleu_counts(hyps, refs);
  if (c.hyp_len == 0) return 0.0;
  double product = 1.0;
  for (int n = 0; n < 4; ++n) {
    double p = c.matches[n] > 0 ? c.matches[n] / c.totals[n] : 1.0 / (c.totals[n] + 1.0);
    product *= p;
  }
  double bp = c.hyp_len >= c.ref_len ? 1.0 : std::exp(1.0 - c.ref_len / c.hyp_len);
  return 100.0 * bp * std::pow(product, 0.25);
}

std::size_t edit_distance(const Words& a, const Words& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

std::size_t min_shift_edit_cost(const Words& hyp, const Words& ref, std::size_t max_shifts) {
  std::map<Words, std::size_t> depth{{hyp, 0}};
  std::deque<Words> queue{hyp};
  std::size_t best = edit_distance(hyp, ref);
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    auto dcur = depth[cur];
    best = std::min(best, dcur + edit_distance(cur, ref));
    if (dcur == max_shifts) continue;
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t len = 1; i + len <= cur.size(); ++len) {
        Words span(cur.begin() + i, cur.begin() + i + len);
        Words rest(cur.begin(), cur.begin() + i);
        rest.insert(rest.end(), cur.begin() + i + len, cur.end());
        for (std::size_t p = 0; p <= rest.size(); ++p) {
          Words next(rest.begin(), rest.begin() + p);
          next.insert(next.end(), span.begin(), span.end());
          next.insert(next.end(), rest.begin() + p, rest.end());
          if (depth.emplace(next, dcur + 1).second) queue.push_back(next);
        }
      }
  }
  return best;
}

double repeated_rate(const std::vector<Words>& sentences) {
  double rep = 0, total = 0;
  for (const auto& s : sentences)
    for (std::size_t t = 0; t < s.size(); ++t) {
      total += 1;
      if (t > 0 && s[t] == s[t - 1]) rep += 1;
    }
  return total == 0 ? 0.0 : rep / total;
}

DiscountLm::DiscountLm(std::vector<Words> corpus, std::vector<std::string> vocabulary, int order,
                       double d)
    : support_(std::move(vocabulary)), order_(order), d_(d) {
  support_.push_back("</s>");
  support_.push_back("<unk>");
  for (auto& s : corpus) {
    Words p(static_cast<std::size_t>(order - 1), "<s>");
    p.insert(p.end(), s.begin(), s.end());
    p.push_back("</s>");
    padded_.push_back(std::move(p));
  }
}

double DiscountLm::prob_at(const Words& context, const std::string& w) const {
  double lower = context.empty() ? 1.0 / static_cast<double>(support_.size())
                                 : prob_at(Words(context.begin() + 1, context.end()), w);
  // Count every occurrence of context followed by anything, and by w.
  std::map<std::string, double> follow;
  double total = 0;
  const std::size_t k = context.size();
  for (const auto& s : padded_)
    for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < s.size(); ++i) {
      if (i < k) continue;
      if (!std::equal(context.begin(), context.end(), s.begin() + (i - k))) continue;
      follow[s[i]] += 1;
      total += 1;
    }
  if (total == 0) return lower;
  double held = 0;
  for (const auto& [tok, n] : follow) held += std::min(n, d_);
  auto it = follow.find(w);
  double n = it == follow.end() ? 0.0 : it->second;
  return std::max(n - d_, 0.0) / total + held / total * lower;
}

double DiscountLm::prob(const Words& history, const std::string& w) const {
  Words ctx(static_cast<std::size_t>(order_ - 1), "<s>");
  ctx.insert(ctx.end(), history.begin(), history.end());
  ctx.erase(ctx.begin(), ctx.end() - (order_ - 1));
  return prob_at(ctx, w);
}

double DiscountLm::sentence_logprob(const Words& s) const {
  double lp = 0;
  Words hist;
  for (const auto& w : s) {
    lp += std::log(prob(hist, w));
    hist.push_back(w);
  }
  return lp + std::log(prob(hist, "</s>"));
}

double DiscountLm::perplexity(const std::vector<Words>& sentences) const {
  double lp = 0, n = 0;
  for (const auto& s : sentences) {
    lp += sentence_logprob(s);
    n += static_cast<double>(s.size() + 1);
  }
  return std::exp(-lp / n);
}

Table ibm1(const std::vector<std::pair<Words, Words>>& corpus, int iterations,
           std::size_t support_size) {
  const double uniform = 1.0 / static_cast<double>(support_size);
  Table t;
  auto lookup = [&](const std::string& src, const std::string& tgt) {
    auto row = t.find(src);
    if (row == t.end()) return uniform;
    auto cell = row->second.find(tgt);
    return cell == row->second.end() ? 0.0 : cell->second;
  };
  for (int it = 0; it < iterations; ++it) {
    Table counts;
    for (const auto& [x, y] : corpus) {
      Words sources{"<null>"};
      sources.insert(sources.end(), x.begin(), x.end());
      for (const auto& w : y) {
        double z = 0;
        for (const auto& s : sources) z += lookup(s, w);
        for (const auto& s : sources) counts[s][w] += lookup(s, w) / z;
      }
    }
    Table next;
    for (const auto& [s, row] : counts) {
      double total = 0;
      for (const auto& [w, c] : row) total += c;
      for (const auto& [w, c] : row) next[s][w] = c / total;
    }
    t = std::move(next);
  }
  return t;
}

}  // namespace oracle
