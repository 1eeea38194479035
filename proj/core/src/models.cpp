#include "sdmrt/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdmrt/error.hpp"

namespace sdmrt {

namespace {

constexpr double kFloor = LexicalTable::kFloor;

double safe_log(double p) { return std::log(std::max(p, kFloor)); }

// Output tokens a decoder may emit.
std::vector<TokenId> emittable(const Vocabulary& vocab) {
  std::vector<TokenId> out;
  for (TokenId id = Vocabulary::kNumReserved; id < vocab.size(); ++id) out.push_back(id);
  if (out.empty()) throw Error("model: target vocabulary has no emittable tokens");
  return out;
}

void require_kind(const TranslationModel& model, ModelKind kind, const char* op) {
  if (model.kind() != kind)
    throw Error(std::string(op) + ": model kind is " + std::string(to_string(model.kind())) +
                ", expected " + std::string(to_string(kind)));
}

void require_source(const Sentence& x, const char* op) {
  if (x.empty()) throw Error(std::string(op) + ": empty source sentence");
}

bool lexicographically_less(const Sentence& a, const Sentence& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::AT: return "AT";
    case ModelKind::NAT: return "NAT";
    case ModelKind::IterNAT: return "IterNAT";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "AT") return ModelKind::AT;
  if (name == "NAT") return ModelKind::NAT;
  if (name == "IterNAT") return ModelKind::IterNAT;
  throw Error("unknown model kind '" + std::string(name) + "' (expected AT, NAT or IterNAT)");
}

TranslationModel::TranslationModel(ModelKind kind, ModelHyperparams hyper, LexicalTable lexical,
                                   LengthModel length, NGramLM lm)
    : kind_(kind),
      hyper_(hyper),
      lexical_(std::move(lexical)),
      length_(std::move(length)),
      lm_(std::move(lm)) {}

TranslationModel TranslationModel::train(ModelKind kind, const ParallelCorpus& corpus,
                                         const ModelHyperparams& hyper) {
  if (corpus.empty()) throw Error("train_model: empty corpus");
  if (hyper.sigma <= 0) throw Error("train_model: sigma must be positive");
  if (hyper.beam_width < 1) throw Error("train_model: beam width must be at least 1");
  if (hyper.refine_steps < 1) throw Error("train_model: refinement steps must be at least 1");
  auto lexical = train_ibm1(corpus, hyper.em_iterations);
  auto length = train_length_model(corpus);
  NGramLM lm(corpus.target_vocab(), 2, hyper.lm_discount);
  auto targets = corpus.targets();
  lm.accumulate(targets);
  return TranslationModel(kind, hyper, std::move(lexical), std::move(length), std::move(lm));
}

void TranslationModel::fine_tune(const ParallelCorpus& corpus, double weight) {
  if (weight < 0) throw Error("fine_tune: negative weight");
  if (!same_vocab(corpus.source_vocab(), source_vocab()) ||
      !same_vocab(corpus.target_vocab(), target_vocab()))
    throw Error("fine_tune: corpus vocabularies differ from the model's");
  if (weight == 0.0 || corpus.empty()) return;
  auto counts = lexical_.counts();
  auto extra = lexical_.expected_counts(corpus, weight);
  for (std::size_t x = 0; x < counts.size(); ++x)
    for (const auto& [y, c] : extra[x]) counts[x][y] += c;
  lexical_.set_counts(std::move(counts));
  length_.accumulate(corpus, weight);
  auto targets = corpus.targets();
  lm_.accumulate(targets, weight);
}

TranslationModel TranslationModel::with_kind(ModelKind kind) const {
  auto copy = *this;
  copy.kind_ = kind;
  return copy;
}

std::string TranslationModel::serialize() const {
  std::ostringstream out;
  out << "# sdmrt translation-model v1\n";
  out << "kind " << to_string(kind_) << '\n';
  out << "hyper lambda_lm " << format_exact(hyper_.lambda_lm) << " lambda_lex "
      << format_exact(hyper_.lambda_lex) << " sigma " << format_exact(hyper_.sigma)
      << " beam_width " << hyper_.beam_width << " refine_steps " << hyper_.refine_steps
      << " em_iterations " << hyper_.em_iterations << " lm_discount "
      << format_exact(hyper_.lm_discount) << '\n';
  out << serialize_vocab(*source_vocab(), "source");
  out << serialize_vocab(*target_vocab(), "target");
  out << lexical_.serialize();
  out << length_.serialize();
  out << lm_.serialize();
  return out.str();
}

TranslationModel TranslationModel::parse(std::string_view text) {
  LineReader in(text, "model");
  auto kind = parse_model_kind(in.expect("kind")[0]);
  auto h = in.expect("hyper", 14);
  ModelHyperparams hyper;
  for (std::size_t i = 0; i + 1 < h.size(); i += 2) {
    auto key = h[i];
    auto val = h[i + 1];
    if (key == "lambda_lm") hyper.lambda_lm = parse_double(val);
    else if (key == "lambda_lex") hyper.lambda_lex = parse_double(val);
    else if (key == "sigma") hyper.sigma = parse_double(val);
    else if (key == "beam_width") hyper.beam_width = static_cast<std::size_t>(parse_int(val));
    else if (key == "refine_steps") hyper.refine_steps = static_cast<std::size_t>(parse_int(val));
    else if (key == "em_iterations") hyper.em_iterations = static_cast<int>(parse_int(val));
    else if (key == "lm_discount") hyper.lm_discount = parse_double(val);
    else in.fail("unknown hyperparameter '" + std::string(key) + "'");
  }
  auto src = parse_vocab(in, "source");
  auto tgt = parse_vocab(in, "target");
  auto lexical = LexicalTable::parse(in, src, tgt);
  auto length = LengthModel::parse(in);
  auto lm = NGramLM::parse(in, tgt);
  return TranslationModel(kind, hyper, std::move(lexical), std::move(length), std::move(lm));
}

void TranslationModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

TranslationModel TranslationModel::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

bool operator==(const TranslationModel& a, const TranslationModel& b) {
  return a.kind_ == b.kind_ && a.hyper_ == b.hyper_ && a.lexical_ == b.lexical_ &&
         a.length_ == b.length_ && a.lm_ == b.lm_;
}

const Candidate& CandidateList::best() const {
  if (entries.empty()) throw Error("empty candidate list");
  return entries.front();
}

std::vector<double> position_prior(std::size_t source_length, std::size_t position,
                                   std::size_t length_estimate, double sigma) {
  std::vector<double> a(source_length + 1);
  a[0] = std::exp(-1.0 / sigma);
  const double rel_t = static_cast<double>(position) / static_cast<double>(length_estimate);
  double z = a[0];
  for (std::size_t i = 1; i <= source_length; ++i) {
    const double rel_i = static_cast<double>(i) / static_cast<double>(source_length);
    a[i] = std::exp(-std::abs(rel_i - rel_t) / sigma);
    z += a[i];
  }
  for (auto& v : a) v /= z;
  return a;
}

std::vector<std::vector<double>> emission_table(const TranslationModel& model, const Sentence& x,
                                                std::size_t length_estimate, std::size_t positions) {
  const auto& lex = model.lexical();
  const auto V = model.target_vocab()->size();
  std::vector<std::vector<double>> table(positions, std::vector<double>(V, 0.0));
  for (std::size_t t = 1; t <= positions; ++t) {
    auto a = position_prior(x.size(), t, length_estimate, model.hyper().sigma);
    auto& row = table[t - 1];
    lex.add_row(Vocabulary::kNull, a[0], row);
    for (std::size_t i = 1; i <= x.size(); ++i) lex.add_row(x[i - 1], a[i], row);
  }
  return table;
}

std::size_t at_length_cap(std::size_t source_length) { return 2 * source_length + 5; }

std::size_t mask_count(std::size_t length, std::size_t steps, std::size_t iteration) {
  if (iteration >= steps) return 0;
  return (length * (steps - iteration) + steps - 1) / steps;
}

namespace {

struct AtContext {
  const TranslationModel& model;
  std::size_t source_length;
  std::size_t length_estimate;
  double best_length_logp;
  std::vector<std::vector<double>> emission;

  AtContext(const TranslationModel& m, const Sentence& x)
      : model(m),
        source_length(x.size()),
        length_estimate(m.length_model().argmax(x.size())),
        best_length_logp(m.length_model().log_prob(length_estimate, x.size())),
        emission(emission_table(m, x, length_estimate, at_length_cap(x.size()))) {}

  double token_term(std::size_t position, double lm_prob, TokenId w) const {
    const auto& hp = model.hyper();
    return hp.lambda_lm * safe_log(lm_prob) + hp.lambda_lex * safe_log(emission[position - 1][w]);
  }

  // The length log-ratio is scaled by L-hat so that it is commensurate with
  // a full sentence of token terms.
  double eos_term(double lm_eos_prob, std::size_t length) const {
    const double ratio = model.length_model().log_prob(length, source_length) - best_length_logp;
    return model.hyper().lambda_lm * safe_log(lm_eos_prob) +
           static_cast<double>(length_estimate) * ratio;
  }
};

struct Hyp {
  Sentence tokens;
  double score;
};

bool hyp_before(const Hyp& a, const Hyp& b) {
  if (a.score != b.score) return a.score > b.score;
  return lexicographically_less(a.tokens, b.tokens);
}

}  // namespace

CandidateList at_k_best(const TranslationModel& model, const Sentence& x, std::size_t k) {
  require_kind(model, ModelKind::AT, "at_k_best");
  require_source(x, "at_k_best");
  if (k < 1) throw Error("at_k_best: k must be at least 1");
  const AtContext ctx(model, x);
  const auto cands = emittable(*model.target_vocab());
  const auto beam = std::max(k, model.hyper().beam_width);
  const auto cap = at_length_cap(x.size());
  const auto& lm = model.lm();

  std::vector<Hyp> live{{Sentence{}, 0.0}};
  std::vector<Hyp> completed;
  std::vector<Hyp> next;
  while (!live.empty()) {
    next.clear();
    for (const auto& h : live) {
      const TokenId prev = h.tokens.empty() ? Vocabulary::kBos : h.tokens.back();
      const TokenId ctx_tok[1] = {prev};
      auto dist = lm.distribution(ctx_tok);
      if (!h.tokens.empty())
        completed.push_back({h.tokens, h.score + ctx.eos_term(dist[Vocabulary::kEos], h.tokens.size())});
      if (h.tokens.size() >= cap) continue;
      const auto pos = h.tokens.size() + 1;
      for (auto w : cands) {
        Hyp e{h.tokens, h.score + ctx.token_term(pos, dist[w], w)};
        e.tokens.push_back(w);
        next.push_back(std::move(e));
      }
    }
    if (next.size() > beam) {
      std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(beam), next.end(),
                        hyp_before);
      next.resize(beam);
    } else {
      std::sort(next.begin(), next.end(), hyp_before);
    }
    live.swap(next);
    if (completed.size() >= k && !live.empty()) {
      std::nth_element(completed.begin(), completed.begin() + static_cast<std::ptrdiff_t>(k - 1),
                       completed.end(), hyp_before);
      // Every remaining increment is a log-probability, so extensions only lose score.
      if (live.front().score < completed[k - 1].score) break;
    }
  }
  std::sort(completed.begin(), completed.end(), hyp_before);
  if (completed.size() > k) completed.resize(k);
  CandidateList out{x, {}};
  for (auto& h : completed) out.entries.push_back({std::move(h.tokens), h.score, std::nullopt});
  return out;
}

namespace {

// Argmax with ties to the lowest id.
std::pair<TokenId, double> best_token(const std::vector<double>& scores,
                                      const std::vector<TokenId>& cands) {
  TokenId best = cands.front();
  double best_s = scores[best];
  for (auto w : cands)
    if (scores[w] > best_s) {
      best = w;
      best_s = scores[w];
    }
  return {best, best_s};
}

Candidate nat_candidate(const TranslationModel& model, const Sentence& x, std::size_t length,
                        const std::vector<TokenId>& cands) {
  auto emission = emission_table(model, x, length, length);
  Candidate c;
  c.model_score = model.length_model().log_prob(length, x.size());
  for (std::size_t t = 0; t < length; ++t) {
    auto [w, p] = best_token(emission[t], cands);
    c.hypothesis.push_back(w);
    c.model_score += safe_log(p);
  }
  return c;
}

void sort_candidates(CandidateList& list) {
  std::stable_sort(list.entries.begin(), list.entries.end(),
                   [](const Candidate& a, const Candidate& b) { return a.model_score > b.model_score; });
}

}  // namespace

CandidateList nat_decode(const TranslationModel& model, const Sentence& x, std::size_t k) {
  require_kind(model, ModelKind::NAT, "nat_decode");
  require_source(x, "nat_decode");
  if (k < 1) throw Error("nat_decode: k must be at least 1");
  const auto cands = emittable(*model.target_vocab());
  CandidateList out{x, {}};
  for (auto L : model.length_model().top_k(x.size(), k))
    out.entries.push_back(nat_candidate(model, x, L, cands));
  sort_candidates(out);
  return out;
}

RefinementTrace iter_nat_decode(const TranslationModel& model, const Sentence& x,
                                std::size_t steps, std::optional<std::size_t> length) {
  require_kind(model, ModelKind::IterNAT, "iter_nat_decode");
  require_source(x, "iter_nat_decode");
  if (steps < 1) throw Error("iter_nat_decode: steps must be at least 1");
  const auto L = length.value_or(model.length_model().argmax(x.size()));
  if (L < 1) throw Error("iter_nat_decode: length must be positive");
  const auto cands = emittable(*model.target_vocab());
  const auto& hp = model.hyper();
  const auto& lm = model.lm();
  const auto emission = emission_table(model, x, L, L);

  RefinementTrace trace;
  Sentence y(L);
  std::vector<double> conf(L);
  for (std::size_t t = 0; t < L; ++t) {
    auto [w, p] = best_token(emission[t], cands);
    y[t] = w;
    conf[t] = p;
  }
  trace.steps.push_back(y);
  trace.masked.emplace_back();
  trace.confidence.push_back(conf);

  std::vector<std::size_t> order(L);
  std::vector<double> scores(model.target_vocab()->size());
  for (std::size_t it = 1; it < steps; ++it) {
    const auto n = mask_count(L, steps, it);
    for (std::size_t t = 0; t < L; ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return conf[a] < conf[b]; });
    std::vector<bool> masked(L, false);
    std::vector<std::size_t> masked_pos(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(masked_pos.begin(), masked_pos.end());
    for (auto t : masked_pos) masked[t] = true;

    // All masked positions are predicted from the same frozen context.
    auto next = y;
    auto next_conf = conf;
    for (auto t : masked_pos) {
      std::optional<TokenId> left, right;
      if (t == 0) left = Vocabulary::kBos;
      else if (!masked[t - 1]) left = y[t - 1];
      if (t + 1 == L) right = Vocabulary::kEos;
      else if (!masked[t + 1]) right = y[t + 1];

      std::vector<double> left_dist;
      if (left) {
        const TokenId c[1] = {*left};
        left_dist = lm.distribution(c);
      }
      double max_s = -std::numeric_limits<double>::infinity();
      for (auto w : cands) {
        double s = hp.lambda_lex * safe_log(emission[t][w]);
        if (left) s += hp.lambda_lm * safe_log(left_dist[w]);
        if (right) {
          const TokenId c[1] = {w};
          s += hp.lambda_lm * safe_log(lm.prob(c, *right));
        }
        scores[w] = s;
        max_s = std::max(max_s, s);
      }
      auto [w, s] = best_token(scores, cands);
      double z = 0.0;
      for (auto v : cands) z += std::exp(scores[v] - max_s);
      next[t] = w;
      next_conf[t] = std::exp(s - max_s) / z;
    }
    y = std::move(next);
    conf = std::move(next_conf);
    trace.steps.push_back(y);
    trace.masked.push_back(std::move(masked_pos));
    trace.confidence.push_back(conf);
  }
  trace.output = y;
  return trace;
}

double model_score(const TranslationModel& model, const Sentence& x, const Sentence& y_in) {
  require_source(x, "model_score");
  if (y_in.empty()) throw Error("model_score: empty hypothesis");
  Sentence y = y_in;
  for (auto& id : y)
    if (!model.target_vocab()->contains(id) || Vocabulary::is_reserved(id)) id = Vocabulary::kUnk;

  if (model.kind() == ModelKind::AT) {
    const AtContext ctx(model, x);
    const auto& lm = model.lm();
    double total = 0.0;
    TokenId prev = Vocabulary::kBos;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const TokenId c[1] = {prev};
      double emit = t < ctx.emission.size()
                        ? ctx.emission[t][y[t]]
                        : emission_table(model, x, ctx.length_estimate, t + 1).back()[y[t]];
      total += model.hyper().lambda_lm * safe_log(lm.prob(c, y[t])) +
               model.hyper().lambda_lex * safe_log(emit);
      prev = y[t];
    }
    const TokenId c[1] = {prev};
    total += ctx.eos_term(lm.prob(c, Vocabulary::kEos), y.size());
    return total;
  }

  const auto L = y.size();
  auto emission = emission_table(model, x, L, L);
  double total = model.length_model().log_prob(L, x.size());
  for (std::size_t t = 0; t < L; ++t) total += safe_log(emission[t][y[t]]);
  return total;
}

CandidateList k_best(const TranslationModel& model, const Sentence& x, std::size_t k) {
  switch (model.kind()) {
    case ModelKind::AT: return at_k_best(model, x, k);
    case ModelKind::NAT: return nat_decode(model, x, k);
    case ModelKind::IterNAT: break;
  }
  require_source(x, "k_best");
  if (k < 1) throw Error("k_best: k must be at least 1");
  CandidateList out{x, {}};
  for (auto L : model.length_model().top_k(x.size(), k)) {
    auto trace = iter_nat_decode(model, x, model.hyper().refine_steps, L);
    double score = model_score(model, x, trace.output);
    out.entries.push_back({std::move(trace.output), score, std::nullopt});
  }
  sort_candidates(out);
  return out;
}

Sentence decode(const TranslationModel& model, const Sentence& x) {
  switch (model.kind()) {
    case ModelKind::AT: return at_k_best(model, x, 1).best().hypothesis;
    case ModelKind::NAT: return nat_decode(model, x, 1).best().hypothesis;
    case ModelKind::IterNAT: return iter_nat_decode(model, x, model.hyper().refine_steps).output;
  }
  throw Error("decode: unknown model kind");
}

}  // namespace sdmrt
