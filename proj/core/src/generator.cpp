#include "sdmrt/generator.hpp"

#include <sstream>

#include "sdmrt/error.hpp"
#include "sdmrt/random.hpp"
#include "sdmrt/text_io.hpp"

namespace sdmrt {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

TaskSpec make_task(const GeneratorConfig& config) {
  auto src = std::make_shared<Vocabulary>();
  auto tgt = std::make_shared<Vocabulary>();
  std::vector<std::vector<TokenId>> synonyms(Vocabulary::kNumReserved);
  for (std::size_t i = 1; i <= config.source_vocab_size; ++i) {
    auto sid = src->add("s" + std::to_string(i));
    synonyms.resize(sid + 1);
    for (std::size_t j = 1; j <= config.synonyms_per_token; ++j)
      synonyms[sid].push_back(tgt->add("t" + std::to_string(i) + "_" + std::to_string(j)));
  }
  return TaskSpec{config, std::move(src), std::move(tgt), std::move(synonyms)};
}

}  // namespace

void GeneratorConfig::validate() const {
  if (source_vocab_size == 0) throw Error("generator: source vocabulary size must be positive");
  if (synonyms_per_token == 0) throw Error("generator: synonyms per token must be positive");
  if (!is_probability(p_consistent) || !is_probability(p_swap))
    throw Error("generator: probabilities must lie in [0, 1]");
  if (min_length < 1) throw Error("generator: minimum length must be at least 1");
  if (min_length > max_length) throw Error("generator: minimum length exceeds maximum length");
}

const std::vector<TokenId>& TaskSpec::synonyms_of(TokenId source) const {
  if (source >= synonyms.size() || synonyms[source].empty())
    throw Error("task: source id " + std::to_string(source) + " has no synonyms");
  return synonyms[source];
}

Sentence sample_source(const TaskSpec& task, Rng& rng) {
  const auto& c = task.config;
  auto len = c.min_length + rng.below(c.max_length - c.min_length + 1);
  Sentence s(len);
  for (auto& tok : s) tok = static_cast<TokenId>(Vocabulary::kNumReserved + rng.below(c.source_vocab_size));
  return s;
}

SyntheticData generate_synthetic(const GeneratorConfig& config) {
  config.validate();
  auto task = make_task(config);
  Rng rng(config.seed);
  const auto m = config.synonyms_per_token;

  std::vector<SentencePair> pairs;
  std::vector<GenerationTrace> trace;
  pairs.reserve(config.corpus_size);
  trace.reserve(config.corpus_size);
  for (std::size_t n = 0; n < config.corpus_size; ++n) {
    GenerationTrace tr;
    auto source = sample_source(task, rng);
    tr.consistent = rng.bernoulli(config.p_consistent);
    if (tr.consistent) {
      tr.synonym_index.assign(source.size(), rng.below(m));
    } else {
      tr.synonym_index.resize(source.size());
      for (auto& j : tr.synonym_index) j = rng.below(m);
    }
    Sentence target(source.size());
    for (std::size_t t = 0; t < source.size(); ++t)
      target[t] = task.synonyms[source[t]][tr.synonym_index[t]];
    tr.pre_swap_target = target;
    // Single left-to-right pass; a swapped pair is skipped over entirely.
    for (std::size_t t = 0; t + 1 < target.size();) {
      ++tr.swap_trials;
      if (rng.bernoulli(config.p_swap)) {
        std::swap(target[t], target[t + 1]);
        tr.swap_positions.push_back(t);
        t += 2;
      } else {
        t += 1;
      }
    }
    pairs.push_back({std::move(source), std::move(target)});
    trace.push_back(std::move(tr));
  }
  ParallelCorpus corpus(task.source_vocab, task.target_vocab, std::move(pairs));
  return SyntheticData{std::move(corpus), std::move(task), std::move(trace)};
}

std::string TaskSpec::serialize() const {
  std::ostringstream out;
  out << "# sdmrt task-spec v1\n";
  out << "source_vocab_size " << config.source_vocab_size << '\n';
  out << "synonyms_per_token " << config.synonyms_per_token << '\n';
  out << "p_consistent " << format_exact(config.p_consistent) << '\n';
  out << "p_swap " << format_exact(config.p_swap) << '\n';
  out << "min_length " << config.min_length << '\n';
  out << "max_length " << config.max_length << '\n';
  out << "corpus_size " << config.corpus_size << '\n';
  out << "seed " << config.seed << '\n';
  for (TokenId s = Vocabulary::kNumReserved; s < source_vocab->size(); ++s) {
    out << "synonyms " << source_vocab->token(s);
    for (auto t : synonyms[s]) out << ' ' << target_vocab->token(t);
    out << '\n';
  }
  return out.str();
}

TaskSpec TaskSpec::parse(std::string_view text) {
  GeneratorConfig config;
  auto src = std::make_shared<Vocabulary>();
  auto tgt = std::make_shared<Vocabulary>();
  std::vector<std::vector<TokenId>> synonyms(Vocabulary::kNumReserved);
  std::size_t line_no = 0;
  for (auto line : split_on(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tokens(line);
    if (fields.size() < 2) throw FormatError("task-spec", line_no, "expected key and value");
    auto key = fields[0];
    auto as_size = [&] { return static_cast<std::size_t>(parse_int(fields[1])); };
    if (key == "source_vocab_size") config.source_vocab_size = as_size();
    else if (key == "synonyms_per_token") config.synonyms_per_token = as_size();
    else if (key == "p_consistent") config.p_consistent = parse_double(fields[1]);
    else if (key == "p_swap") config.p_swap = parse_double(fields[1]);
    else if (key == "min_length") config.min_length = as_size();
    else if (key == "max_length") config.max_length = as_size();
    else if (key == "corpus_size") config.corpus_size = as_size();
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(fields[1]));
    else if (key == "synonyms") {
      auto sid = src->add(fields[1]);
      synonyms.resize(sid + 1);
      for (std::size_t k = 2; k < fields.size(); ++k) synonyms[sid].push_back(tgt->add(fields[k]));
    } else {
      throw FormatError("task-spec", line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  config.validate();
  return TaskSpec{config, std::move(src), std::move(tgt), std::move(synonyms)};
}

}  // namespace sdmrt
