#include "sdmrt/config.hpp"

#include <algorithm>

#include "sdmrt/error.hpp"
#include "sdmrt/text_io.hpp"

namespace sdmrt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view text) {
  std::vector<T> out;
  for (auto piece : split_on(text, ',')) {
    piece = trim(piece);
    if (piece.empty()) continue;
    auto v = parse_int(piece);
    if (v < 0) throw Error("negative value in list '" + std::string(text) + "'");
    out.push_back(static_cast<T>(v));
  }
  return out;
}

bool parse_bool(std::string_view s) {
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw Error("not a boolean: '" + std::string(s) + "'");
}

std::size_t parse_size(std::string_view s) {
  auto v = parse_int(s);
  if (v < 0) throw Error("negative value '" + std::string(s) + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

KeyValues parse_key_values(std::string_view text, const std::string& source_name) {
  KeyValues kv;
  std::size_t line_no = 0;
  for (auto line : split_on(text, '\n')) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string_view key, value;
    if (eq != std::string_view::npos) {
      key = trim(line.substr(0, eq));
      value = trim(line.substr(eq + 1));
    } else {
      auto sp = line.find_first_of(" \t");
      if (sp == std::string_view::npos) throw FormatError(source_name, line_no, "missing value");
      key = trim(line.substr(0, sp));
      value = trim(line.substr(sp + 1));
    }
    if (key.empty()) throw FormatError(source_name, line_no, "missing key");
    std::string k(key);
    std::replace(k.begin(), k.end(), '-', '_');
    kv[k] = std::string(value);
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  return parse_key_values(read_file(path), path.string());
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Baseline: return "baseline";
    case Strategy::SD: return "sd";
    case Strategy::SDM: return "sdm";
    case Strategy::SDMRT: return "sdmrt";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "baseline") return Strategy::Baseline;
  if (name == "sd" || name == "SD") return Strategy::SD;
  if (name == "sdm" || name == "SDM") return Strategy::SDM;
  if (name == "sdmrt" || name == "SDMRT") return Strategy::SDMRT;
  throw Error("unknown strategy '" + std::string(name) + "' (expected baseline, sd, sdm or sdmrt)");
}

std::string_view to_string(StudentData data) {
  return data == StudentData::Raw ? "raw" : "distilled";
}

StudentData parse_student_data(std::string_view name) {
  if (name == "raw") return StudentData::Raw;
  if (name == "distilled") return StudentData::Distilled;
  throw Error("unknown student data '" + std::string(name) + "' (expected raw or distilled)");
}

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> k = {
      "vocab_size", "synonyms", "p_consistent", "p_swap", "min_len", "max_len", "corpus_size",
      "train_file", "valid_file", "test_file", "train_ratio", "valid_ratio", "test_ratio",
      "student_kind", "teacher_kind", "student_data", "lambda_lm", "lambda_lex", "sigma",
      "beam_width", "em_iterations", "lm_discount", "strategy", "reranker", "filter", "k", "tau",
      "w_ft", "refine_steps", "seeds", "sweep_steps", "output_dir", "bayes_inputs",
      "bayes_max_length"};
  return k;
}

PipelineConfig PipelineConfig::from_key_values(const KeyValues& kv) {
  PipelineConfig c;
  for (const auto& [key, value] : kv) {
    try {
      if (key == "vocab_size") c.generator.source_vocab_size = parse_size(value);
      else if (key == "synonyms") c.generator.synonyms_per_token = parse_size(value);
      else if (key == "p_consistent") c.generator.p_consistent = parse_double(value);
      else if (key == "p_swap") c.generator.p_swap = parse_double(value);
      else if (key == "min_len") c.generator.min_length = parse_size(value);
      else if (key == "max_len") c.generator.max_length = parse_size(value);
      else if (key == "corpus_size") c.generator.corpus_size = parse_size(value);
      else if (key == "train_file") c.train_file = value;
      else if (key == "valid_file") c.valid_file = value;
      else if (key == "test_file") c.test_file = value;
      else if (key == "train_ratio") c.split.train = parse_double(value);
      else if (key == "valid_ratio") c.split.valid = parse_double(value);
      else if (key == "test_ratio") c.split.test = parse_double(value);
      else if (key == "student_kind") c.student_kind = parse_model_kind(value);
      else if (key == "teacher_kind") c.teacher_kind = parse_model_kind(value);
      else if (key == "student_data") c.student_data = parse_student_data(value);
      else if (key == "lambda_lm") c.hyper.lambda_lm = parse_double(value);
      else if (key == "lambda_lex") c.hyper.lambda_lex = parse_double(value);
      else if (key == "sigma") c.hyper.sigma = parse_double(value);
      else if (key == "beam_width") c.hyper.beam_width = parse_size(value);
      else if (key == "em_iterations") c.hyper.em_iterations = static_cast<int>(parse_int(value));
      else if (key == "lm_discount") c.hyper.lm_discount = parse_double(value);
      else if (key == "strategy") c.strategy = parse_strategy(value);
      else if (key == "reranker") c.reranker = parse_rerank_variant(value);
      else if (key == "filter") c.filter = parse_bool(value);
      else if (key == "k") c.k = parse_size(value);
      else if (key == "tau") c.tau = parse_double(value);
      else if (key == "w_ft") c.w_ft = parse_double(value);
      else if (key == "refine_steps") c.refine_steps = parse_size(value);
      else if (key == "seeds") c.seeds = parse_list<std::uint64_t>(value);
      else if (key == "sweep_steps") c.sweep_steps = parse_list<std::size_t>(value);
      else if (key == "output_dir") c.output_dir = value;
      else if (key == "bayes_inputs") c.bayes_inputs = parse_size(value);
      else if (key == "bayes_max_length") c.bayes_max_length = parse_size(value);
      else throw Error("unknown key");
    } catch (const Error& e) {
      throw Error("config key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

KeyValues PipelineConfig::to_key_values() const {
  KeyValues kv;
  kv["vocab_size"] = std::to_string(generator.source_vocab_size);
  kv["synonyms"] = std::to_string(generator.synonyms_per_token);
  kv["p_consistent"] = format_exact(generator.p_consistent);
  kv["p_swap"] = format_exact(generator.p_swap);
  kv["min_len"] = std::to_string(generator.min_length);
  kv["max_len"] = std::to_string(generator.max_length);
  kv["corpus_size"] = std::to_string(generator.corpus_size);
  kv["train_file"] = train_file;
  kv["valid_file"] = valid_file;
  kv["test_file"] = test_file;
  kv["train_ratio"] = format_exact(split.train);
  kv["valid_ratio"] = format_exact(split.valid);
  kv["test_ratio"] = format_exact(split.test);
  kv["student_kind"] = std::string(to_string(student_kind));
  kv["teacher_kind"] = std::string(to_string(teacher_kind));
  kv["student_data"] = std::string(to_string(student_data));
  kv["lambda_lm"] = format_exact(hyper.lambda_lm);
  kv["lambda_lex"] = format_exact(hyper.lambda_lex);
  kv["sigma"] = format_exact(hyper.sigma);
  kv["beam_width"] = std::to_string(hyper.beam_width);
  kv["em_iterations"] = std::to_string(hyper.em_iterations);
  kv["lm_discount"] = format_exact(hyper.lm_discount);
  kv["strategy"] = std::string(to_string(strategy));
  kv["reranker"] = std::string(to_string(reranker));
  kv["filter"] = filter ? "true" : "false";
  kv["k"] = std::to_string(k);
  kv["tau"] = format_exact(tau);
  kv["w_ft"] = format_exact(w_ft);
  kv["refine_steps"] = std::to_string(refine_steps);
  kv["seeds"] = join(seeds);
  kv["sweep_steps"] = join(sweep_steps);
  kv["output_dir"] = output_dir;
  kv["bayes_inputs"] = std::to_string(bayes_inputs);
  kv["bayes_max_length"] = std::to_string(bayes_max_length);
  return kv;
}

void PipelineConfig::validate() const {
  if (!uses_files()) generator.validate();
  if (uses_files() && test_file.empty())
    throw Error("config: train_file requires test_file");
  if (k < 1) throw Error("config: k must be at least 1");
  if (!(tau >= 0)) throw Error("config: tau must be non-negative");
  if (w_ft < 0) throw Error("config: w_ft must be non-negative");
  if (refine_steps < 1) throw Error("config: refine_steps must be at least 1");
  if (seeds.empty()) throw Error("config: at least one seed required");
  for (auto s : sweep_steps)
    if (s < 1) throw Error("config: sweep steps must be at least 1");
  if (strategy == Strategy::SDMRT && reranker == RerankVariant::None && !allow_no_reranker)
    throw Error("config: strategy sdmrt requires a reranker (lm or align)");
}

ModelHyperparams PipelineConfig::student_hyper() const {
  auto h = hyper;
  h.refine_steps = refine_steps;
  return h;
}

std::string PipelineConfig::hash() const {
  auto kv = to_key_values();
  kv.erase("seeds");
  kv.erase("output_dir");
  std::string canon;
  for (const auto& [k, v] : kv) canon += k + "=" + v + "\n";
  return hex64(fnv1a(canon));
}

}  // namespace sdmrt
