#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdmrt/corpus.hpp"
#include "sdmrt/generator.hpp"
#include "sdmrt/models.hpp"
#include "sdmrt/rerank.hpp"

namespace sdmrt {

using KeyValues = std::map<std::string, std::string>;

// Flat "key = value" (or "key value") lines; '#' starts a comment.
KeyValues parse_key_values(std::string_view text, const std::string& source_name = "config");
KeyValues load_key_values(const std::filesystem::path& path);

enum class Strategy { Baseline, SD, SDM, SDMRT };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);

enum class StudentData { Raw, Distilled };

std::string_view to_string(StudentData data);
StudentData parse_student_data(std::string_view name);

struct PipelineConfig {
  // Data: generated unless train/valid/test files are all given.
  GeneratorConfig generator{.source_vocab_size = 12,
                            .synonyms_per_token = 2,
                            .p_consistent = 1.0,
                            .p_swap = 0.0,
                            .min_length = 3,
                            .max_length = 5,
                            .corpus_size = 5000,
                            .seed = 1};
  std::string train_file;
  std::string valid_file;
  std::string test_file;
  SplitRatios split;

  ModelKind student_kind = ModelKind::NAT;
  ModelKind teacher_kind = ModelKind::AT;
  StudentData student_data = StudentData::Distilled;
  ModelHyperparams hyper;

  Strategy strategy = Strategy::SDMRT;
  RerankVariant reranker = RerankVariant::Align;
  bool filter = true;
  bool allow_no_reranker = false;  // set by the reranker ablation
  std::size_t k = 5;
  double tau = 0.8;
  double w_ft = 4.0;
  std::size_t refine_steps = 10;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::size_t> sweep_steps{1, 5, 10};
  std::string output_dir = "sdmrt-out";

  // Inputs drawn for the exact Bayes-risk diagnostic (generated data only).
  std::size_t bayes_inputs = 20;
  std::size_t bayes_max_length = 4;

  static PipelineConfig from_key_values(const KeyValues& kv);
  KeyValues to_key_values() const;
  static const std::vector<std::string>& keys();

  void validate() const;
  bool uses_files() const { return !train_file.empty(); }
  ModelHyperparams student_hyper() const;

  // FNV-1a of the canonical key-values, excluding seeds and output_dir.
  std::string hash() const;
};

}  // namespace sdmrt
