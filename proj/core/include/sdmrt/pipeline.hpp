#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdmrt/config.hpp"
#include "sdmrt/corpus.hpp"
#include "sdmrt/generator.hpp"
#include "sdmrt/lm.hpp"
#include "sdmrt/models.hpp"
#include "sdmrt/report.hpp"

namespace sdmrt {

// Everything a strategy needs for one seed: the splits, the teacher, its
// distilled training set and the D-Test.
struct SeedData {
  std::uint64_t seed = 0;
  ParallelCorpus train;
  ParallelCorpus valid;
  ParallelCorpus test;
  std::optional<TaskSpec> task;  // set for generated data
  TranslationModel teacher;
  ParallelCorpus distilled;  // teacher top-1 on the train sources
  ParallelCorpus dtest;      // teacher top-1 on the test sources
  NGramLM eval_lm;           // trained on the raw train targets

  // Corpus the student is trained on in the baseline.
  const ParallelCorpus& student_corpus(StudentData which) const {
    return which == StudentData::Raw ? train : distilled;
  }
};

// Builds the seed's data. When `dir` is non-empty the splits, the teacher,
// the distilled corpus and the D-Test are written under it.
SeedData prepare_seed(const PipelineConfig& config, std::uint64_t seed,
                      const std::filesystem::path& dir = {});

inline constexpr std::array<std::string_view, 6> kSdmrtStages = {
    "TRAIN_RERANK", "FILTER", "TRAIN", "RERANK_DIS", "TRAIN", "FINE_TUNE"};

struct StrategyRun {
  TranslationModel model;
  ExperimentReport report;     // test and D-Test rows plus diagnostics
  std::vector<std::string> stages;  // stage names in execution order
  std::vector<ParallelCorpus> corpora;  // training corpora, in stage order
};

// Label used in report rows, e.g. "NAT/sdmrt" or "IterNAT/baseline-raw".
std::string system_label(const PipelineConfig& config);

// Test and D-Test rows for `model` decoded with its own hyperparameters.
ExperimentReport evaluate_model(const TranslationModel& model, const SeedData& data,
                                const std::string& system, const std::string& config_hash,
                                std::optional<std::size_t> iteration = {});

// With a non-empty `dir`, every intermediate corpus and model is written there.
StrategyRun run_baseline(const PipelineConfig& config, const SeedData& data,
                         const std::filesystem::path& dir = {});
StrategyRun run_sd(const PipelineConfig& config, const SeedData& data,
                   const std::filesystem::path& dir = {});
StrategyRun run_sdm(const PipelineConfig& config, const SeedData& data,
                    const std::filesystem::path& dir = {});
StrategyRun run_sdmrt(const PipelineConfig& config, const SeedData& data,
                      const std::filesystem::path& dir = {});
StrategyRun run_strategy(const PipelineConfig& config, const SeedData& data,
                         const std::filesystem::path& dir = {});

// Exact Bayes risks (TER loss) of h*, the teacher and `model` on short
// inputs drawn from the task. Empty for file-backed data.
std::vector<DiagnosticRow> bayes_diagnostics(const PipelineConfig& config, const SeedData& data,
                                             const TranslationModel& model,
                                             const std::string& system);

// Runs config.strategy for every seed, plus teacher rows. Writes report.tsv,
// report.txt, diagnostics.tsv, stages.txt and config.txt when
// config.output_dir is non-empty.
ExperimentReport run_experiment(const PipelineConfig& config);

// Trains the student once per seed (config.strategy) and decodes it at each
// refinement count in `steps`.
ExperimentReport iteration_sweep(const PipelineConfig& config, const std::vector<std::size_t>& steps);

enum class AblationAxis { Reranker, Filter };
AblationAxis parse_ablation_axis(std::string_view name);

// SDMRT variants differing only along `axis`.
ExperimentReport run_ablation(const PipelineConfig& config, AblationAxis axis);

// report.tsv, report.txt (per-seed and median tables), diagnostics.tsv,
// stages.txt and config.txt under `dir`.
void write_report(const ExperimentReport& report, const PipelineConfig& config,
                  const std::filesystem::path& dir);

}  // namespace sdmrt
