#include "sdmrt/pipeline.hpp"

#include <algorithm>
#include <set>

#include "sdmrt/bayes.hpp"
#include "sdmrt/distill.hpp"
#include "sdmrt/error.hpp"
#include "sdmrt/metrics.hpp"
#include "sdmrt/rerank.hpp"
#include "sdmrt/text_io.hpp"

namespace sdmrt {

namespace fs = std::filesystem;

namespace {

void save_if(const fs::path& dir, const std::string& name, const ParallelCorpus& corpus) {
  if (!dir.empty()) save_corpus(corpus, dir / name);
}

void save_if(const fs::path& dir, const std::string& name, const TranslationModel& model) {
  if (!dir.empty()) model.save(dir / name);
}

void prepare_dir(const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

std::optional<std::size_t> iteration_of(const TranslationModel& model) {
  if (model.kind() == ModelKind::IterNAT) return model.hyper().refine_steps;
  return std::nullopt;
}

DiagnosticRow diag(std::string name, const std::string& system, double value, const SeedData& data,
                   const std::string& hash) {
  return {std::move(name), system, value, data.seed, hash};
}

double target_ppl(const NGramLM& lm, const ParallelCorpus& corpus) {
  auto targets = corpus.targets();
  return perplexity(lm, targets);
}

void finish(StrategyRun& run, const PipelineConfig& config, const SeedData& data,
            const fs::path& dir) {
  auto label = system_label(config);
  auto hash = config.hash();
  auto eval = evaluate_model(run.model, data, label, hash, iteration_of(run.model));
  run.report.rows = std::move(eval.rows);
  for (const auto& s : run.stages)
    run.report.stage_log.push_back("seed " + std::to_string(data.seed) + " " + label + " " + s);
  save_if(dir, "final_model.txt", run.model);
  if (!dir.empty()) {
    std::string log;
    for (const auto& s : run.stages) log += s + "\n";
    write_file_atomic(dir / "stages.txt", log);
  }
}

TranslationModel train_student(const PipelineConfig& config, const ParallelCorpus& corpus) {
  return TranslationModel::train(config.student_kind, corpus, config.student_hyper());
}

}  // namespace

SeedData prepare_seed(const PipelineConfig& config, std::uint64_t seed, const fs::path& dir) {
  config.validate();
  std::optional<TaskSpec> task;
  std::optional<CorpusSplit> parts;
  if (config.uses_files()) {
    auto train = load_corpus(config.train_file);
    auto test = load_corpus(config.test_file, train.source_vocab(), train.target_vocab());
    auto valid = config.valid_file.empty()
                     ? ParallelCorpus(train.source_vocab(), train.target_vocab(), {})
                     : load_corpus(config.valid_file, train.source_vocab(), train.target_vocab());
    parts.emplace(CorpusSplit{std::move(train), std::move(valid), std::move(test)});
  } else {
    auto gen = config.generator;
    gen.seed = seed;
    auto synthetic = generate_synthetic(gen);
    parts.emplace(split(synthetic.corpus, config.split, seed));
    task = std::move(synthetic.task);
  }
  if (parts->train.empty()) throw Error("training corpus is empty");
  if (parts->test.empty()) throw Error("test corpus is empty");

  auto hyper = config.student_hyper();
  auto teacher = TranslationModel::train(config.teacher_kind, parts->train, hyper);
  DistillSpec spec{config.k, nullptr};
  auto distilled = distill_corpus(teacher, parts->train, spec);
  auto dtest = build_dtest(teacher, parts->test, spec);
  auto lm = train_lm(parts->train, 2, config.hyper.lm_discount);

  if (!dir.empty()) {
    prepare_dir(dir);
    save_corpus(parts->train, dir / "train.tsv");
    save_corpus(parts->valid, dir / "valid.tsv");
    save_corpus(parts->test, dir / "test.tsv");
    save_corpus(distilled, dir / "distilled.tsv");
    save_corpus(dtest, dir / "dtest.tsv");
    teacher.save(dir / "teacher.txt");
    if (task) write_file_atomic(dir / "task.txt", task->serialize());
  }
  return SeedData{seed,
                  std::move(parts->train),
                  std::move(parts->valid),
                  std::move(parts->test),
                  std::move(task),
                  std::move(teacher),
                  std::move(distilled),
                  std::move(dtest),
                  std::move(lm)};
}

std::string system_label(const PipelineConfig& config) {
  std::string label = std::string(to_string(config.student_kind)) + "/" +
                      std::string(to_string(config.strategy));
  if (config.strategy != Strategy::SDMRT)
    label += "-" + std::string(to_string(config.student_data));
  return label;
}

ExperimentReport evaluate_model(const TranslationModel& model, const SeedData& data,
                                const std::string& system, const std::string& config_hash,
                                std::optional<std::size_t> iteration) {
  std::vector<Sentence> outputs;
  outputs.reserve(data.test.size());
  for (const auto& pair : data.test) outputs.push_back(decode(model, pair.source));
  ExperimentReport report;
  for (const auto* refs : {&data.test, &data.dtest}) {
    auto row = evaluate_system(outputs, *refs, data.eval_lm);
    row.system = system;
    row.dataset = refs == &data.test ? "test" : "dtest";
    row.iteration = iteration;
    row.seed = data.seed;
    row.config_hash = config_hash;
    report.rows.push_back(std::move(row));
  }
  return report;
}

StrategyRun run_baseline(const PipelineConfig& config, const SeedData& data, const fs::path& dir) {
  prepare_dir(dir);
  const auto& corpus = data.student_corpus(config.student_data);
  StrategyRun run{train_student(config, corpus), {}, {"TRAIN"}, {corpus}};
  finish(run, config, data, dir);
  return run;
}

namespace {

StrategyRun self_distill(const PipelineConfig& config, const SeedData& data, const fs::path& dir,
                         bool mixup) {
  prepare_dir(dir);
  const auto& base = data.student_corpus(config.student_data);
  auto first = train_student(config, base);
  save_if(dir, "first_pass_model.txt", first);
  auto self = distill_corpus(first, base, DistillSpec{config.k, nullptr});
  save_if(dir, "self_distilled.tsv", self);
  auto corpus = mixup ? build_sdm(base, self) : self;
  if (mixup) save_if(dir, "mixed.tsv", corpus);
  StrategyRun run{train_student(config, corpus), {}, {"TRAIN", "SELF_DISTILL", "TRAIN"},
                  {base, corpus}};
  auto label = system_label(config);
  auto hash = config.hash();
  run.report.diagnostics.push_back(
      diag("train_size", label, static_cast<double>(corpus.size()), data, hash));
  run.report.diagnostics.push_back(
      diag("ppl_self_distilled", label, target_ppl(data.eval_lm, self), data, hash));
  finish(run, config, data, dir);
  return run;
}

}  // namespace

StrategyRun run_sd(const PipelineConfig& config, const SeedData& data, const fs::path& dir) {
  return self_distill(config, data, dir, false);
}

StrategyRun run_sdm(const PipelineConfig& config, const SeedData& data, const fs::path& dir) {
  return self_distill(config, data, dir, true);
}

StrategyRun run_sdmrt(const PipelineConfig& config, const SeedData& data, const fs::path& dir) {
  config.validate();
  prepare_dir(dir);
  auto label = system_label(config);
  auto hash = config.hash();
  std::vector<std::string> stages;
  std::vector<DiagnosticRow> diags;

  stages.emplace_back("TRAIN_RERANK");
  std::optional<Reranker> reranker;
  if (config.reranker != RerankVariant::None) {
    reranker = Reranker::train(config.reranker, data.train, 2, config.hyper.lm_discount,
                               config.hyper.em_iterations);
    if (!dir.empty()) reranker->save(dir / "reranker.txt");
  }

  std::optional<ParallelCorpus> filtered;
  if (config.filter) {
    stages.emplace_back("FILTER");
    std::vector<double> scores;
    filtered = filter_by_ter(data.train, data.distilled, config.tau, &scores);
    if (filtered->empty())
      throw Error("FILTER kept no pairs at tau=" + format_fixed(config.tau, 4) +
                  "; use a larger tau");
    double mean = 0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    diags.push_back(diag("filter_retention", label,
                         static_cast<double>(filtered->size()) /
                             static_cast<double>(data.distilled.size()),
                         data, hash));
    diags.push_back(diag("mean_ter_distilled", label, mean, data, hash));
  } else {
    filtered = data.distilled;
  }
  save_if(dir, "filtered.tsv", *filtered);

  stages.emplace_back("TRAIN");
  auto model = train_student(config, data.distilled);
  save_if(dir, "pretrain_model.txt", model);

  stages.emplace_back("RERANK_DIS");
  std::vector<CandidateList> lists;
  auto plain = distill_corpus(model, data.train, DistillSpec{config.k, nullptr}, &lists);
  std::vector<Sentence> chosen;
  chosen.reserve(lists.size());
  for (auto& list : lists) {
    if (reranker) list = rerank(list, *reranker);
    chosen.push_back(list.best().hypothesis);
  }
  auto self = data.train.with_targets(std::move(chosen), model.target_vocab());
  save_if(dir, "self_distilled.tsv", self);
  if (!dir.empty())
    write_file_atomic(dir / "candidates.tsv",
                      format_candidate_dump(lists, *model.source_vocab(), *model.target_vocab()));
  diags.push_back(diag("ppl_self_distilled_plain", label, target_ppl(data.eval_lm, plain), data, hash));
  diags.push_back(
      diag("ppl_self_distilled_reranked", label, target_ppl(data.eval_lm, self), data, hash));

  stages.emplace_back("TRAIN");
  auto mixed = concat(data.distilled, self);
  save_if(dir, "mixed.tsv", mixed);
  model = train_student(config, mixed);
  save_if(dir, "mixup_model.txt", model);

  stages.emplace_back("FINE_TUNE");
  model.fine_tune(*filtered, config.w_ft);

  diags.push_back(diag("train_size", label, static_cast<double>(mixed.size()), data, hash));
  diags.push_back(
      diag("fine_tune_size", label, static_cast<double>(filtered->size()), data, hash));

  StrategyRun run{std::move(model), {}, std::move(stages),
                  {data.distilled, self, mixed, *filtered}};
  run.report.diagnostics = std::move(diags);
  finish(run, config, data, dir);
  return run;
}

StrategyRun run_strategy(const PipelineConfig& config, const SeedData& data, const fs::path& dir) {
  switch (config.strategy) {
    case Strategy::Baseline: return run_baseline(config, data, dir);
    case Strategy::SD: return run_sd(config, data, dir);
    case Strategy::SDM: return run_sdm(config, data, dir);
    case Strategy::SDMRT: return run_sdmrt(config, data, dir);
  }
  throw Error("unknown strategy");
}

std::vector<DiagnosticRow> bayes_diagnostics(const PipelineConfig& config, const SeedData& data,
                                             const TranslationModel& model,
                                             const std::string& system) {
  std::vector<DiagnosticRow> out;
  if (!data.task || config.bayes_inputs == 0) return out;
  auto spec = *data.task;
  spec.config.max_length = std::min(spec.config.max_length, config.bayes_max_length);
  spec.config.min_length = std::min(spec.config.min_length, spec.config.max_length);
  Rng rng(data.seed ^ 0x9e3779b97f4a7c15ULL);
  std::set<Sentence> seen;
  std::vector<Sentence> inputs;
  for (std::size_t tries = 0; inputs.size() < config.bayes_inputs && tries < 50 * config.bayes_inputs;
       ++tries) {
    auto x = sample_source(spec, rng);
    if (seen.insert(x).second) inputs.push_back(std::move(x));
  }
  auto task = task_from_spec(spec, inputs, LossKind::Ter);
  auto hash = config.hash();
  out.push_back(diag("bayes_risk", "h*", overall_risk(task, bayes_optimal(task)), data, hash));
  out.push_back(diag("bayes_risk", "teacher", overall_risk(task, empirical_hypothesis(data.teacher, task)),
                     data, hash));
  out.push_back(diag("bayes_risk", system, overall_risk(task, empirical_hypothesis(model, task)),
                     data, hash));
  return out;
}

namespace {

fs::path seed_dir(const PipelineConfig& config, std::uint64_t seed) {
  if (config.output_dir.empty()) return {};
  return fs::path(config.output_dir) / ("seed_" + std::to_string(seed));
}

fs::path data_dir(const PipelineConfig& config, std::uint64_t seed) {
  auto base = seed_dir(config, seed);
  return base.empty() ? base : base / "data";
}

fs::path strategy_dir(const PipelineConfig& config, std::uint64_t seed, const std::string& name) {
  auto base = seed_dir(config, seed);
  if (base.empty()) return {};
  std::string clean = name;
  std::replace(clean.begin(), clean.end(), '/', '_');
  std::replace(clean.begin(), clean.end(), '=', '-');
  return base / clean;
}

ExperimentReport teacher_rows(const PipelineConfig& config, const SeedData& data) {
  auto t = data.teacher;
  auto label = std::string(to_string(config.teacher_kind)) + "/teacher";
  return evaluate_model(t, data, label, config.hash(), iteration_of(t));
}

}  // namespace

ExperimentReport run_experiment(const PipelineConfig& config) {
  config.validate();
  ExperimentReport report;
  for (auto seed : config.seeds) {
    auto data = prepare_seed(config, seed, data_dir(config, seed));
    report.append(teacher_rows(config, data));
    auto label = system_label(config);
    auto run = run_strategy(config, data, strategy_dir(config, seed, label));
    report.append(run.report);
    for (auto& d : bayes_diagnostics(config, data, run.model, label))
      report.diagnostics.push_back(std::move(d));
  }
  if (!config.output_dir.empty()) write_report(report, config, config.output_dir);
  return report;
}

ExperimentReport iteration_sweep(const PipelineConfig& config, const std::vector<std::size_t>& steps) {
  config.validate();
  if (config.student_kind != ModelKind::IterNAT)
    throw Error("iteration sweep requires student_kind IterNAT");
  if (steps.empty()) throw Error("iteration sweep needs at least one step count");
  ExperimentReport report;
  for (auto seed : config.seeds) {
    auto data = prepare_seed(config, seed, data_dir(config, seed));
    report.append(teacher_rows(config, data));
    auto label = system_label(config);
    auto run = run_strategy(config, data, strategy_dir(config, seed, label));
    report.diagnostics.insert(report.diagnostics.end(), run.report.diagnostics.begin(),
                              run.report.diagnostics.end());
    report.stage_log.insert(report.stage_log.end(), run.report.stage_log.begin(),
                            run.report.stage_log.end());
    for (auto t : steps) {
      if (t < 1) throw Error("iteration sweep: step counts must be at least 1");
      auto model = run.model;
      model.mutable_hyper().refine_steps = t;
      report.append(evaluate_model(model, data, label, config.hash(), t));
    }
  }
  if (!config.output_dir.empty()) write_report(report, config, config.output_dir);
  return report;
}

AblationAxis parse_ablation_axis(std::string_view name) {
  if (name == "reranker") return AblationAxis::Reranker;
  if (name == "filter") return AblationAxis::Filter;
  throw Error("unknown ablation axis '" + std::string(name) + "' (expected reranker or filter)");
}

ExperimentReport run_ablation(const PipelineConfig& config, AblationAxis axis) {
  std::vector<std::pair<std::string, PipelineConfig>> variants;
  auto base = config;
  base.strategy = Strategy::SDMRT;
  base.allow_no_reranker = true;
  if (axis == AblationAxis::Reranker) {
    for (auto v : {RerankVariant::Lm, RerankVariant::Align, RerankVariant::None}) {
      auto c = base;
      c.reranker = v;
      variants.emplace_back("reranker=" + std::string(to_string(v)), c);
    }
  } else {
    for (bool on : {true, false}) {
      auto c = base;
      c.filter = on;
      variants.emplace_back(std::string("filter=") + (on ? "on" : "off"), c);
    }
  }
  base.validate();
  ExperimentReport report;
  for (auto seed : config.seeds) {
    auto data = prepare_seed(base, seed, data_dir(base, seed));
    report.append(teacher_rows(base, data));
    for (const auto& [suffix, c] : variants) {
      auto label = system_label(c) + "/" + suffix;
      auto run = run_sdmrt(c, data, strategy_dir(c, seed, label));
      for (auto& r : run.report.rows) r.system = label;
      for (auto& d : run.report.diagnostics) d.system = label;
      for (auto& line : run.report.stage_log) {
        auto head = "seed " + std::to_string(seed) + " " + system_label(c) + " ";
        if (line.starts_with(head)) line = "seed " + std::to_string(seed) + " " + label + " " +
                                           line.substr(head.size());
      }
      report.append(run.report);
    }
  }
  if (!config.output_dir.empty()) write_report(report, base, config.output_dir);
  return report;
}

void write_report(const ExperimentReport& report, const PipelineConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  write_file_atomic(dir / "report.tsv", format_metrics_tsv(report.rows));
  auto table = format_metrics_table(report.rows) + "\n" + format_metrics_table(aggregate_median(report.rows));
  write_file_atomic(dir / "report.txt", table);
  write_file_atomic(dir / "diagnostics.tsv", format_diagnostics_tsv(report.diagnostics));
  std::string log;
  for (const auto& line : report.stage_log) log += line + "\n";
  write_file_atomic(dir / "stages.txt", log);
  std::string cfg = "# config_hash " + config.hash() + "\n";
  for (const auto& [k, v] : config.to_key_values()) cfg += k + " = " + v + "\n";
  write_file_atomic(dir / "config.txt", cfg);
}

}  // namespace sdmrt
