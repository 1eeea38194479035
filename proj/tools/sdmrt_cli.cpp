#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdmrt/config.hpp"
#include "sdmrt/distill.hpp"
#include "sdmrt/error.hpp"
#include "sdmrt/generator.hpp"
#include "sdmrt/metrics.hpp"
#include "sdmrt/models.hpp"
#include "sdmrt/pipeline.hpp"
#include "sdmrt/report.hpp"
#include "sdmrt/rerank.hpp"
#include "sdmrt/text_io.hpp"

namespace fs = std::filesystem;
using namespace sdmrt;

namespace {

constexpr const char* kOutputRootEnv = "SDMRT_OUTPUT_ROOT";

// Every PipelineConfig key as a --flag; explicit flags override --config.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key = value configuration file")
        ->check(CLI::ExistingFile);
    for (const auto& key : PipelineConfig::keys()) {
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app->add_option("--" + flag, values[key], "config key " + key);
    }
  }

  KeyValues collect(CLI::App* app) const {
    KeyValues kv;
    if (!config_file.empty()) kv = load_key_values(config_file);
    for (const auto& [key, value] : values) {
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (app->count("--" + flag)) kv[key] = value;
    }
    return kv;
  }

  PipelineConfig build(CLI::App* app, const KeyValues& extra = {}) const {
    auto kv = collect(app);
    for (const auto& [k, v] : extra)
      if (!kv.count(k)) kv[k] = v;
    auto config = PipelineConfig::from_key_values(kv);
    config.output_dir = rooted(config.output_dir).string();
    return config;
  }

  static fs::path rooted(const fs::path& path) {
    const char* root = std::getenv(kOutputRootEnv);
    if (!root || !*root || path.empty() || path.is_absolute()) return path;
    return fs::path(root) / path;
  }
};

void print_report(const ExperimentReport& report) {
  std::cout << format_metrics_table(report.rows) << '\n'
            << format_metrics_table(aggregate_median(report.rows));
}

int run_app(int argc, char** argv) {
  CLI::App app{"Distillation, self-distillation mixup and rerank/fine-tune lab"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus and its splits");
  ConfigFlags gen_flags;
  gen_flags.attach(gen);
  std::string gen_out;
  gen->add_option("--out", gen_out, "output directory (default: output_dir)");

  // train
  auto* train = app.add_subcommand("train", "train a model on a corpus");
  ConfigFlags train_flags;
  train_flags.attach(train);
  std::string train_kind = "AT", train_corpus, train_out;
  train->add_option("--kind", train_kind, "AT, NAT or IterNAT");
  train->add_option("--corpus", train_corpus, "training corpus (TSV)")->required();
  train->add_option("--out", train_out, "model file")->required();

  // distill
  auto* distill = app.add_subcommand("distill", "sequence-level distillation with a model");
  std::string dis_model, dis_corpus, dis_out, dis_dump;
  std::size_t dis_k = 5;
  distill->add_option("--model", dis_model, "teacher model file")->required();
  distill->add_option("--corpus", dis_corpus, "source corpus (TSV)")->required();
  distill->add_option("--out", dis_out, "distilled corpus (TSV)")->required();
  distill->add_option("--k", dis_k, "k-best size");
  distill->add_option("--dump", dis_dump, "candidate dump (TSV)");

  // rerank-distill
  auto* rdis = app.add_subcommand("rerank-distill", "self-distillation through a reranker");
  std::string rd_model, rd_corpus, rd_out, rd_dump, rd_variant = "align", rd_original, rd_load,
      rd_save;
  std::size_t rd_k = 5;
  rdis->add_option("--model", rd_model, "student model file")->required();
  rdis->add_option("--corpus", rd_corpus, "source corpus (TSV)")->required();
  rdis->add_option("--out", rd_out, "reranked self-distilled corpus (TSV)")->required();
  rdis->add_option("--reranker", rd_variant, "lm or align");
  rdis->add_option("--original", rd_original, "original data the reranker is trained on");
  rdis->add_option("--reranker-model", rd_load, "load a saved reranker instead of training");
  rdis->add_option("--save-reranker", rd_save, "write the trained reranker");
  rdis->add_option("--k", rd_k, "k-best size");
  rdis->add_option("--dump", rd_dump, "candidate dump (TSV)");

  // filter
  auto* filter = app.add_subcommand("filter", "keep distilled pairs with TER below tau");
  std::string f_raw, f_dist, f_out;
  double f_tau = 0.8;
  filter->add_option("--raw", f_raw, "original corpus (TSV)")->required();
  filter->add_option("--distilled", f_dist, "distilled corpus (TSV)")->required();
  filter->add_option("--tau", f_tau, "TER threshold");
  filter->add_option("--out", f_out, "filtered corpus (TSV)")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a model or hypothesis file");
  std::string ev_test, ev_model, ev_hyp, ev_lm, ev_system = "system", ev_dataset = "test", ev_out;
  evaluate->add_option("--test", ev_test, "reference corpus (TSV)")->required();
  auto* ev_model_opt = evaluate->add_option("--model", ev_model, "model file to decode with");
  evaluate->add_option("--hyp", ev_hyp, "hypotheses, one per line")->excludes(ev_model_opt);
  evaluate->add_option("--lm-corpus", ev_lm, "corpus whose targets train the PPL model");
  evaluate->add_option("--system", ev_system, "system label");
  evaluate->add_option("--dataset", ev_dataset, "dataset label");
  evaluate->add_option("--out", ev_out, "report TSV");

  // run / sweep / ablate
  auto* run = app.add_subcommand("run", "run a training strategy over all seeds");
  ConfigFlags run_flags;
  run_flags.attach(run);

  auto* sweep = app.add_subcommand("sweep", "decode an IterNAT student at several step counts");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep);

  auto* ablate = app.add_subcommand("ablate", "SDMRT variants along one axis");
  ConfigFlags ablate_flags;
  ablate_flags.attach(ablate);
  std::string axis;
  ablate->add_option("--axis", axis, "reranker or filter")->required();

  // report
  auto* report = app.add_subcommand("report", "print report TSVs as tables with medians");
  std::vector<std::string> report_files;
  report->add_option("files", report_files, "report TSV files")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    auto config = gen_flags.build(gen);
    fs::path out = gen_out.empty() ? fs::path(config.output_dir) : ConfigFlags::rooted(gen_out);
    auto g = config.generator;
    g.seed = config.seeds.front();
    auto data = generate_synthetic(g);
    auto parts = split(data.corpus, config.split, g.seed);
    fs::create_directories(out);
    save_corpus(data.corpus, out / "corpus.tsv");
    save_corpus(parts.train, out / "train.tsv");
    save_corpus(parts.valid, out / "valid.tsv");
    save_corpus(parts.test, out / "test.tsv");
    write_file_atomic(out / "task.txt", data.task.serialize());
    std::cout << "wrote " << data.corpus.size() << " pairs (" << parts.train.size() << "/"
              << parts.valid.size() << "/" << parts.test.size() << ") to " << out.string() << '\n';
  } else if (*train) {
    auto config = train_flags.build(train);
    auto corpus = load_corpus(train_corpus);
    auto model = TranslationModel::train(parse_model_kind(train_kind), corpus, config.student_hyper());
    model.save(ConfigFlags::rooted(train_out));
    std::cout << "trained " << to_string(model.kind()) << " on " << corpus.size() << " pairs\n";
  } else if (*distill) {
    auto model = TranslationModel::load(dis_model);
    auto corpus = load_corpus(dis_corpus, model.source_vocab(), model.target_vocab());
    std::vector<CandidateList> lists;
    auto out = distill_corpus(model, corpus, DistillSpec{dis_k, nullptr}, &lists);
    save_corpus(out, ConfigFlags::rooted(dis_out));
    if (!dis_dump.empty())
      write_file_atomic(ConfigFlags::rooted(dis_dump),
                        format_candidate_dump(lists, *model.source_vocab(), *model.target_vocab()));
    std::cout << "distilled " << out.size() << " pairs\n";
  } else if (*rdis) {
    auto model = TranslationModel::load(rd_model);
    auto corpus = load_corpus(rd_corpus, model.source_vocab(), model.target_vocab());
    auto reranker = [&] {
      if (!rd_load.empty()) return Reranker::load(rd_load);
      if (rd_original.empty()) throw Error("rerank-distill needs --original or --reranker-model");
      auto original = load_corpus(rd_original, model.source_vocab(), model.target_vocab());
      return Reranker::train(parse_rerank_variant(rd_variant), original, 2,
                             model.hyper().lm_discount, model.hyper().em_iterations);
    }();
    if (!rd_save.empty()) reranker.save(ConfigFlags::rooted(rd_save));
    std::vector<CandidateList> lists;
    auto out = rerank_distill(model, reranker, corpus, rd_k, &lists);
    save_corpus(out, ConfigFlags::rooted(rd_out));
    if (!rd_dump.empty())
      write_file_atomic(ConfigFlags::rooted(rd_dump),
                        format_candidate_dump(lists, *model.source_vocab(), *model.target_vocab()));
    std::cout << "rerank-distilled " << out.size() << " pairs with the "
              << to_string(reranker.variant()) << " reranker\n";
  } else if (*filter) {
    auto raw = load_corpus(f_raw);
    auto dis = load_corpus(f_dist, raw.source_vocab(), raw.target_vocab());
    auto kept = filter_by_ter(raw, dis, f_tau);
    save_corpus(kept, ConfigFlags::rooted(f_out));
    std::cout << "kept " << kept.size() << " of " << dis.size() << " pairs (retention "
              << format_fixed(dis.empty() ? 0.0 : double(kept.size()) / double(dis.size()), 4)
              << ")\n";
  } else if (*evaluate) {
    auto test = load_corpus(ev_test);
    std::vector<Sentence> outputs;
    VocabPtr tgt = test.target_vocab();
    if (!ev_model.empty()) {
      auto model = TranslationModel::load(ev_model);
      test = remap(test, model.source_vocab(), model.target_vocab());
      for (const auto& pair : test) outputs.push_back(decode(model, pair.source));
    } else if (!ev_hyp.empty()) {
      auto text = read_file(ev_hyp);
      for (auto line : split_on(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        outputs.push_back(parse_sentence(*test.target_vocab(), line));
      }
    } else {
      throw Error("evaluate needs --model or --hyp");
    }
    if (outputs.size() != test.size())
      throw Error("evaluate: " + std::to_string(outputs.size()) + " hypotheses for " +
                  std::to_string(test.size()) + " references");
    auto lm_source = ev_lm.empty() ? test
                                   : load_corpus(ev_lm, test.source_vocab(), test.target_vocab());
    auto lm = train_lm(lm_source);
    auto row = evaluate_system(outputs, test, lm);
    row.system = ev_system;
    row.dataset = ev_dataset;
    std::vector<MetricsRow> rows{row};
    if (!ev_out.empty()) write_file_atomic(ConfigFlags::rooted(ev_out), format_metrics_tsv(rows));
    std::cout << format_metrics_table(rows);
  } else if (*run) {
    auto config = run_flags.build(run);
    print_report(run_experiment(config));
  } else if (*sweep) {
    auto config = sweep_flags.build(sweep, {{"student_kind", "IterNAT"}});
    print_report(iteration_sweep(config, config.sweep_steps));
  } else if (*ablate) {
    auto config = ablate_flags.build(ablate);
    print_report(run_ablation(config, parse_ablation_axis(axis)));
  } else if (*report) {
    std::vector<MetricsRow> rows;
    for (const auto& f : report_files) {
      auto part = parse_metrics_tsv(read_file(f), f);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    std::cout << format_metrics_table(rows) << '\n' << format_metrics_table(aggregate_median(rows));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sdmrt: error: %s\n", e.what());
    return 1;
  }
}
