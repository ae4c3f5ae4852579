// Subcommand front-end. Every command is deterministic under its seed,
// writes artifacts atomically, and drops a manifest with input hashes next
// to its outputs. Errors come out as a single machine-parsable line:
// "error: <code>: <message>".
//
// Exit codes: 0 success, 1 runtime failure, 2 usage, 3 missing input file.
#pragma once

#include <array>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mindgauge/analysis.hpp"
#include "mindgauge/behave.hpp"
#include "mindgauge/checkpoint.hpp"
#include "mindgauge/classifier.hpp"
#include "mindgauge/common.hpp"
#include "mindgauge/config.hpp"
#include "mindgauge/corpus.hpp"
#include "mindgauge/eval.hpp"
#include "mindgauge/manifest.hpp"
#include "mindgauge/synthetic.hpp"
#include "mindgauge/textproc.hpp"
#include "mindgauge/train.hpp"

#include "CLI11.hpp"

namespace mindgauge {

namespace cli {

namespace fs = std::filesystem;

inline void require_input(const std::string& path) {
  if (!fs::exists(path)) throw Error("missing_input", path);
}

// MINDGAUGE_DATA_DIR overrides where bundled data files (stop words,
// synonyms) are looked up by default.
inline fs::path data_root() {
  const char* env = std::getenv("MINDGAUGE_DATA_DIR");
  return env && *env ? fs::path(env) : fs::path("data");
}

inline fs::path sibling(const fs::path& reference, const std::string& name) {
  return reference.has_parent_path() ? reference.parent_path() / name
                                     : fs::path(name);
}

struct IngestOptions {
  std::string in, out;
  std::uint64_t seed = 42;
};

inline int run_ingest(const IngestOptions& opt, std::ostream& out) {
  require_input(opt.in);
  const auto raws = load_raw_jsonl(opt.in);
  const IngestResult result = ingest_posts(raws);
  write_file_atomic(opt.out, curated_to_jsonl(result.curated));
  const fs::path rejects_path = sibling(opt.out, "rejects.jsonl");
  write_file_atomic(rejects_path, rejects_to_jsonl(result.rejects));

  RunManifest manifest;
  manifest.command = "ingest";
  manifest.seed = opt.seed;
  manifest.add_input(opt.in);
  manifest.add_output(opt.out);
  manifest.add_output(rejects_path.string());
  save_manifest(sibling(opt.out, "ingest.manifest.json").string(), manifest);

  out << "ingest: " << result.curated.size() << " accepted, "
      << result.rejects.size() << " rejected -> " << opt.out << "\n";
  return 0;
}

struct StatsOptions {
  std::string in, out_dir;
};

inline int run_stats(const StatsOptions& opt, std::ostream& out) {
  require_input(opt.in);
  const auto posts = load_curated_jsonl(opt.in);
  const RootFormSet roots = RootFormSet::standard();

  const fs::path dir(opt.out_dir);
  const fs::path stats_path = dir / "stats.csv";
  const fs::path cooc_path = dir / "cooccurrence.csv";
  write_file_atomic(stats_path, stats_to_csv(corpus_stats(posts)));
  write_file_atomic(cooc_path,
                    cooccurrence_to_csv(keyword_cooccurrence(posts, roots)));

  RunManifest manifest;
  manifest.command = "stats";
  manifest.add_input(opt.in);
  manifest.add_output(stats_path.string());
  manifest.add_output(cooc_path.string());
  save_manifest((dir / "stats.manifest.json").string(), manifest);

  out << "stats: " << posts.size() << " posts -> " << stats_path.string()
      << ", " << cooc_path.string() << "\n";
  return 0;
}

struct SplitOptions {
  std::string in, out;
  std::uint64_t seed = 42;
  std::string ratios = "0.8,0.1,0.1";
};

inline std::array<double, 3> parse_ratios(const std::string& text) {
  const auto parts = split_on(text, ',');
  if (parts.size() != 3) {
    throw Error("config", "ratios must be three comma-separated numbers");
  }
  std::array<double, 3> ratios{};
  for (size_t i = 0; i < 3; ++i) {
    try {
      size_t used = 0;
      ratios[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw Error("config", "bad ratio: " + parts[i]);
    }
  }
  return ratios;
}

inline int run_split(const SplitOptions& opt, std::ostream& out) {
  require_input(opt.in);
  const auto posts = load_curated_jsonl(opt.in);
  const DatasetSplit split = split_dataset(posts, parse_ratios(opt.ratios), opt.seed);
  write_file_atomic(opt.out, split_to_json(split).dump(2) + "\n");

  RunManifest manifest;
  manifest.command = "split";
  manifest.seed = opt.seed;
  manifest.config["ratios"] = opt.ratios;
  manifest.add_input(opt.in);
  manifest.add_output(opt.out);
  save_manifest(sibling(opt.out, "split.manifest.json").string(), manifest);

  out << "split: train " << split.train.size() << ", val "
      << split.validation.size() << ", test " << split.test.size() << " -> "
      << opt.out << "\n";
  return 0;
}

struct TrainOptions {
  std::string config;  // optional path
  std::string in, split, out_dir;
  std::string model;       // optional override
  std::string input_kind;  // optional override
  std::int64_t seed = -1;  // optional override
};

// Tokenized documents the vocabulary should cover for this input kind.
inline std::vector<std::vector<std::string>> vocabulary_documents(
    const std::vector<CuratedPost>& posts, InputKind input_kind) {
  std::vector<std::vector<std::string>> docs;
  for (const CuratedPost& p : posts) {
    if (input_kind != InputKind::kTitles) docs.push_back(tokenize(p.body));
    if (input_kind != InputKind::kPosts) docs.push_back(tokenize(p.title));
  }
  return docs;
}

inline std::vector<EncodedSample> encode_posts(
    const std::vector<CuratedPost>& posts, InputKind input_kind,
    const ModelConfig& cfg, const Vocabulary& vocab) {
  std::vector<EncodedSample> samples;
  samples.reserve(posts.size());
  for (const CuratedPost& p : posts) {
    samples.push_back(encode_post(p, input_kind, cfg, vocab));
  }
  return samples;
}

inline int run_train(const TrainOptions& opt, std::ostream& out) {
  require_input(opt.in);
  require_input(opt.split);
  FlatConfig flat;
  if (!opt.config.empty()) {
    require_input(opt.config);
    flat = load_flat_config(opt.config);
  }
  if (!opt.model.empty()) flat.values["model"] = opt.model;
  if (!opt.input_kind.empty()) flat.values["input_kind"] = opt.input_kind;
  if (opt.seed >= 0) flat.values["seed"] = std::to_string(opt.seed);
  TrainSpec spec = resolve_train_spec(flat);

  const auto posts = load_curated_jsonl(opt.in);
  const DatasetSplit split =
      split_from_json(nlohmann::json::parse(read_file(opt.split)), posts);

  const bool markers = spec.model.kind == ModelKind::kTransformer ||
                       spec.input_kind == InputKind::kPostsTitles;
  const Vocabulary vocab =
      build_vocabulary(vocabulary_documents(split.train, spec.input_kind),
                       spec.min_frequency, markers);
  spec.model.vocab_size = vocab.size();
  spec.model.validate();

  const auto train_samples =
      encode_posts(split.train, spec.input_kind, spec.model, vocab);
  const auto val_samples =
      encode_posts(split.validation, spec.input_kind, spec.model, vocab);

  ParameterSet params =
      init_params(spec.model, derive_seed(spec.train.seed, "init"));
  const TrainResult result = train_model(
      train_samples, val_samples, spec.model, spec.train, params,
      [&](const EpochRecord& rec) {
        char line[96];
        std::snprintf(line, sizeof(line),
                      "epoch %d  train_loss %.4f  val_acc %.4f\n", rec.epoch,
                      rec.train_loss, rec.val_accuracy);
        out << line;
      });

  const fs::path dir(opt.out_dir);
  write_file_atomic(dir / "history.csv", history_to_csv(result.history));
  write_file_atomic(dir / "vocab.json", vocab.to_json().dump());
  Checkpoint ckpt;
  ckpt.config = spec.model;
  ckpt.input_kind = spec.input_kind;
  ckpt.vocab = vocab;
  ckpt.params = std::move(params);
  save_checkpoint((dir / "checkpoint.json").string(), ckpt);

  RunManifest manifest;
  manifest.command = "train";
  manifest.seed = spec.train.seed;
  manifest.config["model"] = model_kind_name(spec.model.kind);
  manifest.config["input_kind"] = input_kind_name(spec.input_kind);
  manifest.config["learning_rate"] = spec.train.learning_rate;
  manifest.config["num_epochs"] = spec.train.num_epochs;
  manifest.config["batch_size"] = spec.train.batch_size;
  manifest.config["clip_norm"] = spec.train.clip_norm;
  manifest.config["max_len"] = spec.model.max_len;
  manifest.config["vocab_size"] = spec.model.vocab_size;
  manifest.config["status"] = result.status;
  manifest.config["best_epoch"] = result.best_epoch;
  manifest.config["best_val_accuracy"] = result.best_val_accuracy;
  manifest.add_input(opt.in);
  manifest.add_input(opt.split);
  if (!opt.config.empty()) manifest.add_input(opt.config);
  manifest.add_output((dir / "history.csv").string());
  manifest.add_output((dir / "vocab.json").string());
  manifest.add_output((dir / "checkpoint.json").string());
  save_manifest((dir / "train.manifest.json").string(), manifest);

  if (result.status != "ok") {
    throw Error("diverged", "training diverged; best checkpoint retained at " +
                                (dir / "checkpoint.json").string());
  }
  out << "train: best epoch " << result.best_epoch << ", val_acc "
      << format_fixed(result.best_val_accuracy, 4) << " -> "
      << (dir / "checkpoint.json").string() << "\n";
  return 0;
}

struct EvalOptions {
  std::string checkpoint, in, split, out_dir;
  std::string on = "test";
};

inline const std::vector<CuratedPost>& pick_subset(const DatasetSplit& split,
                                                   const std::string& name) {
  if (name == "train") return split.train;
  if (name == "val" || name == "validation") return split.validation;
  if (name == "test") return split.test;
  throw Error("config", "unknown split name: " + name);
}

inline int run_eval(const EvalOptions& opt, std::ostream& out) {
  require_input(opt.checkpoint);
  require_input(opt.in);
  require_input(opt.split);
  const Checkpoint ckpt = load_checkpoint(opt.checkpoint);
  const auto posts = load_curated_jsonl(opt.in);
  const DatasetSplit split =
      split_from_json(nlohmann::json::parse(read_file(opt.split)), posts);
  const auto& subset = pick_subset(split, opt.on);
  if (subset.empty()) throw Error("empty", "split subset is empty: " + opt.on);

  std::vector<Label> truth;
  truth.reserve(subset.size());
  for (const CuratedPost& p : subset) truth.push_back(p.label);
  const auto samples =
      encode_posts(subset, ckpt.input_kind, ckpt.config, ckpt.vocab);
  const auto predictions = predict_all(samples, ckpt.config, ckpt.params);
  const ConfusionMatrix cm = build_confusion(truth, predictions);
  const ClassReport report = class_report(cm);

  nlohmann::ordered_json j;
  j["model"] = model_kind_name(ckpt.config.kind);
  j["input_kind"] = input_kind_name(ckpt.input_kind);
  j["split"] = opt.on;
  j["report"] = report_to_json(report);

  const fs::path dir(opt.out_dir);
  write_file_atomic(dir / "report.json", j.dump(2) + "\n");
  write_file_atomic(dir / "confusion.csv", confusion_to_csv(cm));
  write_file_atomic(dir / "summary.txt", report_summary(report));

  RunManifest manifest;
  manifest.command = "eval";
  manifest.config["split"] = opt.on;
  manifest.add_input(opt.checkpoint);
  manifest.add_input(opt.in);
  manifest.add_input(opt.split);
  manifest.add_output((dir / "report.json").string());
  manifest.add_output((dir / "confusion.csv").string());
  manifest.add_output((dir / "summary.txt").string());
  save_manifest((dir / "eval.manifest.json").string(), manifest);

  out << report_summary(report);
  return 0;
}

struct BehaveOptions {
  std::string checkpoint, in, split, out_dir;
  std::string modes = "synonym,remove_label,replace_generic,replace_random";
  std::string fractions = "0.1,0.5,1.0";
  std::string stopwords, synonyms;  // default: data root
  std::uint64_t seed = 42;
  bool dump = false;
};

inline int run_behave(const BehaveOptions& opt, std::ostream& out) {
  require_input(opt.checkpoint);
  require_input(opt.in);
  require_input(opt.split);
  const std::string stopwords_path =
      opt.stopwords.empty() ? (data_root() / "stopwords.txt").string()
                            : opt.stopwords;
  const std::string synonyms_path =
      opt.synonyms.empty() ? (data_root() / "synonyms.tsv").string()
                           : opt.synonyms;
  require_input(stopwords_path);
  require_input(synonyms_path);

  const Checkpoint ckpt = load_checkpoint(opt.checkpoint);
  const auto posts = load_curated_jsonl(opt.in);
  const DatasetSplit split =
      split_from_json(nlohmann::json::parse(read_file(opt.split)), posts);
  if (split.test.empty()) throw Error("empty", "test split is empty");

  std::vector<PerturbationMode> modes;
  for (const std::string& name : split_on(opt.modes, ',')) {
    if (!name.empty()) modes.push_back(parse_perturbation_mode(name));
  }
  std::vector<double> fractions;
  for (const std::string& text : split_on(opt.fractions, ',')) {
    if (text.empty()) continue;
    try {
      size_t used = 0;
      fractions.push_back(std::stod(text, &used));
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw Error("config", "bad fraction: " + text);
    }
  }

  PerturbationConfig pcfg;
  pcfg.seed = opt.seed;
  const StopWordList stopwords = StopWordList::load(stopwords_path);
  const SynonymLexicon lexicon = SynonymLexicon::load(synonyms_path);
  const RootFormSet roots = RootFormSet::standard();

  const fs::path dir(opt.out_dir);
  PerturbedSink sink;
  if (opt.dump) {
    sink = [&](const std::string& mode, double fraction,
               const std::vector<CuratedPost>& perturbed) {
      char name[80];
      std::snprintf(name, sizeof(name), "perturbed_%s_%03d.jsonl", mode.c_str(),
                    static_cast<int>(fraction * 100 + 0.5));
      write_file_atomic(dir / "perturbed" / name, curated_to_jsonl(perturbed));
    };
  }

  const BehaviorReport report =
      run_suite(split.test, ckpt.config, ckpt.params, ckpt.vocab,
                ckpt.input_kind, modes, fractions, pcfg, lexicon, stopwords,
                roots, sink);
  const std::string csv = behavior_report_to_csv(report);
  write_file_atomic(dir / "behavior_report.csv", csv);

  RunManifest manifest;
  manifest.command = "behave";
  manifest.seed = opt.seed;
  manifest.config["modes"] = opt.modes;
  manifest.config["fractions"] = opt.fractions;
  manifest.add_input(opt.checkpoint);
  manifest.add_input(opt.in);
  manifest.add_input(opt.split);
  manifest.add_input(stopwords_path);
  manifest.add_input(synonyms_path);
  manifest.add_output((dir / "behavior_report.csv").string());
  save_manifest((dir / "behave.manifest.json").string(), manifest);

  out << csv;
  return 0;
}

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out;  // optional file
};

inline int run_report(const ReportOptions& opt, std::ostream& out) {
  std::vector<TaggedReport> reports;
  for (const std::string& path : opt.inputs) {
    require_input(path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw Error("format", path + ": " + e.what());
    }
    TaggedReport tagged;
    tagged.model = j.at("model").get<std::string>();
    tagged.input_kind = j.at("input_kind").get<std::string>();
    tagged.report = report_from_json(j.at("report"));
    reports.push_back(std::move(tagged));
  }
  const std::string table = aggregate_report(reports);
  if (!opt.out.empty()) write_file_atomic(opt.out, table);
  out << table;
  return 0;
}

struct SyntheticOptions {
  std::string out;
  int docs_per_class = 100;
  std::uint64_t seed = 7;
};

// Extra utility command: writes the planted-keyword corpus as a raw dump so
// the whole pipeline can be exercised without real data.
inline int run_synthetic(const SyntheticOptions& opt, std::ostream& out) {
  SyntheticConfig cfg;
  cfg.docs_per_class = opt.docs_per_class;
  cfg.seed = opt.seed;
  const auto raws = synthetic_raw_dump(cfg);
  std::string content;
  for (const RawPost& raw : raws) {
    nlohmann::ordered_json j;
    j["id"] = raw.id;
    j["subreddit"] = raw.subreddit;
    j["title"] = raw.title;
    j["selftext"] = raw.body;
    j["ups"] = raw.upvotes;
    content += j.dump();
    content += '\n';
  }
  write_file_atomic(opt.out, content);
  out << "synthetic: " << raws.size() << " posts -> " << opt.out << "\n";
  return 0;
}

}  // namespace cli

// In-process entry point; main() is a thin wrapper around this.
inline int dispatch(const std::vector<std::string>& args,
                    std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"mindgauge: multi-class text classification pipeline with "
               "behavioral tests"};
  app.require_subcommand(1);

  cli::IngestOptions ingest_opt;
  CLI::App* ingest = app.add_subcommand("ingest", "curate a raw JSONL dump");
  ingest->add_option("--in", ingest_opt.in, "raw JSONL dump")->required();
  ingest->add_option("--out", ingest_opt.out, "curated JSONL path")->required();

  cli::StatsOptions stats_opt;
  CLI::App* stats = app.add_subcommand("stats", "corpus statistics and keyword co-occurrence");
  stats->add_option("--in", stats_opt.in, "curated JSONL")->required();
  stats->add_option("--out", stats_opt.out_dir, "output directory")->required();

  cli::SplitOptions split_opt;
  CLI::App* split = app.add_subcommand("split", "stratified train/val/test split");
  split->add_option("--in", split_opt.in, "curated JSONL")->required();
  split->add_option("--out", split_opt.out, "split JSON path")->required();
  split->add_option("--seed", split_opt.seed, "split seed");
  split->add_option("--ratios", split_opt.ratios, "train,val,test ratios");

  cli::TrainOptions train_opt;
  CLI::App* train = app.add_subcommand("train", "train a classifier");
  train->add_option("--config", train_opt.config, "flat key = value config file");
  train->add_option("--in", train_opt.in, "curated JSONL")->required();
  train->add_option("--split", train_opt.split, "split JSON")->required();
  train->add_option("--out", train_opt.out_dir, "output directory")->required();
  train->add_option("--model", train_opt.model, "lstm | transformer");
  train->add_option("--input-kind", train_opt.input_kind,
                    "posts | titles | posts+titles");
  train->add_option("--seed", train_opt.seed, "seed override");

  cli::EvalOptions eval_opt;
  CLI::App* evalc = app.add_subcommand("eval", "evaluate a checkpoint");
  evalc->add_option("--checkpoint", eval_opt.checkpoint, "checkpoint JSON")->required();
  evalc->add_option("--in", eval_opt.in, "curated JSONL")->required();
  evalc->add_option("--split", eval_opt.split, "split JSON")->required();
  evalc->add_option("--out", eval_opt.out_dir, "output directory")->required();
  evalc->add_option("--on", eval_opt.on, "train | val | test (default test)");

  cli::BehaveOptions behave_opt;
  CLI::App* behave = app.add_subcommand("behave", "behavioral test suite");
  behave->add_option("--checkpoint", behave_opt.checkpoint, "checkpoint JSON")->required();
  behave->add_option("--in", behave_opt.in, "curated JSONL")->required();
  behave->add_option("--split", behave_opt.split, "split JSON")->required();
  behave->add_option("--out", behave_opt.out_dir, "output directory")->required();
  behave->add_option("--modes", behave_opt.modes, "comma-separated modes");
  behave->add_option("--fractions", behave_opt.fractions, "comma-separated fractions");
  behave->add_option("--stopwords", behave_opt.stopwords, "stop-word list path");
  behave->add_option("--synonyms", behave_opt.synonyms, "synonym TSV path");
  behave->add_option("--seed", behave_opt.seed, "perturbation seed");
  behave->add_flag("--dump", behave_opt.dump, "dump perturbed corpora");

  cli::ReportOptions report_opt;
  CLI::App* report = app.add_subcommand("report", "model comparison grid from eval reports");
  report->add_option("--in", report_opt.inputs, "report.json paths")->required();
  report->add_option("--out", report_opt.out, "optional output file");

  cli::SyntheticOptions synth_opt;
  CLI::App* synth = app.add_subcommand("synthetic", "generate a planted-keyword raw dump");
  synth->add_option("--out", synth_opt.out, "raw JSONL path")->required();
  synth->add_option("--docs-per-class", synth_opt.docs_per_class, "documents per class");
  synth->add_option("--seed", synth_opt.seed, "generator seed");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mindgauge");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    err << app.help();
    return 2;
  }

  try {
    if (app.got_subcommand(ingest)) return cli::run_ingest(ingest_opt, out);
    if (app.got_subcommand(stats)) return cli::run_stats(stats_opt, out);
    if (app.got_subcommand(split)) return cli::run_split(split_opt, out);
    if (app.got_subcommand(train)) return cli::run_train(train_opt, out);
    if (app.got_subcommand(evalc)) return cli::run_eval(eval_opt, out);
    if (app.got_subcommand(behave)) return cli::run_behave(behave_opt, out);
    if (app.got_subcommand(report)) return cli::run_report(report_opt, out);
    if (app.got_subcommand(synth)) return cli::run_synthetic(synth_opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == "missing_input" ? 3 : 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  err << "error: usage: no subcommand\n";
  return 2;
}

}  // namespace mindgauge
