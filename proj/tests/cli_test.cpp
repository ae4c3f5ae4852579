// Drives the subcommand front-end in-process through dispatch(): exit
// codes, artifact layout, and rerun determinism.
#include "mindgauge/cli.hpp"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace mindgauge {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

size_t count_lines(const std::string& path) {
  return split_lines(read_file(path)).size();
}

std::string fixture_path() {
  return (fs::path(MINDGAUGE_SOURCE_DIR) / "data" / "fixtures" / "raw_60.jsonl")
      .string();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mindgauge_cli_" + std::string(
                ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, HelpPrintsTheSubcommandList) {
  const RunResult r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ingest"), std::string::npos);
  EXPECT_NE(r.out.find("behave"), std::string::npos);
  EXPECT_NE(r.out.find("synthetic"), std::string::npos);
}

TEST_F(CliTest, UsageProblemsExitWithTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const RunResult missing_opts = run({"ingest"});
  EXPECT_EQ(missing_opts.code, 2);
  EXPECT_NE(missing_opts.err.find("usage"), std::string::npos);
}

TEST_F(CliTest, MissingInputFilesExitWithThree) {
  const RunResult r =
      run({"ingest", "--in", path("nope.jsonl"), "--out", path("c.jsonl")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("missing_input"), std::string::npos);
}

TEST_F(CliTest, IngestCuratesTheBundledFixture) {
  const std::string curated = path("curated.jsonl");
  const RunResult r = run({"ingest", "--in", fixture_path(), "--out", curated});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("45 accepted, 15 rejected"), std::string::npos) << r.out;
  EXPECT_EQ(count_lines(curated), 45u);
  EXPECT_EQ(count_lines(path("rejects.jsonl")), 15u);
  EXPECT_TRUE(fs::exists(path("ingest.manifest.json")));

  // Reruns are byte-identical.
  const std::string first_curated = read_file(curated);
  const std::string first_rejects = read_file(path("rejects.jsonl"));
  ASSERT_EQ(run({"ingest", "--in", fixture_path(), "--out", curated}).code, 0);
  EXPECT_EQ(read_file(curated), first_curated);
  EXPECT_EQ(read_file(path("rejects.jsonl")), first_rejects);
}

TEST_F(CliTest, SyntheticDumpFeedsIngestWithoutRejects) {
  const RunResult gen = run({"synthetic", "--out", path("raw.jsonl"),
                             "--docs-per-class", "3", "--seed", "11"});
  ASSERT_EQ(gen.code, 0) << gen.err;
  EXPECT_NE(gen.out.find("18 posts"), std::string::npos);
  EXPECT_EQ(count_lines(path("raw.jsonl")), 18u);

  const RunResult ing =
      run({"ingest", "--in", path("raw.jsonl"), "--out", path("curated.jsonl")});
  ASSERT_EQ(ing.code, 0) << ing.err;
  EXPECT_NE(ing.out.find("18 accepted, 0 rejected"), std::string::npos) << ing.out;
}

TEST_F(CliTest, PipelineProducesEvaluableArtifacts) {
  ASSERT_EQ(run({"synthetic", "--out", path("raw.jsonl"), "--docs-per-class",
                 "12", "--seed", "7"})
                .code,
            0);
  ASSERT_EQ(run({"ingest", "--in", path("raw.jsonl"), "--out",
                 path("curated.jsonl")})
                .code,
            0);

  const RunResult split = run({"split", "--in", path("curated.jsonl"), "--out",
                               path("split.json"), "--seed", "42"});
  ASSERT_EQ(split.code, 0) << split.err;
  EXPECT_NE(split.out.find("split: train "), std::string::npos);

  write_file_atomic(path("train.conf"),
                    "model = lstm\n"
                    "input_kind = posts\n"
                    "embedding_dim = 16\n"
                    "hidden_dim = 16\n"
                    "num_layers = 1\n"
                    "dropout_prob = 0.0\n"
                    "max_len = 24\n"
                    "learning_rate = 0.01\n"
                    "num_epochs = 3\n"
                    "batch_size = 8\n"
                    "min_frequency = 1\n");
  const RunResult train =
      run({"train", "--config", path("train.conf"), "--in", path("curated.jsonl"),
           "--split", path("split.json"), "--out", dir_.string()});
  ASSERT_EQ(train.code, 0) << train.err;
  EXPECT_NE(train.out.find("epoch 1"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("checkpoint.json")));
  EXPECT_TRUE(fs::exists(path("vocab.json")));
  EXPECT_EQ(count_lines(path("history.csv")), 4u);  // header + 3 epochs

  const fs::path eval_dir = dir_ / "eval";
  fs::create_directories(eval_dir);
  const RunResult eval = run({"eval", "--checkpoint", path("checkpoint.json"),
                              "--in", path("curated.jsonl"), "--split",
                              path("split.json"), "--out", eval_dir.string()});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_NE(eval.out.find("accuracy"), std::string::npos);
  EXPECT_TRUE(fs::exists(eval_dir / "report.json"));
  EXPECT_TRUE(fs::exists(eval_dir / "confusion.csv"));
  EXPECT_TRUE(fs::exists(eval_dir / "summary.txt"));

  const RunResult bad_subset =
      run({"eval", "--checkpoint", path("checkpoint.json"), "--in",
           path("curated.jsonl"), "--split", path("split.json"), "--out",
           eval_dir.string(), "--on", "bogus"});
  EXPECT_EQ(bad_subset.code, 1);
  EXPECT_NE(bad_subset.err.find("config"), std::string::npos);

  write_file_atomic(path("stopwords.txt"), synthetic_stopwords_txt());
  write_file_atomic(path("synonyms.tsv"), synthetic_synonyms_tsv());
  const fs::path behave_dir = dir_ / "behave";
  fs::create_directories(behave_dir);
  const RunResult behave =
      run({"behave", "--checkpoint", path("checkpoint.json"), "--in",
           path("curated.jsonl"), "--split", path("split.json"), "--out",
           behave_dir.string(), "--modes", "remove_label", "--fractions", "1.0",
           "--stopwords", path("stopwords.txt"), "--synonyms",
           path("synonyms.tsv")});
  ASSERT_EQ(behave.code, 0) << behave.err;
  const std::string csv = read_file((behave_dir / "behavior_report.csv").string());
  EXPECT_EQ(behave.out, csv);
  const auto rows = split_lines(csv);
  ASSERT_EQ(rows.size(), 3u);  // header, clean, remove_label@1.0
  EXPECT_EQ(rows[0], "mode,input_kind,fraction,perturbed,precision,recall,f1,accuracy");
  EXPECT_EQ(rows[1].substr(0, 6), "clean,");
  EXPECT_EQ(rows[2].substr(0, 13), "remove_label,");

  const RunResult report =
      run({"report", "--in", (eval_dir / "report.json").string(), "--out",
           path("grid.txt")});
  ASSERT_EQ(report.code, 0) << report.err;
  EXPECT_NE(report.out.find("lstm"), std::string::npos);
  EXPECT_EQ(read_file(path("grid.txt")), report.out);
}

TEST_F(CliTest, TrainRejectsAnUnknownModelFamily) {
  ASSERT_EQ(run({"synthetic", "--out", path("raw.jsonl"), "--docs-per-class",
                 "5", "--seed", "3"})
                .code,
            0);
  ASSERT_EQ(run({"ingest", "--in", path("raw.jsonl"), "--out",
                 path("curated.jsonl")})
                .code,
            0);
  ASSERT_EQ(run({"split", "--in", path("curated.jsonl"), "--out",
                 path("split.json")})
                .code,
            0);
  const RunResult r = run({"train", "--in", path("curated.jsonl"), "--split",
                           path("split.json"), "--out", dir_.string(),
                           "--model", "cnn"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error: config"), std::string::npos) << r.err;
}

TEST_F(CliTest, SplitValidatesRatioSyntax) {
  ASSERT_EQ(run({"synthetic", "--out", path("raw.jsonl"), "--docs-per-class",
                 "2", "--seed", "3"})
                .code,
            0);
  ASSERT_EQ(run({"ingest", "--in", path("raw.jsonl"), "--out",
                 path("curated.jsonl")})
                .code,
            0);
  const RunResult two_parts = run({"split", "--in", path("curated.jsonl"),
                                   "--out", path("s.json"), "--ratios", "0.5,0.5"});
  EXPECT_EQ(two_parts.code, 1);
  EXPECT_NE(two_parts.err.find("error: config"), std::string::npos);
  const RunResult garbage = run({"split", "--in", path("curated.jsonl"), "--out",
                                 path("s.json"), "--ratios", "a,b,c"});
  EXPECT_EQ(garbage.code, 1);
}

TEST_F(CliTest, ReportRejectsMalformedJson) {
  write_file_atomic(path("broken.json"), "this is not json {\n");
  const RunResult r = run({"report", "--in", path("broken.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("format"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace mindgauge
