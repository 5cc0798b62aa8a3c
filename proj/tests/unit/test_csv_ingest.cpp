#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "multimax/csv.hpp"
#include "multimax/errors.hpp"
#include "multimax/ingest.hpp"

namespace multimax::ingest {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / fmt::format("multimax_{}_{}", info->test_suite_name(), info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir / name, std::ios::binary) << text;
    return dir / name;
  }

  fs::path dir;
};

TEST(Csv, ParsesQuotedFieldsAndCrLf) {
  const auto t = csv::parse("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\n3,\"multi\nline\"\n", "mem");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].fields[0], "x,1");
  EXPECT_EQ(t.rows[0].fields[1], "say \"hi\"");
  EXPECT_EQ(t.rows[1].fields[1], "multi\nline");
  EXPECT_EQ(t.rows[1].line, 4u);
  EXPECT_EQ(t.where(t.rows[1]), "mem:4");
}

TEST(Csv, RejectsRaggedAndUnterminated) {
  EXPECT_THROW(csv::parse("a,b\n1\n", "m"), ValidationError);
  EXPECT_THROW(csv::parse("a\n\"open\n", "m"), ValidationError);
  EXPECT_THROW(csv::parse("", "m"), ValidationError);
  EXPECT_THROW((void)csv::parse("a\n1\n", "m").column("b"), ValidationError);
}

TEST(Csv, FieldQuotingRoundTrips) {
  for (std::string v : {"plain", "with,comma", "quote\"inside", "new\nline"}) {
    const auto t = csv::parse("h\n" + csv::field(v) + "\n", "m");
    EXPECT_EQ(t.rows[0].fields[0], v);
  }
}

TEST_F(TempDir, LoadsLabelsAndPredictions) {
  const auto labels = write("labels.csv", "instance_id,label\na,yes\nb,no\nc,yes\n");
  const auto preds = write("preds.csv",
                           "run_id,instance_id,prediction\n"
                           "A,a,yes\nA,b,no\nA,c,yes\n"
                           "B,c,yes\nB,b,yes\nB,a,yes\n");
  const auto loaded = load_labels(labels, "yes");
  EXPECT_EQ(loaded.coding.unfavourable, "no");
  const auto runs = load_predictions(preds, loaded.labels, loaded.coding);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].id(), "A");
  EXPECT_EQ(runs[0].utility().str(), "3/3");
  EXPECT_EQ(runs[1].utility().str(), "2/3");
  EXPECT_EQ(runs[1].fairness(), runs[1].validation());
}

TEST_F(TempDir, RejectsDuplicateRowNamingTheLine) {
  const auto labels = write("labels.csv", "instance_id,label\na,1\nb,0\n");
  const auto preds = write("preds.csv", "run_id,instance_id,prediction\nA,a,1\nA,b,0\nA,a,0\n");
  const auto loaded = load_labels(labels, "1");
  try {
    (void)load_predictions(preds, loaded.labels, loaded.coding);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("preds.csv:4"), std::string::npos) << e.what();
  }
}

TEST_F(TempDir, RejectsUnknownMissingAndOutOfSet) {
  const auto labels = write("labels.csv", "instance_id,label\na,1\nb,0\n");
  const auto loaded = load_labels(labels, "1");
  EXPECT_THROW(load_predictions(write("p1.csv", "run_id,instance_id,prediction\nA,a,1\nA,z,0\n"),
                                loaded.labels, loaded.coding),
               ValidationError);
  EXPECT_THROW(load_predictions(write("p2.csv", "run_id,instance_id,prediction\nA,a,1\n"),
                                loaded.labels, loaded.coding),
               ValidationError);
  EXPECT_THROW(load_predictions(write("p3.csv", "run_id,instance_id,prediction\nA,a,1\nA,b,2\n"),
                                loaded.labels, loaded.coding),
               ValidationError);
  EXPECT_THROW(load_predictions(write("p4.csv", "run_id,instance,prediction\nA,a,1\n"),
                                loaded.labels, loaded.coding),
               ValidationError);
}

TEST_F(TempDir, LabelFileConstraints) {
  EXPECT_THROW(load_labels(write("l1.csv", "instance_id,label\na,1\nb,0\nc,2\n"), "1"), ValidationError);
  EXPECT_THROW(load_labels(write("l2.csv", "instance_id,label\na,1\nb,0\n"), "yes"), ValidationError);
  EXPECT_THROW(load_labels(write("l3.csv", "instance_id,label\na,1\na,0\n"), "1"), ValidationError);
  const auto single = load_labels(write("l4.csv", "instance_id,label\na,1\nb,1\n"), "1");
  EXPECT_EQ(single.coding.unfavourable, "0");
  EXPECT_THROW(load_labels(write("l5.csv", "instance_id,label\na,good\n"), "good"), ValidationError);
}

TEST_F(TempDir, SeparateFairnessFileBuildsItsOwnIndex) {
  const auto labels = write("labels.csv", "instance_id,label\na,1\nb,0\n");
  const auto preds = write("preds.csv", "run_id,instance_id,prediction\nA,a,1\nA,b,0\nB,a,1\nB,b,1\n");
  const auto fair = write("fair.csv",
                          "run_id,instance_id,prediction\nA,q,1\nA,p,0\nB,p,1\nB,q,1\n");
  const auto loaded = load_labels(labels, "1");
  const auto runs = load_predictions(preds, loaded.labels, loaded.coding, fair);
  EXPECT_EQ(runs[0].fairness().index().ids(), (std::vector<std::string>{"q", "p"}));
  EXPECT_EQ(runs[1].fairness()[1], 1);
  const auto missing = write("fair2.csv", "run_id,instance_id,prediction\nA,q,1\n");
  EXPECT_THROW(load_predictions(preds, loaded.labels, loaded.coding, missing), ValidationError);
}

TEST_F(TempDir, ManifestParsing) {
  write("labels.csv", "instance_id,label\na,1\nb,0\n");
  write("preds.csv", "run_id,instance_id,prediction\nA,a,1\nA,b,0\n");
  write("groups.csv", "instance_id,group\na,g1\nb,g2\n");
  const auto path = write("audit.manifest",
                          "# demo\n"
                          "labels = labels.csv\n"
                          "predictions = preds.csv\n"
                          "group_map = groups.csv\n"
                          "band = round:3\n"
                          "tie_break = specificity, recall\n"
                          "seed = 12\n"
                          "discrepancy_cap = 40\n"
                          "provenance.task = 31\n");
  unsetenv("MULTIMAX_SEED");
  auto m = load_manifest(path);
  EXPECT_EQ(m.banding.str(), "round:3");
  EXPECT_EQ(m.banding.tie_break.size(), 2u);
  EXPECT_EQ(m.seed, 12u);
  EXPECT_FALSE(m.seed_from_environment);
  EXPECT_EQ(m.discrepancy_cap, 40u);
  EXPECT_EQ(m.provenance.at("task"), "31");
  EXPECT_EQ(m.labels, dir / "labels.csv");
  EXPECT_EQ(m.fold_id, "audit");

  setenv("MULTIMAX_SEED", "99", 1);
  m = load_manifest(path);
  unsetenv("MULTIMAX_SEED");
  EXPECT_EQ(m.seed, 99u);
  EXPECT_TRUE(m.seed_from_environment);

  const auto input = load_input(m);
  EXPECT_EQ(input.catalog.size(), 1u);
  EXPECT_EQ(input.groups->at("b"), "g2");

  // Rendering and re-parsing gives the same manifest.
  const auto again = parse_manifest(render_manifest(m), path);
  EXPECT_EQ(render_manifest(again), render_manifest(m));
}

TEST_F(TempDir, ManifestErrorsCarryLineNumbers) {
  write("labels.csv", "instance_id,label\na,1\n");
  auto expect_error = [&](const std::string& text, const std::string& needle) {
    try {
      (void)parse_manifest(text, dir / "m.manifest");
      FAIL() << "expected error for: " << text;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("labels = labels.csv\nbogus = 1\n", "m.manifest:2");
  expect_error("labels = nowhere.csv\n", "does not exist");
  expect_error("labels = labels.csv\n", "missing 'predictions'");
  expect_error("labels = labels.csv\npredictions = labels.csv\nseed = -1\n", "m.manifest:3");
  expect_error("labels = labels.csv\npredictions = labels.csv\nband = fuzzy\n", "fuzzy");
  expect_error("labels = labels.csv\nlabels = labels.csv\n", "duplicate key");
}

TEST_F(TempDir, WritersRoundTrip) {
  const auto labels = write("labels.csv", "instance_id,label\n\"a,1\",1\nb,0\n");
  const auto preds = write("preds.csv", "run_id,instance_id,prediction\nA,\"a,1\",1\nA,b,1\n");
  const auto loaded = load_labels(labels, "1");
  const auto runs = load_predictions(preds, loaded.labels, loaded.coding);
  write_labels(dir / "l2.csv", loaded.labels, loaded.coding);
  write_predictions(dir / "p2.csv", runs, false, loaded.coding);
  const auto reloaded = load_labels(dir / "l2.csv", "1");
  EXPECT_EQ(reloaded.labels, loaded.labels);
  const auto runs2 = load_predictions(dir / "p2.csv", reloaded.labels, reloaded.coding);
  EXPECT_EQ(runs2[0].validation(), runs[0].validation());
  EXPECT_EQ(runs2[0].family(), "ingested");
}

}  // namespace
}  // namespace multimax::ingest
