#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + HANDOVER_CLI + "\" --no-timestamp " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const std::string& csv) {
  std::size_t rows = 0;
  std::istringstream in(csv);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

std::string scene(const std::string& name) {
  return std::string(HANDOVER_DATA_DIR) + "/scenes/" + name + ".json";
}

class CliTest : public ::testing::Test {
 protected:
  static fs::path dir() {
    static const fs::path d = [] {
      auto p = fs::temp_directory_path() / ("handover_cli_" + std::to_string(::getpid()));
      fs::create_directories(p);
      return p;
    }();
    return d;
  }

  // gen -> train once for the chain tests
  static void SetUpTestSuite() {
    ASSERT_EQ(cli("dataset gen --out-dir " + dir().string()).code, 0);
    ASSERT_EQ(cli("train --corpus " + (dir() / "corpus.csv").string() + " -o " + (dir() / "model.json").string()).code, 0);
  }

  static std::string model() { return (dir() / "model.json").string(); }
};

}  // namespace

TEST_F(CliTest, HelpAndUnknownCommand) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_NE(cli("frobnicate").code, 0);
}

TEST_F(CliTest, PlanExample) {
  const auto r = cli("plan --scene " + scene("example"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"robot_grasp\""), std::string::npos);
  EXPECT_EQ(r.out.find("generated_at"), std::string::npos);
  EXPECT_EQ(cli("plan --scene " + scene("example")).out, r.out);
}

TEST_F(CliTest, PlanUnsolvableExitsTwo) {
  EXPECT_EQ(cli("plan --scene " + scene("unsolvable")).code, 2);
}

TEST_F(CliTest, PlanMissingFileExitsOne) {
  EXPECT_EQ(cli("plan --scene /nonexistent/scene.json").code, 1);
}

TEST_F(CliTest, EffortRowCounts) {
  const auto out = dir() / "effort.csv";
  ASSERT_EQ(cli("effort -o " + out.string()).code, 0);
  EXPECT_EQ(data_rows(slurp(out)), 45u);
  const auto first = slurp(out);
  ASSERT_EQ(cli("effort -o " + out.string()).code, 0);
  EXPECT_EQ(slurp(out), first);
  ASSERT_EQ(cli("effort --trials 1 -o " + out.string()).code, 0);
  EXPECT_EQ(data_rows(slurp(out)), 9u);
}

TEST_F(CliTest, DatasetGenWritesCorpus) {
  EXPECT_EQ(data_rows(slurp(dir() / "corpus.csv")), 1657u);
  EXPECT_EQ(data_rows(slurp(dir() / "study_ratings.csv")), 777u);
  const auto again = dir() / "again";
  ASSERT_EQ(cli("dataset gen --out-dir " + again.string()).code, 0);
  EXPECT_EQ(slurp(again / "corpus.csv"), slurp(dir() / "corpus.csv"));
}

TEST_F(CliTest, DatasetSplit) {
  const auto r = cli("dataset split --random");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"test_objects\""), std::string::npos);
}

TEST_F(CliTest, InferAndErrors) {
  const auto r = cli("infer --model " + model() + " --shape cylindrical --task drink --mobility H-M");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"robot_grasp\""), std::string::npos);
  EXPECT_EQ(cli("infer --model " + model() + " --shape conic --task drink --mobility H").code, 2);
  EXPECT_EQ(cli("infer --model " + model() + " --shape cubic --task juggle --mobility H").code, 2);
}

TEST_F(CliTest, EvalPrintsOverallRow) {
  const auto r = cli("eval --model " + model() + " --corpus " + (dir() / "corpus.csv").string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\noverall,"), std::string::npos);
}

TEST_F(CliTest, Stats) {
  const auto samples = dir() / "samples.csv";
  std::ofstream(samples) << "sample,value\na,1\na,2\na,3\nb,10\nb,11\nb,12\n";
  const auto r = cli("stats ranksum --input " + samples.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0.1"), std::string::npos);
  const auto a = cli("stats anova --input " + (dir() / "study_ratings.csv").string() + " --rating-column comfort");
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_NE(a.out.find("interaction"), std::string::npos);
}

TEST_F(CliTest, GraspReport) {
  const auto summary = dir() / "summary.csv";
  const auto r = cli("grasp-report -o " + (dir() / "grasp.csv").string() + " --summary " + summary.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(data_rows(slurp(summary)), 4u);
}

TEST_F(CliTest, RunEndToEnd) {
  const auto r = cli("run --scene " + scene("glass_drink") + " --model " + model());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"trace\""), std::string::npos);
  EXPECT_EQ(cli("run --scene " + scene("glass_drink") + " --model " + model() + " --mobility X").code, 2);
}
