#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

const char* kSmallConfig =
    "synth.n_customers = 120\n"
    "synth.clip_seconds = 0.5\n"
    "features.n_mels = 16\n"
    "features.frame_size = 512\n"
    "ser.epochs = 10\n"
    "churn.epochs = 5\n"
    "coreg.max_iterations = 3\n"
    "paths.data = data\n"
    "paths.models = models\n"
    "paths.reports = reports\n";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("churnfuse_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "run.conf") << kSmallConfig;
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" CHURNFUSE_CLI_PATH "' --config run.conf " + args +
                            " > /dev/null 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PipelineWritesArtifactsAndIsReproducible) {
  const char* steps[] = {"gen", "train fl", "train ser", "train churn", "evaluate none", "evaluate late",
                         "evaluate hybrid"};
  const fs::path artifacts[] = {"data/customers.csv",       "data/manifest.csv",          "data/ground_truth.csv",
                                "models/fl.flkn",           "models/ser.serm",            "models/churn.chrn",
                                "models/churn_hybrid.chrn", "reports/assignments_none.csv", "reports/assignments_late.csv",
                                "reports/assignments_hybrid.csv", "reports/report_hybrid.txt"};
  std::vector<std::string> first;
  for (int pass = 0; pass < 2; ++pass) {
    for (const char* step : steps) ASSERT_EQ(run(step), 0) << step << ": " << slurp(dir_ / "stderr.txt");
    for (const auto& a : artifacts) {
      ASSERT_TRUE(fs::exists(dir_ / a)) << a;
      if (pass == 0) {
        first.push_back(slurp(dir_ / a));
      }
    }
    if (pass == 0) fs::rename(dir_ / "data", dir_ / "data_first");
  }
  for (std::size_t i = 0; i < std::size(artifacts); ++i) {
    EXPECT_EQ(std::hash<std::string>{}(slurp(dir_ / artifacts[i])), std::hash<std::string>{}(first[i]))
        << artifacts[i];
  }
  const auto header = slurp(dir_ / "reports/assignments_late.csv");
  EXPECT_EQ(header.substr(0, header.find('\n')), "id,fl_score,churn_propensity,emotion_binary,C,F,V,D,risk,rank_score");
  EXPECT_EQ(run("report"), 0);
}

TEST_F(Cli, FailuresExitNonZero) {
  EXPECT_NE(run("--models /proc/churnfuse_forbidden train churn"), 0);  // no cohort yet
  ASSERT_EQ(run("gen"), 0);
  EXPECT_NE(run("--models /proc/churnfuse_forbidden train churn"), 0);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("churnfuse: "), std::string::npos);

  // Audio modality without a manifest.
  fs::create_directories(dir_ / "tabular");
  fs::copy_file(dir_ / "data/customers.csv", dir_ / "tabular/customers.csv");
  EXPECT_NE(run("--data tabular train ser"), 0);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("MissingModality"), std::string::npos);

  EXPECT_NE(run("evaluate late"), 0);  // models not trained
  EXPECT_NE(run("evaluate sideways"), 0);
  EXPECT_NE(run("--threshold-fl 1.5 config"), 0);
}

TEST_F(Cli, ConfigReflectsOverrides) {
  ASSERT_EQ(system(("cd '" + dir_.string() + "' && '" CHURNFUSE_CLI_PATH
                    "' --config run.conf --seed 9 --threshold-churn 0.6 config > out.txt")
                       .c_str()),
            0);
  const auto text = slurp(dir_ / "out.txt");
  EXPECT_NE(text.find("seed = 9\n"), std::string::npos);
  EXPECT_NE(text.find("fusion.churn_threshold = 0.6\n"), std::string::npos);
  EXPECT_NE(text.find("synth.n_customers = 120\n"), std::string::npos);
}
