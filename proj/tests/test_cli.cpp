#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "sbm_ising/commands.hpp"

using namespace sbm_ising;
namespace fs = std::filesystem;

namespace {
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sbm_ising_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::size_t data_rows(const std::string& csv) {
  std::size_t rows = 0;
  std::istringstream is(csv);
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}
}  // namespace

TEST(ParseGrid, RangesAndLists) {
  EXPECT_EQ(cli::parse_grid("1:2:0.5"), (std::vector<double>{1.0, 1.5, 2.0}));
  EXPECT_EQ(cli::parse_grid("1.5:4.5:0.5").size(), 7u);
  EXPECT_EQ(cli::parse_grid("3,1,2"), (std::vector<double>{3.0, 1.0, 2.0}));
  EXPECT_THROW(cli::parse_grid("1:2:0"), parameter_error);
  EXPECT_THROW(cli::parse_grid("a,b"), parameter_error);
}

TEST_F(CliTest, VerifyTheoryRowCountEqualsGridCardinality) {
  cli::VerifyTheoryOptions o;
  o.out = path("theory.csv");
  const auto out = cli::run_verify_theory(o);
  EXPECT_EQ(out.exit_code, cli::kSuccess);
  ASSERT_EQ(out.files.size(), 1u);
  EXPECT_EQ(data_rows(out.files[0].second), 4u * 3u * 5u * 2u);
  const auto j = nlohmann::json::parse(out.payload);
  EXPECT_EQ(j["rows"], 120);
  EXPECT_LE(j["max_closed_form_delta"].get<double>(), 1e-5);
}

TEST_F(CliTest, VerifyTheoryRejectsNonNegativeLambda) {
  cli::VerifyTheoryOptions o;
  o.lambda_grid = "0.2";
  o.out = path("theory.csv");
  EXPECT_THROW(cli::run_verify_theory(o), unsupported_regime_error);
}

TEST_F(CliTest, PayloadsEmbedProvenance) {
  cli::GenerateOptions g{300, 5.0, -0.4, 2.0, 17, path("g.txt"), path("g.labels")};
  const auto out = cli::run_generate(g);
  const auto j = nlohmann::json::parse(out.payload);
  EXPECT_EQ(j["meta"]["seed"], 17);
  EXPECT_EQ(j["meta"]["version"], cli::kVersion);
  EXPECT_EQ(j["meta"]["rng"], kRngAlgorithm);
  EXPECT_FALSE(j["meta"]["config_hash"].get<std::string>().empty());
  ASSERT_EQ(out.files.size(), 2u);
  EXPECT_EQ(read_graph_string(out.files[0].second).num_vertices(), 300u);
}

TEST_F(CliTest, RerunsAreIdenticalAndSeedMatters) {
  cli::GenerateOptions g{300, 5.0, -0.4, 2.0, 17, path("g.txt"), ""};
  EXPECT_EQ(cli::run_generate(g), cli::run_generate(g));
  auto h = g;
  h.seed = 18;
  EXPECT_FALSE(cli::run_generate(g) == cli::run_generate(h));
}

TEST_F(CliTest, PipelineGenerateEstimateCluster) {
  cli::write_files(cli::run_generate({1000, 10.0, -0.6, 1.0, 3, path("g.txt"), path("g.labels")}));
  const auto est = nlohmann::json::parse(cli::run_estimate({path("g.txt"), 3, 1}).payload);
  EXPECT_LT(est["lambda_hat"].get<double>(), 0.0);
  const auto even = nlohmann::json::parse(cli::run_estimate({path("g.txt"), 4, 1}).payload);
  EXPECT_TRUE(even["lambda_hat"].is_null());
  EXPECT_GE(even["lambda_abs_hat"].get<double>(), 0.0);

  const auto cl = cli::run_cluster({path("g.txt"), path("g.labels"), 100, "auto", 1, path("tau.labels")});
  const auto j = nlohmann::json::parse(cl.payload);
  EXPECT_GE(j["overlap"].get<double>(), 0.5);
  ASSERT_EQ(cl.files.size(), 1u);
}

TEST_F(CliTest, EstimateRExtrapolationExitsNonzero) {
  cli::write_files(cli::run_generate({200, 6.0, -0.4, 2.0, 3, path("g.txt"), ""}));
  std::ofstream(path("curve.csv")) << "# d=6 lambda=-0.4 beta=0.4 n=200\nr,free_energy,std_err,n_graphs\n"
                                      "1,10,0.01,5\n1.5,9,0.01,5\n2,8,0.01,5\n";
  const auto out = cli::run_estimate_r({path("g.txt"), path("curve.csv"), {6, 20, 10, 2}, 0, 1, 1});
  EXPECT_EQ(out.exit_code, cli::kFailure);
  const auto j = nlohmann::json::parse(out.payload);
  EXPECT_EQ(j["nearest_endpoint"].get<double>(), 2.0);
}

TEST_F(CliTest, FreeEnergyMethods) {
  cli::write_files(cli::run_generate({12, 3.0, -0.4, 2.0, 3, path("s.txt"), ""}));
  const auto exact = nlohmann::json::parse(cli::run_free_energy({path("s.txt"), 0.5, "exact", {}, 1, 1}).payload);
  const auto brute = nlohmann::json::parse(cli::run_dev_brute_z(path("s.txt"), 0.5).payload);
  EXPECT_NEAR(exact["estimate"]["value"].get<double>(), brute["per_node"].get<double>(), 1e-12);
  EXPECT_THROW(cli::run_free_energy({path("s.txt"), 0.5, "magic", {}, 1, 1}), parameter_error);
}

TEST(InterpolationCheck, TinyDeltaIsConstructionError) {
  cli::InterpolationCheckOptions o;
  o.lambda = -0.4;
  o.r = 2.0;
  o.delta = 1e-6;
  o.n = 1000;
  EXPECT_THROW(cli::interpolation_check(o), construction_error);
}
