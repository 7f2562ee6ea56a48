#include "qtele/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qtele;
using namespace qtele::cli;

namespace {

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double comment_value(const std::string& csv, const std::string& key) {
  const auto pos = csv.find("# " + key + "=");
  if (pos == std::string::npos) throw std::runtime_error("missing " + key);
  return std::stod(csv.substr(pos + key.size() + 3));
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(FidelityMap, DefaultGridShape) {
  const auto csv = fidelity_map_csv(RunConfig{});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x1_sigma,x2_sigma,f_alpha_lb,f_alphaprime_lb,degenerate_flag");
  const auto rows = data_lines(csv);
  ASSERT_EQ(rows.size(), 40401u);
  const auto first = split(rows.front());
  ASSERT_EQ(first.size(), 5u);
  EXPECT_EQ(std::stod(first[0]), -10.0);
  EXPECT_EQ(std::stod(first[1]), -10.0);
  EXPECT_GE(std::stod(first[2]), 0.99);
  EXPECT_EQ(first[4], "0");
}

TEST(FidelityMap, ZeroTimeFlagsEveryPoint) {
  RunConfig c;
  c.eps_tau1 = c.eps_tau2 = 0.0;
  c.grid_count = 5;
  for (const auto& r : data_lines(fidelity_map_csv(c))) EXPECT_EQ(split(r)[4], "1");
}

TEST(Table, RowsAndTotals) {
  RunConfig c;
  c.angles = {0.0, 0.0};
  const auto csv = table_csv(c);
  const auto rows = data_lines(csv);
  ASSERT_EQ(rows.size(), 5u);
  const auto r0 = split(rows[0]);
  EXPECT_EQ(r0[0], "2");
  EXPECT_EQ(r0[1], "-");
  EXPECT_EQ(r0[2], "unsuccessful");
  EXPECT_NEAR(std::stod(r0[3]), 0.25, 1e-15);
  EXPECT_NEAR(comment_value(csv, "total_failure_asymptotic"), 0.5, 1e-15);
  EXPECT_NEAR(comment_value(csv, "total_success_exact"), 0.5, 1e-12);
  EXPECT_LT(comment_value(csv, "max_abs_difference"), 1e-12);
}

TEST(Table, ShortTimeShowsOverlapCorrections) {
  RunConfig c;
  c.eps_tau1 = c.eps_tau2 = 1.0;
  c.angles = {0.5, 0.0};
  EXPECT_GT(comment_value(table_csv(c), "max_abs_difference"), 0.05);
}

TEST(Sample, SameSeedSameOutput) {
  RunConfig c;
  c.shots = 300;
  c.seed = 42;
  EXPECT_EQ(sample_csv(c), sample_csv(c));
  RunConfig d = c;
  d.seed = 43;
  EXPECT_NE(sample_csv(c), sample_csv(d));
}

TEST(Sample, SummaryAndShortTimeDrop) {
  RunConfig c;
  c.shots = 4000;
  SampleSummary longer, shorter;
  const auto csv = sample_csv(c, &longer);
  EXPECT_EQ(data_lines(csv).size(), 4000u);
  EXPECT_NEAR(longer.success_frequency, 0.5, 4 * std::sqrt(0.25 / 4000));
  EXPECT_GT(longer.mean_corrected_fidelity, 0.98);
  EXPECT_EQ(comment_value(csv, "shots"), 4000.0);
  c.eps_tau1 = c.eps_tau2 = 1.0;
  sample_csv(c, &shorter);
  EXPECT_GT(longer.mean_corrected_fidelity - shorter.mean_corrected_fidelity, 0.05);
}

TEST(Verify, ZeroTimePassesAndCoarseGridFails) {
  RunConfig c;
  c.verify_eps_tau = {0.0};
  const auto ok = verify(c);
  EXPECT_TRUE(ok.passed);
  EXPECT_NE(ok.report.find("passed=1"), std::string::npos);

  c.verify_eps_tau = {10.0};
  c.oracle_points = 256;
  c.oracle_half_width = 5.0;
  const auto bad = verify(c);
  EXPECT_FALSE(bad.passed);
  EXPECT_NE(bad.report.find("first_violation=GridTooSmall"), std::string::npos);
}

TEST(Config, JsonOverridesDefaults) {
  RunConfig c;
  apply_json(c, nlohmann::json{{"theta", 1.0}, {"coupling", 2e5}, {"tau1", 5e-5}, {"shots", 7}});
  EXPECT_EQ(c.angles.theta, 1.0);
  EXPECT_EQ(c.shots, 7u);
  EXPECT_NEAR(c.eps_tau1, 10.0, 1e-12);
  EXPECT_EQ(c.eps_tau2, 10.0);
}

TEST(Config, JsonErrors) {
  RunConfig c;
  EXPECT_THROW(apply_json(c, nlohmann::json{{"bogus", 1}}), ValidationError);
  EXPECT_THROW(apply_json(c, nlohmann::json{{"tau1", 1e-5}, {"eps_tau1", 1.0}}), ValidationError);
  EXPECT_THROW(apply_json(c, nlohmann::json::array()), ValidationError);
  EXPECT_THROW(load_config_file("/nonexistent/qtele.json"), std::ios_base::failure);
  EXPECT_THROW(load_config_file(temp_file("qtele_bad.json", "{ not json")), ValidationError);
  EXPECT_THROW(load_config_file(temp_file("qtele_type.json", R"({"theta": "x"})")), ValidationError);
  const auto good = load_config_file(temp_file("qtele_good.json", R"({"eps_tau2": 3.5, "seed": 9})"));
  EXPECT_EQ(good.eps_tau2, 3.5);
  EXPECT_EQ(good.seed, 9u);
}

TEST(Config, ValidationRejectsBadValues) {
  RunConfig c;
  c.grid_count = 1;
  EXPECT_THROW(validate(c), ValidationError);
  c = RunConfig{};
  c.angles.theta = 4.0;
  EXPECT_THROW(table_csv(c), ValidationError);
  c = RunConfig{};
  c.oracle_points = 1000;
  EXPECT_THROW(verify(c), ValidationError);
}
