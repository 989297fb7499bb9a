#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ENTGAP_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    std::vector<std::string> cells;
    std::size_t c = 0;
    while (true) {
      const auto comma = line.find(',', c);
      cells.push_back(line.substr(c, comma - c));
      if (comma == std::string::npos) break;
      c = comma + 1;
    }
    rows.push_back(cells);
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return rows;
}

}  // namespace

TEST(Cli, GapWithConvergenceTime) {
  const auto r = run("gap --gate u4 --topology open --n 3 --epsilon 1e-6 --method closed_form");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"gate", "topology", "n", "gap", "method", "tau"}));
  EXPECT_NEAR(std::stod(rows[1][3]), 0.3, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][5]), 46.0517, 1e-3);
}

TEST(Cli, GapAllPairsUsesSectors) {
  const auto r = run("gap --gate cnot --topology all --n 100");
  ASSERT_EQ(r.code, 0);
  bool found = false;
  for (const auto& row : csv(r.out))
    if (row.size() == 5 && row[4] == "lmg_sector") {
      found = true;
      EXPECT_NEAR(100 * std::stod(row[3]), 4.0 / 3, 0.05);
    }
  EXPECT_TRUE(found);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("gap --gate u4 --topology periodic --n 2").code, 2);
  EXPECT_EQ(run("reduce --gate swap").code, 2);
  EXPECT_EQ(run("simulate --n 21").code, 2);
  EXPECT_EQ(run("verify --only no-such-check").code, 2);
  EXPECT_EQ(run("--bogus").code, 2);
  EXPECT_EQ(run("gap --threads 0").code, 2);
}

TEST(Cli, ReduceReportsModel) {
  auto r = run("reduce --gate u4");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["gamma"].get<double>(), 0.6, 1e-10);
  EXPECT_NEAR(j["h"].get<double>(), 0.8, 1e-10);
  EXPECT_EQ(j["rank"], 4);
  EXPECT_EQ(j["schema_version"], 1);
  j = nlohmann::json::parse(run("reduce --gate xy").out);
  EXPECT_NEAR(j["gamma"].get<double>(), 0.5, 1e-10);
  EXPECT_NEAR(j["h"].get<double>(), 2.0 / 3, 1e-10);
  EXPECT_EQ(j["rank"], 6);
  j = nlohmann::json::parse(run("reduce --gate p81").out);
  EXPECT_NEAR(j["gamma"].get<double>(), 0.8, 1e-10);
  EXPECT_NEAR(j["h"].get<double>(), 0.6, 1e-10);
}

TEST(Cli, SimulateAgainstExactColumn) {
  const auto r = run("simulate --gate u4 --topology open --n 4 --na 2 --steps 60 --traj 2000 --seed 7");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 62U);
  EXPECT_EQ(rows[0].back(), "exact_purity");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double mean = std::stod(rows[i][1]), se = std::stod(rows[i][2]), exact = std::stod(rows[i][9]);
    EXPECT_LE(std::abs(mean - exact), std::max(5 * se, 1e-12)) << "t=" << rows[i][0];
  }
  EXPECT_EQ(run("simulate --gate u4 --topology open --n 4 --na 2 --steps 60 --traj 2000 --seed 7 --threads 1").out,
            r.out);
}

TEST(Cli, SimulateZeroSteps) {
  const auto r = run("simulate --gate cnot --n 3 --na 1 --steps 0 --traj 10 --seed 1");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[1][1], "1");
}

TEST(Cli, VerifyFilters) {
  auto r = run("verify --only spectrum-union --n 4");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["checks"].size(), 1U);
  EXPECT_EQ(j["checks"][0]["name"], "spectrum-union");
  EXPECT_EQ(j["checks"][0]["status"], "pass");
  r = run("verify --only lmg-asymptote --gate u4");
  ASSERT_EQ(r.code, 0);
  j = nlohmann::json::parse(r.out);
  EXPECT_NE(j["checks"][0]["detail"].get<std::string>().find("1.2000"), std::string::npos);
}

TEST(Cli, ModelAndEvolveExports) {
  auto r = run("model --gate u4 --format json");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["m"], 16);
  r = run("evolve --gate u4 --n 2 --na 1 --steps 1");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_NEAR(std::stod(rows[2][1]), 0.8, 1e-15);
}
