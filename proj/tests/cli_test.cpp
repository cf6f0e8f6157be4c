#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

using hlaser::cli::run;

struct Captured {
  int code = -1;
  std::string out, err;
};

Captured call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Captured c;
  c.code = run(args, out, err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hlaser_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(Cli, BoundsSummary) {
  const Captured c = call({"bounds", "--mu", "10"});
  ASSERT_EQ(c.code, 0) << c.err;
  std::smatch m;
  ASSERT_TRUE(std::regex_search(c.out, m, std::regex(R"(heisenberg=([0-9.eE+]+) sql=([0-9.eE+]+))")));
  EXPECT_NEAR(std::stod(m[1]), 29748.0, 10.0);
  EXPECT_DOUBLE_EQ(std::stod(m[2]), 1600.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"coherence", "--dim", "1"}).code, 1);
  EXPECT_EQ(call({"coherence", "--dim", "5", "--bogus"}).code, 1);
  const Captured unknown = call({"teleport"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"discrete", "--dim", "5", "--gamma", "10"}).code, 1);
  EXPECT_EQ(call({"coherence", "--dim", "5"}).code, 0);
}

TEST(Cli, NumericalFailureExit) {
  // forced double precision far outside its range misses the residual target
  const Captured c = call({"control", "--dims", "30", "--precision", "double"});
  EXPECT_EQ(c.code, 2) << c.err;
}

TEST(Cli, HeaderLineCarriesConfig) {
  const auto path = scratch("model.csv");
  const Captured c = call({"--out", path.string(), "model", "--dim", "6"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto lines = lines_of(slurp(path));
  ASSERT_GE(lines.size(), 2u);
  ASSERT_EQ(lines[0].rfind("# hlaser ", 0), 0u);
  const auto brace = lines[0].find('{');
  ASSERT_NE(brace, std::string::npos);
  const nlohmann::json cfg = nlohmann::json::parse(lines[0].substr(brace));
  EXPECT_EQ(cfg["subcommand"], "model");
  EXPECT_EQ(cfg["options"]["dim"], "6");
  EXPECT_EQ(c.out.find("# hlaser"), std::string::npos);
}

TEST(Cli, CsvSchemas) {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
      {{"coherence", "--dim", "5"}, "dim,mu,coherence,flux,linewidth,route"},
      {{"sweep", "--dims", "4,5,6,7", "--mu-min", "0", "--no-timing"}, "dim,mu,coherence,flux,linewidth,seconds"},
      {{"g1", "--dim", "5", "--points", "3"}, "s,g1_model,g1_ideal,delta"},
      {{"bounds", "--mu", "2"}, "mu,heisenberg,sql,airy_zero,mse_constant,heisenberg_coefficient"},
      {{"msse", "--linewidth", "0.01", "--sigma", "1.2"}, "flux,linewidth,tau,sigma,sds,ss,mse"},
      {{"asymmetry", "--nbar", "3"}, "nbar,asymmetry,tail_bound,cutoff"},
      {{"control", "--dims", "4"}, "dim,which,residual,precision"},
  };
  for (const auto& [args, header] : cases) {
    const auto path = scratch("schema.csv");
    std::vector<std::string> full{"--out", path.string()};
    full.insert(full.end(), args.begin(), args.end());
    const Captured c = call(full);
    ASSERT_EQ(c.code, 0) << args[0] << ": " << c.err;
    const auto lines = lines_of(slurp(path));
    ASSERT_GE(lines.size(), 3u) << args[0];
    EXPECT_EQ(lines[1], header) << args[0];
  }
}

TEST(Cli, DeterministicOutputs) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"g1", "--dim", "8", "--points", "7"},
        std::vector<std::string>{"control", "--dims", "3,6", "--which", "both"},
        std::vector<std::string>{"sweep", "--dims", "4,5,6,7", "--mu-min", "0", "--no-timing"}}) {
    const auto path = scratch("repeat.csv");
    std::vector<std::string> full{"--out", path.string()};
    full.insert(full.end(), args.begin(), args.end());
    ASSERT_EQ(call(full).code, 0);
    const std::string first = slurp(path);
    ASSERT_EQ(call(full).code, 0);
    EXPECT_EQ(first, slurp(path)) << args[0];
  }
}

TEST(Cli, SweepFitJson) {
  const auto path = scratch("fit.json");
  const Captured c = call({"--out", path.string(), "sweep", "--dims", "10,14,18,22", "--mu-min", "1", "--fit"});
  ASSERT_EQ(c.code, 0) << c.err;
  const std::string text = slurp(path);
  const nlohmann::ordered_json j = nlohmann::ordered_json::parse(text.substr(text.find('\n') + 1));
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"exponent", "coefficient", "rms_log_residual", "window", "used", "points"}));
  EXPECT_EQ(j["used"], 4);
  EXPECT_GT(j["exponent"].get<double>(), 3.0);
  EXPECT_NE(c.out.find("exponent="), std::string::npos);
}

TEST(Cli, JsonFormatForTables) {
  const Captured c = call({"--format", "json", "bounds", "--mu", "3"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto lines = lines_of(c.out);
  std::string body;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) body += lines[i] + "\n";
  const nlohmann::json j = nlohmann::json::parse(body);
  ASSERT_TRUE(j.is_array());
  EXPECT_DOUBLE_EQ(j[0]["sql"].get<double>(), 144.0);
}

TEST(Cli, FluxRescalesRates) {
  const Captured c = call({"--flux", "2", "coherence", "--dim", "6"});
  ASSERT_EQ(c.code, 0) << c.err;
  std::smatch coh, lw;
  ASSERT_TRUE(std::regex_search(c.out, coh, std::regex(R"(coherence=([0-9.eE+-]+))")));
  ASSERT_TRUE(std::regex_search(c.out, lw, std::regex(R"(linewidth=([0-9.eE+-]+))")));
  // l = 4 N / c with N = 2
  EXPECT_NEAR(std::stod(lw[1]) * std::stod(coh[1]) / 8.0, 1.0, 1e-6);
}

}  // namespace
