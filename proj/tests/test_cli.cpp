#include "gridfisher/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace gridfisher::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gridfisher");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("gridfisher_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int tool(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" GRIDFISHER_TOOL "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("value parsers") {
  CHECK(parse_alpha("10/pi") == 10.0 / std::numbers::pi);
  CHECK(parse_alpha("2/pi") == 2.0 / std::numbers::pi);
  CHECK(parse_alpha("3.1831") == 3.1831);
  CHECK_THROWS_AS(parse_alpha("pi/10"), ConfigError);
  CHECK_THROWS_AS(parse_alpha("-1"), ConfigError);

  CHECK(parse_real("1e-3") == 1e-3);
  CHECK_THROWS_AS(parse_real("1.0x"), ConfigError);
  CHECK_THROWS_AS(parse_real(""), ConfigError);
  CHECK(parse_integer("-12") == -12);
  CHECK_THROWS_AS(parse_integer("1.5"), ConfigError);
  CHECK(parse_bool("true"));
  CHECK_FALSE(parse_bool("0"));
  CHECK_THROWS_AS(parse_bool("maybe"), ConfigError);

  const auto list = parse_real_list("0.1, 0.3,0.2");
  CHECK(list == std::vector<double>{0.1, 0.3, 0.2});
  const auto range = parse_real_list("0.1:0.7:0.01");
  REQUIRE(range.size() == 61);
  CHECK(range.front() == 0.1);
  CHECK(range.back() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(parse_real_list("1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_real_list("0:1:0"), ConfigError);
}

TEST_CASE("configuration text and layering") {
  const auto kv = parse_config_text("# comment\nradius = 0.25  # trailing\n\nlattice=Z2\n");
  CHECK(kv.at("radius") == "0.25");
  CHECK(kv.at("lattice") == "Z2");
  CHECK_THROWS_AS(parse_config_text("radius 0.25\n"), ConfigError);

  const RunConfig cfg = RunConfig::resolve("fisher", {kv, {{"radius", "0.3"}}});
  CHECK(cfg.real("radius") == 0.3);
  CHECK(cfg.text("lattice") == "Z2");
  CHECK(cfg.alpha() == 10.0 / std::numbers::pi);
  CHECK_THROWS_AS(RunConfig::resolve("fisher", {{{"bogus", "1"}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::resolve("fisher", {{{"radius", "-2"}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::resolve("nonsense", {}), ConfigError);
  CHECK_THROWS_AS(RunConfig::resolve("fisher", {{{"command", "scan2d"}}}), ConfigError);
  for (const auto& name : command_names()) CHECK_NOTHROW(RunConfig::resolve(name, {}));
}

TEST_CASE("real formatting is lossless") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  for (double v : {std::numbers::pi, 1e-300, -2.5e17, 0.30000000000000004}) {
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("CSV layout") {
  const Outcome r = invoke({"theta", "--lattice", "Z2", "--alpha", "10/pi"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# command=theta\n# version=", 0) == 0);
  CHECK(r.out.find("# alpha=10/pi\n") != std::string::npos);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "lattice,value,grad_1,grad_2,Q,truncation_radius");
  CHECK(lines[1].rfind("Z2,1.0001816079636645,", 0) == 0);
  CHECK(r.out.find("# poisson_dual_discrepancy=") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"theta", "--bogus", "1"}).code == kValidationError);
  CHECK(invoke({"fisher", "--radius", "-1"}).code == kValidationError);
  CHECK(invoke({"fisher", "--alpha", "abc"}).code == kValidationError);
  CHECK(invoke({}).code == kValidationError);
  const Outcome trunc = invoke({"theta", "--alpha", "1e-9"});
  CHECK(trunc.code == kNumericalFailure);
  CHECK(trunc.err.find("truncation") != std::string::npos);
  CHECK(invoke({"decode", "--phases", "1", "--phase-radius", "1e-9", "--trials", "10"}).code == kNumericalFailure);
}

TEST_CASE("command outputs") {
  const Outcome gr = invoke({"gr-profile", "--radius", "0.1", "--alpha", "3.1831", "--ntheta", "256"});
  REQUIRE(gr.code == 0);
  const auto rows = data_lines(gr.out);
  REQUIRE(rows.size() == 257);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double g = std::stod(rows[i].substr(rows[i].find(',') + 1));
    CHECK(g < 0.0);
  }
  CHECK(gr.out.find("# all_negative=true") != std::string::npos);

  const Outcome eu = invoke({"eutaxy", "--lattice", "D3", "--shells", "3"});
  REQUIRE(eu.code == 0);
  const auto j = nlohmann::json::parse(eu.out);
  CHECK(j["config"]["command"] == "eutaxy");
  REQUIRE(j["rows"].size() == 3);
  const auto& cols = j["columns"];
  const auto idx = std::find(cols.begin(), cols.end(), "strongly_eutactic") - cols.begin();
  for (const auto& row : j["rows"]) CHECK(row[idx] == true);

  const Outcome scan = invoke({"scan2d", "--alpha", "3.1831", "--radius", "0.5", "--nx", "9", "--ny", "9",
                               "--radial-nodes", "24", "--angular-nodes", "48", "--refine", "false"});
  REQUIRE(scan.code == 0);
  CHECK(data_lines(scan.out)[0] == "x,y,in_domain,F");
  CHECK(scan.out.find("# argmax_x=0.5\n") != std::string::npos);

  const Outcome js = invoke({"scan2d", "--nx", "3", "--ny", "3", "--radial-nodes", "8", "--angular-nodes", "16",
                             "--refine", "false", "--format", "json"});
  REQUIRE(js.code == 0);
  const auto sj = nlohmann::json::parse(js.out);
  bool saw_null = false;
  for (const auto& row : sj["rows"]) saw_null |= row[3].is_null();
  CHECK(saw_null);  // nodes outside the fundamental domain
}

TEST_CASE("determinism, thread count and replay") {
  const fs::path dir = scratch_dir();
  const std::string args =
      "simulate --trials 3000 --seed 7 --format json --output ";
  REQUIRE(tool(args + (dir / "a.json").string(), "GRIDFISHER_THREADS=1") == 0);
  REQUIRE(tool(args + (dir / "b.json").string(), "GRIDFISHER_THREADS=1") == 0);
  REQUIRE(tool(args + (dir / "c.json").string(), "GRIDFISHER_THREADS=3") == 0);
  auto strip_output = [](std::string s) {
    const auto i = s.find("\"output\"");
    return s.erase(i, s.find('\n', i) - i);
  };
  CHECK(strip_output(slurp(dir / "a.json")) == strip_output(slurp(dir / "b.json")));
  CHECK(strip_output(slurp(dir / "a.json")) == strip_output(slurp(dir / "c.json")));
  CHECK(tool("theta", "GRIDFISHER_THREADS=zero") == kValidationError);

  // Replaying a JSON result reruns the same configuration.
  REQUIRE(tool("fisher --lattice Z2 --radius 0.2 --format json --output " + (dir / "f.json").string()) == 0);
  REQUIRE(tool("fisher --replay " + (dir / "f.json").string() + " --output " + (dir / "g.json").string()) == 0);
  CHECK(strip_output(slurp(dir / "f.json")) == strip_output(slurp(dir / "g.json")));
  const auto replayed = read_replay_file((dir / "f.json").string());
  CHECK(replayed.at("command") == "fisher");
  CHECK(replayed.at("radius") == "0.2");
  CHECK(tool("scan2d --replay " + (dir / "f.json").string()) == kValidationError);

  // Config file sits below explicit flags.
  std::ofstream(dir / "c.cfg") << "radius = 0.25\nlattice = A2\n";
  const Outcome layered = invoke({"fisher", "--config", (dir / "c.cfg").string(), "--radius", "0.3"});
  REQUIRE(layered.code == 0);
  CHECK(layered.out.find("# radius=0.3\n") != std::string::npos);
  CHECK(layered.out.find("# lattice=A2\n") != std::string::npos);
  std::ofstream(dir / "bad.cfg") << "bogus = 1\n";
  CHECK(invoke({"fisher", "--config", (dir / "bad.cfg").string()}).code == kValidationError);
  CHECK(invoke({"fisher", "--config", (dir / "missing.cfg").string()}).code == kValidationError);
  fs::remove_all(dir);
}
