#include "gridfisher/cli.hpp"

#include "gridfisher/lattice.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace gridfisher::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<KeySpec> shared_keys(bool with_alpha) {
  std::vector<KeySpec> k;
  if (with_alpha) k.push_back({"alpha", KeyType::Alpha, "10/pi", "Gaussian parameter (decimal or c/pi)"});
  k.push_back({"tail_epsilon", KeyType::PositiveReal, "1e-14", "tail bound for lattice sums"});
  k.push_back({"max_shell_radius", KeyType::PositiveReal, "40", "cap on the truncation radius"});
  k.push_back({"format", KeyType::Format, "csv", "csv or json"});
  k.push_back({"output", KeyType::Text, "-", "output path, - for stdout"});
  return k;
}

void add_quadrature(std::vector<KeySpec>& k) {
  k.push_back({"radial_nodes", KeyType::PositiveInteger, "64", "Gauss-Legendre nodes in r"});
  k.push_back({"angular_nodes", KeyType::PositiveInteger, "128", "trapezoidal angle nodes (2D)"});
  k.push_back({"polar_nodes", KeyType::PositiveInteger, "32", "Gauss-Legendre polar nodes (3D)"});
  k.push_back({"azimuth_nodes", KeyType::PositiveInteger, "64", "trapezoidal azimuth nodes (3D)"});
  k.push_back({"normalize", KeyType::Boolean, "false", "divide by mu(B_R)"});
}

std::map<std::string, std::vector<KeySpec>> build_registry() {
  std::map<std::string, std::vector<KeySpec>> r;
  auto with = [](std::vector<KeySpec> base, std::initializer_list<KeySpec> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };
  auto field = [](std::vector<KeySpec> base) {
    add_quadrature(base);
    return base;
  };

  r["theta"] = with(shared_keys(true),
                    {{"lattice", KeyType::Lattice, "A2", "named lattice"},
                     {"point", KeyType::Point, "", "chart point (2 or 5 coordinates), overrides lattice"},
                     {"y", KeyType::Point, "", "evaluation point, default origin"}});
  r["qfield"] = with(shared_keys(true),
                     {{"lattice", KeyType::Lattice, "A2", "named lattice"},
                      {"point", KeyType::Point, "", "chart point, overrides lattice"},
                      {"extent", KeyType::PositiveReal, "0.6", "half-width of the y-grid"},
                      {"n", KeyType::PositiveInteger, "41", "grid nodes per axis"}});
  r["gr-profile"] = with(shared_keys(true),
                         {{"radius", KeyType::PositiveReal, "0.1", "profile radius r"},
                          {"ntheta", KeyType::PositiveInteger, "256", "angles in [0, 2 pi)"}});
  r["fisher"] = field(with(shared_keys(true),
                           {{"lattice", KeyType::Lattice, "A2", "named lattice"},
                            {"point", KeyType::Point, "", "chart point, overrides lattice"},
                            {"radius", KeyType::PositiveReal, "0.5", "field radius R"},
                            {"density", KeyType::Text, "uniform", "uniform or exponential"}}));
  r["scan2d"] = field(with(shared_keys(true),
                           {{"radius", KeyType::PositiveReal, "0.5", "field radius R"},
                            {"density", KeyType::Text, "uniform", "uniform or exponential"},
                            {"nx", KeyType::PositiveInteger, "33", "x nodes"},
                            {"ny", KeyType::PositiveInteger, "33", "y nodes"},
                            {"x_min", KeyType::Real, "0", "x range start"},
                            {"x_max", KeyType::Real, "0.5", "x range end"},
                            {"y_min", KeyType::PositiveReal, "0.8", "y range start"},
                            {"y_max", KeyType::PositiveReal, "1.4", "y range end"},
                            {"refine", KeyType::Boolean, "true", "polish the argmax locally"}}));
  r["sweep-r"] = field(with(shared_keys(true),
                            {{"lattices", KeyType::LatticeList, "A2,Z2", "named lattices"},
                             {"radii", KeyType::RealList, "0.1:0.7:0.01", "radius values"},
                             {"bisect_tol", KeyType::PositiveReal, "0.001", "sign-change bracket width"}}));
  r["sweep-alpha"] = field(with(shared_keys(false),
                                {{"lattices", KeyType::LatticeList, "A2,Z2", "named lattices"},
                                 {"alphas", KeyType::RealList, "0.5:5:0.1", "alpha values"},
                                 {"radius", KeyType::PositiveReal, "0.16", "field radius R"},
                                 {"bisect_tol", KeyType::PositiveReal, "0.001", "sign-change bracket width"}}));
  r["compare3d"] = field(with(shared_keys(true),
                              {{"radii", KeyType::RealList, "0.1,0.3,0.5,0.57", "radius values"}}));
  r["hessian"] = field(with(shared_keys(true),
                            {{"lattice", KeyType::Lattice, "D3", "named lattice"},
                             {"point", KeyType::Point, "", "chart point, overrides lattice"},
                             {"radius", KeyType::PositiveReal, "0.3", "field radius R"},
                             {"step", KeyType::PositiveReal, "0.003", "finite-difference step"}}));
  {
    auto k = shared_keys(false);
    for (auto& s : k) {
      if (s.name == "format") s.default_value = "json";
    }
    r["eutaxy"] = with(std::move(k),
                       {{"lattice", KeyType::Lattice, "D3", "named lattice"},
                        {"point", KeyType::Point, "", "chart point, overrides lattice"},
                        {"shells", KeyType::PositiveInteger, "3", "number of shells"},
                        {"max_radius", KeyType::Real, "0", "use all shells up to this radius if > 0"},
                        {"tol", KeyType::PositiveReal, "1e-9", "eutaxy tolerance"}});
  }
  r["stationarity"] = field(with(shared_keys(true),
                                 {{"lattice", KeyType::Lattice, "A2", "named lattice"},
                                  {"point", KeyType::Point, "", "chart point, overrides lattice"},
                                  {"radius", KeyType::PositiveReal, "0.3", "field radius R"},
                                  {"lambdas", KeyType::RealList, "0.7,1,1.5", "scale factors"},
                                  {"step", KeyType::PositiveReal, "0.001", "finite-difference step"}}));
  r["degenerate"] = field(with(shared_keys(true),
                               {{"radius", KeyType::PositiveReal, "0.1", "field radius R"},
                                {"ts", KeyType::RealList, "1,1.5,2,3,4,6,8,12,16", "family parameters t >= 1"}}));
  r["simulate"] = with(shared_keys(true),
                       {{"lattice", KeyType::Lattice, "Z2", "named lattice"},
                        {"phases", KeyType::PositiveInteger, "8", "number of phases N"},
                        {"neurons", KeyType::PositiveInteger, "3", "neurons per phase n"},
                        {"phase_radius", KeyType::PositiveReal, "0.5", "phases drawn uniformly from B_R"},
                        {"trials", KeyType::PositiveInteger, "200000", "Monte-Carlo trials"},
                        {"seed", KeyType::Integer, "1", "generator seed"},
                        {"x", KeyType::Point, "", "position, default origin"}});
  r["decode"] = with(shared_keys(true),
                     {{"lattice", KeyType::Lattice, "A2", "named lattice"},
                      {"phases", KeyType::PositiveInteger, "50", "number of phases N"},
                      {"neurons", KeyType::PositiveInteger, "5", "neurons per phase n"},
                      {"phase_radius", KeyType::PositiveReal, "0.3", "phases drawn uniformly from B_R"},
                      {"trials", KeyType::PositiveInteger, "2000", "decoding trials"},
                      {"seed", KeyType::Integer, "1", "generator seed"},
                      {"x", KeyType::Point, "", "true position, default origin"},
                      {"half_width", KeyType::PositiveReal, "0.25", "decoder window half-width"},
                      {"nodes", KeyType::PositiveInteger, "101", "decoder nodes per axis"}});
  return r;
}

const std::map<std::string, std::vector<KeySpec>>& registry() {
  static const auto r = build_registry();
  return r;
}

void validate_value(const KeySpec& spec, const std::string& value) {
  try {
    switch (spec.type) {
      case KeyType::Real: parse_real(value); break;
      case KeyType::PositiveReal:
        if (!(parse_real(value) > 0.0)) throw ConfigError("must be positive");
        break;
      case KeyType::Integer: parse_integer(value); break;
      case KeyType::PositiveInteger:
        if (parse_integer(value) < 1) throw ConfigError("must be >= 1");
        break;
      case KeyType::Boolean: parse_bool(value); break;
      case KeyType::Text:
        if (value.empty()) throw ConfigError("must not be empty");
        break;
      case KeyType::Alpha:
        if (!(parse_alpha(value) > 0.0)) throw ConfigError("must be positive");
        break;
      case KeyType::RealList:
        if (parse_real_list(value).empty()) throw ConfigError("must not be empty");
        break;
      case KeyType::Point:
        if (!value.empty()) parse_real_list(value);
        break;
      case KeyType::Lattice: parse_named_lattice(value); break;
      case KeyType::LatticeList:
        for (const auto& n : split(value, ',')) parse_named_lattice(n);
        break;
      case KeyType::Format:
        if (value != "csv" && value != "json") throw ConfigError("must be csv or json");
        break;
    }
  } catch (const std::exception& e) {
    throw ConfigError("invalid value for " + spec.name + " ('" + value + "'): " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "theta",   "qfield",  "gr-profile", "fisher",       "scan2d",     "sweep-r",  "sweep-alpha",
      "compare3d", "hessian", "eutaxy",   "stationarity", "degenerate", "simulate", "decode"};
  return names;
}

const std::vector<KeySpec>& command_keys(std::string_view command) {
  const auto it = registry().find(std::string(command));
  if (it == registry().end()) throw ConfigError("unknown command: " + std::string(command));
  return it->second;
}

double parse_real(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("expected a number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("not a finite number: '" + s + "'");
  }
  return v;
}

long parse_integer(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("expected an integer");
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

double parse_alpha(std::string_view text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    if (trim(std::string_view(s).substr(slash + 1)) != "pi") {
      throw ConfigError("alpha fractions must have the form c/pi: '" + s + "'");
    }
    const double a = parse_real(std::string_view(s).substr(0, slash)) / std::numbers::pi;
    if (!(a > 0.0)) throw ConfigError("alpha must be positive: '" + s + "'");
    return a;
  }
  const double a = parse_real(s);
  if (!(a > 0.0)) throw ConfigError("alpha must be positive: '" + s + "'");
  return a;
}

std::vector<double> parse_real_list(std::string_view text) {
  const std::string s = trim(text);
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step");
    const double a = parse_real(parts[0]), b = parse_real(parts[1]), h = parse_real(parts[2]);
    if (!(h > 0.0) || b < a) throw ConfigError("range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9));
    if (count > 1000000) throw ConfigError("range has too many values");
    std::vector<double> out;
    for (long i = 0; i <= count; ++i) out.push_back(a + h * static_cast<double>(i));
    return out;
  }
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& p : split(s, ',')) out.push_back(parse_real(p));
  return out;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::map<std::string, std::string> read_replay_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read replay file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("replay file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("config") || !j["config"].is_object()) {
    throw ConfigError("replay file has no config object");
  }
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw ConfigError("replay config value for " + k + " is not a string");
    out[k] = v.get<std::string>();
  }
  out.erase("version");
  return out;
}

RunConfig RunConfig::resolve(const std::string& command,
                             const std::vector<std::map<std::string, std::string>>& layers) {
  const auto& keys = command_keys(command);
  RunConfig cfg;
  cfg.command_ = command;
  for (const auto& k : keys) cfg.values_[k.name] = k.default_value;
  for (const auto& layer : layers) {
    for (const auto& [key, value] : layer) {
      if (key == "command") {
        if (value != command) {
          throw ConfigError("configuration is for command '" + value + "', not '" + command + "'");
        }
        continue;
      }
      const auto it = std::find_if(keys.begin(), keys.end(),
                                   [&](const KeySpec& s) { return s.name == key; });
      if (it == keys.end()) throw ConfigError("unknown key for " + command + ": " + key);
      cfg.values_[key] = value;
    }
  }
  for (const auto& k : keys) validate_value(k, cfg.values_.at(k.name));
  return cfg;
}

bool RunConfig::is_set(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("no key " + key + " for command " + command_);
  return it->second;
}

double RunConfig::real(const std::string& key) const { return parse_real(text(key)); }
long RunConfig::integer(const std::string& key) const { return parse_integer(text(key)); }
bool RunConfig::boolean(const std::string& key) const { return parse_bool(text(key)); }
double RunConfig::alpha() const { return parse_alpha(text("alpha")); }
std::vector<double> RunConfig::reals(const std::string& key) const {
  return parse_real_list(text(key));
}

}  // namespace gridfisher::cli
