#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridfisher::cli {

enum ExitCode : int { kOk = 0, kValidationError = 2, kNumericalFailure = 3 };

// Bad key, bad value, or inconsistent configuration sources.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyType {
  Real,
  PositiveReal,
  Integer,
  PositiveInteger,
  Boolean,
  Text,
  Alpha,       // decimal or "<c>/pi"
  RealList,    // "a,b,c" or "start:stop:step"
  Point,       // comma-separated coordinates, may be empty
  Lattice,     // named lattice
  LatticeList,
  Format,      // csv | json
};

struct KeySpec {
  std::string name;
  KeyType type;
  std::string default_value;
  std::string help;
};

const std::vector<std::string>& command_names();
/// Keys accepted by a command, including the shared ones. Throws ConfigError for unknown commands.
const std::vector<KeySpec>& command_keys(std::string_view command);

double parse_real(std::string_view text);
long parse_integer(std::string_view text);
bool parse_bool(std::string_view text);
/// Accepts a decimal or a token of the form "<c>/pi" (for example "10/pi").
double parse_alpha(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);

/// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> read_config_file(const std::string& path);
/// The "config" object of a JSON result file, including "command".
std::map<std::string, std::string> read_replay_file(const std::string& path);

/// A fully resolved, validated command configuration.
class RunConfig {
 public:
  /// Later sources override earlier ones: defaults, then each layer in order.
  static RunConfig resolve(const std::string& command,
                           const std::vector<std::map<std::string, std::string>>& layers);

  const std::string& command() const noexcept { return command_; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  bool is_set(const std::string& key) const;  ///< non-empty value
  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  double alpha() const;
  std::vector<double> reals(const std::string& key) const;

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

using Cell = std::variant<double, long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;  ///< CSV footer comments / JSON "summary"
};

std::string format_real(double v);
void write_csv(std::ostream& out, const RunConfig& cfg, const Table& table);
void write_json(std::ostream& out, const RunConfig& cfg, const Table& table);

/// Executes the command; returns the table to be written.
Table execute(const RunConfig& cfg);

/// Full command-line entry point. Returns an ExitCode.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gridfisher::cli
