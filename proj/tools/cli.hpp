#pragma once

#include "moptree/systems.hpp"

#include "json.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace moptree::cli {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;  // compute | verify | export
  std::string target;   // compute subcommand, verify suite, or export kind
  std::string system;   // path to the system document
  std::string out;      // output directory; empty prints the main artifact to stdout
  std::string backend;  // "", "rational" or "bigfloat:BITS"
  std::map<std::string, std::string> params;
  std::vector<std::string> z;  // "re,im"

  // Fields in the order above, params sorted by key.
  ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

// Throws Error(ParseError / InvalidConfig) on bad command lines.
RunConfig parse_command_line(const std::vector<std::string>& args);

// Applies the backend override to a loaded system.
SystemSpec load_configured_system(const RunConfig& cfg);

struct Artifact {
  std::string name;
  std::string content;
};

std::vector<Artifact> run_compute(const RunConfig& cfg, const SystemSpec& sys);
std::vector<Artifact> run_export(const RunConfig& cfg, const SystemSpec& sys);

// Exit codes: 0 ok, 1 a verification failed, 2 config error, 3 computation
// error. Errors go to err as {"error": ..., "context": ...}.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Decimal text of z values: "5,0" or "1,-2"; rationals allowed per part.
std::pair<Rational, Rational> parse_complex(const std::string& text);
std::vector<Rational> parse_rational_list(const std::string& text);

}  // namespace moptree::cli
