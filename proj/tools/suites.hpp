#pragma once

#include "moptree/mop.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace moptree::cli {

struct Check {
  std::string name;
  std::string status;  // pass | fail | skipped
  std::string residual;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  std::string status;  // pass | fail | skipped
  std::string note;
  std::vector<Check> checks;

  bool failed() const { return status == "fail"; }
  void add(Check c);
  void finish();  // derives status from the checks
  nlohmann::ordered_json to_json() const;
};

struct SuiteOptions {
  MultiIndex window;           // identities, bounds, interlacing; default (3,...,3)
  int step_line_max = 12;      // identities
  MultiIndex green_N;          // green-crosscheck; default (3,2) or (3,...)
  std::vector<Complex<Rational>> z;  // green-crosscheck points; default ten points off the real axis
};

SuiteResult verify_identities(const SystemSpec& sys, const SuiteOptions& opt);
SuiteResult verify_bounds(const SystemSpec& sys, const SuiteOptions& opt);
SuiteResult verify_interlacing(const SystemSpec& sys, const SuiteOptions& opt);
SuiteResult verify_green_crosscheck(const SystemSpec& sys, const SuiteOptions& opt);
SuiteResult verify_asymptotics(const SystemSpec& sys, const SuiteOptions& opt);

// identities | bounds | interlacing | green-crosscheck | asymptotics | all
std::vector<SuiteResult> verify_suite(const std::string& name, const SystemSpec& sys, const SuiteOptions& opt);

// The ten default crosscheck points: 2 +- i, 5, 3i, -2, 1.5 + 0.5i, -3 + 2i, 4 - i, -1 - 2i, 7.
std::vector<Complex<Rational>> default_green_points();

}  // namespace moptree::cli
