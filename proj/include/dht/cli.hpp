#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dht/types.hpp"

namespace dht::cli {

enum ExitCode : int { kAffirmative = 0, kInputError = 1, kNegative = 2, kInconclusive = 3 };

struct RunConfig {
  std::string command;
  std::string input;   // path to a JSON document
  std::string family;  // inline JSON document
  Real epsilon = 0.1;
  Real big_m = 10.0;
  Real margin = 0.05;
  std::vector<Index> sizes = {25, 50, 100, 200};
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
};

/// Throws dht::Error(InvalidArgument) on inconsistent settings.
void validate(const RunConfig& config);

/// Runs one command; report text goes to `out` unless config.out is set.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs the selected command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dht::cli
