#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rkam::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kParameterError = 2;
constexpr int kStepFailure = 3;
constexpr int kIoError = 4;

// Runs the command line args (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Every leaf subcommand, e.g. {"kam", "run"}.
std::vector<std::vector<std::string>> command_paths();

// Long option names of a leaf subcommand, without dashes.
std::vector<std::string> option_names(const std::vector<std::string>& path);

}  // namespace rkam::cli
