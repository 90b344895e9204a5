#pragma once

// Command-line front end.
//
//   photonsteer run <scenario-file|builtin> [--seed N] [--trials N]
//                   [--out PATH] [--format json|csv] [--events PATH]
//   photonsteer validate <scenario-file|builtin>
//   photonsteer list-builtins
//
// Exit codes: 0 success, 2 parse error (scenario or command line),
// 3 semantic error, 4 runtime or IO error.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace photonsteer {

enum ExitCode : int { kExitOk = 0, kExitParse = 2, kExitSemantic = 3, kExitRuntime = 4 };

std::vector<std::string> builtin_names();
std::optional<std::string> builtin_text(const std::string& name);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace photonsteer
