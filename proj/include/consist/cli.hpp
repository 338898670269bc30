#ifndef CONSIST_CLI_HPP
#define CONSIST_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace consist::cli {

enum ExitCode : int {
  kConsistent = 0,
  kInconsistent = 1,
  kUndetermined = 2,
  kInputError = 3,
  kNullInfeasible = 4,
  kSolverFailure = 5,
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace consist::cli

#endif  // CONSIST_CLI_HPP
