#ifndef LUPISVM_CLI_HPP
#define LUPISVM_CLI_HPP

#include <iosfwd>

namespace lupisvm {

/// Process exit codes of the command-line tool.
enum exit_code : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_data = 2,
    exit_not_converged = 3,
};

/// Runs the train / predict / eval / tune / gen / bench subcommands.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace lupisvm

#endif  // LUPISVM_CLI_HPP
