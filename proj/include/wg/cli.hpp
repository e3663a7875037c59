#ifndef WG_CLI_HPP
#define WG_CLI_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wg {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliHelpRequested {};

struct RunConfig {
    std::string problem;            // cdr-smooth | cdr-layer | maxwell2d | transport
    int degree = 1;
    std::vector<int> levels;        // inclusive, ascending
    double epsilon = 1e-8;          // cdr problems only
    std::optional<double> mu_override;
    std::string mesh = "square";    // square | polygonal | file:<path>
    std::string out_path;           // empty writes to stdout
    bool dump_solution = false;
};

/// Parse and validate command-line arguments (program name excluded).
/// Throws CliError on invalid input and CliHelpRequested for --help.
RunConfig parse_args(const std::vector<std::string>& args);

std::string usage();

/// Execute a validated configuration: admissibility gate, convergence study,
/// CSV emission, optional solution dump. Returns the process exit status.
int run(const RunConfig& config);

}  // namespace wg

#endif
