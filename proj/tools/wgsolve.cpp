#include <iostream>
#include <string>
#include <vector>

#include "wg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const wg::RunConfig config = wg::parse_args(args);
        return wg::run(config);
    } catch (const wg::CliHelpRequested&) {
        std::cout << wg::usage();
        return 0;
    } catch (const wg::CliError& err) {
        std::cerr << "error: " << err.what() << "\n\n" << wg::usage();
        return 1;
    }
}
