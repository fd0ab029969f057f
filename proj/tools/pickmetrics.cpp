#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <pickmetrics/cli.hpp>

int main(int argc, char** argv) {
    namespace cli = pickmetrics::cli;
    const std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args.front() == "--help" || args.front() == "-h") {
        std::cerr << "usage: pickmetrics <coeffs|metric|length|separate|obstruct|embed-check> [--key value ...]\n"
                     "       [--config FILE] [--out PATH] [--summary PATH] [--seed N]\n";
        return args.empty() ? 2 : 0;
    }
    try {
        const cli::RunConfig cfg = cli::parse_config(args);
        const cli::RunSummary s = cli::run(cfg);
        for (const auto& c : s.checks)
            std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
        std::cout << s.command << ": " << s.checks_passed << " passed, " << s.checks_failed << " failed, "
                  << s.wall_time << " s\n";
        for (const auto& a : s.artifacts) std::cout << "wrote " << a << '\n';
        return s.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code_for(e);
    }
}
