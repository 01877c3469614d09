// chebyconvex run <config.ini> [--mode exact|float] [--seed N] [--budget N] [--out DIR]
//
// Exit codes: 0 everything passed, 1 a property was refuted or an identity
// failed, 2 some result is indeterminate, 3 configuration error.

#include <chebyconvex/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Certify generalized convexity with respect to Chebyshev systems"};
    app.require_subcommand(1);

    std::string config;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
    std::optional<std::string> out;
    std::optional<unsigned> workers;

    auto* run = app.add_subcommand("run", "run every task of a configuration file");
    run->add_option("config", config, "INI configuration")->required()->check(CLI::ExistingFile);
    run->add_option("--mode", mode, "override arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
    run->add_option("--seed", seed, "override the sampling seed");
    run->add_option("--budget", budget, "override the sample budget");
    run->add_option("--out", out, "report directory");
    run->add_option("--workers", workers, "worker threads (results do not depend on it)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    chebyconvex::RunOverrides o;
    if (!mode.empty()) o.mode = mode == "exact" ? chebyconvex::Mode::Exact : chebyconvex::Mode::Float;
    o.seed = seed;
    o.budget = budget;
    o.out = out;
    o.workers = workers;
    const int code = chebyconvex::run(config, o, std::cerr);
    if (code != 3) std::cout << "exit code " << code << '\n';
    return code;
}
