#include "iqvi/cli/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace iqvi::cli;

struct Args {
    std::string spec_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

int execute(const std::string& mode, const Args& args) {
    RunOptions options{args.out, args.seed, args.quiet};
    auto fail = [&](const std::vector<std::string>& errors) {
        const RunResult r = reportInvalid(errors, mode, options);
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return r.exit_code;
    };

    nlohmann::json doc = nlohmann::json::object();
    if (!args.spec_path.empty()) {
        std::ifstream in(args.spec_path, std::ios::binary);
        if (!in) return fail({"cannot read spec file '" + args.spec_path + "'"});
        std::stringstream buffer;
        buffer << in.rdbuf();
        try {
            doc = nlohmann::json::parse(buffer.str());
        } catch (const nlohmann::json::parse_error& e) {
            return fail({"parse error at byte " + std::to_string(e.byte) + ": " + e.what()});
        }
    } else if (mode != "reproduce") {
        return fail({"--spec is required for " + mode});
    }
    // The subcommand decides the mode; the spec's own mode field is overridden.
    if (doc.is_object()) {
        if (!doc.contains("solver")) doc["solver"] = nlohmann::json::object();
        if (doc["solver"].is_object()) doc["solver"]["mode"] = mode;
    }

    RunSpec spec;
    try {
        spec = parseSpec(doc);
    } catch (const SpecError& e) {
        return fail(e.errors());
    }

    const RunResult result = run(spec, options);
    if (!args.quiet) {
        for (const auto& m : result.messages) std::cerr << m << "\n";
        std::cout << result.out_dir << ": " << result.files.size() << " files, exit " << result.exit_code << "\n";
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver workbench for inverse quasi-variational inequalities"};
    app.require_subcommand(1);

    Args args;
    std::string chosen;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"check", "Evaluate the existence, stability and discrete convergence conditions"},
        {"solve-ode", "Integrate the projected dynamical system"},
        {"solve-iter", "Run the variable-step projection iteration"},
        {"solve-banach", "Run the fixed-point iteration of the contraction map"},
        {"solve-he", "Run the fixed-gain iteration on a constant set"},
        {"certify", "Certify candidate solutions"},
        {"reproduce", "Run the bundled example specs and compare with stored expectations"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--spec", args.spec_path, "Run specification (JSON)");
        sub->add_option("--out", args.out, "Output directory (default $IQVI_OUT_DIR or ./iqvi_out)");
        sub->add_option("--seed", args.seed, "Override the spec seeds");
        sub->add_flag("--quiet", args.quiet, "Suppress progress output");
        sub->callback([&chosen, n = name] { chosen = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    try {
        return execute(chosen, args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
