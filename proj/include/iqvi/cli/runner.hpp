#pragma once

#include "iqvi/cli/run_spec.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iqvi::cli {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3, kExitRegime = 4 };

struct RunOptions {
    std::optional<std::string> out_dir;   ///< --out
    std::optional<std::uint64_t> seed;    ///< --seed; overrides solver.seed and seeded lambda sequences
    bool quiet = false;
};

struct RunResult {
    int exit_code = kExitOk;
    std::string out_dir;
    std::vector<std::string> files;      ///< relative paths, manifest order (sorted)
    std::vector<std::string> messages;   ///< human-readable notes and errors
    nlohmann::json summary;
};

/// --out, then output.directory, then $IQVI_OUT_DIR, then ./iqvi_out.
std::string resolveOutputDir(const std::optional<std::string>& cli, const std::optional<std::string>& spec_dir);

/// Runs a validated spec and writes every artifact plus manifest.json.
RunResult run(const RunSpec& spec, const RunOptions& options);

/// Writes a manifest carrying only errors (used when the spec itself fails to parse).
RunResult reportInvalid(const std::vector<std::string>& errors, std::string_view mode, const RunOptions& options);

/// Bundled specs: "example_sec7.json" and "example_sec3.json". Empty view when unknown.
std::string_view bundledSpec(std::string_view name);
std::vector<std::string> bundledSpecNames();

}  // namespace iqvi::cli
