#pragma once

// Command pipelines behind the ctf_sim executable. Each run writes its CSV
// and document outputs into the output directory and finishes by writing
// manifest.yaml, so a manifest marks a complete run.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctfsim/error.hpp"
#include "ctfsim/structured_text.hpp"

namespace ctfsim {

inline constexpr std::string_view kToolVersion = "ctf_sim 1.0.0";
inline constexpr std::string_view kManifestName = "manifest.yaml";

enum class Command { simulate, sweep_n, sweep_gap, splits, extract, calibrate, rpu_error };

// Throws Error(InvalidArgument) for unknown names.
Command parse_command(std::string_view name);
std::string_view to_string(Command c);
std::vector<std::string_view> command_names();

struct RunConfig {
  Command command = Command::sweep_n;
  std::optional<std::filesystem::path> params_file;  // shipped defaults when absent
  std::optional<std::filesystem::path> protocol_file;
  std::filesystem::path output_dir;
  std::uint64_t seed = 1;
  std::vector<std::pair<std::string, std::string>> overrides;  // --set key=value, in order
  std::string preset;
  // ISO-8601 stamp for CSV comment lines; resolved from SOURCE_DATE_EPOCH or
  // the clock when empty.
  std::string timestamp;
};

struct Preset {
  std::string_view name;
  Command command;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string_view description;
};

const std::vector<Preset>& presets();
// Sets command and prepends the preset overrides (explicit ones win).
// Throws Error(InvalidArgument) for unknown names.
RunConfig apply_preset(RunConfig config, std::string_view name);

// Run-level override keys accepted besides the parameter-file keys.
std::vector<std::string_view> run_option_keys();

// Every violation that would stop run() before any output is written.
std::vector<Diagnostic> validate(const RunConfig& config);

struct EmittedFile {
  std::string name;
  std::string sha256;
};

struct RunManifest {
  RunConfig config;
  std::string tool_version;
  std::string params_sha256;
  double wall_seconds = 0.0;
  std::vector<EmittedFile> files;
  std::vector<std::string> notes;

  [[nodiscard]] std::string to_document() const;
};

std::string sha256_hex(std::string_view data);
std::string resolve_timestamp(const std::string& explicit_stamp);

// Validates, runs the pipeline and writes the manifest last. Library errors
// propagate as Error with the failing step prefixed; invalid configs throw
// Error(InvalidArgument) carrying all diagnostics.
RunManifest run(const RunConfig& config);

// Process exit code for an error kind: 2 usage, 3 I/O, 4 numeric or model.
int exit_code_for(ErrorKind kind);

}  // namespace ctfsim
