#pragma once

// Shared plumbing for the YAML-based document formats (protocols, model
// parameters, reports) and the CSV exports.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace YAML {
class Node;
}

namespace ctfsim {

struct Diagnostic {
  std::string file;
  int line = 0;  // 1-based; 0 when unknown
  std::string field;
  std::string message;

  [[nodiscard]] std::string to_string() const;
};

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename, so readers never see a partial file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view text);

namespace detail {

// Reads a required finite floating scalar; appends a diagnostic and returns
// nullopt when missing or malformed.
std::optional<double> read_double(const YAML::Node& map, const std::string& key,
                                  const std::string& file, std::vector<Diagnostic>& diags,
                                  bool required = true);
std::optional<long long> read_integer(const YAML::Node& map, const std::string& key,
                                      const std::string& file, std::vector<Diagnostic>& diags,
                                      bool required = true);
int line_of(const YAML::Node& node);

}  // namespace detail

}  // namespace ctfsim
