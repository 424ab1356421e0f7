#include "ctfsim/structured_text.hpp"

#include <yaml-cpp/yaml.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ctfsim/error.hpp"

namespace ctfsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::PreconditionViolation: return "precondition-violation";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::NotSaturated: return "not-saturated";
    case ErrorKind::TargetUnreachable: return "target-unreachable";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::InconsistentInputs: return "inconsistent-inputs";
    case ErrorKind::Uncompensatable: return "uncompensatable";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string Diagnostic::to_string() const {
  std::ostringstream os;
  os << (file.empty() ? "<config>" : file);
  if (line > 0) os << ':' << line;
  os << ": ";
  if (!field.empty()) os << '`' << field << "`: ";
  os << message;
  return os.str();
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) fail(ErrorKind::NumericFailure, "cannot format double");
  std::string out(buf.data(), end);
  // Keep floats visibly floating-point in the documents ("10" -> "10.0").
  if (std::isfinite(value) && out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorKind::Io, "short write on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

namespace detail {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

std::optional<double> read_double(const YAML::Node& map, const std::string& key,
                                  const std::string& file, std::vector<Diagnostic>& diags,
                                  bool required) {
  const YAML::Node node = map[key];
  if (!node) {
    if (required) diags.push_back({file, line_of(map), key, "missing required field"});
    return std::nullopt;
  }
  if (!node.IsScalar()) {
    diags.push_back({file, line_of(node), key, "expected a number"});
    return std::nullopt;
  }
  const std::string& text = node.Scalar();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    diags.push_back({file, line_of(node), key, "not a finite decimal number: '" + text + "'"});
    return std::nullopt;
  }
  return value;
}

std::optional<long long> read_integer(const YAML::Node& map, const std::string& key,
                                      const std::string& file, std::vector<Diagnostic>& diags,
                                      bool required) {
  const YAML::Node node = map[key];
  if (!node) {
    if (required) diags.push_back({file, line_of(map), key, "missing required field"});
    return std::nullopt;
  }
  if (!node.IsScalar()) {
    diags.push_back({file, line_of(node), key, "expected an integer"});
    return std::nullopt;
  }
  const std::string& text = node.Scalar();
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    diags.push_back({file, line_of(node), key, "not an integer: '" + text + "'"});
    return std::nullopt;
  }
  return value;
}

}  // namespace detail

}  // namespace ctfsim
