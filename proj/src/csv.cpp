#include "ctfsim/csv.hpp"

#include "ctfsim/error.hpp"
#include "ctfsim/structured_text.hpp"

namespace ctfsim {

CsvDocument::CsvDocument(std::vector<std::string> columns, std::string timestamp)
    : columns_(std::move(columns)), timestamp_(std::move(timestamp)) {
  require(!columns_.empty(), "CSV needs at least one column");
}

CsvDocument::Row CsvDocument::row() {
  if (rows_ > 0) body_ += '\n';
  ++rows_;
  return Row(*this);
}

void CsvDocument::Row::separator() {
  require(cells_ < doc_.columns_.size(), "CSV row has more cells than columns");
  if (cells_++ > 0) doc_.body_ += ',';
}

CsvDocument::Row& CsvDocument::Row::operator<<(double value) {
  separator();
  doc_.body_ += format_double(value);
  return *this;
}

CsvDocument::Row& CsvDocument::Row::operator<<(long long value) {
  separator();
  doc_.body_ += std::to_string(value);
  return *this;
}

CsvDocument::Row& CsvDocument::Row::operator<<(std::string_view text) {
  require(text.find_first_of(",\n\"") == std::string_view::npos,
          "CSV text cell must not contain separators or quotes");
  separator();
  doc_.body_ += text;
  return *this;
}

std::string CsvDocument::str() const {
  std::string out;
  if (!timestamp_.empty()) out += "# generated " + timestamp_ + '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i > 0) out += ',';
    out += columns_[i];
  }
  out += '\n';
  out += body_;
  if (rows_ > 0) out += '\n';
  return out;
}

}  // namespace ctfsim
