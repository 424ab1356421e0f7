#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace ctfsim {

// Accumulates a CSV document: optional `# generated <timestamp>` comment
// line, one header row, then data rows. Doubles use shortest round-trip text.
class CsvDocument {
 public:
  CsvDocument(std::vector<std::string> columns, std::string timestamp = {});

  class Row {
   public:
    Row& operator<<(double value);
    Row& operator<<(long long value);
    Row& operator<<(int value) { return *this << static_cast<long long>(value); }
    Row& operator<<(std::size_t value) { return *this << static_cast<long long>(value); }
    Row& operator<<(std::string_view text);

   private:
    friend class CsvDocument;
    explicit Row(CsvDocument& doc) : doc_(doc) {}
    void separator();
    CsvDocument& doc_;
    std::size_t cells_ = 0;
  };

  // Starts a new row; the previous row must be complete.
  Row row();

  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::size_t rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::string timestamp_;
  std::string body_;
  std::size_t rows_ = 0;
};

}  // namespace ctfsim
