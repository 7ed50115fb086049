#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace setreadout {

/// Decimal text with 12 significant digits, the fixed format of every CSV output.
std::string format_number(double value);

/// Accumulates a CSV document in memory so it can be digested before writing.
class CsvDocument {
 public:
  explicit CsvDocument(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& fields);
  const std::string& text() const noexcept { return text_; }
  std::size_t columns() const noexcept { return columns_; }

 private:
  std::string text_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ValidationError if missing.
  std::size_t column(const std::string& name) const;
};

/// Reads a plain comma-separated file (no quoting). Throws IoError.
CsvTable read_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace setreadout
