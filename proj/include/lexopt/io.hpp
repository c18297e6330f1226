#pragma once

#include <initializer_list>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexopt::io {

/// Whole-file read; throws DataError if the file cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Line reader for the project's TSV formats. The first line must equal the
/// expected header exactly; each data row must have the same column count.
class TsvReader {
 public:
  TsvReader(std::istream& in, std::initializer_list<std::string_view> header);

  /// Next data row, or nullopt at end of input. Views are valid until the next call.
  std::optional<std::vector<std::string_view>> next();
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t columns_;
  std::size_t line_ = 0;
  std::string buffer_;
};

}  // namespace lexopt::io
