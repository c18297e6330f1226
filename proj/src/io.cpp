#include "lexopt/io.hpp"

#include <fstream>
#include <iterator>

#include "lexopt/error.hpp"
#include "lexopt/text.hpp"

namespace lexopt::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write to '" + path + "' failed");
}

TsvReader::TsvReader(std::istream& in, std::initializer_list<std::string_view> header)
    : in_(in), columns_(header.size()) {
  std::string expected;
  for (auto h : header) {
    if (!expected.empty()) expected.push_back('\t');
    expected.append(h);
  }
  if (!std::getline(in_, buffer_)) throw ParseError(1, "missing header, expected '" + expected + "'");
  line_ = 1;
  if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
  if (buffer_ != expected) throw ParseError(1, "bad header '" + buffer_ + "', expected '" + expected + "'");
}

std::optional<std::vector<std::string_view>> TsvReader::next() {
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
    if (buffer_.empty()) continue;
    auto fields = text::split(buffer_, '\t');
    if (fields.size() != columns_)
      throw ParseError(line_, "expected " + std::to_string(columns_) + " columns, found " +
                                  std::to_string(fields.size()));
    return fields;
  }
  return std::nullopt;
}

}  // namespace lexopt::io
