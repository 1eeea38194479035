#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sdmrt {

bool valid_utf8(std::string_view text) noexcept;

std::vector<std::string_view> split_tokens(std::string_view text);
std::vector<std::string_view> split_on(std::string_view text, char sep);

// %.17g: round-trips every double.
std::string format_exact(double value);
std::string format_fixed(double value, int precision);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// 64-bit FNV-1a; stable across platforms, used for config provenance.
std::uint64_t fnv1a(std::string_view text) noexcept;
std::string hex64(std::uint64_t value);

// Sequential reader over the lines of a serialized artifact. Blank lines and
// comment lines ("# ...") are skipped. The text must outlive the reader.
class LineReader {
 public:
  LineReader(std::string_view text, std::string source_name);

  bool done();
  // Next significant line split on single spaces.
  std::vector<std::string_view> next_fields();
  // Next line, which must start with `key`; returns the remaining fields.
  std::vector<std::string_view> expect(std::string_view key, std::size_t min_values = 1);
  std::string_view peek_key();
  [[noreturn]] void fail(const std::string& what) const;

 private:
  void skip();

  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
  std::string name_;
};

}  // namespace sdmrt
