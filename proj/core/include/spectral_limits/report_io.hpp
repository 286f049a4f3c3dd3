#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spectral_limits {

inline constexpr const char* kToolVersion = "0.3.0";

/// Appends v with 17 significant digits ("%.17g"); infinities print as inf/-inf, NaN as nan.
void append_number(std::string& out, double v);
std::string format_number(double v);

/// A CSV table built row by row; all floats use format_number.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  CsvTable& add(double v);
  CsvTable& add(long long v);
  CsvTable& add(std::size_t v) { return add(static_cast<long long>(v)); }
  CsvTable& add(int v) { return add(static_cast<long long>(v)); }
  CsvTable& add(std::uint64_t v, bool as_unsigned);
  CsvTable& add(bool v) { return add(static_cast<long long>(v ? 1 : 0)); }
  CsvTable& add(const std::string& v);
  CsvTable& add(const char* v) { return add(std::string(v)); }
  /// Closes the current row; throws if it has the wrong number of fields.
  void end_row();

  std::size_t rows() const noexcept { return rows_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::string body_;
  std::string line_;
  std::size_t fields_ = 0;
  std::size_t rows_ = 0;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

struct RunMeta {
  std::string command;
  std::string config_path;
  std::uint64_t config_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> n;
  unsigned threads = 1;
  std::vector<std::string> outputs;
};

/// JSON with tool version, rng algorithm, config hash (hex FNV-1a), seeds, n list and outputs.
std::string run_meta_json(const RunMeta& meta);

}  // namespace spectral_limits
