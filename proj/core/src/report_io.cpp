#include "spectral_limits/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "spectral_limits/errors.hpp"
#include "spectral_limits/rng.hpp"

namespace spectral_limits {

void append_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0.0 ? "inf" : "-inf";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::string format_number(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw Error("CsvTable: need at least one column");
}

CsvTable& CsvTable::add(double v) {
  if (fields_++ > 0) line_ += ',';
  append_number(line_, v);
  return *this;
}

CsvTable& CsvTable::add(long long v) {
  if (fields_++ > 0) line_ += ',';
  line_ += std::to_string(v);
  return *this;
}

CsvTable& CsvTable::add(std::uint64_t v, bool) {
  if (fields_++ > 0) line_ += ',';
  line_ += std::to_string(v);
  return *this;
}

CsvTable& CsvTable::add(const std::string& v) {
  if (v.find_first_of(",\"\n") != std::string::npos) throw Error("CsvTable: field needs quoting: " + v);
  if (fields_++ > 0) line_ += ',';
  line_ += v;
  return *this;
}

void CsvTable::end_row() {
  if (fields_ != columns_.size()) {
    throw Error("CsvTable: row has " + std::to_string(fields_) + " fields, expected " +
                std::to_string(columns_.size()));
  }
  body_ += line_;
  body_ += '\n';
  line_.clear();
  fields_ = 0;
  ++rows_;
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i > 0) out += ',';
    out += columns_[i];
  }
  out += '\n';
  return out + body_;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

std::string run_meta_json(const RunMeta& meta) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(meta.config_hash));
  nlohmann::ordered_json j;
  j["tool"] = "spectral-limits";
  j["tool_version"] = kToolVersion;
  j["command"] = meta.command;
  j["config_path"] = meta.config_path;
  j["config_hash_fnv1a64"] = hash;
  j["rng"] = kRngAlgorithm;
  j["seeds"] = meta.seeds;
  j["n"] = meta.n;
  j["threads"] = meta.threads;
  j["outputs"] = meta.outputs;
  return j.dump(2) + "\n";
}

}  // namespace spectral_limits
