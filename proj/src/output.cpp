#include "superband/output.hpp"

#include "superband/error.hpp"

#include <cmath>
#include <cstdio>

namespace superband {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), columns_(columns) {
  if (!out_) throw ConfigError("output: cannot write " + path.string());
  out_ << "# config_hash=" << config_hash << "\n";
}

CsvWriter::~CsvWriter() {
  write_header_once();
}

void CsvWriter::comment(const std::string& line) {
  out_ << "# " << line << "\n";
}

void CsvWriter::write_header_once() {
  if (header_written_) return;
  for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
  out_ << "\n";
  header_written_ = true;
}

void CsvWriter::row(const std::vector<double>& values) {
  write_header_once();
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  write_header_once();
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

std::string filename_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", value);
  std::string s = buf;
  for (auto& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
    if (c == '+') c = '_';
  }
  return s;
}

} // namespace superband
