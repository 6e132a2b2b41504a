#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace superband {

/// Scientific notation with 17 significant digits.
std::string format_number(double value);

/// CSV with '#' metadata lines, a header row, comma separators and '.'
/// decimals. Every file starts with "# config_hash=<hash>".
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
            const std::vector<std::string>& columns);
  ~CsvWriter();

  void comment(const std::string& line);
  void row(const std::vector<double>& values);
  /// Mixed row; strings are written verbatim.
  void row(const std::vector<std::string>& cells);

private:
  void write_header_once();

  std::ofstream out_;
  std::vector<std::string> columns_;
  bool header_written_ = false;
};

std::string filename_number(double value);

} // namespace superband
