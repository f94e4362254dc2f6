#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace demo2prog {

/// Comma-separated writer with deterministic number formatting (shortest
/// round-trip representation), so identical data produces identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void row(const std::vector<std::string>& fields);

  void begin_row() { first_in_row_ = true; }
  void field(const std::string& value);
  void field(double value);
  void field(std::size_t value);
  void field(int value);
  void end_row();

 private:
  void sep();
  std::ofstream out_;
  bool first_in_row_ = true;
};

std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Numeric CSV with a single header line.
CsvTable read_csv(const std::string& path);

}  // namespace demo2prog
