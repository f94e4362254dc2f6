#include "demo2prog/csv.hpp"

#include <charconv>
#include <sstream>

#include "demo2prog/errors.hpp"

namespace demo2prog {

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
  if (!out_) throw MissingInputError("cannot open for writing: " + path);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  begin_row();
  for (const auto& f : fields) field(f);
  end_row();
}

void CsvWriter::sep() {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
}

void CsvWriter::field(const std::string& value) {
  sep();
  out_ << value;
}

void CsvWriter::field(double value) {
  sep();
  out_ << format_double(value);
}

void CsvWriter::field(std::size_t value) {
  sep();
  out_ << value;
}

void CsvWriter::field(int value) {
  sep();
  out_ << value;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_in_row_ = true;
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("empty CSV file: " + path);
  }
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": non-numeric cell '" + cell + "'");
      }
    }
    if (row.size() != table.header.size()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected " + std::to_string(table.header.size()) +
                        " cells");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace demo2prog
