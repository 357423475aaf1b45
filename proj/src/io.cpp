#include "graphssl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "graphssl/error.hpp"

namespace graphssl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& path, std::size_t line) {
  const std::string t = trim(field);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw InvalidArgument(path + ":" + std::to_string(line) + ": cannot parse '" + t + "' as a number");
  }
  return v;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw InvalidArgument("a table needs at least one column");
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw InvalidArgument("row width does not match the table columns");
  rows_.push_back(std::move(row));
}

void Table::write(std::ostream& out, Format format) const {
  const char* sep = format == Format::csv ? "," : " ";
  if (format == Format::gnuplot) out << "# ";
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? sep : "") << columns_[c];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? sep : "") << format_double(row[c]);
    out << '\n';
  }
  if (format == Format::gnuplot) out << "\n\n";
}

void Table::save(const std::string& path, Format format) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write(out, format);
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, bool header) {
  std::ifstream in = open(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (header && number == 1) continue;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(parse_number(field, path, number));
    if (!line.empty() && line.back() == ',') {
      throw InvalidArgument(path + ":" + std::to_string(number) + ": trailing empty field");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument(path + ":" + std::to_string(number) + ": expected " +
                            std::to_string(rows.front().size()) + " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix read_features_csv(const std::string& path, bool header) {
  const auto rows = read_numeric_csv(path, header);
  if (rows.empty()) throw InvalidArgument(path + ": no feature rows");
  Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return x;
}

std::vector<Label> read_labels_csv(const std::string& path, bool header) {
  const auto rows = read_numeric_csv(path, header);
  std::vector<Label> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw InvalidArgument(path + ": labels need exactly two columns index,value");
    const double idx = rows[r][0];
    if (idx < 0 || idx != std::floor(idx)) {
      throw InvalidArgument(path + ": label row " + std::to_string(r + 1) + " has a non-integer index");
    }
    labels.push_back({static_cast<Index>(idx), rows[r][1]});
  }
  return labels;
}

Table read_table_csv(const std::string& path) {
  std::ifstream in = open(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path + ": empty table");
  std::vector<std::string> columns;
  std::stringstream head(line);
  std::string name;
  while (std::getline(head, name, ',')) columns.push_back(trim(name));
  Table table(columns);
  for (auto& row : read_numeric_csv(path, true)) {
    if (row.size() != columns.size()) throw InvalidArgument(path + ": row width does not match the header");
    table.add_row(std::move(row));
  }
  return table;
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  out << "i,j,weight\n";
  const SparseMatrix& w = graph.weights();
  for (Index j = 0; j < w.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(w, j); it; ++it) {
      if (it.row() < it.col()) out << it.row() << ',' << it.col() << ',' << format_double(it.value()) << '\n';
    }
  }
}

void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out) {
  auto row = [&](auto&& values) {
    for (Index c = 0; c < values.size(); ++c) out << (c ? "," : "") << format_double(values[c]);
    out << '\n';
  };
  row(spectrum.eigenvalues());
  for (Index r = 0; r < spectrum.size(); ++r) row(Vector(spectrum.eigenvectors().row(r).transpose()));
}

}  // namespace graphssl
