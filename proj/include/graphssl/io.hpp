#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "graphssl/graph.hpp"
#include "graphssl/spectral.hpp"

namespace graphssl {

enum class Format { csv, gnuplot };

// 17 significant digits, so values survive a text round trip.
std::string format_double(double value);

/// Column-oriented numeric table written as CSV (header row) or as a gnuplot block
/// (commented header, whitespace separated).
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  void add_row(std::vector<double> row);
  void write(std::ostream& out, Format format = Format::csv) const;
  void save(const std::string& path, Format format = Format::csv) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Numeric CSV: one row per line, the same number of columns on every line. Errors name the
/// line number.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path, bool header = false);

Matrix read_features_csv(const std::string& path, bool header = false);
/// Two columns `index,value`, 0-based indices.
std::vector<Label> read_labels_csv(const std::string& path, bool header = false);
Table read_table_csv(const std::string& path);

void write_edge_list(const Graph& graph, std::ostream& out);
/// First row eigenvalues, then one row of eigenvector entries per node.
void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out);

}  // namespace graphssl
