#include "npmix/csv.hpp"

#include <fstream>
#include <sstream>

namespace npmix {

int CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  CsvTable table;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
  }
  const size_t ncol = table.columns.size();
  if (ncol == 0) throw CsvError(path + ": empty header");

  std::vector<double> values;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        size_t pos;
        values.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw CsvError(path + ": non-numeric cell at row " +
                       std::to_string(row) + ", column " + std::to_string(col));
      }
    }
    if (col != ncol)
      throw CsvError(path + ": row " + std::to_string(row) + " has " +
                     std::to_string(col) + " cells, expected " +
                     std::to_string(ncol));
  }
  const auto nrow = static_cast<Eigen::Index>(values.size() / ncol);
  table.data.resize(nrow, static_cast<Eigen::Index>(ncol));
  for (Eigen::Index i = 0; i < nrow; ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(ncol); ++j)
      table.data(i, j) = values[i * ncol + j];
  return table;
}

Eigen::MatrixXd feature_matrix(const CsvTable& table,
                               std::vector<int>* labels_out) {
  const int label_col = table.column_index("label");
  if (label_col < 0) {
    if (labels_out) labels_out->clear();
    return table.data;
  }
  if (labels_out) {
    labels_out->resize(table.data.rows());
    for (Eigen::Index i = 0; i < table.data.rows(); ++i)
      (*labels_out)[i] = static_cast<int>(table.data(i, label_col));
  }
  Eigen::MatrixXd out(table.data.rows(), table.data.cols() - 1);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < table.data.cols(); ++j) {
    if (j == label_col) continue;
    out.col(k++) = table.data.col(j);
  }
  return out;
}

}  // namespace npmix
