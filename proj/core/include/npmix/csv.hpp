#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace npmix {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd data;

  int column_index(const std::string& name) const;  // -1 if absent
};

/// Reads an all-numeric CSV with a header row. A non-numeric cell raises
/// CsvError naming the row and column.
CsvTable read_csv(const std::string& path);

/// Feature matrix from a table, dropping a trailing "label" column if present.
/// If labels_out is non-null and the column exists, the labels are copied.
Eigen::MatrixXd feature_matrix(const CsvTable& table,
                               std::vector<int>* labels_out = nullptr);

}  // namespace npmix
