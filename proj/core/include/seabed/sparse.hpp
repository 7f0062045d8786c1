#pragma once

#include <span>
#include <string>
#include <vector>

namespace seabed {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols, std::vector<Triplet> triplets);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  double coeff(int row, int col) const;
  std::vector<double> diagonal() const;
  double sum() const;

  /// max |A_ij - A_ji| / max |A_ij|
  double asymmetry() const;
  bool row_is_zero(int row) const;

  std::vector<double> to_dense() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// Plain "row col value" text, one nonzero per line, 0-based indices.
void write_coordinate(const CsrMatrix& matrix, const std::string& path);

}  // namespace seabed
