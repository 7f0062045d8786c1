#include "seabed/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "seabed/error.hpp"

namespace seabed {

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(rows + 1, 0);
  int prev_row = -1;
  int prev_col = -1;
  for (const auto& t : triplets) {
    require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols, ErrorKind::index,
            "triplet outside matrix bounds");
    if (t.row == prev_row && t.col == prev_col) {
      values_.back() += t.value;
      continue;
    }
    col_idx_.push_back(t.col);
    values_.push_back(t.value);
    ++row_ptr_[t.row + 1];
    prev_row = t.row;
    prev_col = t.col;
  }
  for (int r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require(static_cast<int>(x.size()) == cols_ && static_cast<int>(y.size()) == rows_,
          ErrorKind::shape, "matrix-vector dimensions do not match");
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sum += values_[k] * x[col_idx_[k]];
    y[r] = sum;
  }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

double CsrMatrix::coeff(int row, int col) const {
  auto begin = col_idx_.begin() + row_ptr_[row];
  auto end = col_idx_.begin() + row_ptr_[row + 1];
  auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_));
  for (int r = 0; r < static_cast<int>(d.size()); ++r) d[r] = coeff(r, r);
  return d;
}

double CsrMatrix::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double CsrMatrix::asymmetry() const {
  double max_abs = 0.0;
  double max_diff = 0.0;
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      max_abs = std::max(max_abs, std::abs(values_[k]));
      max_diff = std::max(max_diff, std::abs(values_[k] - coeff(col_idx_[k], r)));
    }
  }
  return max_abs > 0.0 ? max_diff / max_abs : 0.0;
}

bool CsrMatrix::row_is_zero(int row) const {
  for (int k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) {
    if (values_[k] != 0.0) return false;
  }
  return true;
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> dense(static_cast<std::size_t>(rows_) * cols_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      dense[static_cast<std::size_t>(r) * cols_ + col_idx_[k]] = values_[k];
    }
  }
  return dense;
}

void write_coordinate(const CsrMatrix& matrix, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path);
  char buf[64];
  const auto rp = matrix.row_ptr();
  const auto ci = matrix.col_idx();
  const auto vals = matrix.values();
  for (int r = 0; r < matrix.rows(); ++r) {
    for (int k = rp[r]; k < rp[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
      out << r << ' ' << ci[k] << ' ' << buf << '\n';
    }
  }
}

}  // namespace seabed
