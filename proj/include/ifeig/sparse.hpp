#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ifeig/dense.hpp"

namespace ifeig {

/// Compressed-row matrix. Column indices are sorted within each row and no
/// explicit zeros are stored. Immutable once built.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<int> col, std::vector<double> val);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(const DenseMatrix& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_index() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  // Entry lookup by binary search; 0 when absent.
  double at(std::size_t i, std::size_t j) const;
  double diagonal(std::size_t i) const { return at(i, i); }

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  SparseMatrix scaled(double s) const;
  // max |A_ij - A_ji|; 0 for an exactly symmetric matrix.
  double asymmetry() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> val_;
};

/// Triplet accumulator. Duplicates are summed in insertion order, so two
/// mirrored entry streams produce bit-identical values.
class SparseBuilder {
 public:
  SparseBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  SparseMatrix finalize();

 private:
  struct Entry {
    int i, j;
    double v;
  };
  std::size_t rows_, cols_;
  std::vector<Entry> entries_;
};

Vector spmv(const SparseMatrix& a, std::span<const double> x);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
// y = A^T x
Vector spmv_transpose(const SparseMatrix& a, std::span<const double> x);

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

// x^T A y
double bilinear(const SparseMatrix& a, std::span<const double> x, std::span<const double> y);

// Debug export: "%%sym-coo", "rows cols nnz", then "i j value" for i <= j (0-based).
void write_sym_coo(const SparseMatrix& a, std::ostream& out);
void write_sym_coo(const SparseMatrix& a, const std::string& path);

}  // namespace ifeig
