#include "ifeig/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace ifeig {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<int> col, std::vector<double> val)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_(std::move(col)), val_(std::move(val)) {
  if (row_ptr_.size() != rows_ + 1 || col_.size() != val_.size() || row_ptr_.back() != val_.size())
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> ptr(n + 1);
  std::iota(ptr.begin(), ptr.end(), std::size_t{0});
  std::vector<int> col(n);
  std::iota(col.begin(), col.end(), 0);
  return SparseMatrix(n, n, std::move(ptr), std::move(col), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& d) {
  SparseBuilder b(d.rows(), d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(i, j) != 0.0) b.add(static_cast<int>(i), static_cast<int>(j), d(i, j));
  return b.finalize();
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<int>(j));
  return (it != last && *it == static_cast<int>(j)) ? val_[static_cast<std::size_t>(it - col_.begin())] : 0.0;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> ptr(cols_ + 1, 0);
  for (int c : col_) ++ptr[static_cast<std::size_t>(c) + 1];
  for (std::size_t k = 1; k < ptr.size(); ++k) ptr[k] += ptr[k - 1];
  std::vector<int> col(col_.size());
  std::vector<double> val(val_.size());
  std::vector<std::size_t> fill(ptr.begin(), ptr.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t dst = fill[static_cast<std::size_t>(col_[k])]++;
      col[dst] = static_cast<int>(i);
      val[dst] = val_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(ptr), std::move(col), std::move(val));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, static_cast<std::size_t>(col_[k])) = val_[k];
  return d;
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (double& v : out.val_) v *= s;
  return out;
}

double SparseMatrix::asymmetry() const {
  if (rows_ != cols_) throw std::invalid_argument("asymmetry: matrix not square");
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      m = std::max(m, std::abs(val_[k] - at(static_cast<std::size_t>(col_[k]), i)));
  return m;
}

SparseMatrix SparseBuilder::finalize() {
  for (const auto& e : entries_) {
    if (e.i < 0 || e.j < 0 || static_cast<std::size_t>(e.i) >= rows_ || static_cast<std::size_t>(e.j) >= cols_)
      throw std::out_of_range("SparseBuilder: entry index out of range");
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  std::vector<std::size_t> ptr(rows_ + 1, 0);
  std::vector<int> col;
  std::vector<double> val;
  col.reserve(entries_.size());
  val.reserve(entries_.size());
  for (std::size_t k = 0; k < entries_.size();) {
    const Entry& e = entries_[k];
    double sum = 0.0;
    std::size_t l = k;
    for (; l < entries_.size() && entries_[l].i == e.i && entries_[l].j == e.j; ++l) sum += entries_[l].v;
    if (sum != 0.0) {
      col.push_back(e.j);
      val.push_back(sum);
      ++ptr[static_cast<std::size_t>(e.i) + 1];
    }
    k = l;
  }
  for (std::size_t k = 1; k < ptr.size(); ++k) ptr[k] += ptr[k - 1];
  entries_.clear();
  return SparseMatrix(rows_, cols_, std::move(ptr), std::move(col), std::move(val));
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) throw std::invalid_argument("spmv: dimension mismatch");
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[static_cast<std::size_t>(col[k])];
    y[i] = s;
  }
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  spmv(a, x, y);
  return y;
}

Vector spmv_transpose(const SparseMatrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw std::invalid_argument("spmv_transpose: dimension mismatch");
  Vector y(a.cols(), 0.0);
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) y[static_cast<std::size_t>(col[k])] += val[k] * x[i];
  return y;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  std::vector<std::size_t> ptr(a.rows() + 1, 0);
  std::vector<int> col;
  std::vector<double> val;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<int> marker(b.cols(), -1);
  std::vector<int> pattern;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    pattern.clear();
    for (std::size_t ka = a.row_ptr()[i]; ka < a.row_ptr()[i + 1]; ++ka) {
      const auto r = static_cast<std::size_t>(a.col_index()[ka]);
      const double av = a.values()[ka];
      for (std::size_t kb = b.row_ptr()[r]; kb < b.row_ptr()[r + 1]; ++kb) {
        const int c = b.col_index()[kb];
        if (marker[static_cast<std::size_t>(c)] != static_cast<int>(i)) {
          marker[static_cast<std::size_t>(c)] = static_cast<int>(i);
          pattern.push_back(c);
          acc[static_cast<std::size_t>(c)] = 0.0;
        }
        acc[static_cast<std::size_t>(c)] += av * b.values()[kb];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (int c : pattern) {
      if (acc[static_cast<std::size_t>(c)] != 0.0) {
        col.push_back(c);
        val.push_back(acc[static_cast<std::size_t>(c)]);
      }
    }
    ptr[i + 1] = col.size();
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(ptr), std::move(col), std::move(val));
}

double bilinear(const SparseMatrix& a, std::span<const double> x, std::span<const double> y) {
  const Vector ay = spmv(a, y);
  return dot(x, ay);
}

void write_sym_coo(const SparseMatrix& a, std::ostream& out) {
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      if (static_cast<std::size_t>(a.col_index()[k]) >= i) ++nnz;
  out << "%%sym-coo\n" << a.rows() << ' ' << a.cols() << ' ' << nnz << "\n";
  char buf[64];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      if (static_cast<std::size_t>(a.col_index()[k]) < i) continue;
      std::snprintf(buf, sizeof buf, "%.17g", a.values()[k]);
      out << i << ' ' << a.col_index()[k] << ' ' << buf << "\n";
    }
  }
}

void write_sym_coo(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_sym_coo(a, out);
}

}  // namespace ifeig
