#include "litcp/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace litcp {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("khatri_rao: column counts differ (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.cols()) + ")");
  }
  const std::size_t r = a.cols();
  Matrix out(a.rows() * b.rows(), r);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto dst = out.row(i * b.rows() + j);
      auto ar = a.row(i);
      auto br = b.row(j);
      for (std::size_t c = 0; c < r; ++c) dst[c] = ar[c] * br[c];
    }
  }
  return out;
}

Matrix gram(const Matrix& a) {
  const std::size_t r = a.cols();
  Matrix g(r, r);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t p = 0; p < r; ++p) {
      const double v = row[p];
      for (std::size_t q = p; q < r; ++q) g(p, q) += v * row[q];
    }
  }
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < p; ++q) g(p, q) = g(q, p);
  return g;
}

Matrix hadamard_all(std::span<const Matrix> mats) {
  if (mats.empty()) throw std::invalid_argument("hadamard_all: empty list");
  Matrix out = mats.front();
  for (std::size_t k = 1; k < mats.size(); ++k) {
    const Matrix& m = mats[k];
    if (m.rows() != out.rows() || m.cols() != out.cols()) {
      throw std::invalid_argument("hadamard_all: shape mismatch");
    }
    auto dst = out.data();
    auto src = m.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= src[i];
  }
  return out;
}

Matrix solve_gram(const Matrix& g, const Matrix& rhs) {
  const std::size_t r = g.rows();
  if (g.cols() != r) throw std::invalid_argument("solve_gram: G must be square");
  if (rhs.cols() != r) {
    throw std::invalid_argument("solve_gram: RHS has " + std::to_string(rhs.cols()) +
                                " columns, G is " + std::to_string(r) + "x" +
                                std::to_string(r));
  }
  if (!g.all_finite() || !rhs.all_finite()) {
    throw std::invalid_argument("solve_gram: non-finite input");
  }

  Matrix x(rhs.rows(), r);
  if (r == 0 || rhs.rows() == 0) return x;

  const Eigen::MatrixXd gm = view(g);
  const double trace = gm.trace();
  if (trace <= 0.0) return x;

  // G symmetric, so X G = RHS  <=>  G X^T = RHS^T.
  const Eigen::MatrixXd rhs_t = view(rhs).transpose();
  Eigen::MatrixXd sol;
  Eigen::LLT<Eigen::MatrixXd> llt(gm);
  if (llt.info() == Eigen::Success &&
      llt.rcond() > std::numeric_limits<double>::epsilon()) {
    sol = llt.solve(rhs_t);
  } else {
    Eigen::MatrixXd ridged = gm;
    ridged.diagonal().array() += 1e-12 * trace / static_cast<double>(r);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(ridged);
    sol = ldlt.solve(rhs_t);
  }
  Eigen::Map<RowMajor>(x.data().data(), static_cast<Eigen::Index>(x.rows()),
                       static_cast<Eigen::Index>(r)) = sol.transpose();
  return x;
}

NormalizedColumns normalize_columns_l1(const Matrix& a) {
  NormalizedColumns out{a, std::vector<double>(a.cols(), 0.0)};
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double sum = 0.0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      sum += a(i, c);
      abs_sum += std::abs(a(i, c));
    }
    if (abs_sum == 0.0) continue;
    if (std::abs(sum) <= 1e-12 * abs_sum) {
      out.weights[c] = 1.0;
      continue;
    }
    // Leave already-normalized columns bit-identical so normalization is
    // idempotent.
    if (std::abs(sum - 1.0) <= 1e-13) {
      out.weights[c] = 1.0;
      continue;
    }
    out.weights[c] = sum;
    for (std::size_t i = 0; i < a.rows(); ++i) out.matrix(i, c) = a(i, c) / sum;
  }
  return out;
}

std::vector<double> column_norms(const Matrix& a) {
  std::vector<double> n(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t c = 0; c < a.cols(); ++c) n[c] += row[c] * row[c];
  }
  for (double& v : n) v = std::sqrt(v);
  return n;
}

}  // namespace litcp
