#include "litcp/cp_als.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace litcp {

void KruskalModel::validate() const {
  const std::size_t r = weights.size();
  if (flags.size() != r) {
    throw std::invalid_argument("model has " + std::to_string(flags.size()) +
                                " flags for rank " + std::to_string(r));
  }
  for (std::size_t m = 0; m < factors.size(); ++m) {
    if (factors[m].cols() != r) {
      throw std::invalid_argument("factor " + std::to_string(m) + " has " +
                                  std::to_string(factors[m].cols()) +
                                  " columns for rank " + std::to_string(r));
    }
  }
}

void AlsOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(fit_tolerance > 0.0)) throw std::invalid_argument("fit_tolerance must be > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::vector<FactorMatrix> init_factors(std::span<const std::size_t> shape,
                                       std::size_t rank, std::uint64_t seed) {
  if (rank == 0) throw std::invalid_argument("rank must be >= 1");
  std::vector<FactorMatrix> factors;
  factors.reserve(shape.size());
  for (std::size_t m = 0; m < shape.size(); ++m) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(m)};
    std::mt19937_64 gen(seq);
    FactorMatrix f(shape[m], rank);
    // 53 random bits centred in their bucket: strictly inside (0, 1).
    for (double& v : f.data()) v = (static_cast<double>(gen() >> 11) + 0.5) * 0x1p-53;
    factors.push_back(std::move(f));
  }
  return factors;
}

namespace {

void check_factors(const SparseTensor& t, std::span<const FactorMatrix> factors,
                   std::size_t mode) {
  if (mode >= t.order()) {
    throw std::out_of_range("mode " + std::to_string(mode) +
                            " out of range for order " + std::to_string(t.order()));
  }
  if (factors.size() != t.order()) {
    throw std::invalid_argument("expected " + std::to_string(t.order()) +
                                " factors, got " + std::to_string(factors.size()));
  }
  const std::size_t r = factors[mode].cols();
  for (std::size_t m = 0; m < t.order(); ++m) {
    if (factors[m].cols() != r) {
      throw std::invalid_argument("factor " + std::to_string(m) +
                                  " has a different column count");
    }
    if (m != mode && factors[m].rows() != t.extent(m)) {
      throw std::invalid_argument("factor " + std::to_string(m) + " has " +
                                  std::to_string(factors[m].rows()) +
                                  " rows, tensor extent is " +
                                  std::to_string(t.extent(m)));
    }
  }
}

void mttkrp_block(const SparseTensor& t, std::span<const FactorMatrix> factors,
                  std::size_t mode, std::size_t begin, std::size_t end,
                  FactorMatrix& out) {
  const std::size_t r = out.cols();
  const std::size_t order = t.order();
  const auto values = t.values();
  std::vector<double> acc(r);
  for (std::size_t k = begin; k < end; ++k) {
    std::fill(acc.begin(), acc.end(), values[k]);
    const auto c = t.coord(k);
    for (std::size_t m = 0; m < order; ++m) {
      if (m == mode) continue;
      const auto row = factors[m].row(c[m]);
      for (std::size_t j = 0; j < r; ++j) acc[j] *= row[j];
    }
    auto dst = out.row(c[mode]);
    for (std::size_t j = 0; j < r; ++j) dst[j] += acc[j];
  }
}

}  // namespace

FactorMatrix mttkrp(const SparseTensor& t, std::span<const FactorMatrix> factors,
                    std::size_t mode, unsigned threads) {
  check_factors(t, factors, mode);
  const std::size_t rows = t.extent(mode);
  const std::size_t r = factors[mode].cols();
  FactorMatrix out(rows, r);
  const std::size_t nnz = t.nnz();
  const std::size_t blocks = std::min<std::size_t>(std::max(threads, 1u), nnz);
  if (blocks <= 1) {
    mttkrp_block(t, factors, mode, 0, nnz, out);
    return out;
  }

  std::vector<FactorMatrix> partial(blocks, FactorMatrix(rows, r));
  {
    std::vector<std::jthread> workers;
    workers.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t begin = nnz * b / blocks;
      const std::size_t end = nnz * (b + 1) / blocks;
      workers.emplace_back([&, b, begin, end] {
        mttkrp_block(t, factors, mode, begin, end, partial[b]);
      });
    }
  }
  for (const auto& p : partial) {
    auto dst = out.data();
    auto src = p.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

double model_norm_squared(const KruskalModel& m) {
  m.validate();
  const std::size_t r = m.rank();
  if (r == 0) return 0.0;
  std::vector<Matrix> grams;
  grams.reserve(m.order());
  for (const auto& f : m.factors) grams.push_back(gram(f));
  const Matrix h = grams.empty() ? Matrix(r, r, 1.0) : hadamard_all(grams);
  double total = 0.0;
  for (std::size_t p = 0; p < r; ++p)
    for (std::size_t q = 0; q < r; ++q) total += m.weights[p] * h(p, q) * m.weights[q];
  return std::max(total, 0.0);
}

namespace {

void check_model_shape(const SparseTensor& t, const KruskalModel& m) {
  m.validate();
  if (m.order() != t.order()) {
    throw std::invalid_argument("model order " + std::to_string(m.order()) +
                                " differs from tensor order " +
                                std::to_string(t.order()));
  }
  for (std::size_t k = 0; k < t.order(); ++k) {
    if (m.factors[k].rows() != t.extent(k)) {
      throw std::invalid_argument("model factor " + std::to_string(k) +
                                  " does not match the tensor extent");
    }
  }
}

double weighted_column_dot(const KruskalModel& m, const FactorMatrix& u,
                           const FactorMatrix& a) {
  double total = 0.0;
  for (std::size_t j = 0; j < m.rank(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += u(i, j) * a(i, j);
    total += m.weights[j] * s;
  }
  return total;
}

}  // namespace

double inner_product(const SparseTensor& t, const KruskalModel& m) {
  check_model_shape(t, m);
  if (m.rank() == 0) return 0.0;
  const FactorMatrix u = mttkrp(t, m.factors, 0);
  return weighted_column_dot(m, u, m.factors[0]);
}

double fit(const SparseTensor& t, const KruskalModel& m) {
  check_model_shape(t, m);
  const double norm_x = frobenius_norm(t);
  if (norm_x == 0.0) throw std::invalid_argument("fit: tensor has zero norm");

  // ||X - M||^2 = ||X||^2 + ||M||^2 - 2<X,M> regrouped as
  //   sum over nonzeros (x - m)^2  +  (||M||^2 - sum over nonzeros m^2).
  // The first part has no cancellation. The second is the model's mass off
  // the sparsity pattern; below the rounding floor of the subtraction it is
  // indistinguishable from zero.
  const std::size_t r = m.rank();
  double on_pattern_sq_err = 0.0;
  double on_pattern_model_sq = 0.0;
  std::vector<double> acc(r);
  for (std::size_t k = 0; k < t.nnz(); ++k) {
    std::copy(m.weights.begin(), m.weights.end(), acc.begin());
    const auto c = t.coord(k);
    for (std::size_t d = 0; d < t.order(); ++d) {
      const auto row = m.factors[d].row(c[d]);
      for (std::size_t j = 0; j < r; ++j) acc[j] *= row[j];
    }
    const double model_value = std::accumulate(acc.begin(), acc.end(), 0.0);
    const double diff = t.values()[k] - model_value;
    on_pattern_sq_err += diff * diff;
    on_pattern_model_sq += model_value * model_value;
  }
  const double norm_m_sq = model_norm_squared(m);
  double off_pattern = norm_m_sq - on_pattern_model_sq;
  if (off_pattern <= 1e-13 * norm_m_sq) off_pattern = 0.0;
  const double residual = std::sqrt(on_pattern_sq_err + off_pattern);
  return 1.0 - residual / norm_x;
}

KruskalModel arrange(KruskalModel m) {
  m.validate();
  const std::size_t r = m.rank();
  std::vector<std::uint8_t> flags(r, kFlagNone);
  for (auto& factor : m.factors) {
    auto normalized = normalize_columns_l1(factor);
    for (std::size_t j = 0; j < r; ++j) {
      m.weights[j] *= normalized.weights[j];
      if (normalized.weights[j] != 0.0) {
        double sum = 0.0;
        for (std::size_t i = 0; i < factor.rows(); ++i) sum += normalized.matrix(i, j);
        if (std::abs(sum - 1.0) > 1e-10) flags[j] |= kFlagUnnormalized;
      }
    }
    factor = std::move(normalized.matrix);
  }
  for (std::size_t j = 0; j < r; ++j) {
    if (m.weights[j] < 0.0) flags[j] |= kFlagNegativeWeight;
  }

  std::vector<std::size_t> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(m.weights[a]) > std::abs(m.weights[b]);
  });

  KruskalModel out;
  out.weights.resize(r);
  out.flags.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    out.weights[j] = m.weights[perm[j]];
    out.flags[j] = flags[perm[j]];
  }
  for (const auto& factor : m.factors) {
    FactorMatrix f(factor.rows(), r);
    for (std::size_t i = 0; i < factor.rows(); ++i)
      for (std::size_t j = 0; j < r; ++j) f(i, j) = factor(i, perm[j]);
    out.factors.push_back(std::move(f));
  }
  return out;
}

AlsResult cp_als(const SparseTensor& t, std::size_t rank, const AlsOptions& opts) {
  opts.validate();
  if (rank == 0) throw std::invalid_argument("rank must be >= 1");
  if (t.nnz() == 0) throw std::invalid_argument("cp_als: tensor has no nonzeros");

  const std::size_t order = t.order();
  const double norm_x = frobenius_norm(t);

  KruskalModel model;
  model.factors = init_factors(t.shape(), rank, opts.seed);
  model.weights.assign(rank, 1.0);
  model.flags.assign(rank, kFlagNone);

  std::vector<Matrix> grams;
  grams.reserve(order);
  for (const auto& f : model.factors) grams.push_back(gram(f));

  AlsResult result;
  double previous_fit = 0.0;
  std::vector<Matrix> others;
  FactorMatrix last_mttkrp;

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    for (std::size_t n = 0; n < order; ++n) {
      FactorMatrix u = mttkrp(t, model.factors, n, opts.threads);
      others.clear();
      for (std::size_t m = 0; m < order; ++m)
        if (m != n) others.push_back(grams[m]);
      const Matrix v = others.empty() ? Matrix(rank, rank, 1.0) : hadamard_all(others);

      FactorMatrix a;
      try {
        a = solve_gram(v, u);
      } catch (const std::invalid_argument& e) {
        throw NumericalError(iter, n,
                             "cp_als: iteration " + std::to_string(iter) + ", mode " +
                                 std::to_string(n) + ": " + e.what());
      }
      if (!a.all_finite()) {
        throw NumericalError(iter, n,
                             "cp_als: non-finite factor at iteration " +
                                 std::to_string(iter) + ", mode " + std::to_string(n));
      }

      const auto norms = column_norms(a);
      for (std::size_t j = 0; j < rank; ++j) {
        model.weights[j] = norms[j];
        if (norms[j] == 0.0) continue;
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) /= norms[j];
      }
      model.factors[n] = std::move(a);
      grams[n] = gram(model.factors[n]);
      if (n + 1 == order) last_mttkrp = std::move(u);
    }

    const double norm_m_sq = model_norm_squared(model);
    const double ip = weighted_column_dot(model, last_mttkrp, model.factors[order - 1]);
    const double residual_sq = std::max(norm_x * norm_x + norm_m_sq - 2.0 * ip, 0.0);
    const double current_fit = 1.0 - std::sqrt(residual_sq) / norm_x;
    if (!std::isfinite(current_fit)) {
      throw NumericalError(iter, order - 1,
                           "cp_als: non-finite fit at iteration " + std::to_string(iter));
    }
    result.fit_history.push_back(current_fit);
    result.iterations = iter;
    if (iter > 1 && current_fit - previous_fit < opts.fit_tolerance) {
      result.converged = true;
      break;
    }
    previous_fit = current_fit;
  }

  result.model = arrange(std::move(model));
  return result;
}

}  // namespace litcp
