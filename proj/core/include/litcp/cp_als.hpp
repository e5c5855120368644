#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "litcp/linalg.hpp"
#include "litcp/sparse_tensor.hpp"

namespace litcp {

/// Per-component flags recorded by arrange().
enum ComponentFlags : std::uint8_t {
  kFlagNone = 0,
  /// No sign flip of the factor columns can make the weight non-negative.
  kFlagNegativeWeight = 1u << 0,
  /// Some factor column cancels to a zero sum and could not be L1-normalized.
  kFlagUnnormalized = 1u << 1,
};

/// Weighted Kruskal model [[lambda; A^(1), ..., A^(d)]].
struct KruskalModel {
  std::vector<double> weights;
  std::vector<FactorMatrix> factors;
  std::vector<std::uint8_t> flags;

  std::size_t rank() const { return weights.size(); }
  std::size_t order() const { return factors.size(); }

  /// Throws std::invalid_argument when factor column counts disagree with
  /// the weight count or flags are missing.
  void validate() const;

  bool operator==(const KruskalModel&) const = default;
};

struct AlsOptions {
  int max_iters = 100;
  double fit_tolerance = 1e-6;
  std::uint64_t seed = 0;
  /// Worker threads for MTTKRP; 1 selects the sequential reference kernel.
  unsigned threads = 1;

  void validate() const;
};

/// Raised when an ALS sweep produces non-finite values.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(int iteration, std::size_t mode, const std::string& what)
      : std::runtime_error(what), iteration_(iteration), mode_(mode) {}
  int iteration() const { return iteration_; }
  std::size_t mode() const { return mode_; }

 private:
  int iteration_;
  std::size_t mode_;
};

/// Uniform(0,1) factors, one stream per mode seeded by (seed, mode). The
/// generator and the bits-to-double mapping are fully specified, so the
/// output is identical across platforms and standard libraries.
std::vector<FactorMatrix> init_factors(std::span<const std::size_t> shape,
                                       std::size_t rank, std::uint64_t seed);

/// Matricized tensor times Khatri-Rao product for `mode`:
///   out(i, r) = sum over nonzeros x with x.coord[mode] == i of
///               x.value * prod_{k != mode} factors[k](x.coord[k], r)
/// factors[mode] is ignored apart from its column count. With threads > 1
/// nonzeros are split into contiguous blocks, each accumulated privately and
/// summed in block order; the result then differs from the sequential kernel
/// only by floating-point reassociation.
FactorMatrix mttkrp(const SparseTensor& t, std::span<const FactorMatrix> factors,
                    std::size_t mode, unsigned threads = 1);

/// ||M||_F^2 = lambda^T (hadamard of all Grams) lambda.
double model_norm_squared(const KruskalModel& m);

/// <X, M> evaluated sparsely.
double inner_product(const SparseTensor& t, const KruskalModel& m);

/// 1 - ||X - M||_F / ||X||_F. Throws std::invalid_argument for a zero-norm
/// tensor or shape mismatch.
double fit(const SparseTensor& t, const KruskalModel& m);

/// Canonical representation: every factor column sums to 1 (sign flips and
/// magnitudes absorbed into the weight) and components sorted by descending
/// |weight|, stable in the original index. The represented tensor is
/// unchanged.
KruskalModel arrange(KruskalModel m);

struct AlsResult {
  KruskalModel model;
  /// Fit after each full sweep.
  std::vector<double> fit_history;
  int iterations = 0;
  bool converged = false;
};

/// CP decomposition by alternating least squares.
///
/// Each sweep updates every mode in turn: G = hadamard of the other modes'
/// Grams, A_mode = solve_gram(G, mttkrp(X, A, mode)), then the columns are
/// rescaled to unit 2-norm with the norms held in the weights. The fit is
/// computed once per sweep; iteration stops when it improves by less than
/// fit_tolerance or after max_iters sweeps. The returned model is arranged.
AlsResult cp_als(const SparseTensor& t, std::size_t rank, const AlsOptions& opts);

// Model file layout (text, one item per line):
//
//   litcp-model 1
//   order <d>
//   shape <I_0> ... <I_{d-1}>
//   rank <R>
//   axes <reference to the tensor directory holding the labels, or ->
//   weights <w_1> ... <w_R>
//   flags <f_1> ... <f_R>
//   fit_history <n> <h_1> ... <h_n>
//   factor <k> <rows> <cols>       (repeated for k = 0..d-1, followed by
//   <row values>                    `rows` lines of `cols` values)
//
// Numbers use the shortest round-trip decimal form.
inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
  KruskalModel model;
  std::vector<std::size_t> shape;
  std::string axes_ref = "-";
  std::vector<double> fit_history;

  bool operator==(const ModelFile&) const = default;
};

void save_model(const std::filesystem::path& file, const ModelFile& m);
ModelFile load_model(const std::filesystem::path& file);

}  // namespace litcp
