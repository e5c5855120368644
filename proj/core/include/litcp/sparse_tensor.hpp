#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace litcp {

using Coord = std::uint32_t;

/// Order-d sparse tensor in coordinate (COO) format.
///
/// Nonzeros are kept lexicographically sorted by coordinate, pairwise
/// distinct, and strictly positive. Coordinates are stored flat: nonzero k
/// occupies coords[k*order, (k+1)*order). Instances are immutable once built.
class SparseTensor {
 public:
  struct Entry {
    std::vector<Coord> coord;
    double value = 0.0;

    bool operator==(const Entry&) const = default;
  };

  SparseTensor() = default;

  /// Builds a tensor from (coordinate, value) pairs. Duplicate coordinates
  /// are summed, zero sums dropped, and the result sorted.
  ///
  /// Throws std::invalid_argument for a bad shape, wrong coordinate length,
  /// or a non-finite / negative value, and std::out_of_range (naming the
  /// mode) for a coordinate outside the shape.
  static SparseTensor from_entries(std::vector<Entry> entries,
                                   std::vector<std::size_t> shape);

  std::size_t order() const { return shape_.size(); }
  std::span<const std::size_t> shape() const { return shape_; }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
  std::size_t nnz() const { return values_.size(); }

  Coord index(std::size_t k, std::size_t mode) const {
    return coords_[k * shape_.size() + mode];
  }
  std::span<const Coord> coord(std::size_t k) const {
    return {coords_.data() + k * shape_.size(), shape_.size()};
  }
  std::span<const Coord> coords() const { return coords_; }
  std::span<const double> values() const { return values_; }

  /// Reads the entries back in storage order.
  std::vector<Entry> entries() const;

  /// Product of the extents in floating point; corpus-scale shapes
  /// overflow 64-bit integers.
  double cell_count() const;

  bool operator==(const SparseTensor&) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<Coord> coords_;
  std::vector<double> values_;
};

double frobenius_norm(const SparseTensor& t);
inline std::size_t nnz(const SparseTensor& t) { return t.nnz(); }
double density(const SparseTensor& t);
/// density() for a tensor that is only described by its statistics.
double density(std::size_t nonzeros, std::span<const std::size_t> shape);

/// Bidirectional label <-> index mapping for one tensor mode.
class AxisMap {
 public:
  AxisMap() = default;
  /// Throws std::invalid_argument on a duplicate label.
  explicit AxisMap(std::vector<std::string> labels);

  /// Returns the index of `label`, appending it if unseen.
  std::size_t intern(std::string_view label);
  std::optional<std::size_t> find(std::string_view label) const;
  /// Throws std::out_of_range for an unknown label.
  std::size_t index_of(std::string_view label) const;

  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  bool operator==(const AxisMap& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// A tensor plus the names and label lists that give its modes meaning.
struct LabeledTensor {
  SparseTensor tensor;
  std::vector<std::string> mode_names;
  std::vector<AxisMap> axes;

  /// Throws std::invalid_argument unless there is one name and one axis per
  /// mode and every axis size equals the mode extent.
  void validate() const;
  /// Index of the mode named `name`, if any.
  std::optional<std::size_t> mode_index(std::string_view name) const;
};

/// Numeric labels "0".."n-1" for every mode; used for unlabeled tensors.
LabeledTensor with_default_labels(SparseTensor t);

// On-disk layout of a tensor directory:
//
//   tensor.tns   header + one nonzero per line
//   axis-<k>.txt one label per line for mode k
//
// tensor.tns:
//   litcp-tensor 1
//   order <d>
//   shape <I_0> ... <I_{d-1}>
//   modes <name_0> ... <name_{d-1}>
//   nnz <n>
//   <c_0> ... <c_{d-1}> <value>     (n lines, zero-based, sorted)
//
// Values use the shortest round-trip decimal form, so save/load is lossless.
inline constexpr int kTensorFormatVersion = 1;

void save_tensor(const std::filesystem::path& dir, const LabeledTensor& t);
/// Throws std::runtime_error on unreadable files, malformed content, or a
/// shape / label-count mismatch.
LabeledTensor load_tensor(const std::filesystem::path& dir);

}  // namespace litcp
