#include "litcp/sparse_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace litcp {

SparseTensor SparseTensor::from_entries(std::vector<Entry> entries,
                                        std::vector<std::size_t> shape) {
  if (shape.empty()) throw std::invalid_argument("tensor order must be >= 1");
  for (std::size_t m = 0; m < shape.size(); ++m) {
    if (shape[m] == 0) {
      throw std::invalid_argument("extent of mode " + std::to_string(m) +
                                  " must be positive");
    }
  }
  const std::size_t order = shape.size();
  for (const auto& e : entries) {
    if (e.coord.size() != order) {
      throw std::invalid_argument("coordinate has " +
                                  std::to_string(e.coord.size()) +
                                  " components, tensor order is " +
                                  std::to_string(order));
    }
    for (std::size_t m = 0; m < order; ++m) {
      if (e.coord[m] >= shape[m]) {
        throw std::out_of_range("coordinate " + std::to_string(e.coord[m]) +
                                " out of bounds in mode " + std::to_string(m) +
                                " (extent " + std::to_string(shape[m]) + ")");
      }
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument("non-finite tensor value");
    }
    if (e.value < 0.0) {
      throw std::invalid_argument("negative tensor value");
    }
  }

  // Sorting the full entry (coordinate, then value) makes the summation order
  // of duplicates independent of the input permutation.
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.coord != b.coord) return a.coord < b.coord;
    return a.value < b.value;
  });

  SparseTensor t;
  t.shape_ = std::move(shape);
  t.coords_.reserve(entries.size() * order);
  t.values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < entries.size() && entries[j].coord == entries[i].coord) {
      sum += entries[j].value;
      ++j;
    }
    if (sum != 0.0) {
      t.coords_.insert(t.coords_.end(), entries[i].coord.begin(),
                       entries[i].coord.end());
      t.values_.push_back(sum);
    }
    i = j;
  }
  return t;
}

std::vector<SparseTensor::Entry> SparseTensor::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (std::size_t k = 0; k < nnz(); ++k) {
    auto c = coord(k);
    out.push_back({std::vector<Coord>(c.begin(), c.end()), values_[k]});
  }
  return out;
}

double SparseTensor::cell_count() const {
  double cells = 1.0;
  for (std::size_t e : shape_) cells *= static_cast<double>(e);
  return cells;
}

double frobenius_norm(const SparseTensor& t) {
  double sum = 0.0;
  for (double v : t.values()) sum += v * v;
  return std::sqrt(sum);
}

double density(const SparseTensor& t) { return density(t.nnz(), t.shape()); }

double density(std::size_t nonzeros, std::span<const std::size_t> shape) {
  if (nonzeros == 0) return 0.0;
  double cells = 1.0;
  for (std::size_t e : shape) cells *= static_cast<double>(e);
  return static_cast<double>(nonzeros) / cells;
}

AxisMap::AxisMap(std::vector<std::string> labels) {
  index_.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index_.emplace(labels[i], i).second) {
      throw std::invalid_argument("duplicate axis label '" + labels[i] + "'");
    }
  }
  labels_ = std::move(labels);
}

std::size_t AxisMap::intern(std::string_view label) {
  std::string key(label);
  auto [it, inserted] = index_.emplace(key, labels_.size());
  if (inserted) labels_.push_back(std::move(key));
  return it->second;
}

std::optional<std::size_t> AxisMap::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AxisMap::index_of(std::string_view label) const {
  auto i = find(label);
  if (!i) throw std::out_of_range("unknown axis label '" + std::string(label) + "'");
  return *i;
}

void LabeledTensor::validate() const {
  const std::size_t d = tensor.order();
  if (mode_names.size() != d) {
    throw std::invalid_argument("expected " + std::to_string(d) +
                                " mode names, got " +
                                std::to_string(mode_names.size()));
  }
  if (axes.size() != d) {
    throw std::invalid_argument("expected " + std::to_string(d) +
                                " axis maps, got " + std::to_string(axes.size()));
  }
  for (std::size_t m = 0; m < d; ++m) {
    if (axes[m].size() != tensor.extent(m)) {
      throw std::invalid_argument("mode " + std::to_string(m) + " has " +
                                  std::to_string(axes[m].size()) +
                                  " labels but extent " +
                                  std::to_string(tensor.extent(m)));
    }
  }
}

std::optional<std::size_t> LabeledTensor::mode_index(std::string_view name) const {
  for (std::size_t m = 0; m < mode_names.size(); ++m) {
    if (mode_names[m] == name) return m;
  }
  return std::nullopt;
}

LabeledTensor with_default_labels(SparseTensor t) {
  LabeledTensor out;
  for (std::size_t m = 0; m < t.order(); ++m) {
    out.mode_names.push_back("mode" + std::to_string(m));
    std::vector<std::string> labels(t.extent(m));
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
    out.axes.emplace_back(std::move(labels));
  }
  out.tensor = std::move(t);
  return out;
}

}  // namespace litcp
