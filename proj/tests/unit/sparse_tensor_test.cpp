#include "litcp/sparse_tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"

namespace fs = std::filesystem;
using litcp::AxisMap;
using litcp::LabeledTensor;
using litcp::SparseTensor;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("litcp_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(SparseTensor, SortsAndCoalescesDuplicates) {
  auto t = SparseTensor::from_entries(
      {{{1, 0}, 2.0}, {{0, 1}, 1.0}, {{1, 0}, 3.0}, {{0, 0}, 4.0}}, {2, 2});
  ASSERT_EQ(t.nnz(), 3u);
  EXPECT_EQ(t.entries(), (std::vector<SparseTensor::Entry>{
                             {{0, 0}, 4.0}, {{0, 1}, 1.0}, {{1, 0}, 5.0}}));
}

TEST(SparseTensor, DropsZeroValues) {
  auto t = SparseTensor::from_entries({{{0, 0}, 0.0}, {{1, 1}, 1.0}}, {2, 2});
  EXPECT_EQ(t.nnz(), 1u);
  EXPECT_EQ(t.index(0, 0), 1u);
}

TEST(SparseTensor, RejectsBadInput) {
  EXPECT_THROW(SparseTensor::from_entries({}, {}), std::invalid_argument);
  EXPECT_THROW(SparseTensor::from_entries({}, {3, 0}), std::invalid_argument);
  EXPECT_THROW(SparseTensor::from_entries({{{0}, 1.0}}, {2, 2}), std::invalid_argument);
  EXPECT_THROW(SparseTensor::from_entries({{{0, 2}, 1.0}}, {2, 2}), std::out_of_range);
  EXPECT_THROW(SparseTensor::from_entries({{{0, 0}, -1.0}}, {2, 2}), std::invalid_argument);
  EXPECT_THROW(SparseTensor::from_entries({{{0, 0}, NAN}}, {2, 2}), std::invalid_argument);
  EXPECT_THROW(SparseTensor::from_entries({{{0, 0}, INFINITY}}, {2, 2}),
               std::invalid_argument);
}

TEST(SparseTensor, OutOfRangeMessageNamesMode) {
  try {
    SparseTensor::from_entries({{{0, 0, 7}, 1.0}}, {2, 2, 3});
    FAIL() << "expected std::out_of_range";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("mode 2"), std::string::npos) << e.what();
  }
}

TEST(SparseTensor, EmptyTensorIsAllowed) {
  auto t = SparseTensor::from_entries({}, {3, 4});
  EXPECT_EQ(t.nnz(), 0u);
  EXPECT_EQ(litcp::frobenius_norm(t), 0.0);
  EXPECT_EQ(litcp::density(t), 0.0);
}

TEST(SparseTensor, NormAndDensityMatchDenseOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = litcp::testing::random_sparse(rng, {3, 4, 2, 5}, 0.3);
    auto d = litcp::testing::densify(t);
    EXPECT_NEAR(litcp::frobenius_norm(t), litcp::testing::dense_norm(d), 1e-12);
    std::size_t nonzero = 0;
    for (double v : d.data) nonzero += v != 0.0;
    EXPECT_DOUBLE_EQ(litcp::density(t), static_cast<double>(nonzero) / d.data.size());
  }
}

TEST(SparseTensor, DensityOfHugeShapeDoesNotOverflow) {
  const std::vector<std::size_t> shape{100000, 100000, 10000, 100000};
  const double d = litcp::density(63, shape);
  EXPECT_GT(d, 0.0);
  EXPECT_NEAR(d, 63.0 / 1e19, 1e-30);
}

TEST(SparseTensor, SparsifyRoundTrip) {
  std::mt19937_64 rng(5);
  auto t = litcp::testing::random_sparse(rng, {4, 3, 5}, 0.4);
  EXPECT_EQ(litcp::testing::sparsify(litcp::testing::densify(t)), t);
}

TEST(AxisMap, InternFindAndDuplicates) {
  AxisMap a;
  EXPECT_EQ(a.intern("x"), 0u);
  EXPECT_EQ(a.intern("y"), 1u);
  EXPECT_EQ(a.intern("x"), 0u);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.find("y"), std::optional<std::size_t>(1));
  EXPECT_FALSE(a.find("z").has_value());
  EXPECT_THROW(a.index_of("z"), std::out_of_range);
  EXPECT_THROW(AxisMap({"a", "b", "a"}), std::invalid_argument);
}

TEST(LabeledTensor, ValidateChecksAxisSizes) {
  auto lt = litcp::with_default_labels(SparseTensor::from_entries({{{0, 1}, 1.0}}, {2, 3}));
  EXPECT_NO_THROW(lt.validate());
  EXPECT_EQ(lt.axes[1].label(2), "2");
  lt.axes[1] = AxisMap({"a", "b"});
  EXPECT_THROW(lt.validate(), std::invalid_argument);
}

TEST(TensorIo, RoundTripIsLossless) {
  std::mt19937_64 rng(3);
  auto t = litcp::testing::random_sparse(rng, {3, 4, 2, 5}, 0.5);
  LabeledTensor lt = litcp::with_default_labels(t);
  lt.mode_names = {"author", "document", "journal", "word"};
  lt.axes[1] = AxisMap({"a title", "another title, with comma", "x", "\"quoted\""});
  const fs::path dir = scratch_dir("tensor_io");
  litcp::save_tensor(dir, lt);
  const LabeledTensor back = litcp::load_tensor(dir);
  EXPECT_EQ(back.tensor, lt.tensor);
  EXPECT_EQ(back.mode_names, lt.mode_names);
  ASSERT_EQ(back.axes.size(), lt.axes.size());
  for (std::size_t m = 0; m < lt.axes.size(); ++m) EXPECT_EQ(back.axes[m], lt.axes[m]);
  EXPECT_EQ(back.mode_index("word"), std::optional<std::size_t>(3));
}

TEST(TensorIo, ExactValuesSurviveRoundTrip) {
  auto t = SparseTensor::from_entries(
      {{{0, 0}, std::log(2.0)}, {{1, 1}, 0.1 + 0.2}, {{0, 1}, 1e-300}}, {2, 2});
  const fs::path dir = scratch_dir("tensor_exact");
  litcp::save_tensor(dir, litcp::with_default_labels(t));
  EXPECT_EQ(litcp::load_tensor(dir).tensor, t);
}

TEST(TensorIo, RejectsNnzMismatch) {
  auto t = SparseTensor::from_entries({{{0, 0}, 1.0}, {{1, 1}, 2.0}}, {2, 2});
  const fs::path dir = scratch_dir("tensor_bad");
  litcp::save_tensor(dir, litcp::with_default_labels(t));
  std::ofstream(dir / "tensor.tns", std::ios::app) << "1 0 3\n";
  EXPECT_THROW(litcp::load_tensor(dir), std::runtime_error);
}

TEST(TensorIo, RejectsLabelCountMismatch) {
  auto t = SparseTensor::from_entries({{{0, 0}, 1.0}}, {2, 2});
  const fs::path dir = scratch_dir("tensor_labels");
  litcp::save_tensor(dir, litcp::with_default_labels(t));
  std::ofstream(dir / "axis-1.txt", std::ios::app) << "extra\n";
  EXPECT_THROW(litcp::load_tensor(dir), std::runtime_error);
}

TEST(TensorIo, MissingDirectoryThrows) {
  EXPECT_THROW(litcp::load_tensor("/nonexistent/litcp/tensor"), std::runtime_error);
}
