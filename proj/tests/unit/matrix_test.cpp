#include <cmath>

#include <gtest/gtest.h>

#include "brlstm/error.hpp"
#include "brlstm/matrix.hpp"
#include "brlstm/rng.hpp"

namespace brlstm {
namespace {

TEST(MatrixTest, IdentityTimesColumn) {
  const Matrix x{{1}, {2}};
  EXPECT_EQ(matmul(Matrix::identity(2), x), x);
}

TEST(MatrixTest, RowTimesColumn) {
  const Matrix r = matmul(Matrix{{1, 2}}, Matrix{{3}, {4}});
  ASSERT_EQ(r.rows(), 1u);
  ASSERT_EQ(r.cols(), 1u);
  EXPECT_EQ(r(0, 0), 11.0);
}

TEST(MatrixTest, MatmulDimensionMismatchNamesBothShapes) {
  try {
    matmul(Matrix(2, 3), Matrix(4, 1));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("4x1"), std::string::npos) << msg;
  }
}

TEST(MatrixTest, Hadamard) { EXPECT_EQ(hadamard(Matrix{{2, 3}}, Matrix{{4, 5}}), (Matrix{{8, 15}})); }

TEST(MatrixTest, AddZerosIsIdentity) {
  const Matrix x{{1.5, -2}, {3, 0.25}};
  EXPECT_EQ(add(x, Matrix::zeros(2, 2)), x);
}

TEST(MatrixTest, SubShapeMismatchThrows) {
  EXPECT_THROW(sub(Matrix(1, 2), Matrix(2, 1)), DimensionError);
}

TEST(MatrixTest, DataLengthMustMatchShape) {
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(MatrixTest, TransposeRoundTrip) {
  const Matrix x{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(x.transposed()(2, 1), 6.0);
  EXPECT_EQ(x.transposed().transposed(), x);
}

TEST(MatrixProperty, MatmulIsAssociative) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngStream rng(seed, 9);
    auto random = [&](std::size_t r, std::size_t c) {
      Matrix m(r, c);
      for (double& v : m.values()) v = rng.uniform(-2.0, 2.0);
      return m;
    };
    const std::size_t a = 1 + rng.next_u64() % 6, b = 1 + rng.next_u64() % 6,
                      c = 1 + rng.next_u64() % 6, d = 1 + rng.next_u64() % 6;
    const Matrix x = random(a, b), y = random(b, c), z = random(c, d);
    const Matrix left = matmul(matmul(x, y), z);
    const Matrix right = matmul(x, matmul(y, z));
    const double scale = std::sqrt(squared_norm(left)) + 1e-300;
    EXPECT_LT(std::sqrt(squared_norm(sub(left, right))) / scale, 1e-10) << "seed " << seed;
  }
}

}  // namespace
}  // namespace brlstm
