#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

namespace invex {

/// One named dense block of an iterate: a real vector or a real square matrix.
class Block {
 public:
  static Block vector(std::string name, Eigen::VectorXd v);
  static Block matrix(std::string name, Eigen::MatrixXd m);  // must be square

  const std::string& name() const { return name_; }
  bool is_matrix() const { return is_matrix_; }

  /// Flattened length (rows*cols for matrix blocks).
  Eigen::Index size() const;

  const Eigen::VectorXd& vec() const;
  Eigen::VectorXd& vec();
  const Eigen::MatrixXd& mat() const;
  Eigen::MatrixXd& mat();

  bool same_shape(const Block& other) const;
  bool all_finite() const;

 private:
  Block() = default;
  std::string name_;
  bool is_matrix_ = false;
  Eigen::VectorXd vec_;
  Eigen::MatrixXd mat_;
};

/// Value-semantic collection of uniquely named blocks. Serves both as a point
/// of the search space and as a shape-congruent gradient/displacement.
class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(std::vector<Block> blocks);  // throws on duplicate names

  static BlockVector single(Eigen::VectorXd v, std::string name = "x");
  static BlockVector single_matrix(Eigen::MatrixXd m, std::string name = "x");

  Eigen::Index block_count() const { return static_cast<Eigen::Index>(blocks_.size()); }
  const Block& block(Eigen::Index i) const { return blocks_.at(static_cast<size_t>(i)); }
  Block& block(Eigen::Index i) { return blocks_.at(static_cast<size_t>(i)); }
  const Block& block(std::string_view name) const;  // throws if absent
  Block& block(std::string_view name);
  bool has_block(std::string_view name) const;

  /// Convenience accessors for single-block points.
  const Eigen::VectorXd& vec() const { return block(0).vec(); }
  const Eigen::MatrixXd& mat() const { return block(0).mat(); }

  Eigen::Index flat_size() const;
  /// Concatenation of all blocks; matrix blocks are laid out row-major.
  Eigen::VectorXd flatten() const;
  /// Inverse of flatten for a congruent shape.
  void unflatten(const Eigen::VectorXd& flat);

  bool same_shape(const BlockVector& other) const;
  bool all_finite() const;
  /// Euclidean norm of the flattened contents.
  double norm() const;

  BlockVector& operator+=(const BlockVector& o);
  BlockVector& operator-=(const BlockVector& o);
  BlockVector& operator*=(double s);
  friend BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
  friend BlockVector operator-(BlockVector a, const BlockVector& b) { return a -= b; }
  friend BlockVector operator*(double s, BlockVector a) { return a *= s; }

 private:
  std::vector<Block> blocks_;
};

using VariablePoint = BlockVector;
using GradientVector = BlockVector;

/// Flat inner product over all blocks; shapes must be congruent.
double dot(const BlockVector& a, const BlockVector& b);

}  // namespace invex
