#include "invex/block_vector.hpp"

#include <set>
#include <stdexcept>
#include <utility>

namespace invex {

Block Block::vector(std::string name, Eigen::VectorXd v) {
  Block b;
  b.name_ = std::move(name);
  b.is_matrix_ = false;
  b.vec_ = std::move(v);
  return b;
}

Block Block::matrix(std::string name, Eigen::MatrixXd m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("Block::matrix: block '" + name + "' must be square");
  Block b;
  b.name_ = std::move(name);
  b.is_matrix_ = true;
  b.mat_ = std::move(m);
  return b;
}

Eigen::Index Block::size() const { return is_matrix_ ? mat_.size() : vec_.size(); }

const Eigen::VectorXd& Block::vec() const {
  if (is_matrix_) throw std::logic_error("Block::vec: '" + name_ + "' is a matrix block");
  return vec_;
}

Eigen::VectorXd& Block::vec() {
  if (is_matrix_) throw std::logic_error("Block::vec: '" + name_ + "' is a matrix block");
  return vec_;
}

const Eigen::MatrixXd& Block::mat() const {
  if (!is_matrix_) throw std::logic_error("Block::mat: '" + name_ + "' is a vector block");
  return mat_;
}

Eigen::MatrixXd& Block::mat() {
  if (!is_matrix_) throw std::logic_error("Block::mat: '" + name_ + "' is a vector block");
  return mat_;
}

bool Block::same_shape(const Block& other) const {
  if (is_matrix_ != other.is_matrix_ || name_ != other.name_) return false;
  if (is_matrix_) return mat_.rows() == other.mat_.rows();
  return vec_.size() == other.vec_.size();
}

bool Block::all_finite() const {
  if (is_matrix_) return mat_.allFinite();
  return vec_.allFinite();
}

BlockVector::BlockVector(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  std::set<std::string> names;
  for (const auto& b : blocks_)
    if (!names.insert(b.name()).second)
      throw std::invalid_argument("BlockVector: duplicate block name '" + b.name() + "'");
}

BlockVector BlockVector::single(Eigen::VectorXd v, std::string name) {
  std::vector<Block> bs;
  bs.push_back(Block::vector(std::move(name), std::move(v)));
  return BlockVector(std::move(bs));
}

BlockVector BlockVector::single_matrix(Eigen::MatrixXd m, std::string name) {
  std::vector<Block> bs;
  bs.push_back(Block::matrix(std::move(name), std::move(m)));
  return BlockVector(std::move(bs));
}

const Block& BlockVector::block(std::string_view name) const {
  for (const auto& b : blocks_)
    if (b.name() == name) return b;
  throw std::out_of_range("BlockVector: no block named '" + std::string(name) + "'");
}

Block& BlockVector::block(std::string_view name) {
  for (auto& b : blocks_)
    if (b.name() == name) return b;
  throw std::out_of_range("BlockVector: no block named '" + std::string(name) + "'");
}

bool BlockVector::has_block(std::string_view name) const {
  for (const auto& b : blocks_)
    if (b.name() == name) return true;
  return false;
}

Eigen::Index BlockVector::flat_size() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks_) n += b.size();
  return n;
}

Eigen::VectorXd BlockVector::flatten() const {
  Eigen::VectorXd out(flat_size());
  Eigen::Index at = 0;
  for (const auto& b : blocks_) {
    if (b.is_matrix()) {
      const auto& m = b.mat();
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(at++) = m(i, j);
    } else {
      out.segment(at, b.vec().size()) = b.vec();
      at += b.vec().size();
    }
  }
  return out;
}

void BlockVector::unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != flat_size())
    throw std::invalid_argument("BlockVector::unflatten: length mismatch");
  Eigen::Index at = 0;
  for (auto& b : blocks_) {
    if (b.is_matrix()) {
      auto& m = b.mat();
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = flat(at++);
    } else {
      b.vec() = flat.segment(at, b.vec().size());
      at += b.vec().size();
    }
  }
}

bool BlockVector::same_shape(const BlockVector& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i)
    if (!blocks_[i].same_shape(other.blocks_[i])) return false;
  return true;
}

bool BlockVector::all_finite() const {
  for (const auto& b : blocks_)
    if (!b.all_finite()) return false;
  return true;
}

double BlockVector::norm() const {
  double sq = 0;
  for (const auto& b : blocks_)
    sq += b.is_matrix() ? b.mat().squaredNorm() : b.vec().squaredNorm();
  return std::sqrt(sq);
}

namespace {
void require_congruent(const BlockVector& a, const BlockVector& b, const char* op) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(op) + ": shape mismatch");
}
}  // namespace

BlockVector& BlockVector::operator+=(const BlockVector& o) {
  require_congruent(*this, o, "BlockVector::operator+=");
  for (Eigen::Index i = 0; i < block_count(); ++i) {
    if (blocks_[i].is_matrix())
      blocks_[i].mat() += o.block(i).mat();
    else
      blocks_[i].vec() += o.block(i).vec();
  }
  return *this;
}

BlockVector& BlockVector::operator-=(const BlockVector& o) {
  require_congruent(*this, o, "BlockVector::operator-=");
  for (Eigen::Index i = 0; i < block_count(); ++i) {
    if (blocks_[i].is_matrix())
      blocks_[i].mat() -= o.block(i).mat();
    else
      blocks_[i].vec() -= o.block(i).vec();
  }
  return *this;
}

BlockVector& BlockVector::operator*=(double s) {
  for (auto& b : blocks_) {
    if (b.is_matrix())
      b.mat() *= s;
    else
      b.vec() *= s;
  }
  return *this;
}

double dot(const BlockVector& a, const BlockVector& b) {
  require_congruent(a, b, "invex::dot");
  double acc = 0;
  for (Eigen::Index i = 0; i < a.block_count(); ++i) {
    if (a.block(i).is_matrix())
      acc += a.block(i).mat().cwiseProduct(b.block(i).mat()).sum();
    else
      acc += a.block(i).vec().dot(b.block(i).vec());
  }
  return acc;
}

}  // namespace invex
