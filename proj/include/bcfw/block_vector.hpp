#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Product-space vectors: an ordered list of dense real tensors (vectors or
// row-major matrices), one per block of the product domain.

namespace bcfw {

// Shape of one block. A vector of length d is {d, 1}; a matrix is {rows, cols}.
struct BlockShape {
    std::size_t rows = 0;
    std::size_t cols = 1;

    std::size_t size() const { return rows * cols; }
    bool operator==(const BlockShape&) const = default;
};

inline BlockShape vector_shape(std::size_t length) { return {length, 1}; }
inline BlockShape matrix_shape(std::size_t rows, std::size_t cols) { return {rows, cols}; }

// Strictly increasing set of block indices (0-based).
class BlockIndexSet {
  public:
    BlockIndexSet() = default;
    BlockIndexSet(std::initializer_list<std::size_t> indices)
        : indices_(indices) {
        validate();
    }
    explicit BlockIndexSet(std::vector<std::size_t> indices)
        : indices_(std::move(indices)) {
        validate();
    }

    // All of 0..m-1.
    static BlockIndexSet all(std::size_t m) {
        std::vector<std::size_t> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = i;
        return BlockIndexSet(std::move(v));
    }

    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    std::size_t operator[](std::size_t k) const { return indices_[k]; }
    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }
    const std::vector<std::size_t>& indices() const { return indices_; }

    bool contains(std::size_t i) const {
        for (std::size_t j : indices_)
            if (j == i) return true;
        return false;
    }

    BlockIndexSet set_union(const BlockIndexSet& other) const {
        std::vector<std::size_t> out;
        std::size_t a = 0, b = 0;
        while (a < size() || b < other.size()) {
            if (b == other.size() || (a < size() && indices_[a] < other.indices_[b])) {
                out.push_back(indices_[a++]);
            } else if (a == size() || other.indices_[b] < indices_[a]) {
                out.push_back(other.indices_[b++]);
            } else {
                out.push_back(indices_[a]);
                ++a;
                ++b;
            }
        }
        return BlockIndexSet(std::move(out));
    }

    BlockIndexSet set_intersection(const BlockIndexSet& other) const {
        std::vector<std::size_t> out;
        std::size_t a = 0, b = 0;
        while (a < size() && b < other.size()) {
            if (indices_[a] < other.indices_[b]) ++a;
            else if (other.indices_[b] < indices_[a]) ++b;
            else { out.push_back(indices_[a]); ++a; ++b; }
        }
        return BlockIndexSet(std::move(out));
    }

    bool operator==(const BlockIndexSet&) const = default;

  private:
    void validate() const {
        for (std::size_t k = 1; k < indices_.size(); ++k)
            if (indices_[k - 1] >= indices_[k])
                throw std::invalid_argument(
                    "BlockIndexSet: indices must be strictly increasing");
    }

    std::vector<std::size_t> indices_;
};

// Ordered list of dense blocks. The block count and shapes are fixed at
// construction; every entry must stay finite. Distinct blocks are separate
// allocations, so distinct blocks may be mutated from distinct threads.
class BlockVector {
  public:
    BlockVector() = default;

    explicit BlockVector(std::vector<BlockShape> shapes) : shapes_(std::move(shapes)) {
        data_.resize(shapes_.size());
        for (std::size_t i = 0; i < shapes_.size(); ++i) {
            if (shapes_[i].size() == 0)
                throw std::invalid_argument("BlockVector: block dimensions must be positive");
            data_[i].assign(shapes_[i].size(), 0.0);
        }
    }

    std::size_t num_blocks() const { return shapes_.size(); }
    const BlockShape& shape(std::size_t i) const { return shapes_.at(i); }
    const std::vector<BlockShape>& shapes() const { return shapes_; }

    std::span<double> block(std::size_t i) { return {data_.at(i).data(), data_[i].size()}; }
    std::span<const double> block(std::size_t i) const {
        return {data_.at(i).data(), data_[i].size()};
    }

    // Row-major entry access within block i.
    double& at(std::size_t i, std::size_t r, std::size_t c) {
        return data_.at(i)[r * shapes_[i].cols + c];
    }
    double at(std::size_t i, std::size_t r, std::size_t c) const {
        return data_.at(i)[r * shapes_[i].cols + c];
    }

    std::size_t total_size() const {
        std::size_t n = 0;
        for (const auto& s : shapes_) n += s.size();
        return n;
    }

    bool same_shape_as(const BlockVector& other) const { return shapes_ == other.shapes_; }

    bool all_finite() const {
        for (const auto& blk : data_)
            for (double v : blk)
                if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const BlockVector&) const = default;

  private:
    std::vector<BlockShape> shapes_;
    std::vector<std::vector<double>> data_;
};

inline void require_same_shape(const BlockVector& x, const BlockVector& y,
                               const char* where) {
    if (!x.same_shape_as(y))
        throw std::invalid_argument(std::string(where) + ": block shapes differ");
}

// Euclidean (Frobenius over all blocks) inner product.
inline double inner(const BlockVector& x, const BlockVector& y) {
    require_same_shape(x, y, "inner");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.num_blocks(); ++i) {
        auto xb = x.block(i);
        auto yb = y.block(i);
        for (std::size_t k = 0; k < xb.size(); ++k) acc += xb[k] * yb[k];
    }
    return acc;
}

// Inner product restricted to the blocks in J.
inline double inner_on(const BlockVector& x, const BlockVector& y, const BlockIndexSet& J) {
    require_same_shape(x, y, "inner_on");
    double acc = 0.0;
    for (std::size_t i : J) {
        auto xb = x.block(i);
        auto yb = y.block(i);
        for (std::size_t k = 0; k < xb.size(); ++k) acc += xb[k] * yb[k];
    }
    return acc;
}

inline double norm_sq(const BlockVector& x) { return inner(x, x); }

inline double norm_sq_on(const BlockVector& x, const BlockIndexSet& J) {
    return inner_on(x, x, J);
}

// Frank-Wolfe blend on one block: x_i <- x_i + gamma * (v - x_i), gamma in [0, 1].
// gamma == 0 leaves the block bitwise untouched; gamma == 1 lands exactly on v,
// so vertex steps keep vertex coordinates exact.
inline void blend_block(BlockVector& x, std::size_t i, std::span<const double> v,
                        double gamma) {
    auto xb = x.block(i);
    if (v.size() != xb.size())
        throw std::invalid_argument("blend_block: vertex size does not match block");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("blend_block: gamma must lie in [0, 1]");
    if (gamma == 0.0) return;
    if (gamma == 1.0) {
        for (std::size_t k = 0; k < xb.size(); ++k) xb[k] = v[k];
        return;
    }
    for (std::size_t k = 0; k < xb.size(); ++k) xb[k] += gamma * (v[k] - xb[k]);
}

// Pure variant of blend_block; returns the blended copy.
inline BlockVector blended(const BlockVector& x, std::size_t i, std::span<const double> v,
                           double gamma) {
    BlockVector out = x;
    blend_block(out, i, v, gamma);
    return out;
}

}  // namespace bcfw
