#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace csvrptw {

// Minimal dense row-major matrix. The core/pricing/solver layers only need
// indexed access; heavier linear algebra lives in the learn layer on Eigen.
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Column layout for flattening the complete digraph on {0..N} into vectors:
// row-major over ordered pairs (i,j), i != j, self-loops skipped. This is
// the arc order used by every serialized travel-time row.
class ArcIndex {
  public:
    ArcIndex() = default;
    explicit ArcIndex(std::size_t n_nodes) : n_(n_nodes) {}

    std::size_t n_nodes() const { return n_; }
    std::size_t arc_count() const { return n_ * (n_ - 1); }

    std::size_t index(std::size_t i, std::size_t j) const {
        assert(i != j && i < n_ && j < n_);
        return i * (n_ - 1) + j - (j > i ? 1 : 0);
    }

    std::pair<std::size_t, std::size_t> arc(std::size_t idx) const {
        assert(idx < arc_count());
        const std::size_t i = idx / (n_ - 1);
        std::size_t j = idx % (n_ - 1);
        if (j >= i) ++j;
        return {i, j};
    }

  private:
    std::size_t n_ = 0;
};

// Flatten a square node matrix (zero diagonal) into the arc vector and back.
inline std::vector<double> to_arc_vector(const Mat& m) {
    ArcIndex ix(m.rows());
    std::vector<double> v(ix.arc_count());
    for (std::size_t a = 0; a < v.size(); ++a) {
        auto [i, j] = ix.arc(a);
        v[a] = m(i, j);
    }
    return v;
}

inline Mat from_arc_vector(const std::vector<double>& v, std::size_t n_nodes) {
    ArcIndex ix(n_nodes);
    assert(v.size() == ix.arc_count());
    Mat m(n_nodes, n_nodes, 0.0);
    for (std::size_t a = 0; a < v.size(); ++a) {
        auto [i, j] = ix.arc(a);
        m(i, j) = v[a];
    }
    return m;
}

}  // namespace csvrptw
