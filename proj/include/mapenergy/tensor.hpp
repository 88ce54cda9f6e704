#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <span>
#include <vector>

namespace mapenergy {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense rank-3 tensor with fixed index roles documented at each use site
/// (e.g. Christoffel symbols are stored as (k,i,j) = Gamma^k_ij).
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int d0, int d1, int d2)
        : d0_(d0), d1_(d1), d2_(d2), a_(static_cast<size_t>(d0) * d1 * d2, 0.0) {}

    double& operator()(int i, int j, int k) {
        assert(i >= 0 && i < d0_ && j >= 0 && j < d1_ && k >= 0 && k < d2_);
        return a_[(static_cast<size_t>(i) * d1_ + j) * d2_ + k];
    }
    double operator()(int i, int j, int k) const {
        assert(i >= 0 && i < d0_ && j >= 0 && j < d1_ && k >= 0 && k < d2_);
        return a_[(static_cast<size_t>(i) * d1_ + j) * d2_ + k];
    }

    int dim0() const { return d0_; }
    int dim1() const { return d1_; }
    int dim2() const { return d2_; }

    void setZero() { std::fill(a_.begin(), a_.end(), 0.0); }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    int d0_ = 0, d1_ = 0, d2_ = 0;
    std::vector<double> a_;
};

/// Dense rank-4 tensor; the Riemann tensor is stored as (l,i,j,k) = R^l_ijk
/// with R(d_i, d_j) d_k = R^l_ijk d_l.
class Tensor4 {
public:
    Tensor4() = default;
    Tensor4(int d0, int d1, int d2, int d3)
        : d0_(d0), d1_(d1), d2_(d2), d3_(d3),
          a_(static_cast<size_t>(d0) * d1 * d2 * d3, 0.0) {}

    double& operator()(int i, int j, int k, int l) {
        return a_[((static_cast<size_t>(i) * d1_ + j) * d2_ + k) * d3_ + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return a_[((static_cast<size_t>(i) * d1_ + j) * d2_ + k) * d3_ + l];
    }

    int dim0() const { return d0_; }

private:
    int d0_ = 0, d1_ = 0, d2_ = 0, d3_ = 0;
    std::vector<double> a_;
};

/// Pairwise (cascade) summation; fixed association order keeps reductions
/// bit-reproducible regardless of how the field was produced.
inline double pairwise_sum(std::span<const double> v) {
    const size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t h = n / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

} // namespace mapenergy
