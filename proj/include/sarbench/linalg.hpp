#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sarbench::linalg {

/// Dense row-major square matrix.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    static SquareMatrix identity(int n);

    int dim() const noexcept { return n_; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }

    std::span<const double> data() const noexcept { return a_; }
    std::span<double> data() noexcept { return a_; }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    int n_ = 0;
    std::vector<double> a_;
};

/// Lower-triangular L with L L^T = A. Throws DegenerateInputError when A is
/// not symmetric positive definite.
SquareMatrix cholesky(const SquareMatrix& a);

/// Solves L y = b by forward substitution.
std::vector<double> forward_substitute(const SquareMatrix& lower, std::span<const double> b);

struct SymmetricEigen {
    std::vector<double> values;  // descending
    SquareMatrix vectors;        // column j is the eigenvector of values[j]
};

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
SymmetricEigen symmetric_eigen(const SquareMatrix& a);

}  // namespace sarbench::linalg
