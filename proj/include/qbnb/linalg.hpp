#pragma once

#include <cstddef>
#include <vector>

namespace qbnb {

// Dense symmetric matrix, full row-major storage. Dimensions here are tiny
// (the search works in dimension <= ~20), so simplicity beats packing.
class SymMatrix {
  public:
    SymMatrix() : n_(0) {}
    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}

    int n() const { return n_; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)]; }

    // Writes both (i,j) and (j,i).
    void set_sym(int i, int j, double v) {
        at(i, j) = v;
        at(j, i) = v;
    }

    double frobenius_norm() const;

  private:
    int n_;
    std::vector<double> a_;
};

// All eigenvalues, ascending, by cyclic Jacobi rotations. Sweeps stop when
// the off-diagonal Frobenius norm falls below 1e-12 times the Frobenius norm
// of the input.
std::vector<double> jacobi_eigenvalues(SymMatrix a);

// Convenience: {smallest, largest} eigenvalue.
std::pair<double, double> eigen_range(const SymMatrix& a);

// LDL^T factorization without pivoting, as a positive-definiteness
// certificate: factorization succeeds iff every pivot stays above the given
// threshold. For a symmetric positive definite matrix the pivots are bounded
// below by the smallest eigenvalue, so success is guaranteed whenever the
// matrix is safely positive definite at the threshold scale.
class Ldlt {
  public:
    // threshold: pivots <= threshold abort the factorization.
    Ldlt(const SymMatrix& a, double threshold);

    bool ok() const { return ok_; }

    // Solves A x = b. Only valid when ok().
    std::vector<double> solve(const std::vector<double>& b) const;

  private:
    int n_;
    bool ok_ = false;
    std::vector<double> f_;  // unit lower triangle + diagonal pivots
};

}  // namespace qbnb
