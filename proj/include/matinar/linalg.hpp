#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace matinar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountSeries = std::vector<CountMatrix>;

inline Matrix to_real(const CountMatrix& m) { return m.cast<double>(); }

/// Column-major stacking of a matrix into a vector.
Vector vec(const Matrix& m);

/// Inverse of vec for the given shape.
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

/// Kronecker product left ⊗ right.
Matrix kron(const Matrix& left, const Matrix& right);

/// Rearrangement of an (m·n)×(m·n) matrix into m²×n² form: column
/// (j-1)·n + i holds the vec of the m×m block at block position (i, j),
/// so that rearrange(kron(B, A), m, n) == vec(A)·vec(B)ᵀ. The nearest
/// Kronecker product problem becomes a nearest rank-1 problem in this
/// layout.
Matrix rearrange(const Matrix& phi, Eigen::Index m, Eigen::Index n);

/// Permutation matrix T with t(i,j) = 1 iff j = (s+1) + (i - s·m - 1)·n for
/// s = floor((i-1)/m), 1-based. Converts the Kronecker-arranged covariance
/// into column-wise block layout by left multiplication (row-wise by right
/// multiplication).
Matrix transformation_matrix(Eigen::Index m, Eigen::Index n);

/// Block companion matrix of the lag polynomial: first block row holds
/// kron(B[l], A[l]) for l = 1..p, identity blocks on the sub-diagonal.
Matrix companion(const std::vector<Matrix>& A, const std::vector<Matrix>& B);

/// Spectral radius. Entrywise-nonnegative input is handled by power
/// iteration on the shifted matrix (the dominant root is the Perron root);
/// anything else, and non-converged cases, go through a dense eigensolver.
double spectral_radius(const Matrix& m, double tol = 1e-10);

struct Rank1Svd {
  double sigma = 0.0;
  Vector u;
  Vector v;
  int iterations = 0;
};

/// Leading singular triplet via power iteration on the smaller Gram matrix.
/// The sign is fixed so the entry sum of u is nonnegative (ties: first
/// nonzero entry of u positive). Throws on a zero matrix.
Rank1Svd rank1_svd(const Matrix& m, double tol = 1e-12, int max_iter = 10000);

}  // namespace matinar
