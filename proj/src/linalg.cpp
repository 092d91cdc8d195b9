#include "matinar/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace matinar {

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("unvec: size mismatch");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& left, const Matrix& right) {
  Matrix out(left.rows() * right.rows(), left.cols() * right.cols());
  for (Eigen::Index i = 0; i < left.rows(); ++i) {
    for (Eigen::Index j = 0; j < left.cols(); ++j) {
      out.block(i * right.rows(), j * right.cols(), right.rows(),
                right.cols()) = left(i, j) * right;
    }
  }
  return out;
}

Matrix rearrange(const Matrix& phi, Eigen::Index m, Eigen::Index n) {
  if (phi.rows() != m * n || phi.cols() != m * n) {
    throw std::invalid_argument("rearrange: input must be (m*n) x (m*n)");
  }
  Matrix out(m * m, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Matrix block = phi.block(i * m, j * m, m, m);
      out.col(j * n + i) = Eigen::Map<const Vector>(block.data(), m * m);
    }
  }
  return out;
}

Matrix transformation_matrix(Eigen::Index m, Eigen::Index n) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("transformation_matrix: m, n must be >= 1");
  }
  const Eigen::Index d = m * n;
  Matrix t = Matrix::Zero(d, d);
  for (Eigen::Index i = 1; i <= d; ++i) {
    const Eigen::Index s = (i - 1) / m;
    const Eigen::Index j = (s + 1) + (i - s * m - 1) * n;
    t(i - 1, j - 1) = 1.0;
  }
  return t;
}

Matrix companion(const std::vector<Matrix>& A, const std::vector<Matrix>& B) {
  if (A.empty() || A.size() != B.size()) {
    throw std::invalid_argument("companion: need matching nonempty A, B lists");
  }
  const auto p = static_cast<Eigen::Index>(A.size());
  const Eigen::Index d = A[0].rows() * B[0].rows();
  Matrix comp = Matrix::Zero(d * p, d * p);
  for (Eigen::Index l = 0; l < p; ++l) {
    comp.block(0, l * d, d, d) = kron(B[l], A[l]);
  }
  for (Eigen::Index i = 1; i < p; ++i) {
    comp.block(i * d, (i - 1) * d, d, d).setIdentity();
  }
  return comp;
}

namespace {

double dense_spectral_radius(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double spectral_radius(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("spectral_radius: matrix must be square");
  }
  const Eigen::Index d = m.rows();
  if (d == 0) return 0.0;
  if ((m.array() < 0.0).any()) return dense_spectral_radius(m);

  // Power iteration on m + I: the shift makes the dominant Perron root
  // aperiodic, and rho(m + I) = rho(m) + 1 for nonnegative m. Successive
  // growth differences shrink geometrically, so the remaining error is
  // estimated by extrapolating their ratio.
  constexpr int kMaxIter = 10000;
  constexpr int kRatioWindow = 4;
  Vector x = Vector::Ones(d) / static_cast<double>(d);
  double prev_growth = -1.0;
  double prev_delta = -1.0;
  double ratios[kRatioWindow] = {0.0, 0.0, 0.0, 0.0};
  int ratio_count = 0;
  for (int it = 0; it < kMaxIter; ++it) {
    Vector y = m * x + x;
    const double growth = y.sum();  // 1-norm of a nonnegative vector
    if (growth <= 0.0) return 0.0;
    x = y / growth;
    if (prev_growth >= 0.0) {
      const double delta = std::abs(growth - prev_growth);
      if (delta == 0.0) return std::max(growth - 1.0, 0.0);
      if (prev_delta > 0.0) {
        ratios[ratio_count % kRatioWindow] = delta / prev_delta;
        ++ratio_count;
        if (ratio_count >= kRatioWindow) {
          // Deltas can oscillate under complex subdominant pairs; the
          // windowed max keeps the extrapolated error conservative.
          double ratio = 0.0;
          for (const double r : ratios) ratio = std::max(ratio, r);
          ratio = std::min(ratio, 0.9999);
          const double error_estimate = delta * ratio / (1.0 - ratio);
          if (error_estimate <= tol * std::max(1.0, growth)) {
            return std::max(growth - 1.0, 0.0);
          }
        }
      }
      prev_delta = delta;
    }
    prev_growth = growth;
  }
  return dense_spectral_radius(m);
}

Rank1Svd rank1_svd(const Matrix& m, double tol, int max_iter) {
  if (m.size() == 0 || !(m.norm() > 0.0)) {
    throw std::invalid_argument("rank1_svd: zero matrix");
  }
  const bool iterate_right = m.rows() >= m.cols();
  const Matrix gram = iterate_right ? Matrix(m.transpose() * m)
                                    : Matrix(m * m.transpose());
  const Eigen::Index k = gram.rows();

  Vector x(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    x[i] = 1.0 + 1e-3 * static_cast<double>(i);
  }
  x.normalize();

  Rank1Svd out;
  double prev_delta = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = gram * x;
    const double norm = y.norm();
    if (norm == 0.0) {
      // Start vector landed in the kernel; restart from a basis direction.
      x = Vector::Unit(k, it % k);
      continue;
    }
    y /= norm;
    const double delta = (y - x).norm();
    x = std::move(y);
    out.iterations = it + 1;
    if (delta == 0.0) break;
    if (prev_delta > 0.0) {
      const double ratio = std::min(delta / prev_delta, 0.9999);
      if (delta * ratio / (1.0 - ratio) <= tol) break;
    }
    prev_delta = delta;
  }

  Vector u, v;
  double sigma;
  if (iterate_right) {
    v = x;
    Vector mv = m * v;
    sigma = mv.norm();
    u = sigma > 0.0 ? Vector(mv / sigma) : Vector::Unit(m.rows(), 0);
  } else {
    u = x;
    Vector mtu = m.transpose() * u;
    sigma = mtu.norm();
    v = sigma > 0.0 ? Vector(mtu / sigma) : Vector::Unit(m.cols(), 0);
  }

  double sum = u.sum();
  if (sum == 0.0) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (u[i] != 0.0) {
        sum = u[i];
        break;
      }
    }
  }
  if (sum < 0.0) {
    u = -u;
    v = -v;
  }

  out.sigma = sigma;
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

}  // namespace matinar
