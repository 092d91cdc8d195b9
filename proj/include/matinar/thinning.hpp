#pragma once

#include "matinar/linalg.hpp"
#include "matinar/rng.hpp"

namespace matinar {

/// Binomial thinning a ∘ y: survivors among y independent Bernoulli(a)
/// trials. Requires a in [0, 1] and y >= 0.
std::int64_t binomial_thin(double a, std::int64_t y, RngStream& rng);

/// Left-matricial thinning. Entry (i,j) = Σ_k a(i,k) ∘ y(k,j) with a fresh
/// counting series per summand, so E[left_thin(A, Y)] = A·Y.
CountMatrix left_thin(const Matrix& a, const CountMatrix& y, RngStream& rng);

/// Right-matricial thinning. Entry (i,j) = Σ_k b(k,j) ∘ y(i,k), so
/// E[right_thin(Y, B)] = Y·B and the composition
/// right_thin(left_thin(A, Y), Bᵀ) has mean A·Y·Bᵀ.
CountMatrix right_thin(const CountMatrix& y, const Matrix& b, RngStream& rng);

}  // namespace matinar
