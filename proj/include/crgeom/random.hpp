#pragma once

// Seeded random operators with prescribed spectra, so every suite knows the
// rank and reduced minimum modulus of what it generates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

#include "crgeom/numeric_core.hpp"

namespace crgeom {

using Rng = std::mt19937_64;

/// Independent deterministic stream for one trial of one suite.
inline Rng trial_rng(std::uint64_t seed, std::string_view stream, std::uint64_t trial)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return Rng(seq);
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng)
{
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = Complex(normal(rng), normal(rng));
    return m;
}

inline Vector gaussian_vector(Index n, Rng& rng) { return gaussian_matrix(n, 1, rng).col(0); }

inline Vector random_unit_vector(Index n, Rng& rng)
{
    Vector v = gaussian_vector(n, rng);
    return v / v.norm();
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of R's diagonal removed.
inline Matrix haar_unitary(Index n, Rng& rng)
{
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
    Matrix q = qr.householderQ() * identity(n);
    const Matrix& r = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0)
            q.col(j) *= r(j, j) / mag;
    }
    return q;
}

/// U diag(sigma) V^* with Haar U, V; sigma may be shorter than min(rows, cols) (zero-padded).
inline Matrix matrix_with_spectrum(Index rows, Index cols, const RealVector& sigma, Rng& rng)
{
    Matrix d = Matrix::Zero(rows, cols);
    for (Index i = 0; i < sigma.size(); ++i)
        d(i, i) = sigma(i);
    return haar_unitary(rows, rng) * d * haar_unitary(cols, rng).adjoint();
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Index uniform_index(Rng& rng, Index lo, Index hi)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// `rank` singular values drawn log-uniformly from [lo, hi], sorted descending.
inline RealVector random_spectrum(Index rank, double lo, double hi, Rng& rng)
{
    RealVector s(rank);
    for (Index i = 0; i < rank; ++i)
        s(i) = lo == hi ? lo : log_uniform(rng, lo, hi);
    std::sort(s.data(), s.data() + rank, std::greater<>());
    return s;
}

/// Shape and spectrum controls for random operators.
struct EnsembleSpec {
    Index min_dim = 2;
    Index max_dim = 8;
    double sigma_lo = 1e-2;
    double sigma_hi = 10.0;
    /// Allow the zero operator (rank 0) when drawing the rank.
    bool allow_zero = true;
    /// Force rank < min(rows, cols).
    bool rank_deficient = false;
};

struct RandomOperator {
    Matrix a;
    Index rank = 0;
    double gamma = 0.0; // exact smallest nonzero singular value; +inf when rank 0
};

inline RandomOperator random_operator(const EnsembleSpec& spec, Rng& rng)
{
    const Index m = uniform_index(rng, spec.min_dim, spec.max_dim);
    const Index n = uniform_index(rng, spec.min_dim, spec.max_dim);
    const Index full = std::min(m, n);
    const Index hi = spec.rank_deficient ? full - 1 : full;
    const Index lo = spec.allow_zero ? 0 : 1;
    const Index r = uniform_index(rng, lo, std::max(lo, hi));
    const RealVector s = random_spectrum(r, spec.sigma_lo, spec.sigma_hi, rng);
    return {matrix_with_spectrum(m, n, s, rng), r, r == 0 ? kInfinity : s(r - 1)};
}

/// Invertible n x n matrix with singular values in [lo, hi].
inline Matrix random_invertible(Index n, Rng& rng, double lo = 0.5, double hi = 2.0)
{
    return matrix_with_spectrum(n, n, random_spectrum(n, lo, hi, rng), rng);
}

/// Orthonormal basis of a random d-dimensional subspace of C^n.
inline Matrix random_orthonormal(Index n, Index d, Rng& rng) { return haar_unitary(n, rng).leftCols(d); }

} // namespace crgeom
