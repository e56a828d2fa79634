#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cimx/domains.hpp"

namespace cimx::datagen {

enum class MixingDist { StdNormal, UniformPm1, UniformPm2, Laplace };

// Columns are i.i.d. samples of an n-variate t copula (Gaussian core with the
// equicorrelation Toeplitz parameter matrix, one chi-square draw per column),
// pushed through the univariate t CDF to uniform marginals and affinely
// mapped onto [-1,1] (signed) or [0,1] (nonneg). Column c depends only on
// (seed, c), so generation parallelizes without changing the output.
Eigen::MatrixXd gen_copula_t(int n, std::int64_t N, double rho, double df, bool signed_marginal,
                             std::uint64_t seed);

// Exact samplers for the ball/box/simplex domains; rejection from the
// enclosing box for feature polytopes and H-polytopes (assumed to lie inside
// [-1,1]^n, which holds for every feature_to_hrep output).
Eigen::MatrixXd gen_uniform_polytope(const domains::DomainSpec& d, std::int64_t N,
                                     std::uint64_t seed);

// i.i.d. uniform symbols from {-3,-1,1,3}.
Eigen::MatrixXd gen_pam4(int n, std::int64_t N, std::uint64_t seed);

// Scaled view for feeding the antisparse network.
inline Eigen::MatrixXd pam4_scaled(const Eigen::MatrixXd& symbols) { return symbols / 3.0; }

// Random m x n mixing matrix with i.i.d. entries from the named distribution,
// re-drawn (up to 100 times) until the smallest singular value exceeds 1e-6.
Eigen::MatrixXd gen_mixing(int m, int n, MixingDist dist, std::uint64_t seed);

// Adds white Gaussian noise with a single per-matrix variance chosen so that
// mean(X^2) / sigma^2 matches snr_db. snr_db = +inf disables the noise.
Eigen::MatrixXd add_awgn(const Eigen::MatrixXd& X, double snr_db, std::uint64_t seed);

namespace ref {
// Plain sequential loops over the same per-column substreams; baselines for
// the parallel kernels above (bit-identical outputs) and for the benchmark.
Eigen::MatrixXd gen_copula_t(int n, std::int64_t N, double rho, double df, bool signed_marginal,
                             std::uint64_t seed);
Eigen::MatrixXd add_awgn(const Eigen::MatrixXd& X, double snr_db, std::uint64_t seed);
}  // namespace ref

}  // namespace cimx::datagen
