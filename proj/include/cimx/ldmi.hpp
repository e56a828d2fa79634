#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cimx/domains.hpp"

namespace cimx::ldmi {

// Uncentered correlations by default; centered mode subtracts sample means
// (the online recursions never center, so the optimization path stays raw).
struct SampleStats {
    Eigen::MatrixXd Rx;   // m x m
    Eigen::MatrixXd Ry;   // n x n
    Eigen::MatrixXd Rxy;  // m x n
    std::int64_t N = 0;
};

SampleStats sample_stats(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, bool centered);

// (1/2) log det(R + eps I) + (d/2) log(2 pi e), via a symmetric
// factorization of R + eps I. Throws if R is not symmetric PSD up to a small
// tolerance.
double ld_entropy(const Eigen::MatrixXd& R, double eps);

// (1/2) log det(Ry + eps I) - (1/2) log det(Re + eps I) with
// Re = Ry - Rxy^T (Rx + eps I)^{-1} Rxy. The additive constant
// (m/2 + n/2) log(2 pi e) is omitted: it cancels in optimization.
double ld_mutual_info(const SampleStats& s, double eps);

// Companion evaluation through the X-side Schur complement; equals
// ld_mutual_info exactly in exact arithmetic (dual-form identity).
double ld_mutual_info_xform(const SampleStats& s, double eps);

// ((1-zeta)/(1-zeta^k)) sum_{i=1..k} zeta^{k-i} v(i) v(i)^T over the first k
// columns of `samples`.
Eigen::MatrixXd weighted_corr(const Eigen::MatrixXd& samples, double zeta, std::int64_t k);

// ld_mutual_info of the raw (uncentered) stats of X and Y.
double batch_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double eps);

// Full-batch projected gradient ascent on batch_objective, columns projected
// onto the domain after every step; validation oracle only (small N).
struct BatchOracleResult {
    Eigen::MatrixXd Y;
    std::vector<double> trace;  // objective after each accepted step
    bool stalled = false;       // line search ran out of backtracks
};

BatchOracleResult batch_solver_oracle(const Eigen::MatrixXd& X, const domains::DomainSpec& d,
                                      double eps, int iters, double step);

namespace ref {
// Naive two-pass loop implementations kept as serial oracles for the
// OpenMP-blocked versions above (and for the benchmark target).
SampleStats sample_stats(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, bool centered);
Eigen::MatrixXd weighted_corr(const Eigen::MatrixXd& samples, double zeta, std::int64_t k);
}  // namespace ref

}  // namespace cimx::ldmi
