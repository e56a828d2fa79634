#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cimx::metrics {

// Resolution of the permutation/scale ambiguity: perm[i] is the source row
// matched to output row i, scales[i] the least-squares coefficient
// argmin_a ||y_i - a s_perm[i]||.
struct Alignment {
    std::vector<int> perm;
    Eigen::VectorXd scales;
};

// Assignment maximizing total |Pearson correlation| (exact, bitmask DP).
Alignment resolve_alignment(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S);

struct Sinr {
    Eigen::VectorXd per_source_db;
    double mean_db;  // arithmetic mean of the per-source dB values
};

// SINR_i = 10 log10(||a s||^2 / ||y - a s||^2) after alignment, capped at
// +150 dB when the residual drops below 1e-15 of the signal power.
Sinr sinr_db(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S);

// Per-entry nearest-symbol decisions on {-3,-1,1,3}; Y must already be
// alignment-resolved and rescaled onto the symbol grid.
double ser_pam4(const Eigen::MatrixXd& Y_aligned, const Eigen::MatrixXd& S);

// 10 log10(peak^2 / MSE); +inf when the MSE is zero.
double psnr_db(const Eigen::MatrixXd& est, const Eigen::MatrixXd& ref, double peak);

// Convenience: Y permuted/rescaled into source order (row i estimates S row
// i), using resolve_alignment.
Eigen::MatrixXd aligned_estimate(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S);

}  // namespace cimx::metrics
