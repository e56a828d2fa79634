#include "cimx/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cimx::metrics {

namespace {

// |Pearson correlation| between every output row and every source row.
Eigen::MatrixXd abs_corr(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S) {
    const Eigen::Index n = Y.rows();
    Eigen::MatrixXd Yc = Y.colwise() - Y.rowwise().mean();
    Eigen::MatrixXd Sc = S.colwise() - S.rowwise().mean();
    Eigen::VectorXd ny = Yc.rowwise().norm(), ns = Sc.rowwise().norm();
    if (ny.minCoeff() <= 0.0 || ns.minCoeff() <= 0.0)
        throw std::invalid_argument("resolve_alignment: zero-variance row");
    Eigen::MatrixXd C = (Yc * Sc.transpose()).cwiseAbs();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) C(i, j) /= ny[i] * ns[j];
    return C;
}

// Exact max-total-score assignment over subsets of columns.
std::vector<int> best_assignment(const Eigen::MatrixXd& C) {
    const int n = static_cast<int>(C.rows());
    if (n > 20) throw std::invalid_argument("resolve_alignment: n too large for exact assignment");
    const std::size_t full = std::size_t{1} << n;
    constexpr double kNeg = -std::numeric_limits<double>::infinity();
    std::vector<double> dp(full, kNeg);
    std::vector<int> choice(full, -1);
    std::vector<int> parent(full, -1);
    dp[0] = 0.0;
    for (std::size_t mask = 0; mask < full; ++mask) {
        if (dp[mask] == kNeg) continue;
        int i = static_cast<int>(__builtin_popcountll(mask));  // next output row
        if (i == n) continue;
        for (int j = 0; j < n; ++j) {
            if (mask & (std::size_t{1} << j)) continue;
            std::size_t next = mask | (std::size_t{1} << j);
            double v = dp[mask] + C(i, j);
            if (v > dp[next]) {
                dp[next] = v;
                choice[next] = j;
                parent[next] = static_cast<int>(mask);
            }
        }
    }
    std::vector<int> perm(n);
    std::size_t mask = full - 1;
    for (int i = n - 1; i >= 0; --i) {
        perm[i] = choice[mask];
        mask = static_cast<std::size_t>(parent[mask]);
    }
    return perm;
}

}  // namespace

Alignment resolve_alignment(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S) {
    if (Y.rows() != S.rows() || Y.cols() != S.cols())
        throw std::invalid_argument("resolve_alignment: shape mismatch");
    if (Y.cols() < 2) throw std::invalid_argument("resolve_alignment: need N >= 2");
    Alignment a;
    a.perm = best_assignment(abs_corr(Y, S));
    a.scales.resize(Y.rows());
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
        const auto s = S.row(a.perm[static_cast<std::size_t>(i)]);
        a.scales[i] = s.dot(Y.row(i)) / s.squaredNorm();
    }
    return a;
}

Sinr sinr_db(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S) {
    Alignment a = resolve_alignment(Y, S);
    const Eigen::Index n = Y.rows();
    Sinr out;
    out.per_source_db.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::RowVectorXd target = a.scales[i] * S.row(a.perm[static_cast<std::size_t>(i)]);
        double sig = target.squaredNorm();
        double res = (Y.row(i) - target).squaredNorm();
        out.per_source_db[i] = res < 1e-15 * sig ? 150.0 : 10.0 * std::log10(sig / res);
    }
    out.mean_db = out.per_source_db.mean();
    return out;
}

double ser_pam4(const Eigen::MatrixXd& Y_aligned, const Eigen::MatrixXd& S) {
    if (Y_aligned.rows() != S.rows() || Y_aligned.cols() != S.cols())
        throw std::invalid_argument("ser_pam4: shape mismatch");
    std::int64_t errors = 0;
    for (Eigen::Index c = 0; c < S.cols(); ++c)
        for (Eigen::Index i = 0; i < S.rows(); ++i) {
            const double v = Y_aligned(i, c);
            const double dec = v < -2.0 ? -3.0 : v < 0.0 ? -1.0 : v < 2.0 ? 1.0 : 3.0;
            if (dec != S(i, c)) ++errors;
        }
    return static_cast<double>(errors) / static_cast<double>(S.size());
}

double psnr_db(const Eigen::MatrixXd& est, const Eigen::MatrixXd& ref, double peak) {
    if (est.rows() != ref.rows() || est.cols() != ref.cols())
        throw std::invalid_argument("psnr_db: shape mismatch");
    if (!(peak > 0.0)) throw std::invalid_argument("psnr_db: peak must be positive");
    const double mse = (est - ref).squaredNorm() / static_cast<double>(ref.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

Eigen::MatrixXd aligned_estimate(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& S) {
    Alignment a = resolve_alignment(Y, S);
    Eigen::MatrixXd out(Y.rows(), Y.cols());
    for (Eigen::Index i = 0; i < Y.rows(); ++i)
        out.row(a.perm[static_cast<std::size_t>(i)]) = Y.row(i) / a.scales[i];
    return out;
}

}  // namespace cimx::metrics
