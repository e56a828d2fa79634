#include "cimx/ldmi.hpp"

#include <cmath>
#include <stdexcept>

namespace cimx::ldmi {

namespace {

constexpr double kLog2PiE = 2.8378770664093453;  // log(2 pi e)
constexpr Eigen::Index kBlock = 8192;            // fixed accumulation block

void check_symmetric(const Eigen::MatrixXd& R, const char* who) {
    if (R.rows() != R.cols()) throw std::invalid_argument(std::string(who) + ": not square");
    double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw std::invalid_argument(std::string(who) + ": matrix not symmetric");
}

// log det(R + eps I) through the eigenvalues of the symmetrized input.
double logdet_sym(const Eigen::MatrixXd& R, double eps, const char* who) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (R + R.transpose()));
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * scale)
        throw std::runtime_error(std::string(who) + ": matrix indefinite beyond tolerance");
    double s = 0.0;
    for (Eigen::Index i = 0; i < R.rows(); ++i) s += std::log(es.eigenvalues()[i] + eps);
    return s;
}

}  // namespace

SampleStats sample_stats(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, bool centered) {
    if (X.cols() != Y.cols()) throw std::invalid_argument("sample_stats: column counts differ");
    const Eigen::Index N = X.cols();
    if (N == 0) throw std::invalid_argument("sample_stats: empty data");
    const Eigen::Index m = X.rows(), n = Y.rows();

    const Eigen::Index nblocks = (N + kBlock - 1) / kBlock;
    std::vector<Eigen::MatrixXd> rx(nblocks), ry(nblocks), rxy(nblocks);
    std::vector<Eigen::VectorXd> sx(nblocks), sy(nblocks);

#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nblocks; ++b) {
        const Eigen::Index lo = b * kBlock;
        const Eigen::Index len = std::min(kBlock, N - lo);
        auto XB = X.middleCols(lo, len);
        auto YB = Y.middleCols(lo, len);
        rx[b] = XB * XB.transpose();
        ry[b] = YB * YB.transpose();
        rxy[b] = XB * YB.transpose();
        sx[b] = XB.rowwise().sum();
        sy[b] = YB.rowwise().sum();
    }

    // Fixed-order combination keeps the result independent of thread count.
    SampleStats s;
    s.N = N;
    s.Rx = Eigen::MatrixXd::Zero(m, m);
    s.Ry = Eigen::MatrixXd::Zero(n, n);
    s.Rxy = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd mx = Eigen::VectorXd::Zero(m), my = Eigen::VectorXd::Zero(n);
    for (Eigen::Index b = 0; b < nblocks; ++b) {
        s.Rx += rx[b];
        s.Ry += ry[b];
        s.Rxy += rxy[b];
        mx += sx[b];
        my += sy[b];
    }
    const double invN = 1.0 / static_cast<double>(N);
    s.Rx *= invN;
    s.Ry *= invN;
    s.Rxy *= invN;
    if (centered) {
        mx *= invN;
        my *= invN;
        s.Rx -= mx * mx.transpose();
        s.Ry -= my * my.transpose();
        s.Rxy -= mx * my.transpose();
    }
    s.Rx = 0.5 * (s.Rx + s.Rx.transpose());
    s.Ry = 0.5 * (s.Ry + s.Ry.transpose());
    return s;
}

double ld_entropy(const Eigen::MatrixXd& R, double eps) {
    check_symmetric(R, "ld_entropy");
    const double d = static_cast<double>(R.rows());
    try {
        return 0.5 * logdet_sym(R, eps, "ld_entropy") + 0.5 * d * kLog2PiE;
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what());
    }
}

namespace {

Eigen::MatrixXd error_corr(const SampleStats& s, double eps) {
    const Eigen::Index m = s.Rx.rows();
    Eigen::MatrixXd Rxe = s.Rx + eps * Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd Re = s.Ry - s.Rxy.transpose() * Rxe.llt().solve(s.Rxy);
    return 0.5 * (Re + Re.transpose());
}

}  // namespace

double ld_mutual_info(const SampleStats& s, double eps) {
    Eigen::MatrixXd Re = error_corr(s, eps);
    return 0.5 * logdet_sym(s.Ry, eps, "ld_mutual_info") -
           0.5 * logdet_sym(Re, eps, "ld_mutual_info");
}

double ld_mutual_info_xform(const SampleStats& s, double eps) {
    const Eigen::Index n = s.Ry.rows();
    Eigen::MatrixXd Rye = s.Ry + eps * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Rex = s.Rx - s.Rxy * Rye.llt().solve(s.Rxy.transpose());
    Rex = 0.5 * (Rex + Rex.transpose());
    return 0.5 * logdet_sym(s.Rx, eps, "ld_mutual_info_xform") -
           0.5 * logdet_sym(Rex, eps, "ld_mutual_info_xform");
}

Eigen::MatrixXd weighted_corr(const Eigen::MatrixXd& samples, double zeta, std::int64_t k) {
    if (k <= 0) throw std::invalid_argument("weighted_corr: empty data (k = 0)");
    if (k > samples.cols()) throw std::invalid_argument("weighted_corr: k exceeds sample count");
    if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("weighted_corr: zeta outside (0,1)");
    const Eigen::Index d = samples.rows();

    // S(i) = zeta S(i-1) + v v^T, scaled once at the end.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
    for (std::int64_t i = 0; i < k; ++i) {
        S *= zeta;
        S.selfadjointView<Eigen::Lower>().rankUpdate(samples.col(i));
    }
    S = S.selfadjointView<Eigen::Lower>();
    const double norm = (1.0 - zeta) / (1.0 - std::pow(zeta, static_cast<double>(k)));
    return norm * S;
}

double batch_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double eps) {
    return ld_mutual_info(sample_stats(X, Y, false), eps);
}

BatchOracleResult batch_solver_oracle(const Eigen::MatrixXd& X, const domains::DomainSpec& d,
                                      double eps, int iters, double step) {
    if (d.kind == domains::Kind::HPolytope)
        throw std::invalid_argument("batch_solver_oracle: H-polytope projection unsupported");
    const Eigen::Index m = X.rows(), N = X.cols(), n = d.n;
    if (N < 2) throw std::invalid_argument("batch_solver_oracle: needs N >= 2");

    Eigen::MatrixXd Rx = (X * X.transpose()) / static_cast<double>(N);
    Eigen::MatrixXd Rxe = Rx + eps * Eigen::MatrixXd::Identity(m, m);
    Eigen::LLT<Eigen::MatrixXd> rx_llt(Rxe);
    Eigen::MatrixXd M = rx_llt.solve(X);  // (Rx + eps I)^{-1} X, fixed across iterations

    auto objective = [&](const Eigen::MatrixXd& Y) {
        Eigen::MatrixXd Ry = (Y * Y.transpose()) / static_cast<double>(N);
        Eigen::MatrixXd C = (X * Y.transpose()) / static_cast<double>(N);  // Rxy
        Eigen::MatrixXd Re = Ry - C.transpose() * rx_llt.solve(C);
        return 0.5 * logdet_sym(Ry, eps, "batch_solver_oracle") -
               0.5 * logdet_sym(Re, eps, "batch_solver_oracle");
    };

    // Deterministic start: domain-projected, half-scale PCA whitening.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Rx);
    Eigen::MatrixXd W0(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index j = m - 1 - i;  // top eigenpairs
        W0.row(i) = es.eigenvectors().col(j).transpose() /
                    std::sqrt(std::max(es.eigenvalues()[j], 1e-12));
    }
    Eigen::MatrixXd Y(n, N);
    {
        Eigen::MatrixXd Y0 = 0.5 * W0 * X;
        for (Eigen::Index i = 0; i < N; ++i) Y.col(i) = domains::project(d, Y0.col(i));
    }

    BatchOracleResult res;
    double J = objective(Y);
    res.trace.push_back(J);
    const Eigen::Index nI = n;
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXd Ry = (Y * Y.transpose()) / static_cast<double>(N);
        Eigen::MatrixXd C = (X * Y.transpose()) / static_cast<double>(N);
        Eigen::MatrixXd Re = Ry - C.transpose() * rx_llt.solve(C);
        Re = 0.5 * (Re + Re.transpose());
        Eigen::MatrixXd Rye = Ry + eps * Eigen::MatrixXd::Identity(nI, nI);
        Eigen::MatrixXd Ree = Re + eps * Eigen::MatrixXd::Identity(nI, nI);
        Eigen::MatrixXd YK = Y - C.transpose() * M;
        Eigen::MatrixXd G =
            (Rye.llt().solve(Y) - Ree.llt().solve(YK)) / static_cast<double>(N);

        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            Eigen::MatrixXd Yn = Y + t * G;
            for (Eigen::Index i = 0; i < N; ++i) Yn.col(i) = domains::project(d, Yn.col(i));
            double Jn = objective(Yn);
            if (Jn >= J - 1e-12) {
                Y = std::move(Yn);
                J = Jn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            res.stalled = true;  // non-improving after max backtracks; not fatal
            break;
        }
        res.trace.push_back(J);
    }
    res.Y = std::move(Y);
    return res;
}

namespace ref {

SampleStats sample_stats(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, bool centered) {
    if (X.cols() != Y.cols()) throw std::invalid_argument("sample_stats: column counts differ");
    const Eigen::Index N = X.cols();
    if (N == 0) throw std::invalid_argument("sample_stats: empty data");
    const Eigen::Index m = X.rows(), n = Y.rows();
    SampleStats s;
    s.N = N;
    Eigen::VectorXd mx = Eigen::VectorXd::Zero(m), my = Eigen::VectorXd::Zero(n);
    if (centered) {
        for (Eigen::Index i = 0; i < N; ++i) {
            mx += X.col(i);
            my += Y.col(i);
        }
        mx /= static_cast<double>(N);
        my /= static_cast<double>(N);
    }
    s.Rx = Eigen::MatrixXd::Zero(m, m);
    s.Ry = Eigen::MatrixXd::Zero(n, n);
    s.Rxy = Eigen::MatrixXd::Zero(m, n);
    for (Eigen::Index i = 0; i < N; ++i) {
        Eigen::VectorXd x = X.col(i) - mx;
        Eigen::VectorXd y = Y.col(i) - my;
        s.Rx += x * x.transpose();
        s.Ry += y * y.transpose();
        s.Rxy += x * y.transpose();
    }
    s.Rx /= static_cast<double>(N);
    s.Ry /= static_cast<double>(N);
    s.Rxy /= static_cast<double>(N);
    return s;
}

Eigen::MatrixXd weighted_corr(const Eigen::MatrixXd& samples, double zeta, std::int64_t k) {
    if (k <= 0) throw std::invalid_argument("weighted_corr: empty data (k = 0)");
    const Eigen::Index d = samples.rows();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
    for (std::int64_t i = 1; i <= k; ++i)
        S += std::pow(zeta, static_cast<double>(k - i)) * samples.col(i - 1) *
             samples.col(i - 1).transpose();
    return (1.0 - zeta) / (1.0 - std::pow(zeta, static_cast<double>(k))) * S;
}

}  // namespace ref

}  // namespace cimx::ldmi
