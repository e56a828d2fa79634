#include "cimx/dynamics.hpp"

#include <cmath>
#include <string>

namespace cimx::dynamics {

using domains::DomainSpec;
using domains::Kind;

ForgettingConfig::ForgettingConfig(double zy, double ze, double e)
    : zeta_y(zy), zeta_e(ze), eps(e) {
    if (!(zy > 0.0 && zy < 1.0)) throw std::invalid_argument("ForgettingConfig: zeta_y outside (0,1)");
    if (!(ze > 0.0 && ze < 1.0)) throw std::invalid_argument("ForgettingConfig: zeta_e outside (0,1)");
    if (!(e > 0.0)) throw std::invalid_argument("ForgettingConfig: eps must be positive");
}

NetworkState NetworkState::init(int n, int m, double by_scale, double be_scale, BeMode mode) {
    if (n < 1 || m < n) throw std::invalid_argument("NetworkState: need m >= n >= 1");
    if (!(by_scale > 0.0) || !(be_scale > 0.0))
        throw std::invalid_argument("NetworkState: initial scales must be positive");
    NetworkState st;
    st.W = Eigen::MatrixXd::Zero(n, m);
    st.W.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
    st.By = by_scale * Eigen::MatrixXd::Identity(n, n);
    st.be_mode = mode;
    st.inv_eps = be_scale;
    if (mode == BeMode::ExactMatrix) st.Be = be_scale * Eigen::MatrixXd::Identity(n, n);
    st.k = 1;
    st.y_prev = Eigen::VectorXd::Zero(n);
    return st;
}

Eigen::VectorXd NetworkState::apply_Be(const Eigen::VectorXd& e) const {
    return be_mode == BeMode::ScalarIdentity ? (inv_eps * e).eval() : (Be * e).eval();
}

double NetworkState::quad_Be(const Eigen::VectorXd& e) const {
    return be_mode == BeMode::ScalarIdentity ? inv_eps * e.squaredNorm() : e.dot(Be * e);
}

namespace {

// (zeta - zeta^k) / (1 - zeta); the data-independent part of 1/gamma.
double gamma_offset(double zeta, std::int64_t k) {
    return (zeta - std::pow(zeta, static_cast<double>(k))) / (1.0 - zeta);
}

}  // namespace

double compute_gamma_y(const Eigen::MatrixXd& By, const Eigen::VectorXd& y, double zeta_y,
                       std::int64_t k) {
    if (k < 1) throw std::invalid_argument("compute_gamma_y: k must be >= 1");
    double den = gamma_offset(zeta_y, k) + y.dot(By * y);
    if (!(den > 0.0))
        throw DegeneracyError("compute_gamma_y: nonpositive denominator (k = 1 with y = 0?)");
    return 1.0 / den;
}

double compute_gamma_e(const NetworkState& st, const Eigen::VectorXd& e, double zeta_e,
                       std::int64_t k) {
    if (k < 1) throw std::invalid_argument("compute_gamma_e: k must be >= 1");
    double den = gamma_offset(zeta_e, k) + st.quad_Be(e);
    if (!(den > 0.0))
        throw DegeneracyError("compute_gamma_e: nonpositive denominator (k = 1 with e = 0?)");
    return 1.0 / den;
}

Eigen::VectorXd grad_J(const NetworkState& st, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& e, double gamma_y, double gamma_e) {
    if (y.size() != st.n() || e.size() != st.n())
        throw std::invalid_argument("grad_J: dimension mismatch");
    return gamma_y * (st.By * y) - gamma_e * st.apply_Be(e);
}

OutputRecord run_dynamics(NetworkState& st, const Eigen::VectorXd& x, const DomainSpec& domain,
                          const ForgettingConfig& fcfg, const DynamicsConfig& dcfg) {
    const int n = st.n();
    if (x.size() != st.m()) throw std::invalid_argument("run_dynamics: input dimension mismatch");
    if (domain.n != n) throw std::invalid_argument("run_dynamics: domain dimension mismatch");

    const Eigen::VectorXd Wx = st.W * x;  // constant across the inner loop
    Eigen::VectorXd y = dcfg.y_warm_start ? st.y_prev : Eigen::VectorXd::Zero(n);

    const int n_inter = domain.n_interneurons();
    Eigen::VectorXd lambda = Eigen::VectorXd::Constant(n_inter, dcfg.lambda_init);

    const double gy_steady = (1.0 - fcfg.zeta_y) / fcfg.zeta_y;
    const double ge_steady = (1.0 - fcfg.zeta_e) / fcfg.zeta_e;
    const double gy_off = gamma_offset(fcfg.zeta_y, st.k);
    const double ge_off = gamma_offset(fcfg.zeta_e, st.k);

    OutputRecord rec;
    rec.nu_used = 0;
    rec.converged = false;

    Eigen::VectorXd e(n), g(n), y_new(n);
    for (int nu = 1; nu <= dcfg.nu_max; ++nu) {
        e = y - Wx;
        if (dcfg.gamma_mode == GammaMode::Steady) {
            g = gy_steady * (st.By * y) - ge_steady * st.apply_Be(e);
        } else {
            // Exact gamma factors from the current iterate; zero denominator
            // can only happen with a zero iterate, whose term vanishes anyway.
            double dy = gy_off + y.dot(st.By * y);
            double de = ge_off + st.quad_Be(e);
            g = (dy > 0.0 ? (st.By * y / dy).eval() : Eigen::VectorXd::Zero(n).eval()) -
                (de > 0.0 ? (st.apply_Be(e) / de).eval() : Eigen::VectorXd::Zero(n).eval());
        }

        const double eta = dcfg.eta_y(nu);
        switch (domain.kind) {
            case Kind::Antisparse:
                y_new = (y + eta * g).cwiseMax(-1.0).cwiseMin(1.0);
                break;
            case Kind::NonnegAntisparse:
                y_new = (y + eta * g).cwiseMax(0.0).cwiseMin(1.0);
                break;
            case Kind::Sparse:
                y_new = domains::soft_threshold(y + eta * g, lambda[0]);
                lambda[0] = std::max(lambda[0] + dcfg.eta_lambda * (y_new.lpNorm<1>() - 1.0), 0.0);
                break;
            case Kind::NonnegSparse:
                y_new = (y + eta * g).array() - lambda[0];
                y_new = y_new.cwiseMax(0.0);
                lambda[0] = std::max(lambda[0] + dcfg.eta_lambda * (y_new.sum() - 1.0), 0.0);
                break;
            case Kind::UnitSimplex:
                // Equality constraint: the multiplier stays unconstrained.
                y_new = (y + eta * g).array() - lambda[0];
                y_new = y_new.cwiseMax(0.0);
                lambda[0] += dcfg.eta_lambda * (y_new.sum() - 1.0);
                break;
            case Kind::HPolytope: {
                const auto& h = *domain.hrep;
                y_new = y + eta * (g - h.A.transpose() * lambda);
                lambda = (lambda + dcfg.eta_lambda * (h.A * y_new - h.b)).cwiseMax(0.0);
                break;
            }
            case Kind::FeaturePolytope: {
                // Grouped coordinates get the prox shifts (ST / shifted ReLU);
                // coordinates outside every group get their box clip.
                const auto& fp = *domain.feature;
                Eigen::VectorXd ybar = y + eta * g;
                Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
                std::vector<char> covered(static_cast<std::size_t>(n), 0);
                for (int l = 0; l < n_inter; ++l)
                    for (int j : fp.groups[static_cast<std::size_t>(l)]) {
                        alpha[j] += lambda[l];
                        covered[static_cast<std::size_t>(j)] = 1;
                    }
                for (int j = 0; j < n; ++j) {
                    const bool sgn = fp.is_signed(j);
                    if (covered[static_cast<std::size_t>(j)]) {
                        if (sgn) {
                            double a = std::abs(ybar[j]) - alpha[j];
                            y_new[j] = a > 0.0 ? domains::sign0(ybar[j]) * a : 0.0;
                        } else {
                            y_new[j] = std::max(ybar[j] - alpha[j], 0.0);
                        }
                    } else {
                        y_new[j] = sgn ? std::clamp(ybar[j], -1.0, 1.0) : std::clamp(ybar[j], 0.0, 1.0);
                    }
                }
                for (int l = 0; l < n_inter; ++l) {
                    double s = 0.0;
                    for (int j : fp.groups[static_cast<std::size_t>(l)]) s += std::abs(y_new[j]);
                    lambda[l] = std::max(lambda[l] + dcfg.eta_lambda * (s - 1.0), 0.0);
                }
                break;
            }
        }

        if (!y_new.allFinite())
            throw DivergenceError(-1, nu, "run_dynamics: non-finite output at iteration " +
                                              std::to_string(nu));

        double rel = (y_new - y).norm() / std::max(y_new.norm(), 1e-12);
        y = y_new;
        rec.nu_used = nu;
        if (rel < dcfg.eps_t) {
            rec.converged = true;
            break;
        }
    }

    rec.y = y;
    rec.e = y - Wx;
    rec.lambda_final = lambda;
    st.y_prev = y;
    return rec;
}

void update_W(NetworkState& st, const Eigen::VectorXd& e, const Eigen::VectorXd& x, double mu_w) {
    if (e.size() != st.n() || x.size() != st.m())
        throw std::invalid_argument("update_W: dimension mismatch");
    st.W.noalias() += mu_w * e * x.transpose();
}

namespace {

// Shared rank-one inverse update for By / exact-mode Be.
void rank_one_inverse_update(Eigen::MatrixXd& B, const Eigen::VectorXd& v, double zeta,
                             std::int64_t k, ByUpdateMode mode, const char* who) {
    const double q = v.dot(B * v);
    if (v.squaredNorm() > 0.0 && !(q > 0.0))
        throw DegeneracyError(std::string(who) + ": nonpositive quadratic form, SPD lost");

    double prefactor, gamma;
    if (mode == ByUpdateMode::Exact) {
        if (k < 2)
            throw std::invalid_argument(std::string(who) +
                                        ": exact recursion needs k >= 2 (coefficient singular at k = 1)");
        const double zk = std::pow(zeta, static_cast<double>(k));
        prefactor = (1.0 - zk) / (zeta - zk);
        gamma = 1.0 / ((zeta - zk) / (1.0 - zeta) + q);
    } else {
        prefactor = 1.0 / zeta;
        gamma = (1.0 - zeta) / zeta;
        if (gamma * q >= 1.0)
            throw DegeneracyError(std::string(who) + ": steady update would lose positive definiteness");
    }

    Eigen::VectorXd Bv = B * v;
    B = prefactor * (B - gamma * Bv * Bv.transpose());
    B = 0.5 * (B + B.transpose());
}

}  // namespace

void update_By(NetworkState& st, const Eigen::VectorXd& y, double zeta_y, ByUpdateMode mode) {
    if (y.size() != st.n()) throw std::invalid_argument("update_By: dimension mismatch");
    rank_one_inverse_update(st.By, y, zeta_y, st.k, mode, "update_By");
    st.k += 1;
}

void update_Be(NetworkState& st, const Eigen::VectorXd& e, double zeta_e) {
    if (st.be_mode == BeMode::ScalarIdentity) return;  // approximation contract
    if (e.size() != st.n()) throw std::invalid_argument("update_Be: dimension mismatch");
    // The k = 1 coefficient of the inverse recursion is singular (a single
    // sample's weighted correlation carries no regularizer); keep the
    // initialization through the first sample.
    if (st.k < 2) return;
    rank_one_inverse_update(st.Be, e, zeta_e, st.k, ByUpdateMode::Exact, "update_Be");
}

OutputLog fit_online(const Eigen::MatrixXd& X, const DomainSpec& domain,
                     const ForgettingConfig& fcfg, const DynamicsConfig& dcfg,
                     const MuWSchedule& mu_w, NetworkState& st) {
    const Eigen::Index N = X.cols();
    const int n = st.n();
    OutputLog log;
    log.Y.resize(n, N);
    log.E.resize(n, N);
    log.nu_used.resize(static_cast<std::size_t>(N));
    log.converged.resize(static_cast<std::size_t>(N));
    log.lambda_final.resize(domain.n_interneurons(), N);

    for (Eigen::Index i = 0; i < N; ++i) {
        const std::int64_t k = st.k;
        try {
            OutputRecord rec = run_dynamics(st, X.col(i), domain, fcfg, dcfg);
            update_W(st, rec.e, X.col(i), mu_w(k));
            update_Be(st, rec.e, fcfg.zeta_e);
            update_By(st, rec.y, fcfg.zeta_y, ByUpdateMode::Steady);
            log.Y.col(i) = rec.y;
            log.E.col(i) = rec.e;
            log.nu_used[static_cast<std::size_t>(i)] = rec.nu_used;
            log.converged[static_cast<std::size_t>(i)] = rec.converged ? 1 : 0;
            if (log.lambda_final.rows() > 0) log.lambda_final.col(i) = rec.lambda_final;
        } catch (const DivergenceError& d) {
            throw DivergenceError(k, d.iteration,
                                  "fit_online: divergence at sample " + std::to_string(k) + ": " +
                                      d.what());
        }
    }
    return log;
}

}  // namespace cimx::dynamics
