#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cimx/domains.hpp"

namespace cimx::dynamics {

struct ForgettingConfig {
    double zeta_y;  // output forgetting factor, in (0,1)
    double zeta_e;  // error forgetting factor, in (0,1)
    double eps;     // correlation regularizer; B_e ~ (1/eps) I in the default mode

    ForgettingConfig(double zy, double ze, double e);
};

enum class BeMode { ScalarIdentity, ExactMatrix };

// Learned synaptic state. By(k) approximates (R_y(k-1) + eps I)^{-1}; the
// sample counter k is advanced by update_By. y_prev carries the previous
// converged output for warm-started dynamics (not part of the checkpoint).
struct NetworkState {
    Eigen::MatrixXd W;   // n x m feedforward map
    Eigen::MatrixXd By;  // n x n SPD
    BeMode be_mode = BeMode::ScalarIdentity;
    double inv_eps = 0.0;   // ScalarIdentity: B_e = inv_eps * I
    Eigen::MatrixXd Be;     // ExactMatrix mode only
    std::int64_t k = 1;
    Eigen::VectorXd y_prev;

    int n() const { return static_cast<int>(By.rows()); }
    int m() const { return static_cast<int>(W.cols()); }

    // W = [I 0] padded, By = by_scale I, B_e = be_scale I (ScalarIdentity
    // stores the scale, eps = 1/be_scale).
    static NetworkState init(int n, int m, double by_scale, double be_scale,
                             BeMode mode = BeMode::ScalarIdentity);

    Eigen::VectorXd apply_Be(const Eigen::VectorXd& e) const;
    double quad_Be(const Eigen::VectorXd& e) const;
};

struct EtaSchedule {
    double c = 0.9;
    double floor = 0.0;
    double operator()(int nu) const { return std::max(c / static_cast<double>(nu), floor); }
};

// Steady applies the constant large-k limits gamma_y = (1-zeta_y)/zeta_y and
// gamma_e = (1-zeta_e)/zeta_e inside the dynamics loop, matching the network
// the learning rules implement. Recompute re-evaluates both factors from the
// current iterate each step (the exact gradient; kept for validation).
enum class GammaMode { Steady, Recompute };

struct DynamicsConfig {
    int nu_max = 500;
    double eps_t = 1e-6;       // relative-change stopping tolerance
    EtaSchedule eta_y{0.9, 0.0};
    double eta_lambda = 1.0;   // constant interneuron rate
    double lambda_init = 0.0;  // lambda resets to this at every sample
    bool y_warm_start = true;
    GammaMode gamma_mode = GammaMode::Steady;
};

struct OutputRecord {
    Eigen::VectorXd y;
    Eigen::VectorXd e;  // y - W x at exit
    int nu_used = 0;
    bool converged = false;
    Eigen::VectorXd lambda_final;  // empty when the domain has no interneurons
};

struct DivergenceError : std::runtime_error {
    std::int64_t sample;  // -1 when raised outside fit_online
    int iteration;
    DivergenceError(std::int64_t k, int nu, const std::string& msg)
        : std::runtime_error(msg), sample(k), iteration(nu) {}
};

struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// gamma_y(k) = ( (zeta^k... ) see below )^{-1}:
//   ((zeta_y - zeta_y^k)/(1 - zeta_y) + y^T By y)^{-1}, strictly positive.
// k = 1 zeroes the first term; that is allowed only when y^T By y > 0.
double compute_gamma_y(const Eigen::MatrixXd& By, const Eigen::VectorXd& y, double zeta_y,
                       std::int64_t k);

// Same formula with (zeta_e, e, B_e); the ScalarIdentity quadratic term is
// ||e||^2 / eps.
double compute_gamma_e(const NetworkState& st, const Eigen::VectorXd& e, double zeta_e,
                       std::int64_t k);

// gamma_y By y - gamma_e Be e  (Be e = e/eps in ScalarIdentity mode).
Eigen::VectorXd grad_J(const NetworkState& st, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& e, double gamma_y, double gamma_e);

// One sample's neural dynamics: fixed-point iterations with the
// domain-specific activation / interneuron updates, stopping on relative
// change < eps_t or nu_max. Mutates only y_prev (for the next warm start).
OutputRecord run_dynamics(NetworkState& st, const Eigen::VectorXd& x,
                          const domains::DomainSpec& domain, const ForgettingConfig& fcfg,
                          const DynamicsConfig& dcfg);

// W += mu_w e x^T  (LMS step on the feedforward map).
void update_W(NetworkState& st, const Eigen::VectorXd& e, const Eigen::VectorXd& x, double mu_w);

enum class ByUpdateMode { Exact, Steady };

// Rank-one inverse-correlation update; resymmetrizes and advances k.
// Exact:  By <- (1-z^k)/(z-z^k) (By - gamma_y(k) By y y^T By)   [k >= 2]
// Steady: By <- (1/z) (By - ((1-z)/z) By y y^T By)
void update_By(NetworkState& st, const Eigen::VectorXd& y, double zeta_y, ByUpdateMode mode);

// ScalarIdentity: no-op. ExactMatrix: same rank-one recursion on Be using
// state.k, so call it before update_By advances the counter.
void update_Be(NetworkState& st, const Eigen::VectorXd& e, double zeta_e);

struct MuWSchedule {
    double c0 = 3e-2;
    double decay = 0.0;  // mu_w(k) = c0 / (1 + decay k); constant by default
    double operator()(std::int64_t k) const {
        return c0 / (1.0 + decay * static_cast<double>(k));
    }
};

// Columnar log of per-sample OutputRecords.
struct OutputLog {
    Eigen::MatrixXd Y;  // n x N converged outputs
    Eigen::MatrixXd E;  // n x N exit errors
    std::vector<int> nu_used;
    std::vector<char> converged;
    Eigen::MatrixXd lambda_final;  // n_interneurons x N; 0 x N when none
};

// Online loop: per sample run_dynamics -> update_W -> update_Be -> update_By
// (Be first so both recursions see the same sample index; By owns the counter
// increment). Deterministic given the initial state and inputs.
OutputLog fit_online(const Eigen::MatrixXd& X, const domains::DomainSpec& domain,
                     const ForgettingConfig& fcfg, const DynamicsConfig& dcfg,
                     const MuWSchedule& mu_w, NetworkState& st);

}  // namespace cimx::dynamics
