#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cimx/datagen.hpp"
#include "cimx/domains.hpp"
#include "cimx/dynamics.hpp"

namespace cimx::experiment {

enum class SourceGen { CopulaT, UniformPolytope, Pam4 };

struct SourceConfig {
    SourceGen gen = SourceGen::CopulaT;
    double rho = 0.0;  // copula correlation level
    double df = 4.0;   // copula degrees of freedom
};

// Network hyperparameters; unset fields fill from the domain's default row
// (see default_network_for).
struct NetworkConfig {
    double zeta_y, zeta_e;
    double by_init, be_init;  // By(1) = by_init I, Be(1) = be_init I, eps = 1/be_init
    double mu_w;
    double mu_w_decay = 0.0;
    int nu_max = 500;
    double eps_t = 1e-6;
    double eta_y_c, eta_y_floor;
    double eta_lambda;
    double lambda_init = 0.0;
    bool warm_start = true;
    dynamics::GammaMode gamma_mode = dynamics::GammaMode::Steady;
};

struct ExperimentConfig {
    int n = 5, m = 10;
    std::int64_t N = 100000;
    domains::DomainSpec domain = domains::DomainSpec::antisparse(5);
    SourceConfig source;
    datagen::MixingDist mixing = datagen::MixingDist::StdNormal;
    double snr_db = 30.0;  // +inf disables noise
    std::uint64_t seed = 1;
    NetworkConfig net;
    std::int64_t window = 0;  // SINR trace window; 0 -> N/100
};

// Table-row defaults per domain (the 4-PAM source swaps in its own row).
NetworkConfig default_network_for(const domains::DomainSpec& d, SourceGen gen);

struct ConfigError : std::runtime_error {
    std::string path;  // JSON field path of the offending entry
    ConfigError(std::string p, const std::string& msg)
        : std::runtime_error(msg + " (at " + p + ")"), path(std::move(p)) {}
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_json_file(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& cfg);  // echo, defaults filled

struct RunResult {
    std::int64_t window = 0;
    std::vector<double> trace;        // per-window mean SINR (dB)
    double final_sinr_db = 0.0;       // last window
    double mean_sinr_db = 0.0;        // mean over windows
    std::optional<double> ser;        // 4-PAM only, final 80% of samples
    double wall_s = 0.0;
    double nu_mean = 0.0;
    int nu_max_used = 0;
    std::uint64_t seed = 0;
    dynamics::NetworkState state;     // final network
};

// generate -> mix -> add noise -> fit_online -> score.
RunResult run_experiment(const ExperimentConfig& cfg);

std::string mixing_name(datagen::MixingDist d);
datagen::MixingDist mixing_from_name(const std::string& s);

}  // namespace cimx::experiment
