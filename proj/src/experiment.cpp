#include "cimx/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "cimx/metrics.hpp"
#include "cimx/rng.hpp"

namespace cimx::experiment {

using domains::DomainSpec;
using domains::Kind;
using nlohmann::json;

NetworkConfig default_network_for(const DomainSpec& d, SourceGen gen) {
    NetworkConfig c{};
    c.zeta_y = 1 - 1e-2;
    c.mu_w = 3e-2;
    c.nu_max = 500;
    c.eps_t = 1e-6;
    c.eta_lambda = 1.0;
    switch (d.kind) {
        case Kind::Antisparse:
            c.zeta_e = 1 - 2e-2;
            c.by_init = 5.0;
            c.be_init = 5000.0;
            c.eta_y_c = 0.9;
            c.eta_y_floor = 0.0;
            break;
        case Kind::NonnegAntisparse:
            c.zeta_e = 1 - 1e-1 / 3.0;
            c.by_init = 5.0;
            c.be_init = 2000.0;
            c.eta_y_c = 0.9;
            c.eta_y_floor = 1e-3;
            break;
        case Kind::Sparse:
            c.zeta_e = 1 - 1e-2;
            c.by_init = 1.0;
            c.be_init = 1000.0;
            c.eta_y_c = 0.1;
            c.eta_y_floor = 1e-3;
            c.eta_lambda = 1.0;
            break;
        case Kind::NonnegSparse:
            c.zeta_e = 1 - 1e-2;
            c.by_init = 5.0;
            c.be_init = 1000.0;
            c.eta_y_c = 0.1;
            c.eta_y_floor = 1e-3;
            c.eta_lambda = 1.0;
            break;
        case Kind::UnitSimplex:
            c.zeta_e = 1 - 1e-2;
            c.by_init = 5.0;
            c.be_init = 1000.0;
            c.eta_y_c = 0.1;
            c.eta_y_floor = 1e-3;
            c.eta_lambda = 0.05;
            break;
        case Kind::HPolytope:
            c.zeta_e = 1 - 1e-2;
            c.by_init = 1.0;
            c.be_init = 1000.0;
            c.mu_w = 5e-2;
            c.eta_y_c = 0.25;
            c.eta_y_floor = 1e-4;
            c.eta_lambda = 0.1;
            break;
        case Kind::FeaturePolytope:
            c.zeta_e = 1 - 1e-2;
            c.by_init = 5.0;
            c.be_init = 2500.0;
            c.mu_w = 5e-2;
            c.eta_y_c = 0.1;
            c.eta_y_floor = 1e-10;
            c.eta_lambda = 1.0;
            break;
    }
    if (gen == SourceGen::Pam4) {
        // digital-communications row: antisparse network on scaled symbols
        c.zeta_e = 1 - 1e-2;
        c.by_init = 5.0;
        c.be_init = 1000.0;
        c.mu_w = 3e-2;
        c.eta_y_c = 0.9;
        c.eta_y_floor = 1e-3;
    }
    return c;
}

std::string mixing_name(datagen::MixingDist d) {
    switch (d) {
        case datagen::MixingDist::StdNormal: return "std_normal";
        case datagen::MixingDist::UniformPm1: return "uniform_pm1";
        case datagen::MixingDist::UniformPm2: return "uniform_pm2";
        case datagen::MixingDist::Laplace: return "laplace";
    }
    return "std_normal";
}

datagen::MixingDist mixing_from_name(const std::string& s) {
    if (s == "std_normal") return datagen::MixingDist::StdNormal;
    if (s == "uniform_pm1") return datagen::MixingDist::UniformPm1;
    if (s == "uniform_pm2") return datagen::MixingDist::UniformPm2;
    if (s == "laplace") return datagen::MixingDist::Laplace;
    throw std::invalid_argument("unknown mixing distribution: " + s);
}

namespace {

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::Antisparse: return "antisparse";
        case Kind::NonnegAntisparse: return "nonneg_antisparse";
        case Kind::Sparse: return "sparse";
        case Kind::NonnegSparse: return "nonneg_sparse";
        case Kind::UnitSimplex: return "simplex";
        case Kind::HPolytope: return "hpolytope";
        case Kind::FeaturePolytope: return "feature";
    }
    return "antisparse";
}

template <typename T>
T field_or(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + "." + key, "wrong type");
    }
}

DomainSpec domain_from_json(const json& j, int n) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("domain", "expected object with a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "antisparse") return DomainSpec::antisparse(n);
    if (kind == "nonneg_antisparse") return DomainSpec::nonneg_antisparse(n);
    if (kind == "sparse") return DomainSpec::sparse(n);
    if (kind == "nonneg_sparse") return DomainSpec::nonneg_sparse(n);
    if (kind == "simplex") return DomainSpec::unit_simplex(n);
    if (kind == "hpolytope") {
        if (!j.contains("A") || !j.contains("b"))
            throw ConfigError("domain", "hpolytope requires \"A\" and \"b\"");
        const auto& A = j.at("A");
        domains::HPolytope h;
        h.A.resize(static_cast<Eigen::Index>(A.size()), n);
        for (std::size_t r = 0; r < A.size(); ++r) {
            if (A.at(r).size() != static_cast<std::size_t>(n))
                throw ConfigError("domain.A[" + std::to_string(r) + "]", "row length != n");
            for (int c = 0; c < n; ++c)
                h.A(static_cast<Eigen::Index>(r), c) = A.at(r).at(c).get<double>();
        }
        const auto& b = j.at("b");
        if (b.size() != A.size()) throw ConfigError("domain.b", "length differs from A rows");
        h.b.resize(static_cast<Eigen::Index>(b.size()));
        for (std::size_t r = 0; r < b.size(); ++r)
            h.b[static_cast<Eigen::Index>(r)] = b.at(r).get<double>();
        try {
            return DomainSpec::hpolytope(std::move(h));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("domain", e.what());
        }
    }
    if (kind == "feature") {
        domains::FeaturePolytope fp;
        fp.n = n;
        auto read_idx = [&](const char* key) {
            std::vector<int> out;
            if (!j.contains(key)) return out;
            for (const auto& v : j.at(key)) {
                int one_based = v.get<int>();
                if (one_based < 1 || one_based > n)
                    throw ConfigError(std::string("domain.") + key, "1-based index out of range");
                out.push_back(one_based - 1);
            }
            return out;
        };
        fp.signed_idx = read_idx("signed");
        fp.nonneg_idx = read_idx("nonneg");
        if (j.contains("groups"))
            for (const auto& g : j.at("groups")) {
                std::vector<int> grp;
                for (const auto& v : g) {
                    int one_based = v.get<int>();
                    if (one_based < 1 || one_based > n)
                        throw ConfigError("domain.groups", "1-based index out of range");
                    grp.push_back(one_based - 1);
                }
                fp.groups.push_back(std::move(grp));
            }
        try {
            return DomainSpec::feature_polytope(std::move(fp));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("domain", e.what());
        }
    }
    throw ConfigError("domain.kind", "unknown domain kind \"" + kind + "\"");
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.n = field_or<int>(j, "n", "$", 5);
    cfg.m = field_or<int>(j, "m", "$", 10);
    if (cfg.n < 1) throw ConfigError("n", "must be >= 1");
    if (cfg.m < cfg.n) throw ConfigError("m", "must satisfy m >= n");
    cfg.N = field_or<std::int64_t>(j, "N", "$", 100000);
    if (cfg.N < 0) throw ConfigError("N", "must be >= 0");

    cfg.domain = j.contains("domain") ? domain_from_json(j.at("domain"), cfg.n)
                                      : DomainSpec::antisparse(cfg.n);

    if (j.contains("source")) {
        const auto& s = j.at("source");
        const std::string gen = field_or<std::string>(s, "gen", "source", "copula_t");
        if (gen == "copula_t")
            cfg.source.gen = SourceGen::CopulaT;
        else if (gen == "uniform_polytope")
            cfg.source.gen = SourceGen::UniformPolytope;
        else if (gen == "pam4")
            cfg.source.gen = SourceGen::Pam4;
        else
            throw ConfigError("source.gen", "unknown generator \"" + gen + "\"");
        cfg.source.rho = field_or<double>(s, "rho", "source", 0.0);
        cfg.source.df = field_or<double>(s, "df", "source", 4.0);
        if (cfg.source.rho < 0.0 || cfg.source.rho > 0.8)
            throw ConfigError("source.rho", "outside the supported sweep range [0, 0.8]");
        if (cfg.source.df <= 0.0) throw ConfigError("source.df", "must be positive");
    } else {
        cfg.source.gen = (cfg.domain.kind == Kind::Antisparse ||
                          cfg.domain.kind == Kind::NonnegAntisparse)
                             ? SourceGen::CopulaT
                             : SourceGen::UniformPolytope;
    }
    if (cfg.source.gen == SourceGen::CopulaT && cfg.domain.kind != Kind::Antisparse &&
        cfg.domain.kind != Kind::NonnegAntisparse)
        throw ConfigError("source.gen",
                          "copula_t marginals only fill the (nonneg) antisparse boxes");
    if (cfg.source.gen == SourceGen::Pam4 && cfg.domain.kind != Kind::Antisparse)
        throw ConfigError("source.gen", "pam4 feeds the antisparse network (scaled symbols)");

    if (j.contains("mixing")) {
        try {
            cfg.mixing = mixing_from_name(
                field_or<std::string>(j.at("mixing"), "dist", "mixing", "std_normal"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("mixing.dist", e.what());
        }
    }
    cfg.snr_db = field_or<double>(j, "snr_db", "$", 30.0);
    cfg.seed = field_or<std::uint64_t>(j, "seed", "$", 1);
    cfg.window = field_or<std::int64_t>(j, "window", "$", 0);
    if (cfg.window < 0) throw ConfigError("window", "must be >= 0");

    cfg.net = default_network_for(cfg.domain, cfg.source.gen);
    if (j.contains("network")) {
        const auto& nj = j.at("network");
        auto& net = cfg.net;
        net.zeta_y = field_or<double>(nj, "zeta_y", "network", net.zeta_y);
        net.zeta_e = field_or<double>(nj, "zeta_e", "network", net.zeta_e);
        net.by_init = field_or<double>(nj, "by_init", "network", net.by_init);
        net.be_init = field_or<double>(nj, "be_init", "network", net.be_init);
        net.mu_w = field_or<double>(nj, "mu_w", "network", net.mu_w);
        net.mu_w_decay = field_or<double>(nj, "mu_w_decay", "network", net.mu_w_decay);
        net.nu_max = field_or<int>(nj, "nu_max", "network", net.nu_max);
        net.eps_t = field_or<double>(nj, "eps_t", "network", net.eps_t);
        net.eta_y_c = field_or<double>(nj, "eta_y_c", "network", net.eta_y_c);
        net.eta_y_floor = field_or<double>(nj, "eta_y_floor", "network", net.eta_y_floor);
        net.eta_lambda = field_or<double>(nj, "eta_lambda", "network", net.eta_lambda);
        net.lambda_init = field_or<double>(nj, "lambda_init", "network", net.lambda_init);
        net.warm_start = field_or<bool>(nj, "warm_start", "network", net.warm_start);
        const std::string gm = field_or<std::string>(nj, "gamma_mode", "network", "steady");
        if (gm == "steady")
            net.gamma_mode = dynamics::GammaMode::Steady;
        else if (gm == "recompute")
            net.gamma_mode = dynamics::GammaMode::Recompute;
        else
            throw ConfigError("network.gamma_mode", "expected \"steady\" or \"recompute\"");
        if (!(net.zeta_y > 0 && net.zeta_y < 1)) throw ConfigError("network.zeta_y", "outside (0,1)");
        if (!(net.zeta_e > 0 && net.zeta_e < 1)) throw ConfigError("network.zeta_e", "outside (0,1)");
        if (net.nu_max < 1) throw ConfigError("network.nu_max", "must be >= 1");
        if (!(net.eps_t >= 0)) throw ConfigError("network.eps_t", "must be >= 0");
        if (!(net.by_init > 0) || !(net.be_init > 0))
            throw ConfigError("network.by_init/be_init", "must be positive");
    }
    return cfg;
}

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json_text(text);
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["n"] = cfg.n;
    j["m"] = cfg.m;
    j["N"] = cfg.N;
    json dj;
    dj["kind"] = kind_name(cfg.domain.kind);
    if (cfg.domain.kind == Kind::HPolytope) {
        json A = json::array(), b = json::array();
        for (Eigen::Index r = 0; r < cfg.domain.hrep->A.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < cfg.domain.hrep->A.cols(); ++c)
                row.push_back(cfg.domain.hrep->A(r, c));
            A.push_back(std::move(row));
            b.push_back(cfg.domain.hrep->b[r]);
        }
        dj["A"] = std::move(A);
        dj["b"] = std::move(b);
    }
    if (cfg.domain.kind == Kind::FeaturePolytope) {
        auto to_1based = [](const std::vector<int>& v) {
            json a = json::array();
            for (int x : v) a.push_back(x + 1);
            return a;
        };
        dj["signed"] = to_1based(cfg.domain.feature->signed_idx);
        dj["nonneg"] = to_1based(cfg.domain.feature->nonneg_idx);
        json groups = json::array();
        for (const auto& g : cfg.domain.feature->groups) groups.push_back(to_1based(g));
        dj["groups"] = std::move(groups);
    }
    j["domain"] = std::move(dj);
    j["source"] = {{"gen", cfg.source.gen == SourceGen::CopulaT          ? "copula_t"
                           : cfg.source.gen == SourceGen::UniformPolytope ? "uniform_polytope"
                                                                          : "pam4"},
                   {"rho", cfg.source.rho},
                   {"df", cfg.source.df}};
    j["mixing"] = {{"dist", mixing_name(cfg.mixing)}};
    j["snr_db"] = cfg.snr_db;
    j["seed"] = cfg.seed;
    j["window"] = cfg.window;
    j["network"] = {{"zeta_y", cfg.net.zeta_y},
                    {"zeta_e", cfg.net.zeta_e},
                    {"by_init", cfg.net.by_init},
                    {"be_init", cfg.net.be_init},
                    {"mu_w", cfg.net.mu_w},
                    {"mu_w_decay", cfg.net.mu_w_decay},
                    {"nu_max", cfg.net.nu_max},
                    {"eps_t", cfg.net.eps_t},
                    {"eta_y_c", cfg.net.eta_y_c},
                    {"eta_y_floor", cfg.net.eta_y_floor},
                    {"eta_lambda", cfg.net.eta_lambda},
                    {"lambda_init", cfg.net.lambda_init},
                    {"warm_start", cfg.net.warm_start},
                    {"gamma_mode",
                     cfg.net.gamma_mode == dynamics::GammaMode::Steady ? "steady" : "recompute"}};
    return j.dump(1);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();

    const std::uint64_t seed_src = substream(cfg.seed, 1);
    const std::uint64_t seed_mix = substream(cfg.seed, 2);
    const std::uint64_t seed_noise = substream(cfg.seed, 3);

    Eigen::MatrixXd S;       // what the network should recover (domain scale)
    Eigen::MatrixXd symbols;  // pam4 only
    switch (cfg.source.gen) {
        case SourceGen::CopulaT:
            S = datagen::gen_copula_t(cfg.n, cfg.N, cfg.source.rho, cfg.source.df,
                                      cfg.domain.kind == Kind::Antisparse, seed_src);
            break;
        case SourceGen::UniformPolytope:
            S = datagen::gen_uniform_polytope(cfg.domain, cfg.N, seed_src);
            break;
        case SourceGen::Pam4:
            symbols = datagen::gen_pam4(cfg.n, cfg.N, seed_src);
            S = datagen::pam4_scaled(symbols);
            break;
    }

    Eigen::MatrixXd A = datagen::gen_mixing(cfg.m, cfg.n, cfg.mixing, seed_mix);
    Eigen::MatrixXd X = cfg.N > 0 ? datagen::add_awgn(A * S, cfg.snr_db, seed_noise)
                                  : Eigen::MatrixXd(cfg.m, 0);

    dynamics::ForgettingConfig fcfg(cfg.net.zeta_y, cfg.net.zeta_e, 1.0 / cfg.net.be_init);
    dynamics::DynamicsConfig dcfg;
    dcfg.nu_max = cfg.net.nu_max;
    dcfg.eps_t = cfg.net.eps_t;
    dcfg.eta_y = {cfg.net.eta_y_c, cfg.net.eta_y_floor};
    dcfg.eta_lambda = cfg.net.eta_lambda;
    dcfg.lambda_init = cfg.net.lambda_init;
    dcfg.y_warm_start = cfg.net.warm_start;
    dcfg.gamma_mode = cfg.net.gamma_mode;
    dynamics::MuWSchedule mu{cfg.net.mu_w, cfg.net.mu_w_decay};

    auto st = dynamics::NetworkState::init(cfg.n, cfg.m, cfg.net.by_init, cfg.net.be_init);
    dynamics::OutputLog log = dynamics::fit_online(X, cfg.domain, fcfg, dcfg, mu, st);

    RunResult res;
    res.seed = cfg.seed;
    res.window = cfg.window > 0 ? cfg.window : std::max<std::int64_t>(cfg.N / 100, 2);

    if (cfg.N > 0) {
        const std::int64_t nwin = (cfg.N + res.window - 1) / res.window;
        res.trace.assign(static_cast<std::size_t>(nwin), 0.0);
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t w = 0; w < nwin; ++w) {
            const std::int64_t lo = w * res.window;
            const std::int64_t len = std::min<std::int64_t>(res.window, cfg.N - lo);
            double v = -150.0;  // floor for degenerate (e.g. all-zero) windows
            if (len >= 2) {
                try {
                    v = metrics::sinr_db(log.Y.middleCols(lo, len), S.middleCols(lo, len)).mean_db;
                } catch (const std::invalid_argument&) {
                }
            }
            res.trace[static_cast<std::size_t>(w)] = v;
        }
        res.final_sinr_db = res.trace.back();
        res.mean_sinr_db =
            std::accumulate(res.trace.begin(), res.trace.end(), 0.0) / res.trace.size();

        if (cfg.source.gen == SourceGen::Pam4) {
            const std::int64_t lo = cfg.N / 5;  // final 80%
            const std::int64_t len = cfg.N - lo;
            Eigen::MatrixXd est = metrics::aligned_estimate(log.Y.middleCols(lo, len),
                                                            symbols.middleCols(lo, len));
            res.ser = metrics::ser_pam4(est, symbols.middleCols(lo, len));
        }

        double nu_sum = 0.0;
        int nu_max_used = 0;
        for (int v : log.nu_used) {
            nu_sum += v;
            nu_max_used = std::max(nu_max_used, v);
        }
        res.nu_mean = nu_sum / static_cast<double>(cfg.N);
        res.nu_max_used = nu_max_used;
    }

    res.state = std::move(st);
    res.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace cimx::experiment
