#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "cimx/checks.hpp"
#include "cimx/experiment.hpp"
#include "cimx/io.hpp"
#include "cimx/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cimx;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

void write_meta(const fs::path& out_dir, const experiment::ExperimentConfig& cfg,
                const json& extra) {
    json meta;
    meta["tool"] = "cimx";
    meta["version"] = kVersion;
    meta["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION);
    meta["timestamp"] = now_iso8601();
    meta["config"] = json::parse(experiment::config_to_json_text(cfg));
    meta.update(extra);
    std::ofstream(out_dir / "meta.json") << meta.dump(1) << '\n';
}

std::optional<std::uint64_t> env_seed() {
    if (const char* s = std::getenv("CIMX_SEED")) return std::strtoull(s, nullptr, 10);
    return std::nullopt;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_flag) {
    experiment::ExperimentConfig cfg;
    try {
        cfg = experiment::config_from_json_file(config_path);
    } catch (const experiment::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (auto s = env_seed()) cfg.seed = *s;
    if (seed_flag) cfg.seed = *seed_flag;

    fs::create_directories(out_dir);
    experiment::RunResult res;
    try {
        res = experiment::run_experiment(cfg);
    } catch (const dynamics::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    }

    {
        std::ofstream out(fs::path(out_dir) / "result.csv");
        out << "seed,n,m,N,domain,source,rho,snr_db,window,final_sinr_db,mean_sinr_db,ser,"
               "nu_mean,nu_max\n";
        if (cfg.N > 0) {
            json dom = json::parse(experiment::config_to_json_text(cfg))["domain"];
            out << cfg.seed << ',' << cfg.n << ',' << cfg.m << ',' << cfg.N << ','
                << dom["kind"].get<std::string>() << ','
                << (cfg.source.gen == experiment::SourceGen::CopulaT          ? "copula_t"
                    : cfg.source.gen == experiment::SourceGen::UniformPolytope ? "uniform_polytope"
                                                                               : "pam4")
                << ',' << io::csv_number(cfg.source.rho) << ',' << io::csv_number(cfg.snr_db) << ','
                << res.window << ',' << io::csv_number(res.final_sinr_db) << ','
                << io::csv_number(res.mean_sinr_db) << ','
                << (res.ser ? io::csv_number(*res.ser) : "") << ','
                << io::csv_number(res.nu_mean) << ',' << res.nu_max_used << "\n";
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "trace.csv");
        out << "window,sinr_db\n";
        for (std::size_t w = 0; w < res.trace.size(); ++w)
            out << w << ',' << io::csv_number(res.trace[w]) << "\n";
    }
    write_meta(out_dir, cfg, json{{"wall_s", res.wall_s}});
    if (cfg.N == 0) std::cerr << "warning: N = 0, empty run\n";
    std::cout << "final SINR " << io::csv_number(res.final_sinr_db) << " dB over "
              << res.trace.size() << " windows; outputs in " << out_dir << "\n";
    return 0;
}

struct SweepCell {
    std::size_t axis_index;
    int realization;
    std::uint64_t seed;
    double axis_value = 0.0;       // numeric axes
    std::string axis_label;        // mixing_dist axis
    bool ok = false;
    std::string error;
    double mean_sinr = 0.0, final_sinr = 0.0, wall_s = 0.0;
    std::optional<double> ser;
};

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::string& values_csv, int realizations, const std::string& out_dir,
              int jobs) {
    experiment::ExperimentConfig base;
    try {
        base = experiment::config_from_json_file(config_path);
    } catch (const experiment::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (auto s = env_seed()) base.seed = *s;

    std::vector<std::string> values;
    {
        std::stringstream ss(values_csv);
        std::string item;
        while (std::getline(ss, item, ',')) values.push_back(item);
    }
    if (values.empty()) {
        std::cerr << "sweep: empty --values list\n";
        return 2;
    }

    static const std::vector<std::string> param_axes = {
        "mu_w", "by_init", "be_init", "zeta_y", "zeta_e", "eta_y_c", "eta_lambda", "nu_max"};
    const bool is_param =
        std::find(param_axes.begin(), param_axes.end(), axis) != param_axes.end();
    if (axis != "rho" && axis != "snr" && axis != "mixing_dist" && !is_param) {
        std::cerr << "sweep: unknown axis \"" << axis << "\"\n";
        return 2;
    }

    auto cell_config = [&](std::size_t ai, const std::string& v) {
        experiment::ExperimentConfig cfg = base;
        if (axis == "rho")
            cfg.source.rho = std::stod(v);
        else if (axis == "snr")
            cfg.snr_db = std::stod(v);
        else if (axis == "mixing_dist")
            cfg.mixing = experiment::mixing_from_name(v);
        else if (axis == "mu_w")
            cfg.net.mu_w = std::stod(v);
        else if (axis == "by_init")
            cfg.net.by_init = std::stod(v);
        else if (axis == "be_init")
            cfg.net.be_init = std::stod(v);
        else if (axis == "zeta_y")
            cfg.net.zeta_y = std::stod(v);
        else if (axis == "zeta_e")
            cfg.net.zeta_e = std::stod(v);
        else if (axis == "eta_y_c")
            cfg.net.eta_y_c = std::stod(v);
        else if (axis == "eta_lambda")
            cfg.net.eta_lambda = std::stod(v);
        else if (axis == "nu_max")
            cfg.net.nu_max = std::stoi(v);
        (void)ai;
        return cfg;
    };

    std::vector<SweepCell> cells;
    for (std::size_t ai = 0; ai < values.size(); ++ai)
        for (int r = 0; r < realizations; ++r) {
            SweepCell c;
            c.axis_index = ai;
            c.realization = r;
            c.seed = substream(base.seed, ai, static_cast<std::uint64_t>(r));
            c.axis_label = values[ai];
            if (axis != "mixing_dist") c.axis_value = std::stod(values[ai]);
            cells.push_back(c);
        }

    // Bounded worker pool over an atomic cursor; results land in their own
    // slots so completion order never shows in the output.
    std::atomic<std::size_t> cursor{0};
    const int n_threads = std::max(1, jobs);
    auto worker = [&] {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= cells.size()) return;
            SweepCell& c = cells[i];
            try {
                experiment::ExperimentConfig cfg = cell_config(c.axis_index, values[c.axis_index]);
                cfg.seed = c.seed;
                auto res = experiment::run_experiment(cfg);
                c.mean_sinr = res.mean_sinr_db;
                c.final_sinr = res.final_sinr_db;
                c.ser = res.ser;
                c.wall_s = res.wall_s;
                c.ok = true;
            } catch (const std::exception& e) {
                c.error = e.what();
            }
        }
    };
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "sweep.csv");
        out << "axis_value,realization,seed,mean_sinr_db,final_sinr_db,ser,wall_s,status\n";
        for (const auto& c : cells) {
            out << c.axis_label << ',' << c.realization << ',' << c.seed << ',';
            if (c.ok)
                out << io::csv_number(c.mean_sinr) << ',' << io::csv_number(c.final_sinr) << ','
                    << (c.ser ? io::csv_number(*c.ser) : "") << ',' << io::csv_number(c.wall_s)
                    << ",ok\n";
            else
                out << ",,," << io::csv_number(c.wall_s) << ",error: " << c.error << "\n";
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "sweep_agg.csv");
        out << "axis_value,n_ok,final_sinr_mean,final_sinr_std,mean_sinr_mean,mean_sinr_std\n";
        for (std::size_t ai = 0; ai < values.size(); ++ai) {
            double sf = 0, sf2 = 0, sm = 0, sm2 = 0;
            int n_ok = 0;
            for (const auto& c : cells)
                if (c.axis_index == ai && c.ok) {
                    ++n_ok;
                    sf += c.final_sinr;
                    sf2 += c.final_sinr * c.final_sinr;
                    sm += c.mean_sinr;
                    sm2 += c.mean_sinr * c.mean_sinr;
                }
            out << values[ai] << ',' << n_ok;
            if (n_ok > 0) {
                double mf = sf / n_ok, mm = sm / n_ok;
                double vf = std::max(0.0, sf2 / n_ok - mf * mf);
                double vm = std::max(0.0, sm2 / n_ok - mm * mm);
                out << ',' << io::csv_number(mf) << ',' << io::csv_number(std::sqrt(vf)) << ','
                    << io::csv_number(mm) << ',' << io::csv_number(std::sqrt(vm)) << "\n";
            } else {
                out << ",,,,\n";
            }
        }
    }
    write_meta(out_dir, base,
               json{{"axis", axis}, {"values", values}, {"realizations", realizations}});
    std::cout << "sweep complete: " << cells.size() << " cells -> " << out_dir << "\n";
    return 0;
}

int cmd_check(const std::string& suite) {
    std::vector<checks::CheckResult> results;
    try {
        results = checks::run_suite(suite);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  (" << r.detail << ")\n";
        if (!r.pass) ++failures;
    }
    std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CorInfoMax blind source separation engine"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", axis, values, suite = "all";
    int realizations = 10, jobs = 1;
    std::optional<std::uint64_t> seed_flag;

    auto* run = app.add_subcommand("run", "single experiment from a JSON config");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed_flag, "override config seed");

    auto* sweep = app.add_subcommand("sweep", "axis sweep with R realizations per value");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--axis", axis, "rho | snr | mixing_dist | <hyperparameter>")->required();
    sweep->add_option("--values", values, "comma-separated axis values")->required();
    sweep->add_option("--realizations", realizations, "independent seeds per value");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "parallel cells");

    auto* check = app.add_subcommand("check", "run built-in invariant suites");
    check->add_option("suite", suite, "all | domains | ldmi | dynamics | datagen | metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_flag);
        if (sweep->parsed()) return cmd_sweep(config_path, axis, values, realizations, out_dir, jobs);
        if (check->parsed()) return cmd_check(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
