#include "cimx/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <vector>

namespace cimx::io {

using nlohmann::json;

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << csv_number(M(i, j));
        }
        out << '\n';
    }
}

void write_matrix_cimx(const std::string& path, const Eigen::MatrixXd& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_matrix_cimx: cannot open " + path);
    char header[16] = {'C', 'I', 'M', 'X'};
    const std::uint32_t rows = static_cast<std::uint32_t>(M.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(M.cols());
    const std::uint32_t reserved = 0;
    std::memcpy(header + 4, &rows, 4);
    std::memcpy(header + 8, &cols, 4);
    std::memcpy(header + 12, &reserved, 4);
    out.write(header, 16);
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor R = M;
    out.write(reinterpret_cast<const char*>(R.data()),
              static_cast<std::streamsize>(sizeof(double)) * R.size());
}

Eigen::MatrixXd read_matrix_cimx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_matrix_cimx: cannot open " + path);
    char header[16];
    in.read(header, 16);
    if (!in || std::memcmp(header, "CIMX", 4) != 0)
        throw std::runtime_error("read_matrix_cimx: bad magic in " + path);
    std::uint32_t rows, cols;
    std::memcpy(&rows, header + 4, 4);
    std::memcpy(&cols, header + 8, 4);
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor R(rows, cols);
    in.read(reinterpret_cast<char*>(R.data()),
            static_cast<std::streamsize>(sizeof(double)) * R.size());
    if (!in) throw std::runtime_error("read_matrix_cimx: truncated payload in " + path);
    return R;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = j.at(i).at(c).get<double>();
    return M;
}

}  // namespace

void save_checkpoint(const std::string& path, const dynamics::NetworkState& st,
                     const dynamics::ForgettingConfig& fcfg) {
    json j;
    j["n"] = st.n();
    j["m"] = st.m();
    j["k"] = st.k;
    j["W"] = matrix_to_json(st.W);
    j["By"] = matrix_to_json(st.By);
    if (st.be_mode == dynamics::BeMode::ScalarIdentity) {
        j["Be"] = {{"mode", "scalar_identity"}, {"inv_eps", st.inv_eps}};
    } else {
        j["Be"] = {{"mode", "exact"}, {"matrix", matrix_to_json(st.Be)}};
    }
    j["forgetting"] = {{"zeta_y", fcfg.zeta_y}, {"zeta_e", fcfg.zeta_e}, {"eps", fcfg.eps}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << j.dump(1) << '\n';
}

std::pair<dynamics::NetworkState, dynamics::ForgettingConfig> load_checkpoint(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    json j = json::parse(in);
    dynamics::NetworkState st;
    st.W = matrix_from_json(j.at("W"));
    st.By = matrix_from_json(j.at("By"));
    st.k = j.at("k").get<std::int64_t>();
    const auto& be = j.at("Be");
    if (be.at("mode") == "scalar_identity") {
        st.be_mode = dynamics::BeMode::ScalarIdentity;
        st.inv_eps = be.at("inv_eps").get<double>();
    } else {
        st.be_mode = dynamics::BeMode::ExactMatrix;
        st.Be = matrix_from_json(be.at("matrix"));
        st.inv_eps = 0.0;
    }
    st.y_prev = Eigen::VectorXd::Zero(st.n());
    const auto& f = j.at("forgetting");
    dynamics::ForgettingConfig fcfg(f.at("zeta_y").get<double>(), f.at("zeta_e").get<double>(),
                                    f.at("eps").get<double>());
    const int n = j.at("n").get<int>(), m = j.at("m").get<int>();
    if (st.W.rows() != n || st.W.cols() != m || st.By.rows() != n)
        throw std::runtime_error("load_checkpoint: inconsistent dimensions in " + path);
    return {std::move(st), fcfg};
}

}  // namespace cimx::io
