#pragma once

#include <Eigen/Dense>
#include <string>

#include "cimx/dynamics.hpp"

namespace cimx::io {

// 12 significant digits, '.' decimal, no separators.
std::string csv_number(double v);

// One row per channel, columns are samples.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M);

// Little-endian binary: 16-byte header (magic "CIMX", u32 rows, u32 cols,
// u32 reserved), then row-major f64 payload matching the CSV layout.
void write_matrix_cimx(const std::string& path, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_matrix_cimx(const std::string& path);

// JSON checkpoint: dimensions, W, B_y, B_e mode (+ matrix or scalar), k and
// the forgetting configuration. Round-trips losslessly.
void save_checkpoint(const std::string& path, const dynamics::NetworkState& st,
                     const dynamics::ForgettingConfig& fcfg);
std::pair<dynamics::NetworkState, dynamics::ForgettingConfig> load_checkpoint(
    const std::string& path);

}  // namespace cimx::io
