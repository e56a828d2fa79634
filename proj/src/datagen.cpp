#include "cimx/datagen.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cimx/rng.hpp"

namespace cimx::datagen {

namespace {

constexpr std::uint64_t kColumnStream = 0x636f6c73ull;  // "cols"

Eigen::MatrixXd equicorr_cholesky(int n, double rho) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(n, n, rho);
    sigma.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gen_copula_t: Toeplitz parameter matrix not positive definite");
    return llt.matrixL();
}

void copula_column(Eigen::Ref<Eigen::VectorXd> out, const Eigen::MatrixXd& L, double df,
                   bool signed_marginal, const boost::math::students_t& tdist, SplitMix64 eng) {
    const int n = static_cast<int>(out.size());
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(df);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = gauss(eng);
    z = L * z;
    const double g = std::max(chi2(eng), 1e-300);
    const double scale = 1.0 / std::sqrt(g / df);
    for (int i = 0; i < n; ++i) {
        double u = boost::math::cdf(tdist, z[i] * scale);
        out[i] = signed_marginal ? 2.0 * u - 1.0 : u;
    }
}

}  // namespace

Eigen::MatrixXd gen_copula_t(int n, std::int64_t N, double rho, double df, bool signed_marginal,
                             std::uint64_t seed) {
    if (n < 1 || N < 0) throw std::invalid_argument("gen_copula_t: bad sizes");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("gen_copula_t: rho outside [0,1)");
    if (!(df > 0.0)) throw std::invalid_argument("gen_copula_t: df must be positive");
    const Eigen::MatrixXd L = equicorr_cholesky(n, rho);
    const boost::math::students_t tdist(df);
    Eigen::MatrixXd S(n, N);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < N; ++c)
        copula_column(S.col(c), L, df, signed_marginal, tdist,
                      SplitMix64(substream(seed, kColumnStream, static_cast<std::uint64_t>(c))));
    return S;
}

namespace {

void dirichlet_column(Eigen::Ref<Eigen::VectorXd> out, SplitMix64& eng) {
    std::exponential_distribution<double> expo(1.0);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] = expo(eng);
        sum += out[i];
    }
    out /= sum;
}

void polytope_column(Eigen::Ref<Eigen::VectorXd> out, const domains::DomainSpec& d,
                     SplitMix64 eng) {
    const int n = d.n;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (d.kind) {
        case domains::Kind::Antisparse:
            for (int i = 0; i < n; ++i) out[i] = 2.0 * unif(eng) - 1.0;
            return;
        case domains::Kind::NonnegAntisparse:
            for (int i = 0; i < n; ++i) out[i] = unif(eng);
            return;
        case domains::Kind::Sparse: {
            dirichlet_column(out, eng);
            const double r = std::pow(unif(eng), 1.0 / n);
            for (int i = 0; i < n; ++i) out[i] *= (unif(eng) < 0.5 ? -r : r);
            return;
        }
        case domains::Kind::NonnegSparse: {
            dirichlet_column(out, eng);
            out *= std::pow(unif(eng), 1.0 / n);
            return;
        }
        case domains::Kind::UnitSimplex:
            dirichlet_column(out, eng);
            return;
        case domains::Kind::FeaturePolytope:
        case domains::Kind::HPolytope: {
            // Rejection from the enclosing box (feature attributes give the
            // box; plain H-polytopes are assumed inside [-1,1]^n).
            const domains::FeaturePolytope* fp =
                d.kind == domains::Kind::FeaturePolytope ? &*d.feature : nullptr;
            for (long attempt = 0;; ++attempt) {
                if (attempt >= 2'000'000)
                    throw std::runtime_error(
                        "gen_uniform_polytope: acceptance rate below 1e-6, sampler infeasible");
                for (int i = 0; i < n; ++i) {
                    bool nonneg = fp && !fp->is_signed(i);
                    out[i] = nonneg ? unif(eng) : 2.0 * unif(eng) - 1.0;
                }
                if (membership(d, out, 1e-12)) return;
            }
        }
    }
}

}  // namespace

Eigen::MatrixXd gen_uniform_polytope(const domains::DomainSpec& d, std::int64_t N,
                                     std::uint64_t seed) {
    if (N < 0) throw std::invalid_argument("gen_uniform_polytope: bad N");
    Eigen::MatrixXd S(d.n, N);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < N; ++c)
        polytope_column(S.col(c), d,
                        SplitMix64(substream(seed, kColumnStream, static_cast<std::uint64_t>(c))));
    return S;
}

Eigen::MatrixXd gen_pam4(int n, std::int64_t N, std::uint64_t seed) {
    if (n < 1 || N < 0) throw std::invalid_argument("gen_pam4: bad sizes");
    static constexpr double symbols[4] = {-3.0, -1.0, 1.0, 3.0};
    Eigen::MatrixXd S(n, N);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < N; ++c) {
        SplitMix64 eng(substream(seed, kColumnStream, static_cast<std::uint64_t>(c)));
        std::uniform_int_distribution<int> pick(0, 3);
        for (int i = 0; i < n; ++i) S(i, c) = symbols[pick(eng)];
    }
    return S;
}

Eigen::MatrixXd gen_mixing(int m, int n, MixingDist dist, std::uint64_t seed) {
    if (m < n || n < 1) throw std::invalid_argument("gen_mixing: need m >= n >= 1");
    SplitMix64 eng(substream(seed, 0x6d6978ull));  // "mix"
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                switch (dist) {
                    case MixingDist::StdNormal: A(i, j) = gauss(eng); break;
                    case MixingDist::UniformPm1: A(i, j) = 2.0 * unif(eng) - 1.0; break;
                    case MixingDist::UniformPm2: A(i, j) = 4.0 * unif(eng) - 2.0; break;
                    case MixingDist::Laplace:
                        A(i, j) = (unif(eng) < 0.5 ? -1.0 : 1.0) * expo(eng);
                        break;
                }
            }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        if (svd.singularValues().minCoeff() > 1e-6) return A;
    }
    throw std::runtime_error("gen_mixing: rank condition unmet after 100 retries");
}

namespace {

double noise_sigma(const Eigen::MatrixXd& X, double snr_db) {
    const double p = X.squaredNorm() / static_cast<double>(X.size());
    if (p == 0.0) throw std::invalid_argument("add_awgn: all-zero signal");
    return std::sqrt(p * std::pow(10.0, -snr_db / 10.0));
}

}  // namespace

Eigen::MatrixXd add_awgn(const Eigen::MatrixXd& X, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return X;  // no-noise sentinel
    const double sigma = noise_sigma(X, snr_db);
    Eigen::MatrixXd out = X;
    const std::int64_t N = X.cols();
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < N; ++c) {
        SplitMix64 eng(substream(seed, kColumnStream, static_cast<std::uint64_t>(c)));
        std::normal_distribution<double> gauss(0.0, sigma);
        for (Eigen::Index i = 0; i < X.rows(); ++i) out(i, c) += gauss(eng);
    }
    return out;
}

namespace ref {

Eigen::MatrixXd gen_copula_t(int n, std::int64_t N, double rho, double df, bool signed_marginal,
                             std::uint64_t seed) {
    const Eigen::MatrixXd L = equicorr_cholesky(n, rho);
    const boost::math::students_t tdist(df);
    Eigen::MatrixXd S(n, N);
    for (std::int64_t c = 0; c < N; ++c)
        copula_column(S.col(c), L, df, signed_marginal, tdist,
                      SplitMix64(substream(seed, kColumnStream, static_cast<std::uint64_t>(c))));
    return S;
}

Eigen::MatrixXd add_awgn(const Eigen::MatrixXd& X, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return X;
    const double sigma = noise_sigma(X, snr_db);
    Eigen::MatrixXd out = X;
    for (std::int64_t c = 0; c < X.cols(); ++c) {
        SplitMix64 eng(substream(seed, kColumnStream, static_cast<std::uint64_t>(c)));
        std::normal_distribution<double> gauss(0.0, sigma);
        for (Eigen::Index i = 0; i < X.rows(); ++i) out(i, c) += gauss(eng);
    }
    return out;
}

}  // namespace ref

}  // namespace cimx::datagen
