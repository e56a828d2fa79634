#include "cimx/domains.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cimx::domains {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void require_finite(const Eigen::VectorXd& v, const char* who) {
    if (!v.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

}  // namespace

std::vector<int> FeaturePolytope::free_idx() const {
    std::vector<char> covered(n, 0);
    for (const auto& g : groups)
        for (int j : g) covered[j] = 1;
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
        if (!covered[j]) out.push_back(j);
    return out;
}

bool FeaturePolytope::is_signed(int j) const {
    return std::find(signed_idx.begin(), signed_idx.end(), j) != signed_idx.end();
}

static void validate_feature(const FeaturePolytope& fp) {
    require(fp.n >= 1, "FeaturePolytope: n must be >= 1");
    std::vector<char> seen(fp.n, 0);
    for (int j : fp.signed_idx) {
        require(j >= 0 && j < fp.n, "FeaturePolytope: signed index out of range");
        require(!seen[j], "FeaturePolytope: duplicate signed index");
        seen[j] = 1;
    }
    for (int j : fp.nonneg_idx) {
        require(j >= 0 && j < fp.n, "FeaturePolytope: nonneg index out of range");
        require(!seen[j], "FeaturePolytope: index in both signed and nonneg sets");
        seen[j] = 2;
    }
    for (int j = 0; j < fp.n; ++j)
        require(seen[j] != 0, "FeaturePolytope: index missing from signed/nonneg partition");
    for (const auto& g : fp.groups) {
        require(!g.empty(), "FeaturePolytope: empty sparsity group");
        for (int j : g) require(j >= 0 && j < fp.n, "FeaturePolytope: group index out of range");
    }
}

static void validate_hrep(const HPolytope& h) {
    require(h.A.rows() >= 1, "HPolytope: needs at least one half-space");
    require(h.A.rows() == h.b.rows(), "HPolytope: A and b row counts differ");
    require(h.A.allFinite() && h.b.allFinite(), "HPolytope: non-finite entries");
    // Nonemptiness probe at the origin; callers with 0 outside the set must
    // supply their own witness via membership().
    if (((h.A * Eigen::VectorXd::Zero(h.A.cols())) - h.b).maxCoeff() > 0.0)
        throw std::invalid_argument("HPolytope: origin infeasible; supply a witness point");
}

DomainSpec DomainSpec::antisparse(int n) {
    require(n >= 1, "DomainSpec: n must be >= 1");
    return {Kind::Antisparse, n, std::nullopt, std::nullopt};
}
DomainSpec DomainSpec::nonneg_antisparse(int n) {
    require(n >= 1, "DomainSpec: n must be >= 1");
    return {Kind::NonnegAntisparse, n, std::nullopt, std::nullopt};
}
DomainSpec DomainSpec::sparse(int n) {
    require(n >= 1, "DomainSpec: n must be >= 1");
    return {Kind::Sparse, n, std::nullopt, std::nullopt};
}
DomainSpec DomainSpec::nonneg_sparse(int n) {
    require(n >= 1, "DomainSpec: n must be >= 1");
    return {Kind::NonnegSparse, n, std::nullopt, std::nullopt};
}
DomainSpec DomainSpec::unit_simplex(int n) {
    require(n >= 1, "DomainSpec: n must be >= 1");
    return {Kind::UnitSimplex, n, std::nullopt, std::nullopt};
}
DomainSpec DomainSpec::hpolytope(HPolytope h) {
    validate_hrep(h);
    int n = h.dim();
    return {Kind::HPolytope, n, std::move(h), std::nullopt};
}
DomainSpec DomainSpec::feature_polytope(FeaturePolytope fp) {
    validate_feature(fp);
    int n = fp.n;
    return {Kind::FeaturePolytope, n, std::nullopt, std::move(fp)};
}

int DomainSpec::n_interneurons() const {
    switch (kind) {
        case Kind::Antisparse:
        case Kind::NonnegAntisparse:
            return 0;
        case Kind::Sparse:
        case Kind::NonnegSparse:
        case Kind::UnitSimplex:
            return 1;
        case Kind::HPolytope:
            return hrep->n_faces();
        case Kind::FeaturePolytope:
            return static_cast<int>(feature->groups.size());
    }
    return 0;
}

Eigen::VectorXd clip_signed(const Eigen::VectorXd& v) {
    require_finite(v, "clip_signed");
    return v.cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::VectorXd clip_nonneg(const Eigen::VectorXd& v) {
    require_finite(v, "clip_nonneg");
    return v.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double lambda) {
    require(lambda >= 0.0, "soft_threshold: lambda must be nonnegative");
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double a = std::abs(v[i]) - lambda;
        out[i] = a > 0.0 ? sign0(v[i]) * a : 0.0;
    }
    return out;
}

bool membership(const DomainSpec& d, const Eigen::VectorXd& y, double tol) {
    require(y.size() == d.n, "membership: dimension mismatch");
    require(tol >= 0.0, "membership: tol must be nonnegative");
    switch (d.kind) {
        case Kind::Antisparse:
            return y.cwiseAbs().maxCoeff() <= 1.0 + tol;
        case Kind::NonnegAntisparse:
            return y.minCoeff() >= -tol && y.maxCoeff() <= 1.0 + tol;
        case Kind::Sparse:
            return y.lpNorm<1>() <= 1.0 + tol;
        case Kind::NonnegSparse:
            return y.minCoeff() >= -tol && y.sum() <= 1.0 + tol;
        case Kind::UnitSimplex:
            return y.minCoeff() >= -tol && std::abs(y.sum() - 1.0) <= tol;
        case Kind::HPolytope:
            return ((d.hrep->A * y) - d.hrep->b).maxCoeff() <= tol;
        case Kind::FeaturePolytope: {
            const auto& fp = *d.feature;
            for (int j : fp.signed_idx)
                if (std::abs(y[j]) > 1.0 + tol) return false;
            for (int j : fp.nonneg_idx)
                if (y[j] < -tol || y[j] > 1.0 + tol) return false;
            for (const auto& g : fp.groups) {
                double s = 0.0;
                for (int j : g) s += std::abs(y[j]);
                if (s > 1.0 + tol) return false;
            }
            return true;
        }
    }
    return false;
}

HPolytope feature_to_hrep(const FeaturePolytope& fp) {
    validate_feature(fp);
    const int n = fp.n;
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;

    // (a) sign-pattern rows per group: +-1 on signed members, +1 on
    // nonnegative members. Enumerating patterns only over signed members is
    // exact because the nonnegativity rows below restrict to s_i >= 0.
    for (const auto& g : fp.groups) {
        std::vector<int> sgn_members, pos_members;
        for (int j : g) (fp.is_signed(j) ? sgn_members : pos_members).push_back(j);
        const std::size_t patterns = std::size_t{1} << sgn_members.size();
        for (std::size_t p = 0; p < patterns; ++p) {
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
            for (std::size_t i = 0; i < sgn_members.size(); ++i)
                row[sgn_members[i]] = (p >> i) & 1 ? -1.0 : 1.0;
            for (int j : pos_members) row[j] = 1.0;
            rows.push_back(row);
            rhs.push_back(1.0);
        }
    }

    // (b) -y_i <= 0 for nonnegative coordinates.
    for (int j : fp.nonneg_idx) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        row[j] = -1.0;
        rows.push_back(row);
        rhs.push_back(0.0);
    }

    // (c) box rows only for coordinates outside every group; group members'
    // boxes are implied by the pattern rows (plus (b) for nonnegative ones).
    for (int j : fp.free_idx()) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        row[j] = 1.0;
        rows.push_back(row);
        rhs.push_back(1.0);
        if (fp.is_signed(j)) {
            Eigen::RowVectorXd neg = Eigen::RowVectorXd::Zero(n);
            neg[j] = -1.0;
            rows.push_back(neg);
            rhs.push_back(1.0);
        }
    }

    HPolytope h;
    h.A.resize(static_cast<Eigen::Index>(rows.size()), n);
    h.b.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        h.A.row(static_cast<Eigen::Index>(i)) = rows[i];
        h.b[static_cast<Eigen::Index>(i)] = rhs[i];
    }
    return h;
}

Eigen::VectorXd prox_feature(const Eigen::VectorXd& v, const Eigen::VectorXd& lambda,
                             const FeaturePolytope& fp) {
    require(v.size() == fp.n, "prox_feature: dimension mismatch");
    require(lambda.size() == static_cast<Eigen::Index>(fp.groups.size()),
            "prox_feature: one lambda per group required");
    require(lambda.size() == 0 || lambda.minCoeff() >= 0.0,
            "prox_feature: lambda must be nonnegative");

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(fp.n);
    for (std::size_t l = 0; l < fp.groups.size(); ++l)
        for (int j : fp.groups[l]) alpha[j] += lambda[static_cast<Eigen::Index>(l)];

    Eigen::VectorXd out(fp.n);
    for (int j = 0; j < fp.n; ++j) {
        if (fp.is_signed(j)) {
            double a = std::abs(v[j]) - alpha[j];
            out[j] = a > 0.0 ? sign0(v[j]) * a : 0.0;
        } else {
            out[j] = std::max(v[j] - alpha[j], 0.0);
        }
    }
    return out;
}

namespace {

// Threshold tau with sum_i max(u_i - tau, 0) = z for u entering sorted
// descending; the workhorse of the sort-based simplex / l1-ball projections.
double simplex_tau(std::vector<double> u, double z) {
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    int rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cum += u[i];
        double t = (cum - z) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            tau = t;
        }
    }
    return rho > 0 ? tau : 0.0;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    double tau = simplex_tau(std::move(u), 1.0);
    return (v.array() - tau).max(0.0).matrix();
}

Eigen::VectorXd project_l1(const Eigen::VectorXd& v) {
    if (v.lpNorm<1>() <= 1.0) return v;
    std::vector<double> u(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(v[i]);
    double tau = simplex_tau(std::move(u), 1.0);
    return soft_threshold(v, tau);
}

Eigen::VectorXd project_l1_nonneg(const Eigen::VectorXd& v) {
    Eigen::VectorXd w = v.cwiseMax(0.0);
    if (w.sum() <= 1.0) return w;
    return project_simplex(w);
}

}  // namespace

Eigen::VectorXd project(const DomainSpec& d, const Eigen::VectorXd& v) {
    require(v.size() == d.n, "project: dimension mismatch");
    switch (d.kind) {
        case Kind::Antisparse:
            return clip_signed(v);
        case Kind::NonnegAntisparse:
            return clip_nonneg(v);
        case Kind::Sparse:
            return project_l1(v);
        case Kind::NonnegSparse:
            return project_l1_nonneg(v);
        case Kind::UnitSimplex:
            return project_simplex(v);
        case Kind::FeaturePolytope: {
            // Cyclic projection passes: box clips then per-group l1 pullback.
            // Converges to a feasible point close to v; adequate for the
            // batch oracle, which only needs feasibility plus ascent.
            const auto& fp = *d.feature;
            Eigen::VectorXd y = v;
            for (int pass = 0; pass < 1000; ++pass) {
                for (int j : fp.signed_idx) y[j] = std::clamp(y[j], -1.0, 1.0);
                for (int j : fp.nonneg_idx) y[j] = std::clamp(y[j], 0.0, 1.0);
                for (const auto& g : fp.groups) {
                    double s = 0.0;
                    for (int j : g) s += std::abs(y[j]);
                    if (s > 1.0) {
                        std::vector<double> u;
                        u.reserve(g.size());
                        for (int j : g) u.push_back(std::abs(y[j]));
                        double tau = simplex_tau(std::move(u), 1.0);
                        for (int j : g) {
                            double a = std::abs(y[j]) - tau;
                            y[j] = a > 0.0 ? sign0(y[j]) * a : 0.0;
                        }
                    }
                }
                if (membership(d, y, 1e-12)) return y;
            }
            throw std::runtime_error("project: feature-polytope projection did not settle");
        }
        case Kind::HPolytope:
            throw std::invalid_argument(
                "project: exact projection onto general H-polytopes is unsupported");
    }
    throw std::invalid_argument("project: unknown domain");
}

}  // namespace cimx::domains
