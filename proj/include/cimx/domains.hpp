#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace cimx::domains {

// Half-space representation {y : A y <= b}.
struct HPolytope {
    Eigen::MatrixXd A;  // f x n
    Eigen::VectorXd b;  // f

    int n_faces() const { return static_cast<int>(A.rows()); }
    int dim() const { return static_cast<int>(A.cols()); }
};

// Polytope described per-coordinate attributes (signed / nonnegative) plus
// group l1 sparsity constraints ||y_J|| <= 1. Indices are 0-based here; the
// JSON config layer converts from the 1-based external form.
struct FeaturePolytope {
    int n = 0;
    std::vector<int> signed_idx;              // I_s
    std::vector<int> nonneg_idx;              // I_+ (complement of I_s)
    std::vector<std::vector<int>> groups;     // J_1..J_L

    std::vector<int> free_idx() const;        // I_a: coordinates in no group
    bool is_signed(int j) const;
};

enum class Kind {
    Antisparse,        // ||y||_inf <= 1
    NonnegAntisparse,  // y in [0,1]^n
    Sparse,            // ||y||_1 <= 1
    NonnegSparse,      // y >= 0, ||y||_1 <= 1
    UnitSimplex,       // y >= 0, sum y = 1
    HPolytope,
    FeaturePolytope,
};

struct DomainSpec {
    Kind kind;
    int n;
    std::optional<struct HPolytope> hrep;
    std::optional<struct FeaturePolytope> feature;

    static DomainSpec antisparse(int n);
    static DomainSpec nonneg_antisparse(int n);
    static DomainSpec sparse(int n);
    static DomainSpec nonneg_sparse(int n);
    static DomainSpec unit_simplex(int n);
    static DomainSpec hpolytope(HPolytope h);
    static DomainSpec feature_polytope(FeaturePolytope fp);

    // Number of Lagrangian interneurons the dynamics allocate for this domain.
    int n_interneurons() const;
};

// sign(0) = 0 so that soft_threshold(0) = 0 and clip fixed points are exact.
inline double sign0(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Elementwise clip to [-1,1].
Eigen::VectorXd clip_signed(const Eigen::VectorXd& v);

// Elementwise clip to [0,1].
Eigen::VectorXd clip_nonneg(const Eigen::VectorXd& v);

// ST_lambda(v)_i = 0 for |v_i| <= lambda, else v_i - sign(v_i) lambda.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double lambda);

// True iff every defining inequality of the domain holds within additive
// slack tol (each inequality independently; the simplex equality is checked
// as two inequalities).
bool membership(const DomainSpec& d, const Eigen::VectorXd& y, double tol);

// Exact H-representation of a feature polytope:
//   (a) one row per sign pattern over the signed members of each group
//       (coefficient +1 on nonnegative members), rhs 1;
//   (b) -y_i <= 0 for each nonnegative coordinate;
//   (c) box rows for coordinates not covered by any group (covered ones are
//       implied by the group rows and omitted).
HPolytope feature_to_hrep(const FeaturePolytope& fp);

// Proximal operator of sum_l lambda_l ||q_J_l||_1 subject to q_{I_+} >= 0:
// per coordinate, ST_alpha for signed entries and ReLU(v - alpha) for
// nonnegative ones, with alpha_j the sum of lambda_l over groups containing j.
Eigen::VectorXd prox_feature(const Eigen::VectorXd& v, const Eigen::VectorXd& lambda,
                             const FeaturePolytope& fp);

// Euclidean projection onto the domain. Exact for the ball/box/simplex
// variants (sort-based for the l1 cases); cyclic projection passes for
// feature polytopes. HPolytope is not supported (the online dynamics use
// Lagrangian interneurons instead) and throws.
Eigen::VectorXd project(const DomainSpec& d, const Eigen::VectorXd& v);

}  // namespace cimx::domains
