#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cimx/checks.hpp"
#include "cimx/domains.hpp"
#include "cimx/rng.hpp"

using namespace cimx;
using domains::DomainSpec;
using Eigen::VectorXd;

namespace {
VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}
}  // namespace

TEST_CASE("clip_signed definition cases") {
    CHECK((domains::clip_signed(vec({1.5, -0.2, -3.0})) - vec({1.0, -0.2, -1.0})).norm() == 0.0);
    CHECK(domains::clip_signed(vec({0, 0, 0})).norm() == 0.0);
    CHECK_THROWS_AS(domains::clip_signed(vec({1.0, std::nan("")})), std::invalid_argument);
    CHECK_THROWS_AS(domains::clip_signed(vec({std::numeric_limits<double>::infinity()})),
                    std::invalid_argument);
}

TEST_CASE("clip_nonneg definition cases") {
    CHECK((domains::clip_nonneg(vec({-0.3, 0.5, 2.0})) - vec({0.0, 0.5, 1.0})).norm() == 0.0);
    CHECK((domains::clip_nonneg(vec({0.25, 0.75})) - vec({0.25, 0.75})).norm() == 0.0);
}

TEST_CASE("soft_threshold definition cases") {
    CHECK(domains::soft_threshold(vec({0.3}), 0.5)[0] == 0.0);
    CHECK(domains::soft_threshold(vec({1.2}), 0.5)[0] == doctest::Approx(0.7));
    CHECK(domains::soft_threshold(vec({-1.2}), 0.5)[0] == doctest::Approx(-0.7));
    VectorXd v = vec({0.4, -1.7, 0.0});
    CHECK((domains::soft_threshold(v, 0.0) - v).norm() == 0.0);
    CHECK_THROWS_AS(domains::soft_threshold(v, -0.1), std::invalid_argument);
}

TEST_CASE("membership boundary and mismatch cases") {
    auto sparse = DomainSpec::sparse(3);
    CHECK(domains::membership(sparse, vec({1.0, 0.0, 0.0}), 0.0));  // l1 boundary
    CHECK(!domains::membership(sparse, vec({1.0, 1e-9, 0.0}), 0.0));
    auto simplex = DomainSpec::unit_simplex(2);
    CHECK(!domains::membership(simplex, vec({0.5, 0.6}), 0.0));
    CHECK(domains::membership(simplex, vec({0.5, 0.5}), 0.0));
    CHECK_THROWS_AS(domains::membership(sparse, vec({1.0, 0.0}), 0.0), std::invalid_argument);
}

TEST_CASE("feature_to_hrep box case and validation") {
    domains::FeaturePolytope box;
    box.n = 4;
    box.signed_idx = {0, 1, 2, 3};
    auto h = domains::feature_to_hrep(box);
    CHECK(h.n_faces() == 8);  // 2n rows for the pure antisparse box

    domains::FeaturePolytope bad;
    bad.n = 2;
    bad.signed_idx = {0, 0};
    bad.nonneg_idx = {1};
    CHECK_THROWS_AS(domains::feature_to_hrep(bad), std::invalid_argument);
}

TEST_CASE("prox_feature rule application") {
    domains::FeaturePolytope fp;
    fp.n = 3;
    fp.signed_idx = {0, 1};
    fp.nonneg_idx = {2};
    fp.groups = {{0, 1, 2}};
    VectorXd lam(1);
    lam << 0.5;
    VectorXd got = domains::prox_feature(vec({1.2, -0.3, 0.4}), lam, fp);
    CHECK(got[0] == doctest::Approx(0.7));
    CHECK(got[1] == 0.0);
    CHECK(got[2] == 0.0);  // ReLU(0.4 - 0.5)

    lam << 0.0;
    VectorXd v = vec({0.9, -0.4, 0.8});
    CHECK((domains::prox_feature(v, lam, fp) - v).norm() == 0.0);

    lam << -0.1;
    CHECK_THROWS_AS(domains::prox_feature(v, lam, fp), std::invalid_argument);
}

TEST_CASE("hpolytope construction validates") {
    domains::HPolytope h;
    h.A = Eigen::MatrixXd::Identity(2, 2);
    h.b = vec({-1.0, -1.0});  // origin infeasible
    CHECK_THROWS_AS(DomainSpec::hpolytope(h), std::invalid_argument);
    h.b = vec({1.0, 1.0});
    CHECK(DomainSpec::hpolytope(h).n_interneurons() == 2);
}

TEST_CASE("exact projections: l1 ball and simplex") {
    SplitMix64 eng(77);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto l1 = DomainSpec::sparse(4);
    auto simplex = DomainSpec::unit_simplex(4);
    for (int t = 0; t < 200; ++t) {
        VectorXd v(4);
        for (int i = 0; i < 4; ++i) v[i] = u(eng);
        VectorXd p = domains::project(l1, v);
        CHECK(p.lpNorm<1>() <= 1.0 + 1e-12);
        CHECK((domains::project(l1, p) - p).norm() <= 1e-12);  // idempotent
        VectorXd q = domains::project(simplex, v);
        CHECK(q.minCoeff() >= 0.0);
        CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    domains::HPolytope h;
    h.A = Eigen::MatrixXd::Identity(2, 2);
    h.b = vec({1.0, 1.0});
    CHECK_THROWS_AS(domains::project(DomainSpec::hpolytope(h), vec({0.0, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("domains invariant suite") {
    for (const auto& r : checks::check_domains()) {
        INFO(r.name, ": ", r.detail);
        CHECK(r.pass);
    }
}
