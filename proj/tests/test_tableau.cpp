#include "sdaerk/errors.hpp"
#include "sdaerk/families.hpp"
#include "sdaerk/json_io.hpp"
#include "sdaerk/tableau.hpp"

#include <doctest.h>

#include "support/family_sampling.hpp"

using namespace sdaerk;

namespace {

SrkTableau eff_ii_unit() {
    return make_efficient(FamilyId::EFF_II,
                          {{"a1", 1.0}, {"a2", 1.0}, {"a3", 1.0}, {"b", 1.0}});
}

} // namespace

TEST_CASE("tableau construction validates shapes and c") {
    Eigen::MatrixXd A(2, 2), Z = Eigen::MatrixXd::Zero(2, 2);
    A << 0.5, 0.0, 0.25, 0.75;

    SrkTableau t(A, Z, Z, Z);
    CHECK(t.c()(0) == doctest::Approx(0.5));
    CHECK(t.c()(1) == doctest::Approx(1.0));

    Eigen::VectorXd good(2);
    good << 0.5, 1.0;
    CHECK_NOTHROW(SrkTableau(A, Z, Z, Z, good));

    Eigen::VectorXd bad(2);
    bad << 0.5, 1.1;
    CHECK_THROWS_AS(SrkTableau(A, Z, Z, Z, bad), StructureViolation);

    Eigen::MatrixXd wrong(3, 3);
    wrong.setZero();
    CHECK_THROWS_AS(SrkTableau(A, wrong, Z, Z), DimensionMismatch);
}

TEST_CASE("tableau equality and hashing are exact") {
    const SrkTableau a = eff_ii_unit();
    const SrkTableau b = eff_ii_unit();
    CHECK(a == b);
    CHECK(a.hash() == b.hash());

    const SrkTableau c = make_efficient(
        FamilyId::EFF_II, {{"a1", 1.0}, {"a2", 1.0}, {"a3", 1.0}, {"b", 2.0}});
    CHECK(a != c);
}

TEST_CASE("structure report on the efficient class-II tableau") {
    const auto r = validate_structure(eff_ii_unit());
    CHECK(r.diagonally_implicit);
    CHECK(r.noise_explicit);
    CHECK(r.sdae_applicable);
    CHECK(r.singly_diagonal);
    CHECK_FALSE(r.explicit_first_stage);
}

TEST_CASE("noise explicitness fails on a diagonal B1 entry") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd B1 = Z;
    B1(0, 0) = 0.3;
    const SrkTableau t(Z, B1, Z, Z);
    CHECK_FALSE(validate_structure(t).noise_explicit);
}

TEST_CASE("explicit first stage keeps SDAE applicability") {
    // order-0.5 efficient scheme with a1 = 0, a2 = 0: A22 = 1 - a2 = 1
    const SrkTableau t =
        make_efficient(FamilyId::EFF_05, {{"a1", 0.0}, {"a2", 0.0}});
    const auto r = validate_structure(t);
    CHECK(r.explicit_first_stage);
    CHECK(r.sdae_applicable);
    CHECK(r.noise_explicit);
}

TEST_CASE("order 0.5 residuals for the explicit-first-stage scheme") {
    const SrkTableau t =
        make_efficient(FamilyId::EFF_05, {{"a1", 0.0}, {"a2", 0.0}});
    const auto rep = order_residuals(t, StrongOrder::half);
    CHECK(rep.max_residual <= 1e-14);
    CHECK(rep.residuals.size() == 5);
    CHECK_FALSE(rep.lambda.has_value());
}

TEST_CASE("order 1.0 residuals and lambda for the efficient class-II scheme") {
    const auto rep = order_residuals(eff_ii_unit(), StrongOrder::one);
    CHECK(rep.max_residual <= 1e-14);
    REQUIRE(rep.lambda.has_value());
    CHECK(*rep.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.residuals.count("c") == 1);
    CHECK(rep.residuals.size() == 15);
}

TEST_CASE("efficient class-X scheme: lambda 0 with nonzero B2") {
    const SrkTableau t = make_efficient(
        FamilyId::EFF_X,
        {{"a1", 1.0}, {"a2", 1.0}, {"a3", 1.0}, {"a4", 0.0}, {"b", 1.0}});
    const auto rep = order_residuals(t, StrongOrder::one);
    CHECK(rep.max_residual <= 1e-14);
    REQUIRE(rep.lambda.has_value());
    CHECK(std::abs(*rep.lambda) <= 1e-12);
    CHECK(t.B(2).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("order residuals demand the structural preconditions") {
    Eigen::MatrixXd A(2, 2), Z = Eigen::MatrixXd::Zero(2, 2);
    A << 0.0, 1.0, 0.0, 1.0; // upper-triangular entry
    CHECK_THROWS_AS(order_residuals(SrkTableau(A, Z, Z, Z), StrongOrder::half),
                    StructureViolation);
}

TEST_CASE("effective order classification") {
    SUBCASE("class-I order-0.5 instance") {
        const SrkTableau t = make_order_half(
            FamilyId::H05_I, {{"A11", 0.0}, {"A21", 1.0}, {"B11_3", 0.0}});
        const auto eo = effective_order(t, 1e-12);
        CHECK(eo.order == OrderClass::half);
        CHECK(eo.half_ok);
        CHECK_FALSE(eo.one_ok);
    }
    SUBCASE("all-zero tableau has no order") {
        Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
        const auto eo = effective_order(SrkTableau(Z, Z, Z, Z), 1e-12);
        CHECK(eo.order == OrderClass::none);
        // condition 1 fails: alpha' e = 0
        const auto rep = order_residuals(SrkTableau(Z, Z, Z, Z),
                                         StrongOrder::half);
        CHECK(rep.residuals.at("1") == doctest::Approx(1.0));
    }
    SUBCASE("class-VI instance reaches order 1.0") {
        const SrkTableau t = make_order_one(
            FamilyId::O10_VI,
            {{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0}, {"B11_3", 0.0},
             {"B32_3", 2.0}},
            Sign::upper);
        CHECK(effective_order(t, 1e-12).order == OrderClass::one);
    }
}

TEST_CASE("order-1.0 success implies the order-0.5 conditions") {
    using namespace sdaerk::testing;
    for (FamilyId id : {FamilyId::O10_I, FamilyId::O10_IV, FamilyId::O10_VI,
                        FamilyId::O10_IX, FamilyId::O10_XI}) {
        NoiseStream rng(family_seed(id));
        for (int draw = 0; draw < 20; ++draw) {
            const SrkTableau t = make_tableau(sample_admissible(id, rng));
            const auto one = order_residuals(t, StrongOrder::one);
            const auto half = order_residuals(t, StrongOrder::half);
            CHECK(one.max_residual <= 1e-12);
            CHECK(half.max_residual <= 1e-12);
        }
    }
}

TEST_CASE("tableau JSON round trip and validation") {
    const SrkTableau t = eff_ii_unit();
    const nlohmann::json j = tableau_to_json(t);
    CHECK(tableau_from_json(j) == t);

    nlohmann::json no_c = j;
    no_c.erase("c");
    CHECK(tableau_from_json(no_c) == t);

    nlohmann::json bad_c = j;
    bad_c["c"][0] = bad_c["c"][0].get<double>() + 1e-6;
    CHECK_THROWS_AS(tableau_from_json(bad_c), StructureViolation);

    nlohmann::json bad_shape = j;
    bad_shape["A"].erase(0);
    CHECK_THROWS_AS(tableau_from_json(bad_shape), DimensionMismatch);

    nlohmann::json inf = j;
    inf["B1"][1][0] = "oops";
    CHECK_THROWS_AS(tableau_from_json(inf), DimensionMismatch);
}

TEST_CASE("c = A e holds for every family-built tableau") {
    using namespace sdaerk::testing;
    for (FamilyId id : all_families()) {
        NoiseStream rng(family_seed(id) + 1);
        const SrkTableau t = make_tableau(sample_admissible(id, rng));
        CHECK((t.c() - t.A() * t.e()).cwiseAbs().maxCoeff() == 0.0);
    }
}
