#include "sdaerk/errors.hpp"
#include "sdaerk/families.hpp"
#include "sdaerk/json_io.hpp"

#include <doctest.h>

#include <cmath>

#include "support/family_sampling.hpp"

using namespace sdaerk;

TEST_CASE("order-0.5 class I with zero extras is the theta-method layout") {
    const SrkTableau t = make_order_half(
        FamilyId::H05_I, {{"A11", 0.0}, {"A21", 1.0}, {"B11_3", 0.0}});
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 0.0, 1.0, 0.0;
    CHECK(t.A() == A);
    Eigen::MatrixXd B1(2, 2);
    B1 << 0.0, 0.0, 1.0, 0.0;
    CHECK(t.B(1) == B1);
    CHECK(t.B(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.B(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(order_residuals(t, StrongOrder::half).max_residual <= 1e-14);
}

TEST_CASE("order-0.5 classes coincide when the B3 entries vanish") {
    const SrkTableau t1 = make_order_half(
        FamilyId::H05_I, {{"A11", 0.0}, {"A21", 0.0}, {"B11_3", 0.0}});
    const SrkTableau t2 = make_order_half(
        FamilyId::H05_II, {{"A11", 0.0}, {"A21", 0.0}, {"B21_3", 0.0}});
    CHECK(t1 == t2);
}

TEST_CASE("order-0.5 class II mirrors B21_3 into b22_3") {
    const SrkTableau t = make_order_half(
        FamilyId::H05_II, {{"A11", 0.3}, {"A21", -0.4}, {"B21_3", 0.7}});
    CHECK(t.B(3)(1, 0) == 0.7);
    CHECK(t.B(3)(1, 1) == -0.7);
    CHECK(t.A()(1, 1) == doctest::Approx(1.4));
    // remark condition 4: beta3' e = 0 exactly
    CHECK(order_residuals(t, StrongOrder::half).residuals.at("4") == 0.0);
}

TEST_CASE("unknown and missing parameters are rejected") {
    CHECK_THROWS_AS(make_order_half(FamilyId::H05_I,
                                    {{"A11", 0.0}, {"A21", 0.0},
                                     {"B11_3", 0.0}, {"zeta", 1.0}}),
                    UnknownParameter);
    CHECK_THROWS_AS(make_order_half(FamilyId::H05_I, {{"A11", 0.0}}),
                    MissingParameter);
}

TEST_CASE("class VI: frozen instance and discriminant") {
    SUBCASE("upper-sign instance at B11_3 = 0, B32_3 = 2") {
        const Params p{{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                       {"B11_3", 0.0}, {"B32_3", 2.0}};
        const SrkTableau t = make_order_one(FamilyId::O10_VI, p, Sign::upper);
        // D = B32_3^2 - 2 = 2 at B11_3 = 0; sqrt(D) enters these entries
        const double sq2 = std::sqrt(2.0);
        CHECK(t.A()(1, 0) == doctest::Approx((2.0 + sq2) / 4.0));
        CHECK(t.A()(2, 2) == doctest::Approx(1.0));
        CHECK(t.B(1)(1, 0) == doctest::Approx((2.0 + sq2) / 4.0));
        CHECK(t.B(2)(1, 0) == doctest::Approx(0.5));
        CHECK(t.B(3)(2, 0) == doctest::Approx((-2.0 + sq2) / 2.0));
        CHECK(t.B(3)(2, 2) == doctest::Approx(-(2.0 + sq2) / 2.0));

        const auto rep = order_residuals(t, StrongOrder::one);
        CHECK(rep.max_residual <= 1e-12);
        CHECK(std::abs(*rep.lambda) <= 1e-12);
    }
    SUBCASE("negative discriminant raises") {
        const Params p{{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                       {"B11_3", 0.0}, {"B32_3", 1.0}};
        CHECK_THROWS_AS(make_order_one(FamilyId::O10_VI, p, Sign::upper),
                        DiscriminantNegative);
    }
}

TEST_CASE("class X: published entry pattern") {
    const Params p{{"A11", 0.0}, {"A21", 0.0}, {"A22", 0.0}, {"A33", 1.0},
                   {"B22_3", 0.0}, {"B32_2", 1.0}};
    const SrkTableau t = make_order_one(FamilyId::O10_X, p);
    CHECK(t.B(2)(2, 0) == -1.0);
    CHECK(t.B(3)(1, 0) == 1.0);
    const auto rep = order_residuals(t, StrongOrder::one);
    CHECK(rep.max_residual <= 1e-12);
    CHECK(std::abs(*rep.lambda) <= 1e-12);
}

TEST_CASE("class VII domain errors") {
    Params p{{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0}, {"A33", 0.0},
             {"B22_3", 0.0}, {"B21_1", 1.5}};
    CHECK_THROWS_AS(make_order_one(FamilyId::O10_VII, p), SqrtDomain);
    p["B21_1"] = 1.0; // radicand exactly zero -> division blows up
    CHECK_THROWS_AS(make_order_one(FamilyId::O10_VII, p), ZeroDenominator);
}

TEST_CASE("zero denominators are named") {
    CHECK_THROWS_AS(make_order_one(FamilyId::O10_I,
                                   {{"A11", 0.0}, {"A22", 0.0}, {"A33", 0.0},
                                    {"B22_3", 0.0}, {"B32_3", 0.0}}),
                    ZeroDenominator);
    CHECK_THROWS_AS(make_efficient(FamilyId::EFF_II,
                                   {{"a1", 0.0}, {"a2", 0.0}, {"a3", 1.0},
                                    {"b", 0.0}}),
                    ZeroDenominator);
    // class XI: B33_3 = 1/sqrt(2) sits on the a11 pole
    CHECK_THROWS_AS(make_order_one(FamilyId::O10_XI,
                                   {{"A21", 0.0}, {"A22", 0.0}, {"A33", 0.0},
                                    {"B33_3", std::sqrt(0.5)}}),
                    ZeroDenominator);
}

TEST_CASE("class V: quartic roots and construction") {
    SUBCASE("x = -B32_1*B33_3 is always a quartic root and is excluded") {
        CHECK(class_v_constraint(1.0, -1.0, 1.0) == doctest::Approx(0.0));
        CHECK(class_v_constraint(1.0, -2.0, 2.0) == doctest::Approx(0.0));
        const auto roots = class_v_solve(1.0, 1.0);
        for (double r : roots) CHECK(std::abs(r + 1.0) > 1e-6);
    }
    SUBCASE("solved roots satisfy the constraint and build a valid tableau") {
        const auto roots = class_v_solve(1.0, 1.0);
        REQUIRE(roots.size() == 1);
        const double r = roots[0];
        CHECK(std::abs(class_v_constraint(1.0, r, 1.0)) <= 1e-12);
        const SrkTableau t = make_order_one(
            FamilyId::O10_V,
            {{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0}, {"B32_1", 1.0},
             {"B32_3", r}, {"B33_3", 1.0}});
        const auto rep = order_residuals(t, StrongOrder::one);
        CHECK(rep.max_residual <= 1e-10);
        CHECK(*rep.lambda == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("no sign change gives an empty list") {
        RootSearch narrow;
        narrow.lo = 2.0;
        narrow.hi = 3.0;
        CHECK(class_v_solve(1.0, 1.0, narrow).empty());
    }
    SUBCASE("constructor rejects a violated constraint") {
        CHECK_THROWS_AS(make_order_one(FamilyId::O10_V,
                                       {{"A11", 0.0}, {"A22", 0.0},
                                        {"A32", 0.0}, {"B32_1", 1.0},
                                        {"B32_3", 1.0}, {"B33_3", 1.0}}),
                        ConstraintViolated);
        CHECK_THROWS_AS(make_order_one(FamilyId::O10_V,
                                       {{"A11", 0.0}, {"A22", 0.0},
                                        {"A32", 0.0}, {"B32_1", 1.0},
                                        {"B32_3", -1.0}, {"B33_3", 1.0}}),
                        ConstraintViolated);
    }
}

TEST_CASE("efficient schemes coincide with their parent classes") {
    SUBCASE("EFF_05 is class I/II with vanishing B3") {
        const SrkTableau eff =
            make_efficient(FamilyId::EFF_05, {{"a1", 0.5}, {"a2", 0.25}});
        const SrkTableau cls = make_order_half(
            FamilyId::H05_I, {{"A11", 0.5}, {"A21", 0.25}, {"B11_3", 0.0}});
        CHECK(eff == cls);
    }
    SUBCASE("EFF_II is class II at B22_3 = 0, B32_3 = +-1/(2b)") {
        for (Sign sign : {Sign::upper, Sign::lower}) {
            const double b = 1.25;
            const SrkTableau eff = make_efficient(
                FamilyId::EFF_II,
                {{"a1", 0.3}, {"a2", 0.6}, {"a3", 1.1}, {"b", b}}, sign);
            const double g = (sign == Sign::upper ? 1.0 : -1.0) / (2.0 * b);
            const SrkTableau cls = make_order_one(
                FamilyId::O10_II,
                {{"A11", 0.3}, {"A22", 0.6}, {"A33", 1.1}, {"B22_3", 0.0},
                 {"B32_3", g}},
                sign);
            CHECK((eff.A() - cls.A()).cwiseAbs().maxCoeff() <= 1e-15);
            for (int k : {1, 2, 3})
                CHECK((eff.B(k) - cls.B(k)).cwiseAbs().maxCoeff() <= 1e-15);
        }
    }
    SUBCASE("EFF_X is class X at B22_3 = 0, B32_2 = 1/b") {
        const double b = 0.8;
        const SrkTableau eff = make_efficient(
            FamilyId::EFF_X,
            {{"a1", 0.2}, {"a2", 0.7}, {"a3", 1.4}, {"a4", -0.7}, {"b", b}});
        const SrkTableau cls = make_order_one(
            FamilyId::O10_X,
            {{"A11", 0.2}, {"A21", -0.7}, {"A22", 0.7}, {"A33", 1.4},
             {"B22_3", 0.0}, {"B32_2", 1.0 / b}});
        CHECK((eff.A() - cls.A()).cwiseAbs().maxCoeff() <= 1e-15);
        for (int k : {1, 2, 3})
            CHECK((eff.B(k) - cls.B(k)).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("EFF_II drift matrix never references b") {
    const SrkTableau a = make_efficient(
        FamilyId::EFF_II, {{"a1", 0.4}, {"a2", 0.9}, {"a3", 1.2}, {"b", 0.5}});
    const SrkTableau b = make_efficient(
        FamilyId::EFF_II, {{"a1", 0.4}, {"a2", 0.9}, {"a3", 1.2}, {"b", -2.0}});
    CHECK(a.A() == b.A());
    CHECK(a.A()(1, 0) == doctest::Approx(0.4 - 0.9));
    CHECK(a.A()(1, 1) == doctest::Approx(0.9));
}

TEST_CASE("every family meets its advertised order over random draws") {
    using namespace sdaerk::testing;
    for (FamilyId id : all_families()) {
        CAPTURE(family_name(id));
        NoiseStream rng(family_seed(id));
        const StrongOrder order = advertised_order(id);
        const double lambda_target =
            (id >= FamilyId::O10_VI && id <= FamilyId::O10_XI) ||
                    id == FamilyId::EFF_X
                ? 0.0
                : 1.0;
        const int draws = 100;
        for (int i = 0; i < draws; ++i) {
            const FamilySpec spec = sample_admissible(id, rng);
            const SrkTableau t = make_tableau(spec);
            const auto rep = order_residuals(t, order);
            CHECK(rep.max_residual <= 1e-12);
            if (order == StrongOrder::one) {
                REQUIRE(rep.lambda.has_value());
                CHECK(std::abs(*rep.lambda - lambda_target) <= 1e-10);
                // lambda = 1 exactly when B2 vanishes
                const double b2max = t.B(2).cwiseAbs().maxCoeff();
                if (std::abs(*rep.lambda - 1.0) <= 1e-8) CHECK(b2max <= 1e-8);
                else CHECK(b2max > 1e-8);
            }
        }
    }
}

TEST_CASE("both sign choices satisfy the order conditions") {
    using namespace sdaerk::testing;
    for (FamilyId id : {FamilyId::O10_II, FamilyId::O10_IV, FamilyId::O10_VI,
                        FamilyId::O10_VII}) {
        NoiseStream rng(family_seed(id) + 31);
        for (int i = 0; i < 25; ++i) {
            FamilySpec spec = sample_admissible(id, rng);
            for (Sign sign : {Sign::upper, Sign::lower}) {
                spec.sign = sign;
                const auto rep =
                    order_residuals(make_tableau(spec), StrongOrder::one);
                CHECK(rep.max_residual <= 1e-12);
            }
        }
    }
}

TEST_CASE("family spec JSON round trip") {
    const FamilySpec spec = default_spec(FamilyId::O10_VI);
    const nlohmann::json j = family_spec_to_json(spec);
    CHECK(j["family"] == "O10_VI");
    const FamilySpec back = family_spec_from_json(j);
    CHECK(make_tableau(back) == make_tableau(spec));

    CHECK_THROWS_AS(family_spec_from_json(nlohmann::json{{"family", "O10_XII"}}),
                    UnknownParameter);
}

TEST_CASE("default specs build and verify for all families") {
    for (FamilyId id : all_families()) {
        CAPTURE(family_name(id));
        const SrkTableau t = make_tableau(default_spec(id));
        const auto rep = order_residuals(t, advertised_order(id));
        CHECK(rep.max_residual <= 1e-10);
    }
}
