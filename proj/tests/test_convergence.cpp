#include "sdaerk/convergence.hpp"
#include "sdaerk/errors.hpp"
#include "sdaerk/families.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace sdaerk;

namespace {

SrkTableau eff05(double a1, double a2) {
    return make_efficient(FamilyId::EFF_05, {{"a1", a1}, {"a2", a2}});
}

} // namespace

TEST_CASE("dyadic level construction") {
    const auto h = dyadic_h_list(1.0, 4, 9);
    REQUIRE(h.size() == 6);
    CHECK(h.front() == doctest::Approx(1.0 / 16));
    CHECK(h.back() == doctest::Approx(1.0 / 512));
    CHECK_THROWS_AS(dyadic_h_list(1.0, 9, 4), BadRange);
}

TEST_CASE("slope fitting needs at least three levels") {
    const StudyProblem sp = make_gbm_study(-1.0, 0.5, 1.0, 0.0, 1.0);
    const std::vector<double> two{0.25, 0.125};
    CHECK_THROWS_AS(
        strong_order_estimate(sp, eff05(0.0, 0.0), two, 10, 1u),
        DegenerateFit);
}

TEST_CASE("deterministic problems show the order-1 drift behaviour") {
    // mu = 0 turns the study into a deterministic convergence test
    const StudyProblem sp = make_gbm_study(-1.0, 0.0, 1.0, 0.0, 1.0);
    const auto h = dyadic_h_list(1.0, 3, 7);
    const ConvergenceStudy study =
        strong_order_estimate(sp, eff05(0.0, 0.25), h, 1, 5u);
    CHECK(study.slope > 0.9);
    CHECK(study.slope < 1.1);
    for (std::size_t i = 1; i < study.errors.size(); ++i)
        CHECK(study.errors[i] < study.errors[i - 1]);
}

TEST_CASE("same seed reproduces the study exactly") {
    const StudyProblem sp = make_gbm_study(-1.0, 0.5, 1.0, 0.0, 1.0);
    const auto h = dyadic_h_list(1.0, 3, 6);
    const ConvergenceStudy a =
        strong_order_estimate(sp, eff05(0.0, 0.0), h, 50, 77u);
    const ConvergenceStudy b =
        strong_order_estimate(sp, eff05(0.0, 0.0), h, 50, 77u);
    REQUIRE(a.errors.size() == b.errors.size());
    for (std::size_t i = 0; i < a.errors.size(); ++i)
        CHECK(a.errors[i] == b.errors[i]);
    CHECK(a.slope == b.slope);
}

TEST_CASE("smoke study lands near strong order one half") {
    const StudyProblem sp = make_gbm_study(-1.0, 0.5, 1.0, 0.0, 1.0);
    const auto h = dyadic_h_list(1.0, 4, 8);
    const ConvergenceStudy study =
        strong_order_estimate(sp, eff05(0.0, 0.0), h, 300, 2024u);
    CHECK(study.slope > 0.3);
    CHECK(study.slope < 0.8);
    // error monotonicity with Monte Carlo slack
    for (std::size_t i = 1; i < study.errors.size(); ++i)
        CHECK(study.errors[i] <= 1.1 * study.errors[i - 1]);
}

TEST_CASE("studies honor a nonzero start time") {
    const StudyProblem sp = make_gbm_study(-1.0, 0.0, 1.0, 0.25, 1.25);
    const auto h = dyadic_h_list(1.0, 3, 6);
    const ConvergenceStudy study =
        strong_order_estimate(sp, eff05(0.0, 0.25), h, 1, 8u);
    CHECK(study.slope > 0.9);
    CHECK(study.slope < 1.1);
}

TEST_CASE("coupled coarse stepping matches explicit coarsening") {
    // the study's internal coarsening must agree with coarsen_increments
    const StudyProblem sp = make_gbm_study(-0.8, 0.4, 1.0, 0.0, 1.0);
    const SrkTableau t = eff05(0.0, 0.0);
    NoiseStream stream(31u, 0u);
    std::vector<NoiseIncrement> fine;
    for (int i = 0; i < 8; ++i) fine.push_back(draw_increment(stream, 0.125));

    std::vector<NoiseIncrement> coarse;
    for (int i = 0; i < 4; ++i)
        coarse.push_back(coarsen_increments(
            std::span<const NoiseIncrement>(fine.data() + 2 * i, 2)));

    const auto [direct, s1] =
        integrate_with_increments(sp.problem, t, 0.0, coarse, {});

    // step manually with pairwise-summed increments
    Eigen::VectorXd y = sp.problem.x0;
    double tn = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto [y1, s] = srk_step(sp.problem, t, y, tn, coarse[static_cast<std::size_t>(i)], {});
        y = y1;
        tn += 0.25;
    }
    CHECK(direct(0) == y(0));
}

TEST_CASE("study export formats") {
    ConvergenceStudy study;
    study.h_list = {0.25, 0.125, 0.0625};
    study.errors = {0.1, 0.05, 0.025};
    study.slope = 1.0;
    study.n_paths = 10;
    study.seed = 3u;
    std::ostringstream os;
    write_study_csv(os, study);
    CHECK(os.str().rfind("h,rms_error\n", 0) == 0);
    const nlohmann::json j = study_summary_json(study);
    CHECK(j["slope"] == 1.0);
    CHECK(j["n_paths"] == 10);
    CHECK(j["seed"] == 3);
}
