#include "family_sampling.hpp"

#include "sdaerk/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace sdaerk::testing {

namespace {

double uniform(NoiseStream& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform();
}

// magnitude in [0.25, 2] with random sign, for denominator parameters
double away_from_zero(NoiseStream& rng) {
    const double mag = uniform(rng, 0.25, 2.0);
    return rng.uniform() < 0.5 ? -mag : mag;
}

double free_param(NoiseStream& rng) { return uniform(rng, -2.0, 2.0); }

Params draw_params(FamilyId id, NoiseStream& rng) {
    Params p;
    const auto any = [&rng] { return free_param(rng); };
    const auto den = [&rng] { return away_from_zero(rng); };
    switch (id) {
        case FamilyId::H05_I:
            return {{"A11", any()}, {"A21", any()}, {"B11_3", any()}};
        case FamilyId::H05_II:
            return {{"A11", any()}, {"A21", any()}, {"B21_3", any()}};
        case FamilyId::O10_I:
        case FamilyId::O10_II:
            return {{"A11", any()}, {"A22", any()}, {"A33", any()},
                    {"B22_3", any()}, {"B32_3", den()}};
        case FamilyId::O10_III:
            return {{"A21", any()}, {"A22", any()}, {"A32", any()},
                    {"B11_3", den()}};
        case FamilyId::O10_IV:
            return {{"A11", any()}, {"A22", any()}, {"A32", any()},
                    {"B33_3", den()}};
        case FamilyId::O10_V: {
            const double u = away_from_zero(rng);
            const double w = away_from_zero(rng);
            const auto roots = class_v_solve(u, w);
            if (roots.empty()) throw ConstraintViolated("no admissible root");
            const double x = roots[static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(roots.size()))];
            if (std::abs(x) < 0.05) throw ConstraintViolated("root too small");
            return {{"A11", any()}, {"A22", any()}, {"A32", any()},
                    {"B32_1", u}, {"B32_3", x}, {"B33_3", w}};
        }
        case FamilyId::O10_VI:
            return {{"A11", any()}, {"A22", any()}, {"A32", any()},
                    {"B11_3", any()}, {"B32_3", den()}};
        case FamilyId::O10_VII:
            return {{"A11", any()}, {"A22", any()}, {"A32", any()},
                    {"A33", any()}, {"B22_3", any()},
                    {"B21_1", uniform(rng, 0.05, 0.95)}};
        case FamilyId::O10_VIII:
            return {{"A11", any()}, {"A21", any()}, {"A22", any()},
                    {"A32", any()}, {"B22_3", any()}, {"B32_2", den()},
                    {"B11_3", den()}};
        case FamilyId::O10_IX:
            return {{"A11", any()}, {"A22", any()}, {"A32", any()},
                    {"B32_3", any()}, {"B11_3", den()}};
        case FamilyId::O10_X:
            return {{"A11", any()}, {"A21", any()}, {"A22", any()},
                    {"A33", any()}, {"B22_3", any()}, {"B32_2", den()}};
        case FamilyId::O10_XI: {
            const double w = away_from_zero(rng);
            if (std::abs(1.0 - 2.0 * w * w) < 0.05)
                throw ConstraintViolated("near the a11 pole");
            return {{"A21", any()}, {"A22", any()}, {"A33", any()},
                    {"B33_3", w}};
        }
        case FamilyId::EFF_05:
            return {{"a1", any()}, {"a2", any()}};
        case FamilyId::EFF_II:
            return {{"a1", any()}, {"a2", any()}, {"a3", any()}, {"b", den()}};
        case FamilyId::EFF_X:
            return {{"a1", any()}, {"a2", any()}, {"a3", any()},
                    {"a4", any()}, {"b", den()}};
    }
    throw std::logic_error("unreachable family id");
}

double max_entry(const SrkTableau& t) {
    double m = t.A().cwiseAbs().maxCoeff();
    for (int k : {1, 2, 3}) m = std::max(m, t.B(k).cwiseAbs().maxCoeff());
    return m;
}

} // namespace

FamilySpec sample_admissible(FamilyId id, NoiseStream& rng, int max_tries) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        FamilySpec spec;
        spec.family = id;
        spec.sign = rng.uniform() < 0.5 ? Sign::upper : Sign::lower;
        try {
            spec.params = draw_params(id, rng);
            const SrkTableau t = make_tableau(spec);
            if (max_entry(t) > 25.0) continue;
            return spec;
        } catch (const Error&) {
            continue;
        }
    }
    throw std::runtime_error(std::string("no admissible draw found for ") +
                             family_name(id));
}

std::uint64_t family_seed(FamilyId id) {
    return 7700u + static_cast<std::uint64_t>(id);
}

} // namespace sdaerk::testing
