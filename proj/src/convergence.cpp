#include "sdaerk/convergence.hpp"

#include "sdaerk/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sdaerk {

StudyProblem make_gbm_study(double lambda, double mu, double x0, double t0,
                            double T) {
    StudyProblem sp;
    sp.problem = make_gbm_problem(lambda, mu, x0, t0, T);
    sp.ref_kind = ReferenceKind::gbm;
    sp.ref_params = {lambda, mu, x0, 0.0};
    return sp;
}

StudyProblem make_reduced_sdae_study(double lambda, double mu, double c,
                                     double x1_0, double t0, double T) {
    StudyProblem sp;
    sp.problem = make_reduced_sdae_problem(lambda, mu, c, x1_0, t0, T);
    sp.ref_kind = ReferenceKind::reduced_sdae;
    sp.ref_params = {lambda, mu, x1_0, c};
    return sp;
}

std::vector<double> dyadic_h_list(double horizon, int coarse_exp,
                                  int fine_exp) {
    if (!(horizon > 0.0)) throw BadRange("horizon must be positive");
    if (coarse_exp > fine_exp)
        throw BadRange("coarse exponent must not exceed fine exponent");
    std::vector<double> h;
    for (int e = coarse_exp; e <= fine_exp; ++e)
        h.push_back(horizon * std::pow(2.0, -e));
    return h;
}

ConvergenceStudy strong_order_estimate(const StudyProblem& sp,
                                       const SrkTableau& t,
                                       std::span<const double> h_list,
                                       int n_paths, std::uint64_t seed,
                                       const NewtonConfig& cfg,
                                       const StepObserver& observer) {
    if (h_list.size() < 3)
        throw DegenerateFit("at least 3 step sizes are needed for a slope");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1]))
            throw BadRange("h_list must be strictly decreasing");
    if (n_paths < 1) throw BadRange("n_paths must be positive");

    const double horizon = sp.problem.T - sp.problem.t0;
    const double h_fine = h_list.back();
    const long n_fine = std::lround(horizon / h_fine);
    if (n_fine < 1 ||
        std::abs(n_fine * h_fine - horizon) > 1e-9 * horizon)
        throw BadRange("finest h must divide the horizon");

    // every level must be an integer multiple of the finest level
    std::vector<long> factors;
    for (double h : h_list) {
        const long m = std::lround(h / h_fine);
        if (std::abs(m * h_fine - h) > 1e-9 * h)
            throw BadRange("all h must be integer multiples of the finest h");
        if (n_fine % m != 0)
            throw BadRange("every h must divide the horizon evenly");
        factors.push_back(m);
    }

    const std::size_t levels = h_list.size();
    std::vector<double> sq_err(levels, 0.0);

    std::vector<NoiseIncrement> fine(static_cast<std::size_t>(n_fine));
    std::vector<double> i1_path(static_cast<std::size_t>(n_fine));
    std::vector<NoiseIncrement> coarse;
    const std::vector<double> endpoint_times = {sp.problem.t0, sp.problem.T};

    for (int path = 0; path < n_paths; ++path) {
        NoiseStream stream(seed, static_cast<std::uint64_t>(path));
        for (long n = 0; n < n_fine; ++n) {
            fine[static_cast<std::size_t>(n)] = draw_increment(stream, h_fine);
            i1_path[static_cast<std::size_t>(n)] =
                fine[static_cast<std::size_t>(n)].i1;
        }

        // exact endpoint on the same Brownian path
        double w_total = 0.0;
        for (double w : i1_path) w_total += w;
        const auto ref = exact_reference(sp.ref_kind, sp.ref_params,
                                         endpoint_times,
                                         std::span<const double>(&w_total, 1));
        const Eigen::VectorXd& x_T = ref.back();

        for (std::size_t level = 0; level < levels; ++level) {
            const long m = factors[level];
            const long n_steps = n_fine / m;
            coarse.clear();
            coarse.reserve(static_cast<std::size_t>(n_steps));
            for (long n = 0; n < n_steps; ++n) {
                const std::span<const NoiseIncrement> group(
                    fine.data() + n * m, static_cast<std::size_t>(m));
                coarse.push_back(coarsen_increments(group));
            }
            const auto [y_T, stats] = integrate_with_increments(
                sp.problem, t, sp.problem.t0, coarse, cfg, /*fsal=*/true,
                observer);
            sq_err[level] += (y_T - x_T).squaredNorm();
        }
    }

    ConvergenceStudy study;
    study.h_list.assign(h_list.begin(), h_list.end());
    study.n_paths = n_paths;
    study.seed = seed;
    study.errors.resize(levels);
    for (std::size_t level = 0; level < levels; ++level) {
        study.errors[level] = std::sqrt(sq_err[level] / n_paths);
        if (!(study.errors[level] > 0.0) ||
            !std::isfinite(study.errors[level]))
            throw DegenerateFit(
                "RMS error at level " + std::to_string(level + 1) +
                " is zero or non-finite; the log-log slope is undefined");
    }

    // ordinary least squares of log2(error) on log2(h)
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t level = 0; level < levels; ++level) {
        const double x = std::log2(study.h_list[level]);
        const double y = std::log2(study.errors[level]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(levels);
    study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return study;
}

void write_study_csv(std::ostream& os, const ConvergenceStudy& study) {
    os << "h,rms_error\n";
    char buf[32];
    for (std::size_t i = 0; i < study.h_list.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", study.h_list[i]);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", study.errors[i]);
        os << buf << "\n";
    }
}

nlohmann::json study_summary_json(const ConvergenceStudy& study) {
    return {{"slope", study.slope},
            {"n_paths", study.n_paths},
            {"seed", study.seed}};
}

} // namespace sdaerk
