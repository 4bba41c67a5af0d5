#pragma once

#include "sdaerk/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sdaerk {

struct ConvergenceStudy {
    std::vector<double> h_list;
    std::vector<double> errors; // RMS endpoint errors, one per h
    double slope = 0.0;         // OLS slope of log2(error) vs log2(h)
    int n_paths = 0;
    std::uint64_t seed = 0;
};

/// Problem paired with its closed-form reference.
struct StudyProblem {
    SdaeProblem problem;
    ReferenceKind ref_kind = ReferenceKind::gbm;
    ReferenceParams ref_params;
};

StudyProblem make_gbm_study(double lambda, double mu, double x0, double t0,
                            double T);
StudyProblem make_reduced_sdae_study(double lambda, double mu, double c,
                                     double x1_0, double t0, double T);

/// horizon * 2^-e for e = coarse_exp .. fine_exp.
std::vector<double> dyadic_h_list(double horizon, int coarse_exp,
                                  int fine_exp);

/// Empirical strong order: per path, one fine increment sequence is drawn at
/// the smallest h and coarsened for the larger levels, so every level sees
/// the same Brownian path as the reference. Errors are RMS over paths at T.
ConvergenceStudy strong_order_estimate(const StudyProblem& sp,
                                       const SrkTableau& t,
                                       std::span<const double> h_list,
                                       int n_paths, std::uint64_t seed,
                                       const NewtonConfig& cfg = {},
                                       const StepObserver& observer = {});

void write_study_csv(std::ostream& os, const ConvergenceStudy& study);
nlohmann::json study_summary_json(const ConvergenceStudy& study);

} // namespace sdaerk
