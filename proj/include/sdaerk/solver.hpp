#pragma once

#include "sdaerk/noise.hpp"
#include "sdaerk/tableau.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace sdaerk {

using StateFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
using JacobianFn =
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;

/// Problem M dX = f dt + g dW with a possibly singular mass matrix. When M
/// is singular the caller declares which rows are algebraic (they must be
/// zero rows of M); those rows of g must vanish and x0 must satisfy the
/// constraints f_r(t0, x0) = 0.
struct SdaeProblem {
    int dim = 0;
    Eigen::MatrixXd M;
    StateFn f;
    StateFn g;
    JacobianFn f_jacobian; // optional; finite differences otherwise
    JacobianFn g_jacobian; // optional; finite differences otherwise
    Eigen::VectorXd x0;
    double t0 = 0.0;
    double T = 1.0;
    std::vector<int> algebraic_rows;

    bool singular_mass() const { return !algebraic_rows.empty(); }
};

enum class JacobianMode { analytic, finite_difference };

struct NewtonConfig {
    double tol = 1e-10;
    int max_iter = 25;
    bool simplified = true; // freeze the stage Jacobian at (tn, yn)
    JacobianMode jacobian_mode = JacobianMode::analytic;
    double consistency_tol = 1e-8;
};

/// Work counters. f_evals and g_evals count stage evaluations (fresh
/// function values entering the scheme, FSAL reuse excluded); Newton
/// residual re-evaluations show up in newton_iters instead.
struct StepStats {
    long f_evals = 0;
    long g_evals = 0;
    long newton_iters = 0;
    long lu_factorizations = 0;

    StepStats& operator+=(const StepStats& o);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<StepStats> step_stats; // one entry per step
    StepStats totals() const;
};

/// One step of the stiffly accurate SRK scheme: stages solve
///   M H_i = M y + sum_j A_ij h f(t+c_j h, H_j)
///               + sum_j (B1_ij I1 + B2_ij I11/sqrt(h) + B3_ij sqrt(h)) g(..., H_j)
/// in stage order, and the step output is H_s.
std::pair<Eigen::VectorXd, StepStats> srk_step(const SdaeProblem& p,
                                               const SrkTableau& t,
                                               const Eigen::VectorXd& y,
                                               double tn,
                                               const NoiseIncrement& inc,
                                               const NewtonConfig& cfg);

/// Uniform-grid path with increments drawn from the stream. FSAL reuse of
/// the last-stage evaluations kicks in when the first stage is explicit
/// with c1 = 0 and c_s = 1.
Trajectory simulate_path(const SdaeProblem& p, const SrkTableau& t,
                         int n_steps, NoiseStream& stream,
                         const NewtonConfig& cfg, bool fsal = true);

using StepObserver = std::function<void(double, const Eigen::VectorXd&)>;

/// Endpoint-only driver over a prescribed increment sequence (used by the
/// Brownian-coupled convergence studies). The observer, when set, sees
/// every accepted (t, y).
std::pair<Eigen::VectorXd, StepStats> integrate_with_increments(
    const SdaeProblem& p, const SrkTableau& t, double t0,
    std::span<const NoiseIncrement> increments, const NewtonConfig& cfg,
    bool fsal = true, const StepObserver& observer = {});

enum class ReferenceKind { gbm, reduced_sdae };

struct ReferenceParams {
    double lambda = 0.0;
    double mu = 0.0;
    double x0 = 1.0;
    double c = 0.0; // constraint slope of the reduced SDAE
};

/// Closed-form solutions along a given Brownian path. gbm returns
/// x0*exp((lambda - mu^2/2) t + mu W_t); reduced_sdae returns (x1, c*x1)
/// with x1 a gbm of drift lambda + c.
std::vector<Eigen::VectorXd> exact_reference(ReferenceKind kind,
                                             const ReferenceParams& params,
                                             std::span<const double> times,
                                             std::span<const double> i1_path);

SdaeProblem make_gbm_problem(double lambda, double mu, double x0, double t0,
                             double T);
/// M = diag(1, 0), f = (lambda x1 + x2, x2 - c x1), g = (mu x1, 0),
/// consistent start (x1_0, c*x1_0).
SdaeProblem make_reduced_sdae_problem(double lambda, double mu, double c,
                                      double x1_0, double t0, double T);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
nlohmann::json stats_to_json(const StepStats& s);

} // namespace sdaerk
