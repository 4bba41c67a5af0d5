#include "sdaerk/solver.hpp"

#include "sdaerk/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>

namespace sdaerk {

StepStats& StepStats::operator+=(const StepStats& o) {
    f_evals += o.f_evals;
    g_evals += o.g_evals;
    newton_iters += o.newton_iters;
    lu_factorizations += o.lu_factorizations;
    return *this;
}

StepStats Trajectory::totals() const {
    StepStats t;
    for (const StepStats& s : step_stats) t += s;
    return t;
}

namespace {

Eigen::MatrixXd fd_jacobian(const StateFn& fn, double t,
                            const Eigen::VectorXd& x) {
    const double sqeps = std::sqrt(std::numeric_limits<double>::epsilon());
    const int d = static_cast<int>(x.size());
    Eigen::MatrixXd J(d, d);
    Eigen::VectorXd xp = x, xm = x;
    for (int j = 0; j < d; ++j) {
        const double dx = sqeps * (1.0 + std::abs(x(j)));
        xp(j) = x(j) + dx;
        xm(j) = x(j) - dx;
        J.col(j) = (fn(t, xp) - fn(t, xm)) / (2.0 * dx);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return J;
}

class Stepper {
public:
    Stepper(const SdaeProblem& p, const SrkTableau& t, const NewtonConfig& cfg,
            bool fsal)
        : p_(p), t_(t), cfg_(cfg), fsal_enabled_(fsal),
          s_(t.stages()) {
        if (p_.dim < 1 || p_.M.rows() != p_.dim || p_.M.cols() != p_.dim ||
            p_.x0.size() != p_.dim)
            throw InvalidProblem("problem dimensions are inconsistent");
        if (!p_.f || !p_.g) throw InvalidProblem("f and g must be callable");
        for (int r : p_.algebraic_rows) {
            if (r < 0 || r >= p_.dim)
                throw InvalidProblem("algebraic row index out of range");
            // structural declaration: algebraic rows are zero rows of M
            if (p_.M.row(r).cwiseAbs().maxCoeff() != 0.0)
                throw InvalidProblem("declared algebraic row " +
                                     std::to_string(r + 1) +
                                     " of M is not zero");
        }

        const StructureReport sr = validate_structure(t_);
        if (!sr.ok())
            throw StructureViolation(
                "tableau must be diagonally implicit and noise explicit");
        if (p_.singular_mass() && !sr.sdae_applicable)
            throw InvalidProblem("tableau is not applicable to a singular "
                                 "mass matrix: " + sr.sdae_reason);

        m_identity_ = p_.M.isIdentity(0.0);

        need_f_.assign(static_cast<std::size_t>(s_), false);
        need_g_.assign(static_cast<std::size_t>(s_), false);
        for (int i = 0; i < s_; ++i)
            for (int j = 0; j < s_; ++j) {
                if (t_.A()(i, j) != 0.0) need_f_[static_cast<std::size_t>(j)] = true;
                if (t_.B(1)(i, j) != 0.0 || t_.B(2)(i, j) != 0.0 ||
                    t_.B(3)(i, j) != 0.0)
                    need_g_[static_cast<std::size_t>(j)] = true;
            }

        fsal_eligible_ = fsal_enabled_ && sr.explicit_first_stage &&
                         std::abs(t_.c()(0)) <= 1e-14 &&
                         std::abs(t_.c()(s_ - 1) - 1.0) <= 1e-12;
    }

    Eigen::VectorXd step(const Eigen::VectorXd& y, double tn,
                         const NoiseIncrement& inc, StepStats& stats) {
        if (!(inc.h > 0.0)) throw NonpositiveStep(inc.h);
        const double h = inc.h;
        const double sqrt_h = std::sqrt(h);
        const double i11s = inc.i11 / sqrt_h;

        // per-step simplified-Newton state
        step_jf_.reset();
        step_jg_.reset();
        lu_key_valid_ = false;
        frozen_t_ = tn;
        frozen_y_ = &y;

        std::vector<Eigen::VectorXd> H(static_cast<std::size_t>(s_));
        std::vector<std::optional<Eigen::VectorXd>> fval(
            static_cast<std::size_t>(s_)),
            gval(static_cast<std::size_t>(s_));

        const bool reuse_fsal = fsal_eligible_ && cache_valid_ &&
                                cache_h_ == h && cache_y_.size() == y.size() &&
                                (cache_y_.array() == y.array()).all();

        const Eigen::VectorXd My = m_identity_ ? y : (p_.M * y).eval();

        for (int i = 0; i < s_; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            const double a_ii = t_.A()(i, i);
            const double b3_ii = t_.B(3)(i, i);
            const bool implicit = a_ii != 0.0 || b3_ii != 0.0;
            const double ti = tn + t_.c()(i) * h;

            Eigen::VectorXd rhs = My;
            for (int j = 0; j < i; ++j) {
                const std::size_t uj = static_cast<std::size_t>(j);
                if (t_.A()(i, j) != 0.0)
                    rhs += t_.A()(i, j) * h * (*fval[uj]);
                if (t_.B(1)(i, j) != 0.0 || t_.B(2)(i, j) != 0.0 ||
                    t_.B(3)(i, j) != 0.0) {
                    const double w = t_.B(1)(i, j) * inc.i1 +
                                     t_.B(2)(i, j) * i11s +
                                     t_.B(3)(i, j) * sqrt_h;
                    rhs += w * (*gval[uj]);
                }
            }

            if (!implicit) {
                if (i == 0) {
                    if (!p_.singular_mass()) {
                        H[ui] = y;
                    } else {
                        H[ui] = consistent_first_stage(y, ti, stats,
                                                       fval[ui]);
                        // the consistency solve's f value only counts as a
                        // stage evaluation if the scheme consumes it
                        if (!need_f_[ui]) fval[ui].reset();
                    }
                } else if (m_identity_) {
                    H[ui] = rhs;
                } else if (!p_.singular_mass()) {
                    H[ui] = mass_lu().solve(rhs);
                } else {
                    throw SingularIteration(i);
                }
            } else {
                H[ui] = newton_stage(i, ti, h, sqrt_h, a_ii, b3_ii, rhs,
                                     i == 0 ? y : H[ui - 1], stats,
                                     fval[ui], gval[ui]);
            }

            // stage evaluations consumed by later stages (or FSAL)
            if (need_f_[ui] && !fval[ui]) {
                if (i == 0 && reuse_fsal && cache_f_) {
                    fval[ui] = *cache_f_;
                } else {
                    fval[ui] = p_.f(ti, H[ui]);
                    ++stats.f_evals;
                }
            } else if (fval[ui] && !(i == 0 && reuse_fsal)) {
                ++stats.f_evals; // converged Newton value doubles as the stage eval
            }
            if (need_g_[ui] && !gval[ui]) {
                if (i == 0 && reuse_fsal && cache_g_) {
                    gval[ui] = *cache_g_;
                } else {
                    gval[ui] = eval_g(ti, H[ui]);
                    ++stats.g_evals;
                }
            } else if (gval[ui] && !(i == 0 && reuse_fsal)) {
                ++stats.g_evals;
            }
        }

        if (fsal_eligible_) {
            const std::size_t last = static_cast<std::size_t>(s_ - 1);
            cache_f_ = fval[last];
            cache_g_ = gval[last];
            cache_y_ = H[last];
            cache_h_ = h;
            cache_valid_ = true;
        }
        return H[static_cast<std::size_t>(s_ - 1)];
    }

    void check_consistency(double t, const Eigen::VectorXd& x) const {
        if (!p_.singular_mass()) return;
        const Eigen::VectorXd fv = p_.f(t, x);
        const Eigen::VectorXd gv = p_.g(t, x);
        for (int r : p_.algebraic_rows) {
            if (std::abs(fv(r)) > cfg_.consistency_tol)
                throw InvalidProblem(
                    "initial value violates constraint row " +
                    std::to_string(r + 1) + " by " + std::to_string(fv(r)));
            if (std::abs(gv(r)) != 0.0 &&
                std::abs(gv(r)) > cfg_.consistency_tol)
                throw InvalidProblem("noise appears in constraint row " +
                                     std::to_string(r + 1));
        }
    }

private:
    Eigen::MatrixXd eval_jf(double t, const Eigen::VectorXd& x) const {
        if (cfg_.jacobian_mode == JacobianMode::analytic && p_.f_jacobian)
            return p_.f_jacobian(t, x);
        return fd_jacobian(p_.f, t, x);
    }
    Eigen::MatrixXd eval_jg(double t, const Eigen::VectorXd& x) const {
        if (cfg_.jacobian_mode == JacobianMode::analytic && p_.g_jacobian)
            return p_.g_jacobian(t, x);
        return fd_jacobian(p_.g, t, x);
    }

    // g with the no-noise-in-constraints spot check
    Eigen::VectorXd eval_g(double t, const Eigen::VectorXd& x) const {
        Eigen::VectorXd gv = p_.g(t, x);
        for (int r : p_.algebraic_rows) {
            const double mag = std::abs(gv(r));
            if (mag > cfg_.consistency_tol * (1.0 + gv.cwiseAbs().maxCoeff()))
                throw InvalidProblem("noise appears in constraint row " +
                                     std::to_string(r + 1));
        }
        return gv;
    }

    const Eigen::FullPivLU<Eigen::MatrixXd>& mass_lu() {
        if (!mass_lu_) {
            mass_lu_.emplace(p_.M);
            if (!mass_lu_->isInvertible())
                throw InvalidProblem("mass matrix is singular but no "
                                     "algebraic rows were declared");
        }
        return *mass_lu_;
    }

    const Eigen::MatrixXd& frozen_jf() {
        if (!step_jf_) step_jf_ = eval_jf(frozen_t_, *frozen_y_);
        return *step_jf_;
    }
    const Eigen::MatrixXd& frozen_jg() {
        if (!step_jg_) step_jg_ = eval_jg(frozen_t_, *frozen_y_);
        return *step_jg_;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> factorize(int stage,
                                                const Eigen::MatrixXd& m,
                                                StepStats& stats) const {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        ++stats.lu_factorizations;
        if (!lu.isInvertible()) throw SingularIteration(stage);
        return lu;
    }

    // Simplified Newton reuses one factorization per distinct diagonal
    // pair (A_ii, B3_ii) within a step; equal diagonals mean one LU per step.
    const Eigen::FullPivLU<Eigen::MatrixXd>& simplified_lu(
        int stage, double h, double sqrt_h, double a_ii, double b3_ii,
        StepStats& stats) {
        if (lu_key_valid_ && lu_a_ == a_ii && lu_b3_ == b3_ii) return *lu_;
        Eigen::MatrixXd J = p_.M;
        if (a_ii != 0.0) J -= h * a_ii * frozen_jf();
        if (b3_ii != 0.0) J -= sqrt_h * b3_ii * frozen_jg();
        lu_ = factorize(stage, J, stats);
        lu_a_ = a_ii;
        lu_b3_ = b3_ii;
        lu_key_valid_ = true;
        return *lu_;
    }

    Eigen::VectorXd newton_stage(int stage, double ti, double h, double sqrt_h,
                                 double a_ii, double b3_ii,
                                 const Eigen::VectorXd& rhs,
                                 const Eigen::VectorXd& guess, StepStats& stats,
                                 std::optional<Eigen::VectorXd>& f_out,
                                 std::optional<Eigen::VectorXd>& g_out) {
        Eigen::VectorXd H = guess;
        Eigen::VectorXd fi, gi;
        const auto residual = [&](const Eigen::VectorXd& Hc) {
            Eigen::VectorXd r = m_identity_ ? Hc : (p_.M * Hc).eval();
            r -= rhs;
            if (a_ii != 0.0) {
                fi = p_.f(ti, Hc);
                r -= a_ii * h * fi;
            }
            if (b3_ii != 0.0) {
                gi = eval_g(ti, Hc);
                r -= b3_ii * sqrt_h * gi;
            }
            return r;
        };

        Eigen::VectorXd res = residual(H);
        double rn = res.lpNorm<Eigen::Infinity>();
        int iters = 0;
        while (rn > cfg_.tol) {
            if (iters >= cfg_.max_iter) {
                stats.newton_iters += iters;
                throw NewtonDiverged(stage, rn, iters);
            }
            if (cfg_.simplified) {
                const auto& lu =
                    simplified_lu(stage, h, sqrt_h, a_ii, b3_ii, stats);
                H += lu.solve(-res);
            } else {
                Eigen::MatrixXd J = p_.M;
                if (a_ii != 0.0) J -= h * a_ii * eval_jf(ti, H);
                if (b3_ii != 0.0) J -= sqrt_h * b3_ii * eval_jg(ti, H);
                H += factorize(stage, J, stats).solve(-res);
            }
            res = residual(H);
            rn = res.lpNorm<Eigen::Infinity>();
            ++iters;
        }
        stats.newton_iters += iters;
        if (a_ii != 0.0) f_out = std::move(fi);
        if (b3_ii != 0.0) g_out = std::move(gi);
        return H;
    }

    // Explicit first stage with singular M: differential rows copy y,
    // algebraic components solve the constraint rows f_r(t, H) = 0.
    Eigen::VectorXd consistent_first_stage(
        const Eigen::VectorXd& y, double ti, StepStats& stats,
        std::optional<Eigen::VectorXd>& f_out) {
        std::vector<bool> algebraic(static_cast<std::size_t>(p_.dim), false);
        for (int r : p_.algebraic_rows)
            algebraic[static_cast<std::size_t>(r)] = true;

        Eigen::VectorXd H = y;
        Eigen::VectorXd fv;
        const auto residual = [&](const Eigen::VectorXd& Hc) {
            fv = p_.f(ti, Hc);
            Eigen::VectorXd mh = p_.M * (Hc - y);
            Eigen::VectorXd r(p_.dim);
            for (int row = 0; row < p_.dim; ++row)
                r(row) = algebraic[static_cast<std::size_t>(row)] ? fv(row)
                                                                  : mh(row);
            return r;
        };

        Eigen::VectorXd res = residual(H);
        double rn = res.lpNorm<Eigen::Infinity>();
        int iters = 0;
        while (rn > cfg_.tol) {
            if (iters >= cfg_.max_iter) {
                stats.newton_iters += iters;
                throw NewtonDiverged(0, rn, iters);
            }
            const Eigen::MatrixXd jf =
                cfg_.simplified ? eval_jf(frozen_t_, *frozen_y_)
                                : eval_jf(ti, H);
            Eigen::MatrixXd J = p_.M;
            for (int r : p_.algebraic_rows) J.row(r) = jf.row(r);
            H += factorize(0, J, stats).solve(-res);
            res = residual(H);
            rn = res.lpNorm<Eigen::Infinity>();
            ++iters;
        }
        stats.newton_iters += iters;
        f_out = std::move(fv);
        return H;
    }

    const SdaeProblem& p_;
    const SrkTableau& t_;
    NewtonConfig cfg_;
    bool fsal_enabled_;
    bool fsal_eligible_ = false;
    int s_;
    std::vector<bool> need_f_, need_g_;
    bool m_identity_ = false;
    std::optional<Eigen::FullPivLU<Eigen::MatrixXd>> mass_lu_;

    // per-step simplified-Newton state
    std::optional<Eigen::MatrixXd> step_jf_, step_jg_;
    std::optional<Eigen::FullPivLU<Eigen::MatrixXd>> lu_;
    bool lu_key_valid_ = false;
    double lu_a_ = 0.0, lu_b3_ = 0.0;
    double frozen_t_ = 0.0;
    const Eigen::VectorXd* frozen_y_ = nullptr;

    // FSAL cache
    bool cache_valid_ = false;
    std::optional<Eigen::VectorXd> cache_f_, cache_g_;
    Eigen::VectorXd cache_y_;
    double cache_h_ = 0.0;
};

} // namespace

std::pair<Eigen::VectorXd, StepStats> srk_step(const SdaeProblem& p,
                                               const SrkTableau& t,
                                               const Eigen::VectorXd& y,
                                               double tn,
                                               const NoiseIncrement& inc,
                                               const NewtonConfig& cfg) {
    Stepper stepper(p, t, cfg, /*fsal=*/false);
    StepStats stats;
    Eigen::VectorXd out = stepper.step(y, tn, inc, stats);
    return {std::move(out), stats};
}

Trajectory simulate_path(const SdaeProblem& p, const SrkTableau& t,
                         int n_steps, NoiseStream& stream,
                         const NewtonConfig& cfg, bool fsal) {
    if (n_steps < 1) throw BadRange("n_steps must be at least 1");
    Stepper stepper(p, t, cfg, fsal);
    stepper.check_consistency(p.t0, p.x0);

    const double h = (p.T - p.t0) / n_steps;
    if (!(h > 0.0)) throw NonpositiveStep(h);

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.step_stats.reserve(static_cast<std::size_t>(n_steps));
    traj.times.push_back(p.t0);
    traj.states.push_back(p.x0);

    Eigen::VectorXd y = p.x0;
    for (int n = 0; n < n_steps; ++n) {
        const double tn = p.t0 + n * h;
        const NoiseIncrement inc = draw_increment(stream, h);
        StepStats stats;
        try {
            y = stepper.step(y, tn, inc, stats);
        } catch (Error& e) {
            throw Error(e.code(), e.kind(),
                        std::string(e.what()) + " (step " +
                            std::to_string(n + 1) + ")");
        }
        traj.times.push_back(p.t0 + (n + 1) * h);
        traj.states.push_back(y);
        traj.step_stats.push_back(stats);
    }
    return traj;
}

std::pair<Eigen::VectorXd, StepStats> integrate_with_increments(
    const SdaeProblem& p, const SrkTableau& t, double t0,
    std::span<const NoiseIncrement> increments, const NewtonConfig& cfg,
    bool fsal, const StepObserver& observer) {
    if (increments.empty()) throw EmptyInput("increment sequence");
    Stepper stepper(p, t, cfg, fsal);
    stepper.check_consistency(t0, p.x0);

    Eigen::VectorXd y = p.x0;
    StepStats totals;
    double tn = t0;
    for (const NoiseIncrement& inc : increments) {
        StepStats stats;
        y = stepper.step(y, tn, inc, stats);
        totals += stats;
        tn += inc.h;
        if (observer) observer(tn, y);
    }
    return {std::move(y), totals};
}

std::vector<Eigen::VectorXd> exact_reference(ReferenceKind kind,
                                             const ReferenceParams& params,
                                             std::span<const double> times,
                                             std::span<const double> i1_path) {
    if (times.empty()) throw EmptyInput("time grid");
    if (i1_path.size() + 1 != times.size())
        throw DimensionMismatch("i1_path must have one entry per step");

    const double drift = kind == ReferenceKind::gbm
                             ? params.lambda
                             : params.lambda + params.c;
    std::vector<Eigen::VectorXd> out;
    out.reserve(times.size());
    double w = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (j > 0) w += i1_path[j - 1];
        const double dt = times[j] - times[0];
        const double x1 =
            params.x0 *
            std::exp((drift - 0.5 * params.mu * params.mu) * dt +
                     params.mu * w);
        if (kind == ReferenceKind::gbm) {
            out.push_back(Eigen::VectorXd::Constant(1, x1));
        } else {
            Eigen::VectorXd state(2);
            state << x1, params.c * x1;
            out.push_back(std::move(state));
        }
    }
    return out;
}

SdaeProblem make_gbm_problem(double lambda, double mu, double x0, double t0,
                             double T) {
    SdaeProblem p;
    p.dim = 1;
    p.M = Eigen::MatrixXd::Identity(1, 1);
    p.f = [lambda](double, const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, lambda * x(0)).eval();
    };
    p.g = [mu](double, const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, mu * x(0)).eval();
    };
    p.f_jacobian = [lambda](double, const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Constant(1, 1, lambda).eval();
    };
    p.g_jacobian = [mu](double, const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Constant(1, 1, mu).eval();
    };
    p.x0 = Eigen::VectorXd::Constant(1, x0);
    p.t0 = t0;
    p.T = T;
    return p;
}

SdaeProblem make_reduced_sdae_problem(double lambda, double mu, double c,
                                      double x1_0, double t0, double T) {
    SdaeProblem p;
    p.dim = 2;
    p.M = Eigen::MatrixXd::Zero(2, 2);
    p.M(0, 0) = 1.0;
    p.f = [lambda, c](double, const Eigen::VectorXd& x) {
        Eigen::VectorXd v(2);
        v << lambda * x(0) + x(1), x(1) - c * x(0);
        return v;
    };
    p.g = [mu](double, const Eigen::VectorXd& x) {
        Eigen::VectorXd v(2);
        v << mu * x(0), 0.0;
        return v;
    };
    p.f_jacobian = [lambda, c](double, const Eigen::VectorXd&) {
        Eigen::MatrixXd j(2, 2);
        j << lambda, 1.0, -c, 1.0;
        return j;
    };
    p.g_jacobian = [mu](double, const Eigen::VectorXd&) {
        Eigen::MatrixXd j(2, 2);
        j << mu, 0.0, 0.0, 0.0;
        return j;
    };
    p.x0 = Eigen::VectorXd(2);
    p.x0 << x1_0, c * x1_0;
    p.t0 = t0;
    p.T = T;
    p.algebraic_rows = {1};
    return p;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.states.empty()) throw EmptyInput("trajectory");
    const int d = static_cast<int>(traj.states.front().size());
    os << "t";
    for (int j = 1; j <= d; ++j) os << ",x" << j;
    os << "\n";
    char buf[32];
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[n]);
        os << buf;
        for (int j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", traj.states[n](j));
            os << ',' << buf;
        }
        os << "\n";
    }
}

nlohmann::json stats_to_json(const StepStats& s) {
    return {{"f_evals", s.f_evals},
            {"g_evals", s.g_evals},
            {"newton_iters", s.newton_iters},
            {"lu_factorizations", s.lu_factorizations}};
}

} // namespace sdaerk
