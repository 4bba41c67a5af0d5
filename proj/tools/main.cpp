#include "sdaerk/convergence.hpp"
#include "sdaerk/errors.hpp"
#include "sdaerk/families.hpp"
#include "sdaerk/json_io.hpp"
#include "sdaerk/noise.hpp"
#include "sdaerk/solver.hpp"
#include "sdaerk/stability.hpp"
#include "sdaerk/tableau.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace sdaerk;

nlohmann::json read_json(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(path);
        if (!in)
            throw InvalidProblem("cannot open '" + path + "' for reading");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidProblem("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InvalidProblem("cannot open '" + path + "' for writing");
    out << text;
}

std::string sidecar_path(const std::string& out, const char* suffix) {
    std::filesystem::path p(out);
    p.replace_extension(suffix);
    return p.string();
}

// common input: either a ready tableau or a family spec to construct
struct TableauInput {
    std::string tableau_path;
    std::string family_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--tableau", tableau_path,
                        "tableau JSON file ('-' for stdin)");
        cmd->add_option("--family", family_path,
                        "family spec JSON file ('-' for stdin)");
    }

    SrkTableau load() const {
        if (tableau_path.empty() == family_path.empty())
            throw InvalidProblem(
                "exactly one of --tableau or --family is required");
        if (!tableau_path.empty())
            return tableau_from_json(read_json(tableau_path));
        return make_tableau(family_spec_from_json(read_json(family_path)));
    }
};

struct ProblemFlags {
    std::string kind = "gbm";
    double lambda = -1.0;
    double mu = 0.5;
    double x0 = 1.0;
    double constraint_c = 0.5;
    double t0 = 0.0;
    double T = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--problem", kind, "test problem")
            ->check(CLI::IsMember({"gbm", "reduced-sdae"}))
            ->capture_default_str();
        cmd->add_option("--lambda", lambda, "drift coefficient")
            ->capture_default_str();
        cmd->add_option("--mu", mu, "diffusion coefficient")
            ->capture_default_str();
        cmd->add_option("--x0", x0, "initial value of the differential state")
            ->capture_default_str();
        cmd->add_option("--constraint-c", constraint_c,
                        "constraint slope of the reduced SDAE")
            ->capture_default_str();
        cmd->add_option("--t0", t0, "start time")->capture_default_str();
        cmd->add_option("--T", T, "end time")->capture_default_str();
    }

    StudyProblem study() const {
        if (kind == "gbm") return make_gbm_study(lambda, mu, x0, t0, T);
        return make_reduced_sdae_study(lambda, mu, constraint_c, x0, t0, T);
    }
};

double verification_tolerance(const std::optional<double>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SRK_DEFAULT_TOL")) {
        try {
            return std::stod(env);
        } catch (...) {
            throw InvalidProblem("SRK_DEFAULT_TOL is not a number");
        }
    }
    return 1e-12;
}

int run(int argc, char** argv) {
    CLI::App app{"Stiffly accurate SRK methods for index-1 SDAEs with scalar "
                 "noise: construction, order verification, simulation and "
                 "mean-square stability analysis"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand(
        "verify", "check the strong order conditions of a tableau");
    TableauInput verify_in;
    verify_in.attach(verify);
    std::string verify_order;
    verify->add_option("--order", verify_order, "requested order")
        ->required()
        ->check(CLI::IsMember({"0.5", "1.0"}));
    std::optional<double> verify_tol;
    verify->add_option("--tol", verify_tol,
                       "residual tolerance (default 1e-12, or SRK_DEFAULT_TOL)");
    std::string verify_out = "-";
    verify->add_option("--out", verify_out, "report destination");

    // family
    auto* family = app.add_subcommand(
        "family", "construct a tableau from a family spec");
    std::string family_spec_path;
    family->add_option("--family", family_spec_path, "family spec JSON")
        ->required();
    std::string family_out = "-";
    family->add_option("--out", family_out, "tableau destination");

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate", "integrate a test problem along one sampled path");
    TableauInput sim_in;
    sim_in.attach(simulate);
    ProblemFlags sim_problem;
    sim_problem.attach(simulate);
    int sim_steps = 128;
    simulate->add_option("--steps", sim_steps, "number of uniform steps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    std::uint64_t sim_seed = 0;
    simulate->add_option("--seed", sim_seed, "RNG seed")->required();
    std::string sim_out;
    simulate->add_option("--out", sim_out, "trajectory CSV path")->required();
    bool sim_no_fsal = false;
    simulate->add_flag("--no-fsal", sim_no_fsal, "disable FSAL reuse");

    // region
    auto* region = app.add_subcommand(
        "region", "rasterize the mean-square stability region");
    TableauInput region_in;
    region_in.attach(region);
    double hhat_min = -8.0, hhat_max = 0.0, ksq_min = 0.0, ksq_max = 16.0;
    region->add_option("--hhat-min", hhat_min)->capture_default_str();
    region->add_option("--hhat-max", hhat_max)->capture_default_str();
    region->add_option("--ksq-min", ksq_min)->capture_default_str();
    region->add_option("--ksq-max", ksq_max)->capture_default_str();
    int res = 400;
    region->add_option("--res", res, "grid resolution per axis")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    std::string region_out;
    region->add_option("--out", region_out, "region CSV path")->required();

    // probe
    auto* probe = app.add_subcommand(
        "probe", "sample the test-equation stability domain for violations");
    TableauInput probe_in;
    probe_in.attach(probe);
    ProbeSampler sampler;
    probe->add_option("--ray-density", sampler.ray_density)
        ->capture_default_str();
    probe->add_option("--radial-density", sampler.radial_density)
        ->capture_default_str();
    probe->add_option("--complex-samples", sampler.complex_samples)
        ->capture_default_str();
    probe->add_option("--margin", sampler.margin)->capture_default_str();
    std::string probe_out = "-";
    probe->add_option("--out", probe_out, "report destination");

    // converge
    auto* converge = app.add_subcommand(
        "converge", "estimate the empirical strong convergence order");
    TableauInput conv_in;
    conv_in.attach(converge);
    ProblemFlags conv_problem;
    conv_problem.attach(converge);
    int conv_paths = 2000;
    converge->add_option("--paths", conv_paths, "Monte Carlo paths")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    std::uint64_t conv_seed = 0;
    converge->add_option("--seed", conv_seed, "RNG seed")->required();
    int hexp_coarse = 4, hexp_fine = 9;
    converge->add_option("--hexp-coarse", hexp_coarse,
                         "coarsest step: horizon * 2^-e")
        ->capture_default_str();
    converge->add_option("--hexp-fine", hexp_fine,
                         "finest step: horizon * 2^-e")
        ->capture_default_str();
    std::string conv_out;
    converge->add_option("--out", conv_out, "study CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        nlohmann::json err{{"error", "bad_arguments"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }

    if (verify->parsed()) {
        const SrkTableau t = verify_in.load();
        const double tol = verification_tolerance(verify_tol);
        const StrongOrder requested =
            verify_order == "0.5" ? StrongOrder::half : StrongOrder::one;
        const OrderReport report = order_residuals(t, requested);
        const EffectiveOrder eo = effective_order(t, tol);

        nlohmann::json j = order_report_to_json(report);
        j["effective_order"] = order_class_name(eo.order);
        j["tolerance"] = tol;
        write_text(verify_out, j.dump(2) + "\n");

        const bool met = requested == StrongOrder::half
                             ? (eo.half_ok || eo.one_ok)
                             : eo.one_ok;
        if (!met) {
            nlohmann::json err{{"error", "order_not_met"},
                               {"message",
                                std::string("tableau does not satisfy the "
                                            "order ") +
                                    verify_order + " conditions at " +
                                    std::to_string(tol)},
                               {"max_residual", report.max_residual}};
            std::cerr << err.dump() << "\n";
            return 1;
        }
        return 0;
    }

    if (family->parsed()) {
        const FamilySpec spec =
            family_spec_from_json(read_json(family_spec_path));
        const SrkTableau t = make_tableau(spec);
        write_text(family_out, tableau_to_json(t).dump(2) + "\n");
        return 0;
    }

    if (simulate->parsed()) {
        const SrkTableau t = sim_in.load();
        const StudyProblem sp = sim_problem.study();
        NoiseStream stream(sim_seed);
        NewtonConfig cfg;
        const Trajectory traj = simulate_path(sp.problem, t, sim_steps, stream,
                                              cfg, !sim_no_fsal);
        std::ostringstream csv;
        write_trajectory_csv(csv, traj);
        write_text(sim_out, csv.str());
        write_text(sidecar_path(sim_out, ".stats.json"),
                   stats_to_json(traj.totals()).dump(2) + "\n");
        return 0;
    }

    if (region->parsed()) {
        const SrkTableau t = region_in.load();
        const StabilityGrid grid = region_grid(
            t, {hhat_min, hhat_max}, {ksq_min, ksq_max}, {res, res});
        std::ostringstream csv;
        write_region_csv(csv, grid);
        write_text(region_out, csv.str());
        return 0;
    }

    if (probe->parsed()) {
        const SrkTableau t = probe_in.load();
        const ProbeReport report = a_stability_probe(t, sampler);
        write_text(probe_out, probe_report_to_json(report).dump(2) + "\n");
        if (!report.pass) {
            nlohmann::json err{{"error", "not_a_stable"},
                               {"message",
                                "sampling found a point inside the SDE "
                                "stability domain with mean-square gain >= 1"},
                               {"gain", report.max_gain}};
            std::cerr << err.dump() << "\n";
            return 1;
        }
        return 0;
    }

    if (converge->parsed()) {
        const SrkTableau t = conv_in.load();
        const StudyProblem sp = conv_problem.study();
        const std::vector<double> h_list =
            dyadic_h_list(sp.problem.T - sp.problem.t0, hexp_coarse, hexp_fine);
        const ConvergenceStudy study =
            strong_order_estimate(sp, t, h_list, conv_paths, conv_seed);
        std::ostringstream csv;
        write_study_csv(csv, study);
        write_text(conv_out, csv.str());
        write_text(sidecar_path(conv_out, ".summary.json"),
                   study_summary_json(study).dump(2) + "\n");
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sdaerk::Error& e) {
        nlohmann::json err{{"error", e.code()}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return e.kind() == sdaerk::ErrorKind::validation ? 2 : 1;
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
