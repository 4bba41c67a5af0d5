#include "sdaerk/stability.hpp"

#include "sdaerk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

namespace sdaerk {

namespace {

constexpr double kCoeffTruncation = 1e-15;

std::vector<Complex> truncate(std::vector<Complex> c) {
    double maxmag = 0.0;
    for (const Complex& v : c) maxmag = std::max(maxmag, std::abs(v));
    if (maxmag > 0.0)
        for (Complex& v : c)
            if (std::abs(v) < kCoeffTruncation * maxmag) v = 0.0;
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    return c;
}

double param(const Params& p, const char* name, const char* scheme) {
    const auto it = p.find(name);
    if (it == p.end())
        throw ParameterRegime(std::string(scheme) + " requires parameter '" +
                              name + "'");
    return it->second;
}

void check_params(const Params& p, std::initializer_list<const char*> names,
                  const char* scheme) {
    for (const auto& [key, _] : p) {
        if (std::find_if(names.begin(), names.end(), [&key](const char* n) {
                return key == n;
            }) == names.end())
            throw ParameterRegime("parameter '" + key +
                                  "' does not belong to scheme " + scheme);
    }
}

} // namespace

XiPolynomial::XiPolynomial(std::vector<Complex> coeffs)
    : coeffs_(truncate(std::move(coeffs))) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Complex XiPolynomial::coeff(int j) const {
    if (j < 0 || j > degree()) return 0.0;
    return coeffs_[static_cast<std::size_t>(j)];
}

Complex XiPolynomial::eval(Complex xi) const {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * xi + *it;
    return acc;
}

double gaussian_moment(int n) {
    if (n < 0) throw BadRange("moment order must be nonnegative");
    if (n % 2 == 1) return 0.0;
    double m = 1.0; // (n-1)!! for even n
    for (int k = n - 1; k >= 1; k -= 2) m *= static_cast<double>(k);
    return m;
}

bool sde_ms_stable(Complex lambda, Complex mu) {
    return 2.0 * lambda.real() + std::norm(mu) < 0.0;
}

XiPolynomial response_polynomial(const SrkTableau& t, const TestPoint& pt) {
    const StructureReport sr = validate_structure(t);
    if (!sr.ok())
        throw StructureViolation(
            "tableau must be diagonally implicit and noise explicit");

    const int s = t.stages();
    const Complex hhat = pt.hhat, k = pt.k;

    // H_i as polynomial coefficients in xi
    std::vector<std::vector<Complex>> H(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) {
        const Complex den = 1.0 - hhat * t.A()(i, i) - k * t.B(3)(i, i);
        const double den_scale = 1.0 + std::abs(hhat * t.A()(i, i)) +
                                 std::abs(k * t.B(3)(i, i));
        if (std::abs(den) <= 1e-14 * den_scale) throw StageSingular(i);

        std::vector<Complex> rhs{1.0};
        for (int j = 0; j < i; ++j) {
            // factor (hhat A_ij + k (xi B1_ij + (xi^2-1)/2 B2_ij + B3_ij))
            const Complex f0 = hhat * t.A()(i, j) +
                               k * (t.B(3)(i, j) - 0.5 * t.B(2)(i, j));
            const Complex f1 = k * t.B(1)(i, j);
            const Complex f2 = k * 0.5 * t.B(2)(i, j);
            if (f0 == 0.0 && f1 == 0.0 && f2 == 0.0) continue;

            const auto& hj = H[static_cast<std::size_t>(j)];
            if (rhs.size() < hj.size() + 2) rhs.resize(hj.size() + 2, 0.0);
            for (std::size_t d = 0; d < hj.size(); ++d) {
                rhs[d] += f0 * hj[d];
                rhs[d + 1] += f1 * hj[d];
                rhs[d + 2] += f2 * hj[d];
            }
        }
        for (Complex& c : rhs) c /= den;
        while (rhs.size() > 1 && rhs.back() == 0.0) rhs.pop_back();
        H[static_cast<std::size_t>(i)] = std::move(rhs);
    }
    return XiPolynomial(std::move(H[static_cast<std::size_t>(s - 1)]));
}

double ms_gain(const XiPolynomial& p) {
    const int d = p.degree();
    double gain = 0.0;
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
            if ((i + j) % 2 == 1) continue;
            gain += (p.coeff(i) * std::conj(p.coeff(j))).real() *
                    gaussian_moment(i + j);
        }
    return gain;
}

double ms_gain(const SrkTableau& t, const TestPoint& pt) {
    return ms_gain(response_polynomial(t, pt));
}

double closed_form_gain(ClosedFormScheme scheme, const Params& params,
                        const TestPoint& pt) {
    const Complex h = pt.hhat;
    const Complex k = pt.k;
    const double k2 = std::norm(k);
    const double k4 = k2 * k2;

    switch (scheme) {
        case ClosedFormScheme::eff05_diag: {
            check_params(params, {"a1"}, "eff05_diag");
            const double a1 = param(params, "a1", "eff05_diag");
            const double na1 = std::norm(1.0 - a1 * h);
            return (na1 + k2) / (std::norm(1.0 - h) * na1);
        }
        case ClosedFormScheme::eff05_general: {
            check_params(params, {"a1", "a2"}, "eff05_general");
            const double a1 = param(params, "a1", "eff05_general");
            const double a2 = param(params, "a2", "eff05_general");
            const double num = std::norm(1.0 + (a2 - a1) * h) + k2;
            const double den =
                std::norm(1.0 - (1.0 - a2) * h) * std::norm(1.0 - a1 * h);
            return num / den;
        }
        case ClosedFormScheme::eff_ii_diag: {
            check_params(params, {"a"}, "eff_ii_diag");
            const double a = param(params, "a", "eff_ii_diag");
            const double na = std::norm(a * h - 1.0);
            const double num = na * na + 0.5 * k4 + k2 * na;
            const double den = na * na * std::norm(h - 1.0);
            return num / den;
        }
        case ClosedFormScheme::eff_ii_expl1: {
            check_params(params, {"a2", "a3"}, "eff_ii_expl1");
            const double a2 = param(params, "a2", "eff_ii_expl1");
            const double a3 = param(params, "a3", "eff_ii_expl1");
            const double n2 = std::norm(a2 * h - 1.0);
            const double n3 = std::norm(a3 * h - 1.0);
            const double inner = k2 + std::norm(h) * (1.0 - a3) * (1.0 - a3) +
                                 2.0 * h.real() * (1.0 - a3) + 1.0;
            return (0.5 * k4 + n2 * inner) / (n2 * n3);
        }
        case ClosedFormScheme::eff_x_expl1: {
            check_params(params, {"a2", "a3", "a4", "b"}, "eff_x_expl1");
            const double a2 = param(params, "a2", "eff_x_expl1");
            const double a3 = param(params, "a3", "eff_x_expl1");
            const double a4 = param(params, "a4", "eff_x_expl1");
            const double b = param(params, "b", "eff_x_expl1");
            if (b == 0.0) throw ParameterRegime("eff_x_expl1 requires b != 0");
            const double n2 = std::norm(a2 * h - 1.0);
            const double n3 = std::norm(a3 * h - 1.0);
            const double inner = k2 + std::norm(h) * (1.0 - 2.0 * a3) +
                                 2.0 * h.real() + std::norm(1.0 - a3 * h);
            const double cross =
                (k2 / (2.0 * b)) * (a2 + a4) *
                    (std::conj(k) * h + k * std::conj(h)).real() +
                (k2 * std::norm(h) / (2.0 * b * b)) * (a2 + a4) * (a2 + a4);
            return (0.5 * k4 + n2 * inner + cross) / (n2 * n3);
        }
    }
    throw ParameterRegime("unknown closed-form scheme");
}

const char* closed_form_name(ClosedFormScheme scheme) {
    switch (scheme) {
        case ClosedFormScheme::eff05_diag: return "eff05_diag";
        case ClosedFormScheme::eff05_general: return "eff05_general";
        case ClosedFormScheme::eff_ii_diag: return "eff_ii_diag";
        case ClosedFormScheme::eff_ii_expl1: return "eff_ii_expl1";
        case ClosedFormScheme::eff_x_expl1: return "eff_x_expl1";
    }
    return "?";
}

ClosedFormScheme closed_form_from_name(std::string_view name) {
    for (ClosedFormScheme s :
         {ClosedFormScheme::eff05_diag, ClosedFormScheme::eff05_general,
          ClosedFormScheme::eff_ii_diag, ClosedFormScheme::eff_ii_expl1,
          ClosedFormScheme::eff_x_expl1})
        if (name == closed_form_name(s)) return s;
    throw ParameterRegime("unknown closed-form scheme '" + std::string(name) +
                          "'");
}

StabilityGrid region_grid(const SrkTableau& t,
                          std::pair<double, double> hhat_range,
                          std::pair<double, double> ksq_range,
                          std::pair<int, int> resolution) {
    if (!(hhat_range.first < hhat_range.second))
        throw BadRange("hhat range must be increasing");
    if (!(ksq_range.first < ksq_range.second) || ksq_range.first < 0.0)
        throw BadRange("ksq range must be increasing and nonnegative");
    if (resolution.first < 2 || resolution.second < 2)
        throw BadRange("resolution must be at least 2 per axis");

    StabilityGrid grid;
    const int nh = resolution.first, nk = resolution.second;
    grid.hhat_axis.resize(static_cast<std::size_t>(nh));
    grid.ksq_axis.resize(static_cast<std::size_t>(nk));
    for (int i = 0; i < nh; ++i)
        grid.hhat_axis[static_cast<std::size_t>(i)] =
            hhat_range.first + (hhat_range.second - hhat_range.first) * i /
                                   (nh - 1);
    for (int j = 0; j < nk; ++j)
        grid.ksq_axis[static_cast<std::size_t>(j)] =
            ksq_range.first + (ksq_range.second - ksq_range.first) * j /
                                  (nk - 1);

    grid.gain.assign(static_cast<std::size_t>(nh),
                     std::vector<double>(static_cast<std::size_t>(nk), 0.0));
    grid.stable_mask.assign(
        static_cast<std::size_t>(nh),
        std::vector<bool>(static_cast<std::size_t>(nk), false));

    for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nk; ++j) {
            TestPoint pt;
            pt.hhat = grid.hhat_axis[static_cast<std::size_t>(i)];
            pt.k = std::sqrt(grid.ksq_axis[static_cast<std::size_t>(j)]);
            double g;
            try {
                g = ms_gain(t, pt);
            } catch (const StageSingular&) {
                g = std::numeric_limits<double>::infinity();
            }
            grid.gain[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g;
            grid.stable_mask[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(j)] = g < 1.0;
        }
    return grid;
}

void write_region_csv(std::ostream& os, const StabilityGrid& grid) {
    os << "hhat,ksq,gain,stable\n";
    char buf[32];
    for (std::size_t i = 0; i < grid.hhat_axis.size(); ++i)
        for (std::size_t j = 0; j < grid.ksq_axis.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", grid.hhat_axis[i]);
            os << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", grid.ksq_axis[j]);
            os << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", grid.gain[i][j]);
            os << buf << ',' << (grid.stable_mask[i][j] ? 1 : 0) << "\n";
        }
}

namespace {

struct ProbeState {
    ProbeReport report;
    bool done = false;
};

// gain at a point strictly inside D_SDE; records and flags violations.
// Samples that coincide with a stage-denominator pole carry no finite gain
// and are skipped; their neighborhoods surface real violations anyway.
void probe_point(const SrkTableau& t, const TestPoint& pt, bool complex_family,
                 ProbeState& st) {
    if (st.done) return;
    double g;
    try {
        g = ms_gain(t, pt);
    } catch (const StageSingular&) {
        ++st.report.skipped_singular;
        return;
    }
    ++st.report.samples;
    if (complex_family) {
        if (g > st.report.max_gain_complex) {
            st.report.max_gain_complex = g;
            st.report.worst_complex = pt;
        }
    } else {
        if (g > st.report.max_gain_real) {
            st.report.max_gain_real = g;
            st.report.worst_real = pt;
        }
    }
    if (g > st.report.max_gain) {
        st.report.max_gain = g;
        st.report.worst_point = pt;
    }
    if (g >= 1.0) {
        st.report.pass = false;
        st.report.max_gain = g;
        st.report.worst_point = pt;
        st.done = true; // first violation wins
    }
}

} // namespace

ProbeReport a_stability_probe(const SrkTableau& t,
                              const ProbeSampler& sampler) {
    if (sampler.ray_density < 16 || sampler.radial_density < 16)
        throw BadRange("probe densities must be at least 16");
    if (!(sampler.margin > 0.0) || !(sampler.margin < 1.0))
        throw BadRange("probe margin must lie in (0, 1)");

    ProbeState st;

    // boundary-ray fractions: 1 - theta log-spaced from 1e-3 down to margin,
    // concentrating samples near the boundary theta -> 1
    std::vector<double> thetas(static_cast<std::size_t>(sampler.ray_density));
    {
        const double lo = std::log(1e-3);
        const double hi = std::log(1.0 - sampler.margin);
        const int n = sampler.ray_density;
        for (int i = 0; i < n; ++i) {
            const double f = std::exp(lo + (hi - lo) * i / (n - 1));
            thetas[static_cast<std::size_t>(i)] = 1.0 - f;
        }
    }

    // radii run from large to small, so the first violation reported is the
    // outermost one along the boundary rays
    std::vector<double> radii(static_cast<std::size_t>(sampler.radial_density));
    {
        const double lo = std::log10(1e-4), hi = std::log10(1e3);
        const int n = sampler.radial_density;
        for (int i = 0; i < n; ++i)
            radii[static_cast<std::size_t>(i)] =
                std::pow(10.0, hi - (hi - lo) * i / (n - 1));
    }

    // real rays: hhat = -r, k = sqrt(theta * 2r)
    for (double r : radii) {
        for (double theta : thetas) {
            TestPoint pt;
            pt.hhat = -r;
            pt.k = std::sqrt(2.0 * r * theta);
            probe_point(t, pt, /*complex_family=*/false, st);
            if (st.done) return st.report;
        }
    }

    // complex perturbations: hhat = -r e^{i phi}, |k|^2 = theta * 2 r cos(phi),
    // k carries a phase of its own
    {
        const double phis[] = {std::numbers::pi / 16, -std::numbers::pi / 16,
                               std::numbers::pi / 8,  -std::numbers::pi / 8,
                               std::numbers::pi / 4,  -std::numbers::pi / 4,
                               3 * std::numbers::pi / 8, -3 * std::numbers::pi / 8};
        const double kphis[] = {0.0, std::numbers::pi / 4,
                                std::numbers::pi / 2, std::numbers::pi};
        const double cthetas[] = {0.1, 0.5, 0.9, 1.0 - sampler.margin};
        const int n = sampler.complex_samples;
        const double lo = std::log10(1e-3), hi = std::log10(1e2);
        for (int i = 0; i < n; ++i) {
            const double r = std::pow(10.0, lo + (hi - lo) * i / std::max(1, n - 1));
            const double phi = phis[i % 8];
            const double kphi = kphis[(i / 8) % 4];
            const double theta = cthetas[(i / 32) % 4];
            TestPoint pt;
            pt.hhat = Complex(-r * std::cos(phi), r * std::sin(phi));
            const double kmag = std::sqrt(2.0 * r * std::cos(phi) * theta);
            pt.k = kmag * Complex(std::cos(kphi), std::sin(kphi));
            probe_point(t, pt, /*complex_family=*/true, st);
            if (st.done) return st.report;
        }
    }

    return st.report;
}

nlohmann::json probe_report_to_json(const ProbeReport& r) {
    const auto point_json = [](const TestPoint& pt) {
        return nlohmann::json{{"hhat_re", pt.hhat.real()},
                              {"hhat_im", pt.hhat.imag()},
                              {"k_re", pt.k.real()},
                              {"k_im", pt.k.imag()}};
    };
    nlohmann::json j;
    j["verdict"] = r.pass ? "pass" : "counterexample";
    j["max_gain"] = r.max_gain;
    j["worst_point"] = point_json(r.worst_point);
    j["samples"] = r.samples;
    j["skipped_singular"] = r.skipped_singular;
    j["real"] = {{"max_gain", r.max_gain_real},
                 {"worst_point", point_json(r.worst_real)}};
    j["complex"] = {{"max_gain", r.max_gain_complex},
                    {"worst_point", point_json(r.worst_complex)}};
    return j;
}

} // namespace sdaerk
