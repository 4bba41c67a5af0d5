#pragma once

#include "sdaerk/families.hpp"
#include "sdaerk/tableau.hpp"

#include <json.hpp>

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

namespace sdaerk {

using Complex = std::complex<double>;

/// Point of the stability parametrization hhat = lambda*h, k = mu*sqrt(h).
struct TestPoint {
    Complex hhat{0.0, 0.0};
    Complex k{0.0, 0.0};
};

/// One-step response R_n(hhat, k) to the linear test equation, written as a
/// polynomial in the standard normal xi: coefficient 0 is Gamma, coefficient
/// j >= 1 is Sigma_j. Degree is at most 2(s-1) for a diagonally implicit
/// tableau with noise-explicit B1, B2.
class XiPolynomial {
public:
    explicit XiPolynomial(std::vector<Complex> coeffs);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    Complex coeff(int j) const;
    Complex eval(Complex xi) const;

private:
    std::vector<Complex> coeffs_;
};

/// E[xi^n] for xi ~ N(0,1): zero for odd n, (n-1)!! for even n.
double gaussian_moment(int n);

/// MS-stability of the test equation itself: 2 Re(lambda) + |mu|^2 < 0.
bool sde_ms_stable(Complex lambda, Complex mu);

/// Forward substitution of the stage system in exact polynomial arithmetic
/// over xi. Coefficients below 1e-15 of the largest magnitude are truncated.
XiPolynomial response_polynomial(const SrkTableau& t, const TestPoint& pt);

/// Mean-square gain E|p(xi)|^2 via the Gaussian even-moment table.
double ms_gain(const XiPolynomial& p);
double ms_gain(const SrkTableau& t, const TestPoint& pt);

/// Closed-form mean-square gains of the efficient scheme families.
/// eff05_diag:    params {a1}             (a2 = 0)
/// eff05_general: params {a1, a2}
/// eff_ii_diag:   params {a}              (a1 = a2 = a, a3 = 1)
/// eff_ii_expl1:  params {a2, a3}         (a1 = 0)
/// eff_x_expl1:   params {a2, a3, a4, b}  (a1 = 0)
enum class ClosedFormScheme {
    eff05_diag,
    eff05_general,
    eff_ii_diag,
    eff_ii_expl1,
    eff_x_expl1,
};

double closed_form_gain(ClosedFormScheme scheme, const Params& params,
                        const TestPoint& pt);

const char* closed_form_name(ClosedFormScheme scheme);
ClosedFormScheme closed_form_from_name(std::string_view name);

struct StabilityGrid {
    std::vector<double> hhat_axis;
    std::vector<double> ksq_axis;
    // row-major over (hhat, ksq); +inf marks stage singularities
    std::vector<std::vector<double>> gain;
    std::vector<std::vector<bool>> stable_mask; // gain < 1, strictly
};

StabilityGrid region_grid(const SrkTableau& t,
                          std::pair<double, double> hhat_range,
                          std::pair<double, double> ksq_range,
                          std::pair<int, int> resolution);

void write_region_csv(std::ostream& os, const StabilityGrid& grid);

struct ProbeSampler {
    int ray_density = 256;      // boundary-ray fractions theta
    int radial_density = 512;   // log-spaced |hhat| in [1e-4, 1e3]
    int complex_samples = 128;  // complex-phase perturbations
    double margin = 0.01;       // smallest theta sampled
};

/// Sampling probe of A-stability: walks points strictly inside the test
/// equation's MS-stability domain and hunts for ms_gain >= 1. A pass is a
/// sampling certificate, not a proof.
struct ProbeReport {
    bool pass = true;
    double max_gain = 0.0;   // max observed, or the counterexample's gain
    TestPoint worst_point{};
    long samples = 0;
    long skipped_singular = 0; // samples on stage-denominator poles
    double max_gain_real = 0.0;
    TestPoint worst_real{};
    double max_gain_complex = 0.0;
    TestPoint worst_complex{};
};

ProbeReport a_stability_probe(const SrkTableau& t,
                              const ProbeSampler& sampler = {});

nlohmann::json probe_report_to_json(const ProbeReport& r);

} // namespace sdaerk
