#include "sdaerk/families.hpp"

#include "sdaerk/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>

namespace sdaerk {

namespace {

constexpr double kDenominatorFloor = 1e-14;

// Pulls exactly the declared parameter names out of a Params map.
class ParamReader {
public:
    ParamReader(const Params& params, std::initializer_list<const char*> names,
                const char* family) {
        for (const auto& [key, value] : params) {
            if (std::find_if(names.begin(), names.end(), [&key](const char* n) {
                    return key == n;
                }) == names.end()) {
                throw UnknownParameter("parameter '" + key +
                                       "' is not a free coefficient of " +
                                       family);
            }
            values_[key] = value;
        }
        for (const char* n : names) {
            if (!values_.count(n))
                throw MissingParameter(std::string(family) +
                                       " requires parameter '" + n + "'");
        }
    }

    double operator[](const char* name) const { return values_.at(name); }

private:
    std::map<std::string, double, std::less<>> values_;
};

double require_nonzero(double v, const char* coefficient) {
    if (std::abs(v) <= kDenominatorFloor) throw ZeroDenominator(coefficient);
    return v;
}

Eigen::MatrixXd zeros(int s) { return Eigen::MatrixXd::Zero(s, s); }

double sign_of(Sign s) { return s == Sign::upper ? 1.0 : -1.0; }

SrkTableau class_h05_i(const Params& params) {
    const ParamReader p(params, {"A11", "A21", "B11_3"}, "H05_I");
    Eigen::MatrixXd A = zeros(2), B1 = zeros(2), B2 = zeros(2), B3 = zeros(2);
    A(0, 0) = p["A11"];
    A(1, 0) = p["A21"];
    A(1, 1) = 1.0 - p["A21"];
    B1(1, 0) = 1.0;
    B3(0, 0) = p["B11_3"];
    return {A, B1, B2, B3};
}

SrkTableau class_h05_ii(const Params& params) {
    const ParamReader p(params, {"A11", "A21", "B21_3"}, "H05_II");
    Eigen::MatrixXd A = zeros(2), B1 = zeros(2), B2 = zeros(2), B3 = zeros(2);
    A(0, 0) = p["A11"];
    A(1, 0) = p["A21"];
    A(1, 1) = 1.0 - p["A21"];
    B1(1, 0) = 1.0;
    B3(1, 0) = p["B21_3"];
    B3(1, 1) = -p["B21_3"];
    return {A, B1, B2, B3};
}

SrkTableau class_o10_i(const Params& params) {
    const ParamReader p(params, {"A11", "A22", "A33", "B22_3", "B32_3"},
                        "O10_I");
    const double g = require_nonzero(p["B32_3"], "B32_3");
    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = (p["A11"] - 4.0 * p["A22"] * g * g + 4.0 * g * g - 1.0) /
              (4.0 * g * g);
    A(1, 1) = p["A22"];
    A(2, 0) = 1.0 - p["A33"];
    A(2, 2) = p["A33"];
    B1(1, 0) = 1.0;
    B1(2, 0) = 0.5;
    B1(2, 1) = 0.5;
    B3(1, 0) = -(1.0 + 2.0 * p["B22_3"] * g) / (2.0 * g);
    B3(1, 1) = p["B22_3"];
    B3(2, 0) = -1.0 / (4.0 * g);
    B3(2, 1) = g;
    B3(2, 2) = -(4.0 * g * g - 1.0) / (4.0 * g);
    return {A, B1, B2, B3};
}

SrkTableau class_o10_ii(const Params& params, Sign sign) {
    const ParamReader p(params, {"A11", "A22", "A33", "B22_3", "B32_3"},
                        "O10_II");
    const double g = require_nonzero(p["B32_3"], "B32_3");
    const double sg = sign_of(sign);
    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = p["A11"] - p["A22"];
    A(1, 1) = p["A22"];
    A(2, 0) = 1.0 - p["A33"];
    A(2, 2) = p["A33"];
    B1(1, 0) = sg / (2.0 * g);
    B1(2, 0) = 1.0 - sg * g;
    B1(2, 1) = sg * g;
    B3(1, 0) = -(1.0 + 2.0 * p["B22_3"] * g) / (2.0 * g);
    B3(1, 1) = p["B22_3"];
    B3(2, 0) = -g;
    B3(2, 1) = g;
    return {A, B1, B2, B3};
}

SrkTableau class_o10_iii(const Params& params) {
    const ParamReader p(params, {"A21", "A22", "A32", "B11_3"}, "O10_III");
    const double b = require_nonzero(p["B11_3"], "B11_3");
    const double b2 = b * b;
    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = 1.0; // fixed by the class
    A(1, 0) = p["A21"];
    A(1, 1) = p["A22"];
    A(2, 0) = -p["A32"] * (b2 - 1.0) / (2.0 * b2);
    A(2, 1) = p["A32"];
    A(2, 2) = -(p["A32"] * b2 - 2.0 * b2 + p["A32"]) / (2.0 * b2);
    B1(1, 0) = 0.5 * (b2 + 1.0) / (1.0 + 2.0 * b2);
    B1(2, 0) = -b2 / (b2 + 1.0);
    B1(2, 1) = (1.0 + 2.0 * b2) / (b2 + 1.0);
    B3(0, 0) = b;
    B3(1, 0) = (b2 - 1.0) / (2.0 * b);
    B3(2, 0) = -1.0 / (2.0 * b);
    B3(2, 2) = 1.0 / (2.0 * b);
    return {A, B1, B2, B3};
}

SrkTableau class_o10_iv(const Params& params, Sign sign) {
    const ParamReader p(params, {"A11", "A22", "A32", "B33_3"}, "O10_IV");
    const double w = require_nonzero(p["B33_3"], "B33_3");
    const double w2 = w * w;
    const double sg = sign_of(sign);
    const double s = std::sqrt(1.0 + 2.0 * w2);
    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = (2.0 * w2 - 2.0 * p["A22"] * w2 + 2.0 - p["A22"] - p["A11"]) /
              (1.0 + 2.0 * w2);
    A(1, 1) = p["A22"];
    A(2, 0) = p["A32"] / w2;
    A(2, 1) = p["A32"];
    A(2, 2) = (w2 - w2 * p["A32"] - p["A32"]) / w2;
    B1(1, 0) = sg * (1.0 + w2) / (w * s);
    B1(2, 0) = -0.5 * (sg * w * s - 2.0 - 2.0 * w2) / (1.0 + w2);
    B1(2, 1) = sg * 0.5 * w * s / (1.0 + w2);
    B3(0, 0) = -w;
    B3(1, 0) = 1.0 / w;
    B3(2, 0) = -0.5 * w / (1.0 + w2);
    B3(2, 1) = -0.5 * w * (1.0 + 2.0 * w2) / (1.0 + w2);
    B3(2, 2) = w;
    return {A, B1, B2, B3};
}

std::array<double, 5> class_v_quartic(double u, double w) {
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
    const double w2 = w * w, w3 = w2 * w, w4 = w3 * w;
    return {
        -4.0 * u3 * w3 - 2.0 * u3 * w + u4 * w + 4.0 * u4 * w3, // x^0
        4.0 * u2 * w4 + 4.0 * u3 * w2 - u2 - u2 * w2,           // x^1
        4.0 * u * w3 + 4.0 * u2 * w3 + 2.0 * u2 * w + 2.0 * u * w, // x^2
        4.0 * u * w2 + w2 + 1.0,                                // x^3
        w,                                                      // x^4
    };
}

SrkTableau class_o10_v(const Params& params, double constraint_tol) {
    const ParamReader p(params,
                        {"A11", "A22", "A32", "B32_1", "B32_3", "B33_3"},
                        "O10_V");
    const double u = require_nonzero(p["B32_1"], "B32_1");
    const double x = require_nonzero(p["B32_3"], "B32_3");
    const double w = require_nonzero(p["B33_3"], "B33_3");

    if (std::abs(x + u * w) <= 1e-12 * std::max(1.0, std::abs(u * w)))
        throw ConstraintViolated("B32_3 = -B32_1*B33_3 is excluded");

    const auto q = class_v_quartic(u, w);
    double value = 0.0, scale = 0.0;
    for (int i = 4; i >= 0; --i) {
        const double term = q[static_cast<std::size_t>(i)] * std::pow(x, i);
        value += term;
        scale += std::abs(term);
    }
    if (std::abs(value) > constraint_tol * std::max(1.0, scale))
        throw ConstraintViolated(
            "implicit order condition residual " + std::to_string(value) +
            " exceeds tolerance for (B32_1, B32_3, B33_3)");

    const double den1 = u * u - 2.0 * u * w * x - x * x;
    require_nonzero(den1, "a31 denominator (B32_1^2 - 2 B32_1 B33_3 B32_3 - B32_3^2)");
    const double den2 = u * (u * w + x);
    require_nonzero(den2, "b11_3 denominator B32_1*(B32_1 B33_3 + B32_3)");

    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = (-w + p["A11"] * w - p["A22"] * x + p["A11"] * x) / x;
    A(1, 1) = p["A22"];
    A(2, 0) = -((u * u - 2.0 * u * w * x - 2.0 * u * w * w - u - x * w -
                 x * x) *
                p["A32"]) /
              den1;
    A(2, 1) = p["A32"];
    A(2, 2) = -(-u * u + 2.0 * u * w * x + 2.0 * u * p["A32"] * w * w +
                p["A32"] * u + p["A32"] * w * x + x * x) /
              den1;
    B1(1, 0) = 1.0 / (2.0 * u);
    B1(2, 0) = 1.0 - u;
    B1(2, 1) = u;
    B3(0, 0) = 0.5 * den1 / den2;
    B3(1, 0) = 0.5 *
               (u * u - 2.0 * u * w * x - 2.0 * u * w * w - u - x * w - x * x) /
               den2;
    B3(2, 0) = -x - w;
    B3(2, 1) = x;
    B3(2, 2) = w;
    return {A, B1, B2, B3};
}

SrkTableau class_o10_vi(const Params& params, Sign sign) {
    const ParamReader p(params, {"A11", "A22", "A32", "B11_3", "B32_3"},
                        "O10_VI");
    const double b = p["B11_3"];
    const double g = require_nonzero(p["B32_3"], "B32_3");
    const double b2 = b * b, b3 = b2 * b, b4 = b3 * b;
    const double g2 = g * g;
    const double D = b4 * g2 + 2.0 * b2 * g2 + g2 + 4.0 * b3 * g - 2.0 * b2 -
                     4.0 * b4 + 4.0 * b * g - 2.0;
    if (D < 0.0) throw DiscriminantNegative(D);
    const double sd = sign_of(sign) * std::sqrt(D);
    const double P = b2 + 1.0;
    const double A11 = p["A11"], A22 = p["A22"], A32 = p["A32"];

    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = A11;
    A(1, 0) = -0.5 / (P * g) *
              (-A11 * g * b2 - A11 * g + 2.0 * A11 * b + A11 * sd +
               2.0 * A22 * g * b2 + 2.0 * A22 * g - 2.0 * b - b2 * g - g - sd);
    A(1, 1) = A22;
    A(2, 0) = 0.5 / (P * g) * (A32 * (-b2 * g - g + 2.0 * b + sd));
    A(2, 1) = A32;
    A(2, 2) = -0.5 / (P * g) *
              (-2.0 * b2 * g - 2.0 * g + 2.0 * b * A32 + A32 * b2 * g +
               A32 * g + A32 * sd);
    B1(1, 0) = 0.5 / (P * g) * (b2 * g + g - 2.0 * b3 + sd);
    B1(2, 0) = 1.0;
    B2(1, 0) = 1.0 / g;
    B3(0, 0) = b;
    B3(1, 0) = -0.5 / (P * g) * (b * (-b2 * g - g + 2.0 * b + sd));
    B3(2, 0) = 0.5 / P * (-b2 * g - g + 2.0 * b + sd);
    B3(2, 1) = g;
    B3(2, 2) = -0.5 / P * (2.0 * b + b2 * g + g + sd);
    return {A, B1, B2, B3};
}

SrkTableau class_o10_vii(const Params& params, Sign sign) {
    const ParamReader p(params, {"A11", "A22", "A32", "A33", "B22_3", "B21_1"},
                        "O10_VII");
    const double q = require_nonzero(p["B21_1"], "B21_1");
    const double radicand = 2.0 * q - 2.0 * q * q;
    if (radicand < 0.0)
        throw SqrtDomain("2*B21_1 - 2*B21_1^2 = " + std::to_string(radicand) +
                         " < 0");
    const double root = std::sqrt(radicand);
    require_nonzero(root, "b32_3 denominator sqrt(2*B21_1 - 2*B21_1^2)");
    const double sg = sign_of(sign);

    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = p["A11"] - p["A11"] * q - p["A22"] + q;
    A(1, 1) = p["A22"];
    A(2, 0) = 1.0 - p["A32"] - p["A33"];
    A(2, 1) = p["A32"];
    A(2, 2) = p["A33"];
    B1(1, 0) = q;
    B1(2, 0) = 1.0;
    B2(1, 0) = sg * root;
    B3(1, 0) = -p["B22_3"];
    B3(1, 1) = p["B22_3"];
    B3(2, 0) = -sg * (1.0 - q) / root;
    B3(2, 1) = sg / root;
    B3(2, 2) = -sg * q / root;
    return {A, B1, B2, B3};
}

SrkTableau class_o10_viii(const Params& params) {
    const ParamReader p(params,
                        {"A11", "A21", "A22", "A32", "B22_3", "B32_2", "B11_3"},
                        "O10_VIII");
    const double v = require_nonzero(p["B32_2"], "B32_2");
    const double b = require_nonzero(p["B11_3"], "B11_3");
    const double q = require_nonzero(v * b, "a31 denominator B32_2*B11_3");

    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = p["A21"];
    A(1, 1) = p["A22"];
    A(2, 0) = -p["A32"] * (1.0 + q) / q;
    A(2, 1) = p["A32"];
    A(2, 2) = (q + p["A32"]) / q;
    B1(2, 0) = 1.0 + q;
    B1(2, 1) = -q;
    B2(2, 0) = -v;
    B2(2, 1) = v;
    B3(0, 0) = b;
    B3(1, 0) = (1.0 + v * (b - p["B22_3"])) / v;
    B3(1, 1) = p["B22_3"];
    return {A, B1, B2, B3};
}

SrkTableau class_o10_ix(const Params& params) {
    const ParamReader p(params, {"A11", "A22", "A32", "B32_3", "B11_3"},
                        "O10_IX");
    const double b = require_nonzero(p["B11_3"], "B11_3");
    const double c = p["B32_3"];
    const double b2 = b * b, b3 = b2 * b;
    const double P = b2 + 1.0;

    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = (b2 - p["A22"] * b2 - p["A11"] + 1.0) / b2;
    A(1, 1) = p["A22"];
    A(2, 0) = p["A32"] / b2;
    A(2, 1) = p["A32"];
    A(2, 2) = (b2 - b2 * p["A32"] - p["A32"]) / b2;
    B1(2, 0) = (b + b2 * c + c) / (b * P);
    B1(2, 1) = (b3 - b2 * c - c) / (b * P);
    B2(2, 0) = b / P;
    B2(2, 1) = -b / P;
    B3(0, 0) = b;
    B3(1, 0) = -1.0 / b;
    B3(2, 0) = c / b2;
    B3(2, 1) = c;
    B3(2, 2) = -P * c / b2;
    return {A, B1, B2, B3};
}

SrkTableau class_o10_x(const Params& params) {
    const ParamReader p(params, {"A11", "A21", "A22", "A33", "B22_3", "B32_2"},
                        "O10_X");
    const double v = require_nonzero(p["B32_2"], "B32_2");

    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["A11"];
    A(1, 0) = p["A21"];
    A(1, 1) = p["A22"];
    A(2, 0) = 1.0 - p["A33"];
    A(2, 2) = p["A33"];
    B1(2, 0) = 1.0;
    B2(2, 0) = -v;
    B2(2, 1) = v;
    B3(1, 0) = (1.0 - v * p["B22_3"]) / v;
    B3(1, 1) = p["B22_3"];
    return {A, B1, B2, B3};
}

SrkTableau class_o10_xi(const Params& params) {
    const ParamReader p(params, {"A21", "A22", "A33", "B33_3"}, "O10_XI");
    const double w = require_nonzero(p["B33_3"], "B33_3");
    const double w2 = w * w, w4 = w2 * w2;
    require_nonzero(1.0 - 2.0 * w2, "a11 denominator (1 - 2*B33_3^2)");

    const double b32_3 = -(2.0 * w4 + 1.0) / (2.0 * w * (w2 + 1.0));
    const double radicand =
        -2.0 * w2 * w * b32_3 - 2.0 * b32_3 * w - 2.0 * w4;
    if (radicand < 0.0)
        throw SqrtDomain("b21_2 radicand " + std::to_string(radicand) + " < 0");

    const double A21 = p["A21"], A22 = p["A22"], A33 = p["A33"];
    const double a32 =
        -(2.0 * A33 * w4 - 2.0 * w4 - 1.0 + A33) / (2.0 * w2 * (w2 + 1.0));

    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = (2.0 * A21 * w4 + A21 + 2.0 * A22 * w4 + A22 - 2.0 * w4 -
               2.0 * w2) /
              (1.0 - 2.0 * w2);
    A(1, 0) = A21;
    A(1, 1) = A22;
    A(2, 0) = 1.0 - a32 - A33;
    A(2, 1) = a32;
    A(2, 2) = A33;
    B1(2, 0) = 1.0;
    B2(1, 0) = std::sqrt(radicand) / b32_3;
    B3(0, 0) = -w;
    B3(1, 0) = -(b32_3 * w + w2) / b32_3;
    B3(2, 0) = -b32_3 - w;
    B3(2, 1) = b32_3;
    B3(2, 2) = w;
    return {A, B1, B2, B3};
}

SrkTableau eff_05(const Params& params) {
    const ParamReader p(params, {"a1", "a2"}, "EFF_05");
    Eigen::MatrixXd A = zeros(2), B1 = zeros(2), B2 = zeros(2), B3 = zeros(2);
    A(0, 0) = p["a1"];
    A(1, 0) = p["a2"];
    A(1, 1) = 1.0 - p["a2"];
    B1(1, 0) = 1.0;
    return {A, B1, B2, B3};
}

SrkTableau eff_ii(const Params& params, Sign sign) {
    const ParamReader p(params, {"a1", "a2", "a3", "b"}, "EFF_II");
    const double b = require_nonzero(p["b"], "b");
    const double sg = sign_of(sign);
    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["a1"];
    A(1, 0) = p["a1"] - p["a2"];
    A(1, 1) = p["a2"];
    A(2, 0) = 1.0 - p["a3"];
    A(2, 2) = p["a3"];
    B1(1, 0) = b;
    B1(2, 0) = 1.0 - 1.0 / (2.0 * b);
    B1(2, 1) = 1.0 / (2.0 * b);
    B3(1, 0) = -sg * b;
    B3(2, 0) = -sg / (2.0 * b);
    B3(2, 1) = sg / (2.0 * b);
    return {A, B1, B2, B3};
}

SrkTableau eff_x(const Params& params) {
    const ParamReader p(params, {"a1", "a2", "a3", "a4", "b"}, "EFF_X");
    const double b = require_nonzero(p["b"], "b");
    Eigen::MatrixXd A = zeros(3), B1 = zeros(3), B2 = zeros(3), B3 = zeros(3);
    A(0, 0) = p["a1"];
    A(1, 0) = p["a4"];
    A(1, 1) = p["a2"];
    A(2, 0) = 1.0 - p["a3"];
    A(2, 2) = p["a3"];
    B1(2, 0) = 1.0;
    B2(2, 0) = -1.0 / b;
    B2(2, 1) = 1.0 / b;
    B3(1, 0) = b;
    return {A, B1, B2, B3};
}

} // namespace

SrkTableau make_order_half(FamilyId variant, const Params& params, Sign) {
    switch (variant) {
        case FamilyId::H05_I: return class_h05_i(params);
        case FamilyId::H05_II: return class_h05_ii(params);
        default:
            throw UnknownParameter(std::string(family_name(variant)) +
                                   " is not an order-0.5 class");
    }
}

SrkTableau make_order_one(FamilyId class_id, const Params& params, Sign sign,
                          double constraint_tol) {
    switch (class_id) {
        case FamilyId::O10_I: return class_o10_i(params);
        case FamilyId::O10_II: return class_o10_ii(params, sign);
        case FamilyId::O10_III: return class_o10_iii(params);
        case FamilyId::O10_IV: return class_o10_iv(params, sign);
        case FamilyId::O10_V: return class_o10_v(params, constraint_tol);
        case FamilyId::O10_VI: return class_o10_vi(params, sign);
        case FamilyId::O10_VII: return class_o10_vii(params, sign);
        case FamilyId::O10_VIII: return class_o10_viii(params);
        case FamilyId::O10_IX: return class_o10_ix(params);
        case FamilyId::O10_X: return class_o10_x(params);
        case FamilyId::O10_XI: return class_o10_xi(params);
        default:
            throw UnknownParameter(std::string(family_name(class_id)) +
                                   " is not an order-1.0 class");
    }
}

SrkTableau make_efficient(FamilyId scheme, const Params& params, Sign sign) {
    switch (scheme) {
        case FamilyId::EFF_05: return eff_05(params);
        case FamilyId::EFF_II: return eff_ii(params, sign);
        case FamilyId::EFF_X: return eff_x(params);
        default:
            throw UnknownParameter(std::string(family_name(scheme)) +
                                   " is not an efficient scheme");
    }
}

SrkTableau make_tableau(const FamilySpec& spec) {
    switch (spec.family) {
        case FamilyId::H05_I:
        case FamilyId::H05_II:
            return make_order_half(spec.family, spec.params, spec.sign);
        case FamilyId::EFF_05:
        case FamilyId::EFF_II:
        case FamilyId::EFF_X:
            return make_efficient(spec.family, spec.params, spec.sign);
        default:
            return make_order_one(spec.family, spec.params, spec.sign);
    }
}

double class_v_constraint(double B32_1, double B32_3, double B33_3) {
    const auto q = class_v_quartic(B32_1, B33_3);
    double value = 0.0;
    for (int i = 4; i >= 0; --i)
        value = value * B32_3 + q[static_cast<std::size_t>(i)];
    return value;
}

std::vector<double> class_v_solve(double B32_1, double B33_3,
                                  const RootSearch& search) {
    if (std::abs(B32_1) <= kDenominatorFloor)
        throw ZeroDenominator("B32_1");
    if (std::abs(B33_3) <= kDenominatorFloor)
        throw ZeroDenominator("B33_3");
    if (!(search.lo < search.hi) || !std::isfinite(search.lo) ||
        !std::isfinite(search.hi))
        throw BadRange("class V search interval must be finite and nonempty");
    if (!(search.scan_step > 0.0) || !(search.tol > 0.0))
        throw BadRange("class V scan step and tolerance must be positive");

    const auto f = [&](double x) {
        return class_v_constraint(B32_1, x, B33_3);
    };
    const auto q = class_v_quartic(B32_1, B33_3);
    const auto df = [&q](double x) {
        return ((4.0 * q[4] * x + 3.0 * q[3]) * x + 2.0 * q[2]) * x + q[1];
    };
    const auto polish = [&](double r) {
        for (int i = 0; i < 4; ++i) {
            const double d = df(r);
            if (d == 0.0) break;
            r -= f(r) / d;
        }
        return r;
    };

    std::vector<double> roots;
    auto push_root = [&](double r) {
        r = polish(r);
        if (std::abs(f(r)) > search.tol) return;
        // the class excludes x = 0 and x = -B32_1*B33_3 (always a quartic root)
        if (std::abs(r) <= 1e-12) return;
        const double excluded = -B32_1 * B33_3;
        if (std::abs(r - excluded) <= 1e-12 * std::max(1.0, std::abs(excluded)))
            return;
        for (double seen : roots)
            if (std::abs(seen - r) <= 1e-10 * std::max(1.0, std::abs(r))) return;
        roots.push_back(r);
    };

    double a = search.lo;
    double fa = f(a);
    while (a < search.hi) {
        const double b = std::min(a + search.scan_step, search.hi);
        const double fb = f(b);
        if (fa == 0.0) {
            push_root(a);
        } else if (fa * fb < 0.0) {
            // bisection to 1e-14 on the bracket
            double lo = a, hi = b, flo = fa;
            for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            push_root(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0) push_root(search.hi);

    std::sort(roots.begin(), roots.end());
    return roots;
}

const char* family_name(FamilyId id) {
    switch (id) {
        case FamilyId::H05_I: return "H05_I";
        case FamilyId::H05_II: return "H05_II";
        case FamilyId::O10_I: return "O10_I";
        case FamilyId::O10_II: return "O10_II";
        case FamilyId::O10_III: return "O10_III";
        case FamilyId::O10_IV: return "O10_IV";
        case FamilyId::O10_V: return "O10_V";
        case FamilyId::O10_VI: return "O10_VI";
        case FamilyId::O10_VII: return "O10_VII";
        case FamilyId::O10_VIII: return "O10_VIII";
        case FamilyId::O10_IX: return "O10_IX";
        case FamilyId::O10_X: return "O10_X";
        case FamilyId::O10_XI: return "O10_XI";
        case FamilyId::EFF_05: return "EFF_05";
        case FamilyId::EFF_II: return "EFF_II";
        case FamilyId::EFF_X: return "EFF_X";
    }
    return "?";
}

FamilyId family_from_name(std::string_view name) {
    for (FamilyId id : all_families())
        if (name == family_name(id)) return id;
    throw UnknownParameter("unknown family '" + std::string(name) + "'");
}

StrongOrder advertised_order(FamilyId id) {
    switch (id) {
        case FamilyId::H05_I:
        case FamilyId::H05_II:
        case FamilyId::EFF_05: return StrongOrder::half;
        default: return StrongOrder::one;
    }
}

FamilySpec default_spec(FamilyId id) {
    switch (id) {
        case FamilyId::H05_I:
            return {id, {{"A11", 0.0}, {"A21", 0.0}, {"B11_3", 0.0}}};
        case FamilyId::H05_II:
            return {id, {{"A11", 0.0}, {"A21", 0.0}, {"B21_3", 0.5}}};
        case FamilyId::O10_I:
            return {id, {{"A11", 0.0}, {"A22", 0.0}, {"A33", 0.0},
                         {"B22_3", 0.0}, {"B32_3", 1.0}}};
        case FamilyId::O10_II:
            return {id, {{"A11", 0.0}, {"A22", 0.0}, {"A33", 0.0},
                         {"B22_3", 0.0}, {"B32_3", 1.0}}};
        case FamilyId::O10_III:
            return {id, {{"A21", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                         {"B11_3", 1.0}}};
        case FamilyId::O10_IV:
            return {id, {{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                         {"B33_3", 1.0}}};
        case FamilyId::O10_V: {
            // the single admissible root of the implicit equation at
            // B32_1 = B33_3 = 1
            const auto roots = class_v_solve(1.0, 1.0);
            return {id, {{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                         {"B32_1", 1.0}, {"B32_3", roots.at(0)},
                         {"B33_3", 1.0}}};
        }
        case FamilyId::O10_VI:
            return {id, {{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                         {"B11_3", 0.0}, {"B32_3", 2.0}}};
        case FamilyId::O10_VII:
            return {id, {{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                         {"A33", 0.0}, {"B22_3", 0.0}, {"B21_1", 0.5}}};
        case FamilyId::O10_VIII:
            return {id, {{"A11", 0.0}, {"A21", 0.0}, {"A22", 0.0},
                         {"A32", 0.0}, {"B22_3", 0.0}, {"B32_2", 1.0},
                         {"B11_3", 1.0}}};
        case FamilyId::O10_IX:
            return {id, {{"A11", 0.0}, {"A22", 0.0}, {"A32", 0.0},
                         {"B32_3", 1.0}, {"B11_3", 1.0}}};
        case FamilyId::O10_X:
            return {id, {{"A11", 0.0}, {"A21", 0.0}, {"A22", 0.0},
                         {"A33", 1.0}, {"B22_3", 0.0}, {"B32_2", 1.0}}};
        case FamilyId::O10_XI:
            return {id, {{"A21", 0.0}, {"A22", 0.0}, {"A33", 0.0},
                         {"B33_3", 1.0}}};
        case FamilyId::EFF_05:
            return {id, {{"a1", 1.0}, {"a2", 0.0}}};
        case FamilyId::EFF_II:
            return {id, {{"a1", 1.0}, {"a2", 1.0}, {"a3", 1.0}, {"b", 1.0}}};
        case FamilyId::EFF_X:
            return {id, {{"a1", 1.0}, {"a2", 1.0}, {"a3", 1.0}, {"a4", 0.0},
                         {"b", 1.0}}};
    }
    throw UnknownParameter("unknown family id");
}

std::vector<FamilyId> all_classes() {
    return {FamilyId::H05_I,   FamilyId::H05_II, FamilyId::O10_I,
            FamilyId::O10_II,  FamilyId::O10_III, FamilyId::O10_IV,
            FamilyId::O10_V,   FamilyId::O10_VI, FamilyId::O10_VII,
            FamilyId::O10_VIII, FamilyId::O10_IX, FamilyId::O10_X,
            FamilyId::O10_XI};
}

std::vector<FamilyId> all_families() {
    auto v = all_classes();
    v.insert(v.end(), {FamilyId::EFF_05, FamilyId::EFF_II, FamilyId::EFF_X});
    return v;
}

} // namespace sdaerk
