#include "sdaerk/json_io.hpp"

#include "sdaerk/errors.hpp"

#include <cmath>

namespace sdaerk {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int s,
                                 const char* name) {
    if (!j.is_array() || static_cast<int>(j.size()) != s)
        throw DimensionMismatch(std::string(name) + " must be an array of " +
                                std::to_string(s) + " rows");
    Eigen::MatrixXd m(s, s);
    for (int i = 0; i < s; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != s)
            throw DimensionMismatch(std::string(name) + " row " +
                                    std::to_string(i + 1) + " must have " +
                                    std::to_string(s) + " entries");
        for (int k = 0; k < s; ++k) {
            const auto& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number())
                throw DimensionMismatch(std::string(name) +
                                        " entries must be numbers");
            const double d = v.get<double>();
            if (!std::isfinite(d))
                throw DimensionMismatch(std::string(name) +
                                        " entries must be finite");
            m(i, k) = d;
        }
    }
    return m;
}

} // namespace

nlohmann::json tableau_to_json(const SrkTableau& t) {
    nlohmann::json j;
    j["s"] = t.stages();
    j["A"] = matrix_to_json(t.A());
    j["B1"] = matrix_to_json(t.B(1));
    j["B2"] = matrix_to_json(t.B(2));
    j["B3"] = matrix_to_json(t.B(3));
    nlohmann::json c = nlohmann::json::array();
    for (int i = 0; i < t.stages(); ++i) c.push_back(t.c()(i));
    j["c"] = std::move(c);
    return j;
}

SrkTableau tableau_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DimensionMismatch("tableau JSON must be an object");
    if (!j.contains("s") || !j["s"].is_number_integer())
        throw DimensionMismatch("tableau JSON needs an integer stage count s");
    const int s = j["s"].get<int>();
    if (s < 1) throw DimensionMismatch("stage count must be at least 1");
    for (const char* key : {"A", "B1", "B2", "B3"})
        if (!j.contains(key))
            throw DimensionMismatch(std::string("tableau JSON is missing ") +
                                    key);
    Eigen::MatrixXd A = matrix_from_json(j["A"], s, "A");
    Eigen::MatrixXd B1 = matrix_from_json(j["B1"], s, "B1");
    Eigen::MatrixXd B2 = matrix_from_json(j["B2"], s, "B2");
    Eigen::MatrixXd B3 = matrix_from_json(j["B3"], s, "B3");

    std::optional<Eigen::VectorXd> c;
    if (j.contains("c")) {
        const auto& jc = j["c"];
        if (!jc.is_array() || static_cast<int>(jc.size()) != s)
            throw DimensionMismatch("c must be an array of length " +
                                    std::to_string(s));
        Eigen::VectorXd v(s);
        for (int i = 0; i < s; ++i) {
            const auto& e = jc[static_cast<std::size_t>(i)];
            if (!e.is_number() || !std::isfinite(e.get<double>()))
                throw DimensionMismatch("c entries must be finite numbers");
            v(i) = e.get<double>();
        }
        c = std::move(v);
    }
    return {std::move(A), std::move(B1), std::move(B2), std::move(B3),
            std::move(c)};
}

nlohmann::json family_spec_to_json(const FamilySpec& spec) {
    nlohmann::json j;
    j["family"] = family_name(spec.family);
    j["params"] = spec.params;
    j["sign"] = spec.sign == Sign::upper ? "upper" : "lower";
    return j;
}

FamilySpec family_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw UnknownParameter("family spec JSON needs a 'family' string");
    FamilySpec spec;
    spec.family = family_from_name(j["family"].get<std::string>());
    if (j.contains("params")) {
        if (!j["params"].is_object())
            throw UnknownParameter("'params' must be an object");
        for (const auto& [key, value] : j["params"].items()) {
            if (!value.is_number() || !std::isfinite(value.get<double>()))
                throw UnknownParameter("parameter '" + key +
                                       "' must be a finite number");
            spec.params[key] = value.get<double>();
        }
    }
    if (j.contains("sign")) {
        const std::string s = j["sign"].get<std::string>();
        if (s == "upper") spec.sign = Sign::upper;
        else if (s == "lower") spec.sign = Sign::lower;
        else throw UnknownParameter("sign must be 'upper' or 'lower'");
    }
    return spec;
}

nlohmann::json structure_report_to_json(const StructureReport& r) {
    return {{"diagonally_implicit", r.diagonally_implicit},
            {"noise_explicit", r.noise_explicit},
            {"sdae_applicable", r.sdae_applicable},
            {"sdae_reason", r.sdae_reason},
            {"explicit_first_stage", r.explicit_first_stage},
            {"singly_diagonal", r.singly_diagonal}};
}

nlohmann::json order_report_to_json(const OrderReport& r) {
    nlohmann::json j;
    j["order_tested"] = r.order_tested == StrongOrder::half ? 0.5 : 1.0;
    j["residuals"] = r.residuals;
    if (r.lambda) j["lambda"] = *r.lambda;
    j["max_residual"] = r.max_residual;
    return j;
}

} // namespace sdaerk
