#pragma once

#include "sdaerk/families.hpp"
#include "sdaerk/tableau.hpp"

#include <json.hpp>

namespace sdaerk {

/// Tableau wire format: object with keys s, A, B1, B2, B3 (row-major
/// arrays of arrays of finite doubles) and optional c. A missing c is
/// recomputed from the row sums of A; a supplied one is validated.
nlohmann::json tableau_to_json(const SrkTableau& t);
SrkTableau tableau_from_json(const nlohmann::json& j);

/// FamilySpec wire format:
///   {"family": "O10_VI", "params": {...}, "sign": "upper"}
/// sign defaults to "upper" when absent.
nlohmann::json family_spec_to_json(const FamilySpec& spec);
FamilySpec family_spec_from_json(const nlohmann::json& j);

nlohmann::json structure_report_to_json(const StructureReport& r);
nlohmann::json order_report_to_json(const OrderReport& r);

} // namespace sdaerk
