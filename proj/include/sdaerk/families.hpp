#pragma once

#include "sdaerk/tableau.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sdaerk {

/// The published coefficient families: two order-0.5 classes, eleven
/// order-1.0 classes, and the three efficiency-tuned schemes built on
/// classes I/II (order 0.5), II and X.
enum class FamilyId {
    H05_I, H05_II,
    O10_I, O10_II, O10_III, O10_IV, O10_V, O10_VI,
    O10_VII, O10_VIII, O10_IX, O10_X, O10_XI,
    EFF_05, EFF_II, EFF_X,
};

/// Sign switch for the classes printed with +- / -+ pairs; the choice
/// applies to every affected coefficient at once.
enum class Sign { upper, lower };

using Params = std::map<std::string, double>;

struct FamilySpec {
    FamilyId family;
    Params params;
    Sign sign = Sign::upper;
};

/// Two-stage order-0.5 constructors. Class I takes {A11, A21, B11_3};
/// class II takes {A11, A21, B21_3}. The sign switch is unused here.
SrkTableau make_order_half(FamilyId variant, const Params& params,
                           Sign sign = Sign::upper);

/// Three-stage order-1.0 constructors for classes I..XI. The free
/// parameter set is class specific; see default_spec() for one admissible
/// choice per class. constraint_tol bounds the class-V implicit-equation
/// residual (scaled by the magnitude of its terms).
SrkTableau make_order_one(FamilyId class_id, const Params& params,
                          Sign sign = Sign::upper,
                          double constraint_tol = 1e-8);

/// Efficiency-tuned schemes: EFF_05 takes {a1, a2}; EFF_II takes
/// {a1, a2, a3, b}; EFF_X takes {a1, a2, a3, a4, b}; b must be nonzero.
SrkTableau make_efficient(FamilyId scheme, const Params& params,
                          Sign sign = Sign::upper);

/// Dispatch over the three constructors.
SrkTableau make_tableau(const FamilySpec& spec);

struct RootSearch {
    double lo = -3.0;
    double hi = 3.0;
    double tol = 1e-12;       // accept roots with |P(r)| <= tol
    double scan_step = 1e-3;  // bracketing granularity
};

/// Real roots of the class-V implicit equation, viewed as a quartic in
/// B32_3 at fixed B32_1 and B33_3. Roots at 0 and at -B32_1*B33_3 (always
/// a root of the quartic, but excluded by the class) are dropped. Returns
/// an empty list when the interval brackets no admissible root.
std::vector<double> class_v_solve(double B32_1, double B33_3,
                                  const RootSearch& search = {});

/// Value of the class-V implicit equation; exposed for testing.
double class_v_constraint(double B32_1, double B32_3, double B33_3);

const char* family_name(FamilyId id);
FamilyId family_from_name(std::string_view name);
StrongOrder advertised_order(FamilyId id);

/// One documented admissible parameter choice per family (class V's
/// B32_3 entry is a frozen root of the implicit equation at B32_1 =
/// B33_3 = 1).
FamilySpec default_spec(FamilyId id);

/// The thirteen published classes, without the efficient schemes.
std::vector<FamilyId> all_classes();
/// All sixteen constructible families.
std::vector<FamilyId> all_families();

} // namespace sdaerk
