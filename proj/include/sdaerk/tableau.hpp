#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <string>

namespace sdaerk {

/// Extended Butcher tableau of a stiffly accurate s-stage SRK scheme for
/// scalar-noise SDAEs. A holds the drift weights; B1, B2, B3 weight the
/// diffusion terms I_(1), I_(1,1)/sqrt(h) and sqrt(h), respectively. The
/// abscissae satisfy c = A e and the last stage is the step output.
class SrkTableau {
public:
    /// Builds a tableau from the four weight matrices. If c is supplied it
    /// must match the row sums of A to 1e-12, otherwise it is computed.
    SrkTableau(Eigen::MatrixXd A, Eigen::MatrixXd B1, Eigen::MatrixXd B2,
               Eigen::MatrixXd B3,
               std::optional<Eigen::VectorXd> c = std::nullopt);

    int stages() const { return s_; }
    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& B(int k) const;
    const Eigen::VectorXd& c() const { return c_; }

    /// Last row of A, transposed: the drift weights of the output stage.
    Eigen::VectorXd alpha() const { return A_.row(s_ - 1).transpose(); }
    /// Last row of B^(k), transposed.
    Eigen::VectorXd beta(int k) const { return B(k).row(s_ - 1).transpose(); }
    /// All-ones vector of the stage dimension.
    Eigen::VectorXd e() const { return Eigen::VectorXd::Ones(s_); }

    /// Exact (bitwise value) comparison of all fields.
    bool operator==(const SrkTableau& other) const;
    bool operator!=(const SrkTableau& other) const { return !(*this == other); }
    std::size_t hash() const;

private:
    int s_;
    Eigen::MatrixXd A_, B1_, B2_, B3_;
    Eigen::VectorXd c_;
};

struct StructureReport {
    bool diagonally_implicit = false;  // A and B3 lower triangular
    bool noise_explicit = false;       // B1 and B2 strictly lower triangular
    bool sdae_applicable = false;
    std::string sdae_reason;
    bool explicit_first_stage = false; // first rows of A, B1, B2, B3 all zero
    bool singly_diagonal = false;      // all A_ii equal

    /// Structural precondition shared by the order conditions and the solver.
    bool ok() const { return diagonally_implicit && noise_explicit; }
};

/// Inspects the tableau shape. Nonsingularity of A (or of its trailing block
/// when the first stage is explicit) is decided by |det| against
/// det_rel_tol times the largest entry magnitude, raised to the block size.
StructureReport validate_structure(const SrkTableau& t,
                                   double det_rel_tol = 1e-12);

enum class StrongOrder { half, one };

struct OrderReport {
    StrongOrder order_tested = StrongOrder::half;
    std::map<std::string, double> residuals; // condition id -> |deviation|
    std::optional<double> lambda;            // order 1.0 only: 2 beta1' B1 e
    double max_residual = 0.0;
};

/// Evaluates the strong order conditions. For order 0.5 these are the five
/// conditions sufficient for order 0.5; for order 1.0 all fourteen
/// conditions, with lambda extracted from condition 5 and conditions 6 and 7
/// checked at that lambda, plus the residual of c = A e.
OrderReport order_residuals(const SrkTableau& t, StrongOrder order);

enum class OrderClass { none, half, one };

struct EffectiveOrder {
    OrderClass order = OrderClass::none;
    bool half_ok = false;
    bool one_ok = false;
};

/// Classifies the tableau by running both residual sets against tol.
EffectiveOrder effective_order(const SrkTableau& t, double tol);

const char* order_class_name(OrderClass oc);

} // namespace sdaerk
