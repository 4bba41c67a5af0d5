#include "sdaerk/tableau.hpp"

#include "sdaerk/errors.hpp"

#include <cmath>
#include <cstring>
#include <functional>

namespace sdaerk {

namespace {

void require_square(const Eigen::MatrixXd& m, int s, const char* name) {
    if (m.rows() != s || m.cols() != s) {
        throw DimensionMismatch(std::string(name) + " must be " +
                                std::to_string(s) + "x" + std::to_string(s) +
                                ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
    }
}

bool lower_triangular(const Eigen::MatrixXd& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j)
            if (m(i, j) != 0.0) return false;
    return true;
}

bool strictly_lower_triangular(const Eigen::MatrixXd& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j)
            if (m(i, j) != 0.0) return false;
    return true;
}

// Scale-invariant determinant test: |det(m / scale)| > tol.
bool nonsingular(const Eigen::MatrixXd& m, double det_rel_tol) {
    const int n = static_cast<int>(m.rows());
    if (n == 0) return false;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    const double det = (m / scale).determinant();
    return std::abs(det) > det_rel_tol;
}

} // namespace

SrkTableau::SrkTableau(Eigen::MatrixXd A, Eigen::MatrixXd B1,
                       Eigen::MatrixXd B2, Eigen::MatrixXd B3,
                       std::optional<Eigen::VectorXd> c)
    : s_(static_cast<int>(A.rows())),
      A_(std::move(A)), B1_(std::move(B1)), B2_(std::move(B2)),
      B3_(std::move(B3)) {
    if (s_ < 1) throw DimensionMismatch("tableau needs at least one stage");
    require_square(A_, s_, "A");
    require_square(B1_, s_, "B1");
    require_square(B2_, s_, "B2");
    require_square(B3_, s_, "B3");

    const Eigen::VectorXd row_sums = A_.rowwise().sum();
    if (c.has_value()) {
        if (c->size() != s_)
            throw DimensionMismatch("c must have length " + std::to_string(s_));
        const double mismatch = (*c - row_sums).cwiseAbs().maxCoeff();
        if (mismatch > 1e-12)
            throw StructureViolation(
                "supplied c deviates from the row sums of A by " +
                std::to_string(mismatch));
        c_ = std::move(*c);
    } else {
        c_ = row_sums;
    }
}

const Eigen::MatrixXd& SrkTableau::B(int k) const {
    switch (k) {
        case 1: return B1_;
        case 2: return B2_;
        case 3: return B3_;
        default: throw DimensionMismatch("B index must be 1, 2 or 3");
    }
}

bool SrkTableau::operator==(const SrkTableau& other) const {
    return s_ == other.s_ && A_ == other.A_ && B1_ == other.B1_ &&
           B2_ == other.B2_ && B3_ == other.B3_ && c_ == other.c_;
}

std::size_t SrkTableau::hash() const {
    std::size_t h = std::hash<int>{}(s_);
    auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h ^= std::hash<std::uint64_t>{}(bits) + 0x9e3779b97f4a7c15ull +
             (h << 6) + (h >> 2);
    };
    for (const auto* m : {&A_, &B1_, &B2_, &B3_})
        for (int i = 0; i < s_; ++i)
            for (int j = 0; j < s_; ++j) mix((*m)(i, j));
    for (int i = 0; i < s_; ++i) mix(c_(i));
    return h;
}

StructureReport validate_structure(const SrkTableau& t, double det_rel_tol) {
    const int s = t.stages();
    StructureReport r;
    r.diagonally_implicit = lower_triangular(t.A()) && lower_triangular(t.B(3));
    r.noise_explicit = strictly_lower_triangular(t.B(1)) &&
                       strictly_lower_triangular(t.B(2));

    bool first_rows_zero = true;
    for (int k : {1, 2, 3})
        if (t.B(k).row(0).cwiseAbs().maxCoeff() != 0.0) first_rows_zero = false;
    if (t.A().row(0).cwiseAbs().maxCoeff() != 0.0) first_rows_zero = false;
    r.explicit_first_stage = first_rows_zero;

    r.singly_diagonal = true;
    for (int i = 1; i < s; ++i)
        if (t.A()(i, i) != t.A()(0, 0)) r.singly_diagonal = false;

    if (nonsingular(t.A(), det_rel_tol)) {
        r.sdae_applicable = true;
        r.sdae_reason = "A is nonsingular";
    } else if (r.explicit_first_stage && s >= 2 &&
               nonsingular(t.A().bottomRightCorner(s - 1, s - 1), det_rel_tol)) {
        r.sdae_applicable = true;
        r.sdae_reason = "explicit first stage with nonsingular trailing block";
    } else {
        r.sdae_applicable = false;
        r.sdae_reason = "A is singular and the explicit-first-stage fallback "
                        "does not apply";
    }
    return r;
}

namespace {

void require_structure(const SrkTableau& t) {
    const StructureReport s = validate_structure(t);
    if (!s.diagonally_implicit)
        throw StructureViolation("A and B3 must be lower triangular");
    if (!s.noise_explicit)
        throw StructureViolation("B1 and B2 must be strictly lower triangular");
}

} // namespace

OrderReport order_residuals(const SrkTableau& t, StrongOrder order) {
    require_structure(t);

    const Eigen::VectorXd e = t.e();
    const Eigen::VectorXd alpha = t.alpha();
    const Eigen::VectorXd b1 = t.beta(1), b2 = t.beta(2), b3 = t.beta(3);
    const Eigen::VectorXd B1e = t.B(1) * e, B2e = t.B(2) * e, B3e = t.B(3) * e;

    OrderReport rep;
    rep.order_tested = order;
    auto put = [&rep](const std::string& id, double deviation) {
        rep.residuals[id] = std::abs(deviation);
    };

    put("1", alpha.dot(e) - 1.0);
    put("2", b1.dot(e) - 1.0);
    put("3", b2.dot(e));
    put("4", b3.dot(e));

    if (order == StrongOrder::half) {
        put("5", b1.dot(B1e) + 0.5 * b2.dot(B2e) + b3.dot(B3e));
    } else {
        const double lambda = 2.0 * b1.dot(B1e);
        rep.lambda = lambda;
        put("5", b1.dot(B1e) - 0.5 * lambda); // zero by extraction
        put("6", b3.dot(B3e) + 0.5 * lambda);
        put("7", b2.dot(B3e) + b3.dot(B2e) - (1.0 - lambda));
        put("8", alpha.dot(B3e));
        put("9", b1.dot(B3e) + b3.dot(B1e));
        put("10", b2.dot(B2e));
        put("11", b1.dot(B2e) + b2.dot(B1e));
        put("12", b3.dot(t.A() * e));

        const Eigen::ArrayXd a1 = B1e.array(), a2 = B2e.array(),
                             a3 = B3e.array();
        const double c13 = 2.0 * b1.dot((a1 * a2).matrix()) +
                           2.0 * b1.dot((a1 * a3).matrix()) +
                           b2.dot((a1 * a1).matrix()) +
                           b2.dot((a2 * a2).matrix()) +
                           b2.dot((a2 * a3).matrix()) +
                           b3.dot((a1 * a1).matrix()) +
                           0.5 * b3.dot((a2 * a2).matrix()) +
                           b3.dot((a3 * a3).matrix());
        put("13", c13);

        const double c14 = b1.dot(t.B(1) * B2e) + b1.dot(t.B(2) * B1e) +
                           b1.dot(t.B(1) * B3e) + b1.dot(t.B(3) * B1e) +
                           b2.dot(t.B(1) * B1e) + b2.dot(t.B(2) * B2e) +
                           0.5 * b2.dot(t.B(2) * B3e) +
                           0.5 * b2.dot(t.B(3) * B2e) +
                           b3.dot(t.B(1) * B1e) +
                           0.5 * b3.dot(t.B(2) * B2e) +
                           b3.dot(t.B(3) * B3e);
        put("14", c14);

        put("c", (t.c() - t.A() * e).cwiseAbs().maxCoeff());
    }

    rep.max_residual = 0.0;
    for (const auto& [id, v] : rep.residuals)
        rep.max_residual = std::max(rep.max_residual, v);
    return rep;
}

EffectiveOrder effective_order(const SrkTableau& t, double tol) {
    if (!(tol > 0.0)) throw BadRange("tolerance must be positive");
    EffectiveOrder eo;
    eo.half_ok = order_residuals(t, StrongOrder::half).max_residual <= tol;
    eo.one_ok = order_residuals(t, StrongOrder::one).max_residual <= tol;
    eo.order = eo.one_ok ? OrderClass::one
                         : (eo.half_ok ? OrderClass::half : OrderClass::none);
    return eo;
}

const char* order_class_name(OrderClass oc) {
    switch (oc) {
        case OrderClass::half: return "0.5";
        case OrderClass::one: return "1.0";
        default: return "none";
    }
}

} // namespace sdaerk
