#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sdaerk {

// Category the CLI maps onto exit codes: bad configuration/input exits 2,
// mathematical failures (divergence, domain violations, findings) exit 1.
enum class ErrorKind { validation, numeric };

class Error : public std::runtime_error {
public:
    Error(std::string code, ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)), kind_(kind) {}

    const std::string& code() const noexcept { return code_; }
    ErrorKind kind() const noexcept { return kind_; }

private:
    std::string code_;
    ErrorKind kind_;
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg)
        : Error("dimension_mismatch", ErrorKind::validation, msg) {}
};

struct StructureViolation : Error {
    explicit StructureViolation(const std::string& msg)
        : Error("structure_violation", ErrorKind::validation, msg) {}
};

struct UnknownParameter : Error {
    explicit UnknownParameter(const std::string& msg)
        : Error("unknown_parameter", ErrorKind::validation, msg) {}
};

struct MissingParameter : Error {
    explicit MissingParameter(const std::string& msg)
        : Error("missing_parameter", ErrorKind::validation, msg) {}
};

struct ZeroDenominator : Error {
    explicit ZeroDenominator(const std::string& coefficient)
        : Error("zero_denominator", ErrorKind::numeric,
                "zero denominator while forming coefficient " + coefficient) {}
};

struct DiscriminantNegative : Error {
    explicit DiscriminantNegative(double d)
        : Error("discriminant_negative", ErrorKind::numeric,
                "class discriminant D = " + std::to_string(d) + " < 0") {}
};

struct SqrtDomain : Error {
    explicit SqrtDomain(const std::string& msg)
        : Error("sqrt_domain", ErrorKind::numeric, msg) {}
};

struct ConstraintViolated : Error {
    explicit ConstraintViolated(const std::string& msg)
        : Error("constraint_violated", ErrorKind::numeric, msg) {}
};

struct NonpositiveStep : Error {
    explicit NonpositiveStep(double h)
        : Error("nonpositive_step", ErrorKind::validation,
                "step size must be positive, got " + std::to_string(h)) {}
};

struct EmptyInput : Error {
    explicit EmptyInput(const std::string& what)
        : Error("empty_input", ErrorKind::validation, what + " must not be empty") {}
};

struct NewtonDiverged : Error {
    NewtonDiverged(int stage, double residual, int iters)
        : Error("newton_diverged", ErrorKind::numeric,
                "Newton iteration for stage " + std::to_string(stage + 1) +
                " did not reach tolerance after " + std::to_string(iters) +
                " iterations (residual " + std::to_string(residual) + ")"),
          stage(stage), residual(residual) {}
    int stage;
    double residual;
};

struct SingularIteration : Error {
    explicit SingularIteration(int stage)
        : Error("singular_iteration", ErrorKind::numeric,
                "stage " + std::to_string(stage + 1) +
                " iteration matrix is numerically singular"),
          stage(stage) {}
    int stage;
};

struct StageSingular : Error {
    explicit StageSingular(int stage)
        : Error("stage_singular", ErrorKind::numeric,
                "stage " + std::to_string(stage + 1) +
                " denominator 1 - hhat*A_ii - k*B3_ii vanishes"),
          stage(stage) {}
    int stage;
};

struct BadRange : Error {
    explicit BadRange(const std::string& msg)
        : Error("bad_range", ErrorKind::validation, msg) {}
};

struct ParameterRegime : Error {
    explicit ParameterRegime(const std::string& msg)
        : Error("parameter_regime", ErrorKind::validation, msg) {}
};

struct DegenerateFit : Error {
    explicit DegenerateFit(const std::string& msg)
        : Error("degenerate_fit", ErrorKind::validation, msg) {}
};

struct InvalidProblem : Error {
    explicit InvalidProblem(const std::string& msg)
        : Error("invalid_problem", ErrorKind::validation, msg) {}
};

} // namespace sdaerk
