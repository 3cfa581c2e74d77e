#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace regimevol {

/// Coupled model definition: per-regime SDE coefficients
///   dX_t = [a(r_t) - b(r_t) X_t] dt + sigma(r_t) X_t^theta(r_t) dB_t
/// plus the generator Q of the driving chain r_t and the initial point.
/// Immutable after construction; shared read-only across workers.
struct ModelSpec {
    int m = 0;                  // number of regimes
    Eigen::VectorXd a;          // drift constants, a(i) > 0
    Eigen::VectorXd b;          // mean-reversion speeds, b(i) > 0
    Eigen::VectorXd sigma;      // volatility rates, sigma(i) > 0
    Eigen::VectorXd theta;      // diffusion exponents, theta(i) >= 1/2
    Eigen::MatrixXd q;          // infinitesimal generator, rows sum to 0
    double x0 = 1.0;            // initial state, > 0
    int i0 = 1;                 // initial regime, 1-based in 1..m

    int initial_regime_index() const { return i0 - 1; }
};

struct Violation {
    std::string field;
    std::string rule;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

// Tolerances used by validation and the loader's row-sum repair.
constexpr double kRowSumTol = 1e-12;
constexpr double kRowSumRepairTol = 1e-9;

/// Pure check of every ModelSpec invariant; violations are data, not errors.
ValidationReport validate(const ModelSpec& spec);

class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string msg, ValidationReport report)
        : std::runtime_error(std::move(msg)), report(std::move(report)) {}
    ValidationReport report;
};

/// Loads and validates a model from the JSON schema
///   {"m":int,"a":[..],"b":[..],"sigma":[..],"theta":[..],"q":[[..]],"x0":num,"i0":int}.
/// Row sums of q with |sum| <= 1e-9 are repaired (q_ii := -sum of off-diagonals)
/// and noted; anything larger is a validation error.
/// Throws ParseError on malformed input, ValidationError on invariant violations.
ModelSpec load_model(const std::string& path, std::vector<std::string>* notes = nullptr);

/// Serializes a spec back to the same JSON schema.
std::string model_to_json(const ModelSpec& spec);

}  // namespace regimevol
