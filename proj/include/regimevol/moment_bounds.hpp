#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "regimevol/model.hpp"

namespace regimevol {

/// Closed-form pth-moment envelope
///   envelope(t) = x0^p e^{-lambda_p t} + C_p / (beta_hat lambda_p) (1 - e^{-lambda_p t}),
/// an upper bound for E[X_t^p] when the matching M-matrix certificate holds.
struct MomentEnvelope {
    double p = 0.0;
    double lambda_p = 0.0;       // decay rate, > 0
    double C_p = 0.0;            // additive constant, >= 0
    double beta_hat = 0.0;       // min_i beta_i
    double x0 = 0.0;
    bool theta_one_branch = false;  // extension branch used for theta(i) = 1

    double asymptotic_bound() const { return C_p / (beta_hat * lambda_p); }
    double operator()(double t) const;
};

enum class HypothesisCase { Case1, Case2, NotApplicable };

struct HypothesisResult {
    HypothesisCase value = HypothesisCase::NotApplicable;
    std::string message;
};

const char* to_string(HypothesisCase c);

/// Which moment-bound hypothesis covers the requested p:
///   Case1: p = 1 and A(1) is a nonsingular M-matrix.
///   Case2: p > max{1, 2[1 - min_i theta_i]}, all theta_i in [1/2, 1], and
///          A(p) is a nonsingular M-matrix.
/// Anything else is NotApplicable, with the failed hypothesis named.
HypothesisResult check_hypotheses(const ModelSpec& spec, double p);

/// Evaluates lambda_p, C_p and beta_hat from (beta, mu) delivered by the
/// M-matrix certificate. Regimes with theta(i) = 1 use the extension branch
/// (two-way Young split with mu'_i = mu_i - p(p-1) sigma_i^2 beta_i / 2,
/// which must be positive); theta(i) > 1 with p > 1 is rejected because the
/// three-way split exponent p/(2 - 2 theta) is undefined there.
MomentEnvelope compute_constants(const ModelSpec& spec, double p, const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& mu);

/// Pointwise envelope evaluation over an increasing nonnegative grid.
std::vector<double> envelope_curve(const MomentEnvelope& env, const std::vector<double>& grid);

/// The theorem-level Lyapunov exponent bound: limsup (1/t) log E[X_t^p] <= 0.
double lyapunov_exponent_bound(const MomentEnvelope& env);

}  // namespace regimevol
