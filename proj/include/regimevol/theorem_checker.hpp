#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "regimevol/model.hpp"
#include "regimevol/moment_bounds.hpp"

namespace regimevol {

struct PositivityCheck {
    bool holds = false;
    std::string rule;  // names the hypothesis verified
};

/// Positive-recurrence certificate. When it holds, the details carry the
/// concrete Lyapunov ingredients: the Poisson solution xi (pi-mean-zero
/// normalization) and a witness pair (gamma, p) with min_i(gamma - p xi_i) > 0.
struct RecurrenceCheck {
    bool holds = false;
    std::string details;
    std::optional<Eigen::VectorXd> mu;
    std::optional<Eigen::VectorXd> xi;
    std::optional<double> gamma;
    std::optional<double> p;
    bool mu_is_interpretation = false;  // mu := a - sigma^2/2 supplied where unstated
};

struct MomentCertificate {
    HypothesisCase hypothesis = HypothesisCase::NotApplicable;
    std::string message;
    double p = 0.0;  // the p the envelope certifies (1 for Case1)
    std::optional<MomentEnvelope> envelope;
};

struct CertificateReport {
    PositivityCheck positivity;
    MomentCertificate moment_bound;
    RecurrenceCheck theorem42;
    RecurrenceCheck theorem43;
    std::vector<std::string> assumptions_failed;

    std::string to_json() const;
    std::string to_table() const;
};

/// Almost-sure positivity of the solution:
/// for every i, (theta_i = 1/2 and 2 a_i >= sigma_i^2) or theta_i > 1/2.
PositivityCheck check_positivity(const ModelSpec& spec);

/// Positive recurrence via 2 theta_i in (1, 3] for all i, positive
/// off-diagonal rates (m > 1) and irreducibility.
RecurrenceCheck check_recurrence_42(const ModelSpec& spec);

/// Positive recurrence via theta = 1/2 and mu_i = a_i - sigma_i^2 / 2 > 0
/// for all i, positive off-diagonal rates (m > 1) and irreducibility.
RecurrenceCheck check_recurrence_43(const ModelSpec& spec);

/// Aggregates positivity, the pth-moment certificate (with envelope when one
/// applies) and both recurrence certificates.
CertificateReport full_report(const ModelSpec& spec, double p);

}  // namespace regimevol
