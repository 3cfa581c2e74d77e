#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "regimevol/model.hpp"

namespace regimevol {

/// Nonsingular M-matrix certificate for A(p) = p diag(b) - Q, in the
/// decomposition A = s I - G with G >= 0: the verdict is s > rho(G).
/// When the verdict holds, beta solves A beta = 1 (so beta > 0 because the
/// inverse of a nonsingular M-matrix is entrywise nonnegative) and
/// mu_i = p b_i beta_i - sum_k q_ik beta_k is identically 1.
struct MMatrixReport {
    double p = 0.0;
    Eigen::MatrixXd A;
    double s = 0.0;
    Eigen::MatrixXd G;
    double rho_G = 0.0;
    bool verdict = false;
    std::optional<Eigen::VectorXd> beta;
    std::optional<Eigen::VectorXd> mu;

    std::string to_json() const;
};

/// A(p) = p diag(b) - Q, entrywise: A_ii = p b_i - q_ii, A_ij = -q_ij.
Eigen::MatrixXd build_A(const ModelSpec& spec, double p);

/// Perron root of an entrywise-nonnegative matrix. Power iteration with a
/// positive random start (tolerance 1e-10, cap 1e5 iterations), applied to
/// G + I so that periodic patterns like [[0,2],[3,0]] still converge
/// (rho(G+I) = rho(G) + 1 exactly for G >= 0). Falls back to the largest
/// real root of the characteristic polynomial for m <= 4.
double spectral_radius(const Eigen::MatrixXd& G);

/// Certifies A(p) with s = max_i A_ii (the minimal admissible shift).
/// A beta-override is validated (beta > 0 and the induced mu > 0) and used
/// in place of the canonical A(p)^{-1} 1.
MMatrixReport certify(const ModelSpec& spec, double p,
                      const std::optional<Eigen::VectorXd>& beta_override = std::nullopt);

}  // namespace regimevol
