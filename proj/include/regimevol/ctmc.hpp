#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "regimevol/model.hpp"

namespace regimevol {

/// Validated CTMC rate matrix. Off-diagonals >= 0, rows sum to 0 (<= 1e-12).
class Generator {
public:
    explicit Generator(Eigen::MatrixXd q);
    static Generator from_model(const ModelSpec& spec) { return Generator(spec.q); }

    const Eigen::MatrixXd& q() const { return q_; }
    int m() const { return int(q_.rows()); }

private:
    Eigen::MatrixXd q_;
};

struct InvariantDistribution {
    Eigen::VectorXd pi;  // pi_i >= 0, sums to 1, pi Q = 0
};

/// Piecewise-constant chain path on [0, t_end]: states[k] holds on
/// [jump_times[k-1], jump_times[k]) with jump_times strictly increasing
/// and states[k] != states[k+1]. States are 0-based.
struct RegimePath {
    std::vector<double> jump_times;
    std::vector<int> states;  // len = jump_times.size() + 1
    double t_end = 0.0;

    int state_at(double t) const;
};

struct PoissonSolution {
    Eigen::VectorXd xi;            // Q xi = -(mu - (pi.mu) 1), normalized pi.xi = 0
    Eigen::VectorXd centered_rhs;  // mu - (pi.mu) 1
};

/// True iff every state reaches every other through edges {(i,j): q_ij > 0}.
bool is_irreducible(const Generator& g);

/// Unique probability vector with pi Q = 0, by direct solve of the augmented
/// balance system (one balance equation replaced by the normalization).
/// Throws std::runtime_error naming the unreachable states if g is reducible.
InvariantDistribution invariant_distribution(const Generator& g);

/// P(delta) = exp(delta Q) by scaling-and-squaring with a truncated series
/// (target accuracy 1e-12). delta = 0 returns the identity exactly;
/// negative delta throws std::invalid_argument.
Eigen::MatrixXd transition_matrix(const Generator& g, double delta);

/// Matrix exponential of an arbitrary square matrix (same routine backing
/// transition_matrix, exposed for reuse).
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M);

/// Jump-chain sampling: exponential holding time with rate -q_ii, next state
/// j with probability q_ij / (-q_ii). Deterministic in (g, i0, t_end, seed).
/// i0 is 0-based.
RegimePath sample_path_exact(const Generator& g, int i0, double t_end, std::uint64_t seed,
                             std::uint32_t path_index = 0);

/// Re-samples the regime every delta from the rows of P(delta); constant in
/// between. Matches a one-categorical-draw-per-step transition-matrix scheme.
RegimePath sample_path_discretized(const Generator& g, int i0, double t_end, double delta,
                                   std::uint64_t seed, std::uint32_t path_index = 0);

/// Solves the Poisson system Q xi = -mu + (sum_i pi_i mu_i) 1 by least squares
/// on the augmented system [Q; pi^T] xi = [-centered_rhs; 0]; the augmentation
/// pins the one-dimensional kernel, giving the unique pi-mean-zero solution.
PoissonSolution solve_poisson(const Generator& g, const Eigen::VectorXd& mu);

/// CSV export, one row per holding interval: t_start,t_end,state (1-based).
std::string regime_path_csv(const RegimePath& path);

}  // namespace regimevol
