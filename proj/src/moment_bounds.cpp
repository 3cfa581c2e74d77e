#include "regimevol/moment_bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "regimevol/mmatrix.hpp"

namespace regimevol {

namespace {

// x^y via exp/log for x > 0; keeps large-p evaluations in floating range.
double pow_pos(double x, double y) {
    if (x == 0.0) return y == 0.0 ? 1.0 : 0.0;
    return std::exp(y * std::log(x));
}

}  // namespace

double MomentEnvelope::operator()(double t) const {
    const double decay = std::exp(-lambda_p * t);
    return pow_pos(x0, p) * decay + asymptotic_bound() * (1.0 - decay);
}

const char* to_string(HypothesisCase c) {
    switch (c) {
        case HypothesisCase::Case1: return "Case1";
        case HypothesisCase::Case2: return "Case2";
        default: return "NotApplicable";
    }
}

HypothesisResult check_hypotheses(const ModelSpec& spec, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("check_hypotheses requires p > 0");

    if (p == 1.0) {
        if (certify(spec, 1.0).verdict)
            return {HypothesisCase::Case1, "A(1) is a nonsingular M-matrix"};
        return {HypothesisCase::NotApplicable, "A(1) is not a nonsingular M-matrix"};
    }
    if (p < 1.0)
        return {HypothesisCase::NotApplicable,
                "the moment bound covers p = 1 or p > 1; p in (0,1) is not certified"};

    const double theta_min = spec.theta.minCoeff();
    const double theta_max = spec.theta.maxCoeff();
    std::ostringstream why;
    if (theta_max > 1.0) {
        why << "theta must lie in [1/2,1] for the p > 1 bound (max theta = " << theta_max << ")";
    } else {
        const double p_min = std::max(1.0, 2.0 * (1.0 - theta_min));
        if (!(p > p_min)) {
            why << "p = " << p << " must exceed max{1, 2[1 - min theta]} = " << p_min;
        } else if (!certify(spec, p).verdict) {
            why << "A(" << p << ") is not a nonsingular M-matrix";
        } else {
            return {HypothesisCase::Case2, "theta in [1/2,1] and A(p) is a nonsingular M-matrix"};
        }
    }
    if (certify(spec, 1.0).verdict) why << "; the p = 1 bound (Case1) is still available";
    return {HypothesisCase::NotApplicable, why.str()};
}

MomentEnvelope compute_constants(const ModelSpec& spec, double p, const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& mu) {
    if (!(p >= 1.0)) throw std::invalid_argument("compute_constants requires p >= 1");
    if (beta.size() != spec.m || mu.size() != spec.m)
        throw std::invalid_argument("beta and mu must have one entry per regime");
    if (!(beta.array() > 0.0).all() || !(mu.array() > 0.0).all())
        throw std::invalid_argument("compute_constants requires beta > 0 and mu > 0");

    MomentEnvelope env;
    env.p = p;
    env.x0 = spec.x0;
    env.beta_hat = beta.minCoeff();

    double lambda = std::numeric_limits<double>::infinity();
    double C = 0.0;
    for (int i = 0; i < spec.m; ++i) {
        const double th = spec.theta[i];
        const double bi = beta[i], mi = mu[i], ai = spec.a[i], s2 = spec.sigma[i] * spec.sigma[i];

        if (p == 1.0) {
            // the x^{p + 2 theta - 2} term carries the factor p(p-1) and drops out
            lambda = std::min(lambda, mi / bi);
            C = std::max(C, bi * ai);
            continue;
        }
        if (th < 0.5) throw std::invalid_argument("theta < 1/2 is outside the model domain");
        if (th > 1.0)
            throw std::invalid_argument(
                "theta > 1 is not covered by the p > 1 bound (exponent p/(2-2 theta) undefined); "
                "no certified envelope exists");

        const double diffusion_coeff = 0.5 * p * (p - 1.0) * s2 * bi;
        if (th == 1.0) {
            // diffusion term is order x^p: absorb it into the drift margin and
            // use a two-way Young split
            const double mi_prime = mi - diffusion_coeff;
            if (!(mi_prime > 0.0)) {
                std::ostringstream os;
                os << "theta(" << (i + 1) << ") = 1 branch requires mu_i - p(p-1) sigma_i^2 "
                   << "beta_i / 2 > 0; got " << mi_prime;
                throw std::invalid_argument(os.str());
            }
            lambda = std::min(lambda, (p + 1.0) * mi_prime / (2.0 * p * bi));
            C = std::max(C, (1.0 / p) * pow_pos(p * bi * ai, p) * pow_pos(2.0 / mi_prime, p - 1.0));
            env.theta_one_branch = true;
            continue;
        }

        lambda = std::min(lambda, (p + 3.0 - 2.0 * th) * mi / (3.0 * p * bi));
        const double addend1 = (1.0 / p) * pow_pos(p * bi * ai, p) * pow_pos(3.0 / mi, p - 1.0);
        const double addend2 = ((2.0 - 2.0 * th) / p) *
                               pow_pos(diffusion_coeff, p / (2.0 - 2.0 * th)) *
                               pow_pos(3.0 / mi, (p - 2.0 + 2.0 * th) / (2.0 - 2.0 * th));
        C = std::max(C, addend1 + addend2);
    }

    env.lambda_p = lambda;
    env.C_p = C;
    return env;
}

std::vector<double> envelope_curve(const MomentEnvelope& env, const std::vector<double>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        if (t < 0.0 || t < prev)
            throw std::invalid_argument("envelope_curve grid must be nonnegative and increasing");
        prev = t;
        out.push_back(env(t));
    }
    return out;
}

double lyapunov_exponent_bound(const MomentEnvelope& env) {
    if (!(env.lambda_p > 0.0)) throw std::invalid_argument("invalid envelope");
    return 0.0;
}

}  // namespace regimevol
