#include "regimevol/mmatrix.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "regimevol/rng.hpp"

namespace regimevol {

Eigen::MatrixXd build_A(const ModelSpec& spec, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("build_A requires p > 0");
    Eigen::MatrixXd A = -spec.q;
    A.diagonal() += p * spec.b;
    return A;
}

namespace {

// Characteristic polynomial coefficients of G by Faddeev-LeVerrier:
// det(x I - G) = x^n + c[1] x^{n-1} + ... + c[n].
std::vector<double> char_poly(const Eigen::MatrixXd& G) {
    const int n = int(G.rows());
    std::vector<double> c(std::size_t(n) + 1, 0.0);
    c[0] = 1.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        M = G * M + c[std::size_t(k) - 1] * Eigen::MatrixXd::Identity(n, n);
        c[std::size_t(k)] = -(G * M).trace() / double(k);
    }
    return c;
}

// Largest real root of a monic polynomial via Newton started above all roots;
// for a nonnegative matrix the Perron root is that largest real root.
double largest_real_root(const std::vector<double>& c, double upper) {
    double x = upper + 1.0;
    for (int it = 0; it < 200; ++it) {
        double f = 0.0, df = 0.0;
        for (double ck : c) {
            df = df * x + f;
            f = f * x + ck;
        }
        if (df == 0.0) break;
        const double step = f / df;
        x -= step;
        if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& G) {
    const int n = int(G.rows());
    if (n != G.cols() || n < 1) throw std::invalid_argument("spectral_radius: square matrix required");
    if ((G.array() < 0.0).any())
        throw std::invalid_argument("spectral_radius: matrix must be entrywise nonnegative");
    if (n == 1) return G(0, 0);

    const double upper = G.cwiseAbs().rowwise().sum().maxCoeff();
    if (upper == 0.0) return 0.0;

    const CounterRng rng(0x9d2c5680u);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = 0.5 + rng.uniform(std::uint64_t(i), 0, RngStream::PowerIteration);
    v /= v.sum();

    // Collatz-Wielandt bracket on the shifted iterate (G + I) v.
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd w = G * v + v;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = w[i] / v[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        v = w / w.sum();
        if (hi - lo <= 1e-10 * hi) return 0.5 * (hi + lo) - 1.0;
    }

    if (n <= 4) return largest_real_root(char_poly(G), upper);
    throw std::runtime_error("spectral_radius: power iteration did not converge");
}

MMatrixReport certify(const ModelSpec& spec, double p,
                      const std::optional<Eigen::VectorXd>& beta_override) {
    MMatrixReport rep;
    rep.p = p;
    rep.A = build_A(spec, p);
    rep.s = rep.A.diagonal().maxCoeff();
    rep.G = rep.s * Eigen::MatrixXd::Identity(spec.m, spec.m) - rep.A;
    rep.rho_G = spectral_radius(rep.G);
    rep.verdict = rep.s > rep.rho_G;
    if (!rep.verdict) return rep;

    Eigen::VectorXd beta;
    if (beta_override) {
        beta = *beta_override;
        if (beta.size() != spec.m) throw std::invalid_argument("beta override has wrong length");
        if (!(beta.array() > 0.0).all())
            throw std::invalid_argument("beta override must be entrywise positive");
    } else {
        beta = rep.A.fullPivLu().solve(Eigen::VectorXd::Ones(spec.m));
    }

    // mu from the defining formula (identically 1 for the canonical beta).
    Eigen::VectorXd mu = (p * spec.b.array() * beta.array()).matrix() - spec.q * beta;
    if (beta_override && !(mu.array() > 0.0).all())
        throw std::invalid_argument("beta override fails mu_i = p b_i beta_i - sum_k q_ik beta_k > 0");

    rep.beta = std::move(beta);
    rep.mu = std::move(mu);
    return rep;
}

std::string MMatrixReport::to_json() const {
    nlohmann::ordered_json j;
    j["p"] = p;
    j["s"] = s;
    j["rho_G"] = rho_G;
    j["verdict"] = verdict;
    if (beta) j["beta"] = std::vector<double>(beta->begin(), beta->end());
    if (mu) j["mu"] = std::vector<double>(mu->begin(), mu->end());
    return j.dump(2);
}

}  // namespace regimevol
