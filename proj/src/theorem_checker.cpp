#include "regimevol/theorem_checker.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "regimevol/ctmc.hpp"
#include "regimevol/mmatrix.hpp"

namespace regimevol {

PositivityCheck check_positivity(const ModelSpec& spec) {
    for (int i = 0; i < spec.m; ++i) {
        const bool half_case =
            spec.theta[i] == 0.5 && 2.0 * spec.a[i] >= spec.sigma[i] * spec.sigma[i];
        if (!half_case && !(spec.theta[i] > 0.5)) {
            std::ostringstream os;
            os << "fails at regime " << (i + 1) << ": theta = " << spec.theta[i]
               << " requires 2a >= sigma^2 (2a = " << 2.0 * spec.a[i]
               << ", sigma^2 = " << spec.sigma[i] * spec.sigma[i] << ")";
            return {false, os.str()};
        }
    }
    return {true, "for every i: (theta_i = 1/2 and 2 a_i >= sigma_i^2) or theta_i > 1/2"};
}

namespace {

// Shared chain-side hypotheses of both recurrence certificates.
bool chain_hypotheses(const ModelSpec& spec, std::string& why) {
    if (spec.m == 1) return true;
    for (int i = 0; i < spec.m; ++i)
        for (int j = 0; j < spec.m; ++j)
            if (i != j && !(spec.q(i, j) > 0.0)) {
                std::ostringstream os;
                os << "requires q(" << (i + 1) << "," << (j + 1) << ") > 0";
                why = os.str();
                return false;
            }
    if (!is_irreducible(Generator::from_model(spec))) {
        why = "chain is not irreducible";
        return false;
    }
    return true;
}

void attach_poisson_witness(const ModelSpec& spec, RecurrenceCheck& check, double p) {
    const Eigen::VectorXd mu =
        spec.a - 0.5 * spec.sigma.cwiseProduct(spec.sigma);
    const PoissonSolution sol = solve_poisson(Generator::from_model(spec), mu);
    const double gamma = 1.0 + p * sol.xi.maxCoeff();
    check.mu = mu;
    check.xi = sol.xi;
    check.gamma = gamma;
    check.p = p;
}

}  // namespace

RecurrenceCheck check_recurrence_42(const ModelSpec& spec) {
    RecurrenceCheck check;
    for (int i = 0; i < spec.m; ++i) {
        const double two_theta = 2.0 * spec.theta[i];
        if (!(two_theta > 1.0 && two_theta <= 3.0)) {
            std::ostringstream os;
            os << "requires 2 theta_i in (1,3] for all i; regime " << (i + 1)
               << " has 2 theta = " << two_theta;
            check.details = os.str();
            return check;
        }
    }
    std::string why;
    if (!chain_hypotheses(spec, why)) {
        check.details = why;
        return check;
    }

    check.holds = true;
    // The Poisson right-hand side mu is not pinned by this certificate's
    // statement; we evaluate it with mu_i = a_i - sigma_i^2 / 2 and flag the
    // interpretation. Witness: p = 1, gamma = 1 + max_i xi_i.
    attach_poisson_witness(spec, check, 1.0);
    check.mu_is_interpretation = true;
    std::ostringstream os;
    os << "2 theta_i in (1,3] for all i; positive off-diagonal rates; irreducible. "
       << "Witness p = 1, gamma = " << *check.gamma << " gives min_i(gamma - p xi_i) = "
       << *check.gamma - *check.p * check.xi->maxCoeff()
       << " with mu_i := a_i - sigma_i^2/2 (interpretation; mu is unspecified here)";
    check.details = os.str();
    return check;
}

RecurrenceCheck check_recurrence_43(const ModelSpec& spec) {
    RecurrenceCheck check;
    for (int i = 0; i < spec.m; ++i)
        if (spec.theta[i] != 0.5) {
            std::ostringstream os;
            os << "requires theta_i = 1/2 for all i; regime " << (i + 1)
               << " has theta = " << spec.theta[i];
            check.details = os.str();
            return check;
        }
    const Eigen::VectorXd mu = spec.a - 0.5 * spec.sigma.cwiseProduct(spec.sigma);
    for (int i = 0; i < spec.m; ++i)
        if (!(mu[i] > 0.0)) {
            std::ostringstream os;
            os << "requires mu_i = a_i - sigma_i^2/2 > 0 for all i; regime " << (i + 1)
               << " has mu = " << mu[i];
            check.details = os.str();
            return check;
        }
    std::string why;
    if (!chain_hypotheses(spec, why)) {
        check.details = why;
        return check;
    }

    check.holds = true;
    // p = min_i mu_i / sigma_i^2: half the admissible range, so that
    // mu_i - p sigma_i^2 / 2 >= mu_i / 2 > 0 for every i.
    double p = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.m; ++i)
        p = std::min(p, mu[i] / (spec.sigma[i] * spec.sigma[i]));
    attach_poisson_witness(spec, check, p);
    std::ostringstream os;
    os << "theta = 1/2 and mu_i = a_i - sigma_i^2/2 > 0 for all i (min mu = " << mu.minCoeff()
       << "); witness p = " << p << ", gamma = " << *check.gamma;
    check.details = os.str();
    return check;
}

CertificateReport full_report(const ModelSpec& spec, double p) {
    CertificateReport rep;
    rep.positivity = check_positivity(spec);
    if (!rep.positivity.holds)
        rep.assumptions_failed.push_back("positivity: " + rep.positivity.rule);

    const HypothesisResult hyp = check_hypotheses(spec, p);
    rep.moment_bound.hypothesis = hyp.value;
    rep.moment_bound.message = hyp.message;
    if (hyp.value != HypothesisCase::NotApplicable) {
        const double p_eff = hyp.value == HypothesisCase::Case1 ? 1.0 : p;
        rep.moment_bound.p = p_eff;
        const MMatrixReport cert = certify(spec, p_eff);
        rep.moment_bound.envelope = compute_constants(spec, p_eff, *cert.beta, *cert.mu);
    } else {
        rep.moment_bound.p = p;
        rep.assumptions_failed.push_back("moment bound: " + hyp.message);
    }

    rep.theorem42 = check_recurrence_42(spec);
    if (!rep.theorem42.holds)
        rep.assumptions_failed.push_back("recurrence (2 theta in (1,3]): " + rep.theorem42.details);
    rep.theorem43 = check_recurrence_43(spec);
    if (!rep.theorem43.holds)
        rep.assumptions_failed.push_back("recurrence (theta = 1/2): " + rep.theorem43.details);
    return rep;
}

namespace {

nlohmann::ordered_json recurrence_json(const RecurrenceCheck& c) {
    nlohmann::ordered_json j;
    j["holds"] = c.holds;
    j["details"] = c.details;
    if (c.mu) j["mu"] = std::vector<double>(c.mu->begin(), c.mu->end());
    if (c.xi) j["xi"] = std::vector<double>(c.xi->begin(), c.xi->end());
    if (c.gamma) j["gamma"] = *c.gamma;
    if (c.p) j["p"] = *c.p;
    if (c.mu_is_interpretation) j["mu_is_interpretation"] = true;
    return j;
}

}  // namespace

std::string CertificateReport::to_json() const {
    nlohmann::ordered_json j;
    j["positivity"] = {{"holds", positivity.holds}, {"rule", positivity.rule}};
    nlohmann::ordered_json mj;
    mj["case"] = to_string(moment_bound.hypothesis);
    mj["message"] = moment_bound.message;
    mj["p"] = moment_bound.p;
    if (moment_bound.envelope) {
        const auto& e = *moment_bound.envelope;
        mj["lambda_p"] = e.lambda_p;
        mj["C_p"] = e.C_p;
        mj["beta_hat"] = e.beta_hat;
        mj["asymptotic_bound"] = e.asymptotic_bound();
        mj["theta_one_branch"] = e.theta_one_branch;
    }
    j["moment_bound"] = mj;
    j["recurrence_2theta_in_1_3"] = recurrence_json(theorem42);
    j["recurrence_theta_half"] = recurrence_json(theorem43);
    j["assumptions_failed"] = assumptions_failed;
    return j.dump(2);
}

std::string CertificateReport::to_table() const {
    std::ostringstream os;
    const auto row = [&os](const char* name, bool holds, const std::string& note) {
        os << "  " << name << (holds ? "  yes  " : "  no   ") << note << "\n";
    };
    os << "certificate                          holds  detail\n";
    row("positivity (a.s. positive solution)", positivity.holds, positivity.rule);
    {
        std::ostringstream note;
        note << to_string(moment_bound.hypothesis);
        if (moment_bound.envelope) {
            const auto& e = *moment_bound.envelope;
            note << ": p = " << moment_bound.p << ", lambda_p = " << e.lambda_p
                 << ", C_p = " << e.C_p << ", bound -> " << e.asymptotic_bound();
        } else {
            note << ": " << moment_bound.message;
        }
        row("pth-moment asymptotic bound       ",
            moment_bound.hypothesis != HypothesisCase::NotApplicable, note.str());
    }
    row("recurrence, 2 theta in (1,3]       ", theorem42.holds, theorem42.details);
    row("recurrence, theta = 1/2            ", theorem43.holds, theorem43.details);
    return os.str();
}

}  // namespace regimevol
