#include "regimevol/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace regimevol {

namespace {

void check_positive_vector(const Eigen::VectorXd& v, int m, const char* field,
                           ValidationReport& rep) {
    if (v.size() != m) {
        rep.violations.push_back({field, "length", std::string(field) + " must have length m"});
        return;
    }
    for (int i = 0; i < m; ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
            std::ostringstream os;
            os << field << "(" << (i + 1) << ") = " << v[i] << " must be a positive real";
            rep.violations.push_back({field, "positive", os.str()});
        }
    }
}

}  // namespace

ValidationReport validate(const ModelSpec& spec) {
    ValidationReport rep;
    const int m = spec.m;
    if (m < 1) {
        rep.violations.push_back({"m", "positive", "m must be a positive integer"});
        rep.ok = false;
        return rep;
    }
    check_positive_vector(spec.a, m, "a", rep);
    check_positive_vector(spec.b, m, "b", rep);
    check_positive_vector(spec.sigma, m, "sigma", rep);

    if (spec.theta.size() != m) {
        rep.violations.push_back({"theta", "length", "theta must have length m"});
    } else {
        for (int i = 0; i < m; ++i) {
            if (!(spec.theta[i] >= 0.5) || !std::isfinite(spec.theta[i])) {
                std::ostringstream os;
                os << "theta(" << (i + 1) << ") = " << spec.theta[i]
                   << ": θ ≥ 1/2 required (pathwise uniqueness fails below 1/2)";
                rep.violations.push_back({"theta", "theta >= 1/2 required", os.str()});
            }
        }
    }

    if (spec.q.rows() != m || spec.q.cols() != m) {
        rep.violations.push_back({"q", "shape", "q must be an m-by-m matrix"});
    } else {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (i != j && (!(spec.q(i, j) >= 0.0) || !std::isfinite(spec.q(i, j)))) {
                    std::ostringstream os;
                    os << "q(" << (i + 1) << "," << (j + 1) << ") = " << spec.q(i, j);
                    rep.violations.push_back({"q", "off-diagonal nonnegative", os.str()});
                }
            }
            const double row_sum = spec.q.row(i).sum();
            if (!(std::abs(row_sum) <= kRowSumTol)) {
                std::ostringstream os;
                os << "row " << (i + 1) << " sums to " << row_sum << " (|sum| must be <= 1e-12)";
                rep.violations.push_back({"q", "rows sum to zero", os.str()});
            }
        }
        if (m == 1 && spec.q(0, 0) != 0.0) {
            rep.violations.push_back({"q", "single regime", "m=1 requires Q = [[0]]"});
        }
    }

    if (!(spec.x0 > 0.0) || !std::isfinite(spec.x0)) {
        rep.violations.push_back({"x0", "positive", "x0 must be a positive real"});
    }
    if (spec.i0 < 1 || spec.i0 > m) {
        rep.violations.push_back({"i0", "range", "i0 must lie in 1..m"});
    }

    rep.ok = rep.violations.empty();
    return rep;
}

namespace {

Eigen::VectorXd parse_vector(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw ParseError(std::string("missing field \"") + field + "\"");
    const auto& arr = j.at(field);
    if (!arr.is_array()) throw ParseError(std::string("field \"") + field + "\" must be an array");
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ParseError(std::string("field \"") + field + "\" must be numeric");
        v[Eigen::Index(i)] = arr[i].get<double>();
    }
    return v;
}

}  // namespace

ModelSpec load_model(const std::string& path, std::vector<std::string>* notes) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON in ") + path + ": " + e.what());
    }

    ModelSpec spec;
    try {
        if (!j.contains("m")) throw ParseError("missing field \"m\"");
        spec.m = j.at("m").get<int>();
        spec.a = parse_vector(j, "a");
        spec.b = parse_vector(j, "b");
        spec.sigma = parse_vector(j, "sigma");
        spec.theta = parse_vector(j, "theta");

        if (!j.contains("q")) throw ParseError("missing field \"q\"");
        const auto& qj = j.at("q");
        if (!qj.is_array() || qj.size() != std::size_t(spec.m))
            throw ParseError("field \"q\" must be an m-by-m array of arrays");
        spec.q.resize(spec.m, spec.m);
        for (int i = 0; i < spec.m; ++i) {
            if (!qj[i].is_array() || qj[i].size() != std::size_t(spec.m))
                throw ParseError("field \"q\" must be an m-by-m array of arrays");
            for (int k = 0; k < spec.m; ++k) spec.q(i, k) = qj[i][k].get<double>();
        }

        if (!j.contains("x0")) throw ParseError("missing field \"x0\"");
        spec.x0 = j.at("x0").get<double>();
        if (!j.contains("i0")) throw ParseError("missing field \"i0\"");
        spec.i0 = j.at("i0").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("schema error in ") + path + ": " + e.what());
    }

    for (const char* f : {"a", "b", "sigma", "theta"}) {
        const auto& v = (f[0] == 'a')   ? spec.a
                        : (f[0] == 'b') ? spec.b
                        : (f[0] == 's') ? spec.sigma
                                        : spec.theta;
        if (v.size() != spec.m)
            throw ParseError(std::string("field \"") + f + "\" has length " +
                             std::to_string(v.size()) + ", expected m = " + std::to_string(spec.m));
    }

    // Row-sum repair: tolerate text-file rounding, reject real discrepancies.
    if (spec.q.rows() == spec.m && spec.q.cols() == spec.m) {
        for (int i = 0; i < spec.m; ++i) {
            const double row_sum = spec.q.row(i).sum();
            if (std::abs(row_sum) > kRowSumTol && std::abs(row_sum) <= kRowSumRepairTol) {
                double off = 0.0;
                for (int k = 0; k < spec.m; ++k)
                    if (k != i) off += spec.q(i, k);
                spec.q(i, i) = -off;
                if (notes) {
                    std::ostringstream os;
                    os << "repaired q(" << (i + 1) << "," << (i + 1) << "): row sum was " << row_sum;
                    notes->push_back(os.str());
                }
            }
        }
    }

    const ValidationReport rep = validate(spec);
    if (!rep.ok) {
        std::ostringstream os;
        os << "model file " << path << " violates " << rep.violations.size() << " invariant(s):";
        for (const auto& v : rep.violations) os << "\n  [" << v.field << "] " << v.message;
        throw ValidationError(os.str(), rep);
    }
    return spec;
}

std::string model_to_json(const ModelSpec& spec) {
    nlohmann::ordered_json j;
    j["m"] = spec.m;
    j["a"] = std::vector<double>(spec.a.begin(), spec.a.end());
    j["b"] = std::vector<double>(spec.b.begin(), spec.b.end());
    j["sigma"] = std::vector<double>(spec.sigma.begin(), spec.sigma.end());
    j["theta"] = std::vector<double>(spec.theta.begin(), spec.theta.end());
    std::vector<std::vector<double>> q(spec.m);
    for (int i = 0; i < spec.m; ++i)
        q[i] = std::vector<double>(spec.q.row(i).begin(), spec.q.row(i).end());
    j["q"] = q;
    j["x0"] = spec.x0;
    j["i0"] = spec.i0;
    return j.dump(2);
}

}  // namespace regimevol
