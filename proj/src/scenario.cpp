// Copyright 2026 The qcpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <sstream>

#include "qcpd/harness.hpp"

namespace qcpd {

using nlohmann::json;

namespace {

std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json &obj, std::initializer_list<const char *> allowed, const std::string &path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char *a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ScenarioError(join(path, it.key()), "unknown key");
    }
}

const json &require_object(const json &j, const std::string &path) {
    if (!j.is_object()) throw ScenarioError(path.empty() ? "<root>" : path, "expected an object");
    return j;
}

double as_number(const json &j, const std::string &path) {
    if (!j.is_number()) throw ScenarioError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ScenarioError(path, "expected a finite number");
    return v;
}

long as_integer(const json &j, const std::string &path) {
    if (j.is_number_integer()) return j.get<long>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long>(v);
    }
    throw ScenarioError(path, "expected an integer");
}

std::string as_string(const json &j, const std::string &path) {
    if (!j.is_string()) throw ScenarioError(path, "expected a string");
    return j.get<std::string>();
}

Complex as_entry(const json &j, const std::string &path) {
    if (j.is_number()) return {as_number(j, path), 0.0};
    if (j.is_array() && j.size() == 2) return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
    throw ScenarioError(path, "expected a number or a [re, im] pair");
}

ComplexMatrix as_matrix(const json &j, const std::string &path) {
    if (!j.is_array() || j.empty()) throw ScenarioError(path, "expected a square array of rows");
    const std::size_t n = j.size();
    if (n < 2 || (n & (n - 1)) != 0) throw ScenarioError(path, "dimension must be a power of two >= 2");
    ComplexMatrix m(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != n) throw ScenarioError(rp, "row length must be " + std::to_string(n));
        for (std::size_t c = 0; c < n; ++c) m(r, c) = as_entry(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

json matrix_json(const ComplexMatrix &m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) {
            const Complex z = m(r, c);
            if (z.imag() == 0.0) row.push_back(z.real());
            else row.push_back(json::array({z.real(), z.imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

const char *policy_name(Policy p) {
    switch (p) {
        case Policy::escd: return "escd";
        case Policy::emcd_rr: return "emcd_rr";
        case Policy::emcd_ucb: return "emcd_ucb";
    }
    return "escd";
}

std::optional<long> parse_nu(const json &j, const std::string &path) {
    if (j.is_null()) return std::nullopt;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return std::nullopt;
        throw ScenarioError(path, "expected an integer, null or \"inf\"");
    }
    const long v = as_integer(j, path);
    if (v < 1) throw ScenarioError(path, "changepoint must be >= 1");
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t Scenario::num_observables() const {
    return explicit_observables.empty() ? static_cast<std::size_t>(std::max(rotated, 0)) : explicit_observables.size();
}

std::vector<Observable> Scenario::observables() const {
    std::vector<Observable> out;
    if (!explicit_observables.empty()) {
        for (const auto &m : explicit_observables) out.emplace_back(m);
        return out;
    }
    for (int i = 0; i < rotated; ++i) out.push_back(rotated_observable(d, M_PI * i / (2.0 * rotated)));
    return out;
}

DetectorConfig Scenario::detector_config() const {
    DetectorConfig c = DetectorConfig::uniform(num_observables(), alpha, detector);
    if (!weights.empty()) {
        double total = 0.0;
        for (double w : weights) total += w;
        for (std::size_t i = 0; i < weights.size(); ++i) c.weights[i] = weights[i] / total;
    }
    return c;
}

void Scenario::validate() const {
    const int max_d = (ensemble == Ensemble::joint && policy == Policy::escd) ? kMaxJointQubits : kMaxQubits;
    if (d < 1 || d > max_d) throw ScenarioError("d", "must lie in [1, " + std::to_string(max_d) + "]");
    if (explicit_observables.empty()) {
        if (rotated < 1) throw ScenarioError("observables.rotated", "must be >= 1");
    } else {
        for (std::size_t i = 0; i < explicit_observables.size(); ++i) {
            const std::string p = "observables.explicit[" + std::to_string(i) + "]";
            const auto &m = explicit_observables[i];
            if (m.dim() != (std::size_t{1} << d)) throw ScenarioError(p, "dimension does not match d");
            if (!m.is_hermitian(1e-10)) throw ScenarioError(p, "matrix is not Hermitian");
        }
    }
    for (auto [name, v] : {std::pair{"theta0", theta0}, std::pair{"theta1", theta1}}) {
        if (!(std::abs(v) <= 1.0)) throw ScenarioError(name, "must lie in [-1, 1]");
    }
    if (nu) {
        if (*nu < 1) throw ScenarioError("nu", "changepoint must be >= 1");
        if (theta0 > 0.0) throw ScenarioError("theta0", "pre-change parameter must be <= 0");
        if (!(theta1 > 0.0)) throw ScenarioError("theta1", "post-change parameter must be > 0");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ScenarioError("alpha", "must lie in (0, 1)");
    if (run_cap < static_cast<long>(std::ceil(1.0 / alpha - 1e-9))) {
        throw ScenarioError("run_cap", "must be >= ceil(1/alpha)");
    }
    if (!weights.empty()) {
        if (weights.size() != num_observables()) throw ScenarioError("weights", "need one weight per observable");
        double total = 0.0;
        for (double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w)) throw ScenarioError("weights", "weights must be positive");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) throw ScenarioError("weights", "weights must sum to 1");
    }
    if (betting.kind == BettingKind::cbce) {
        if (betting.grid < 1 || betting.grid > 4096) throw ScenarioError("betting.cbce.grid", "must lie in [1, 4096]");
        if (!(betting.slack >= 0.0 && betting.slack < 0.5)) {
            throw ScenarioError("betting.cbce.slack", "must lie in [0, 0.5)");
        }
    } else if (!std::isfinite(betting.constant)) {
        throw ScenarioError("betting.constant", "must be finite");
    }
    if (policy == Policy::emcd_ucb && !(ucb_delta > 0.0 && ucb_delta < 1.0)) {
        throw ScenarioError("policy.emcd_ucb.delta", "must lie in (0, 1)");
    }
    if (bounds_mode == BoundsMode::exhaustive && policy == Policy::escd) {
        const bool ok = (ensemble == Ensemble::local && d <= 3) || (ensemble == Ensemble::joint && d == 1);
        if (!ok) throw ScenarioError("bounds_mode", "exhaustive bounds need local d <= 3 or joint d = 1");
    }
}

json scenario_to_json(const Scenario &s) {
    json j;
    j["d"] = s.d;
    j["ensemble"] = s.ensemble == Ensemble::local ? "local" : "joint";
    if (s.explicit_observables.empty()) {
        j["observables"] = {{"rotated", s.rotated}};
    } else {
        json arr = json::array();
        for (const auto &m : s.explicit_observables) arr.push_back(matrix_json(m));
        j["observables"] = {{"explicit", arr}};
    }
    j["theta0"] = s.theta0;
    j["theta1"] = s.theta1;
    j["nu"] = s.nu ? json(*s.nu) : json(nullptr);
    j["alpha"] = s.alpha;
    j["detector"] = s.detector == DetectorKind::sr ? "sr" : "cusum";
    j["weights"] = s.weights.empty() ? json("uniform") : json(s.weights);
    if (s.betting.kind == BettingKind::cbce) {
        j["betting"] = {{"cbce", {{"grid", s.betting.grid}, {"slack", s.betting.slack}}}};
    } else {
        j["betting"] = {{"constant", s.betting.constant}};
    }
    if (s.policy == Policy::emcd_ucb) j["policy"] = {{"emcd_ucb", {{"delta", s.ucb_delta}}}};
    else j["policy"] = policy_name(s.policy);
    j["run_cap"] = s.run_cap;
    j["bounds_mode"] = s.bounds_mode == BoundsMode::analytic ? "analytic" : "exhaustive";
    return j;
}

Scenario scenario_from_json(const json &j) {
    require_object(j, "");
    reject_unknown(j,
                   {"d", "ensemble", "observables", "theta0", "theta1", "nu", "alpha", "detector", "weights", "betting",
                    "policy", "run_cap", "bounds_mode"},
                   "");
    Scenario s;
    if (j.contains("d")) s.d = static_cast<int>(as_integer(j["d"], "d"));
    if (j.contains("ensemble")) {
        const auto e = as_string(j["ensemble"], "ensemble");
        if (e == "local") s.ensemble = Ensemble::local;
        else if (e == "joint") s.ensemble = Ensemble::joint;
        else throw ScenarioError("ensemble", "expected \"local\" or \"joint\"");
    }
    if (j.contains("observables")) {
        const auto &o = require_object(j["observables"], "observables");
        reject_unknown(o, {"rotated", "explicit"}, "observables");
        if (o.size() != 1) throw ScenarioError("observables", "give exactly one of \"rotated\" or \"explicit\"");
        if (o.contains("rotated")) {
            s.rotated = static_cast<int>(as_integer(o["rotated"], "observables.rotated"));
        } else {
            const auto &arr = o["explicit"];
            if (!arr.is_array() || arr.empty()) throw ScenarioError("observables.explicit", "expected a nonempty array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                s.explicit_observables.push_back(as_matrix(arr[i], "observables.explicit[" + std::to_string(i) + "]"));
            }
        }
    }
    if (j.contains("theta0")) s.theta0 = as_number(j["theta0"], "theta0");
    if (j.contains("theta1")) s.theta1 = as_number(j["theta1"], "theta1");
    if (j.contains("nu")) s.nu = parse_nu(j["nu"], "nu");
    if (j.contains("alpha")) s.alpha = as_number(j["alpha"], "alpha");
    if (j.contains("detector")) {
        const auto k = as_string(j["detector"], "detector");
        if (k == "sr") s.detector = DetectorKind::sr;
        else if (k == "cusum") s.detector = DetectorKind::cusum;
        else throw ScenarioError("detector", "expected \"sr\" or \"cusum\"");
    }
    if (j.contains("weights")) {
        const auto &w = j["weights"];
        if (w.is_string()) {
            if (w.get<std::string>() != "uniform") throw ScenarioError("weights", "expected \"uniform\" or an array");
        } else if (w.is_array()) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                s.weights.push_back(as_number(w[i], "weights[" + std::to_string(i) + "]"));
            }
        } else {
            throw ScenarioError("weights", "expected \"uniform\" or an array");
        }
    }
    if (j.contains("betting")) {
        const auto &b = require_object(j["betting"], "betting");
        reject_unknown(b, {"cbce", "constant"}, "betting");
        if (b.size() != 1) throw ScenarioError("betting", "give exactly one of \"cbce\" or \"constant\"");
        if (b.contains("cbce")) {
            const auto &c = require_object(b["cbce"], "betting.cbce");
            reject_unknown(c, {"grid", "slack"}, "betting.cbce");
            s.betting.kind = BettingKind::cbce;
            if (c.contains("grid")) s.betting.grid = static_cast<int>(as_integer(c["grid"], "betting.cbce.grid"));
            if (c.contains("slack")) s.betting.slack = as_number(c["slack"], "betting.cbce.slack");
        } else {
            s.betting.kind = BettingKind::constant;
            s.betting.constant = as_number(b["constant"], "betting.constant");
        }
    }
    if (j.contains("policy")) {
        const auto &p = j["policy"];
        if (p.is_string()) {
            const auto v = p.get<std::string>();
            if (v == "escd") s.policy = Policy::escd;
            else if (v == "emcd_rr") s.policy = Policy::emcd_rr;
            else if (v == "emcd_ucb") s.policy = Policy::emcd_ucb;
            else throw ScenarioError("policy", "expected \"escd\", \"emcd_rr\" or {\"emcd_ucb\": {...}}");
        } else {
            require_object(p, "policy");
            reject_unknown(p, {"emcd_ucb"}, "policy");
            if (!p.contains("emcd_ucb")) throw ScenarioError("policy", "expected {\"emcd_ucb\": {\"delta\": ...}}");
            const auto &u = require_object(p["emcd_ucb"], "policy.emcd_ucb");
            reject_unknown(u, {"delta"}, "policy.emcd_ucb");
            s.policy = Policy::emcd_ucb;
            if (u.contains("delta")) s.ucb_delta = as_number(u["delta"], "policy.emcd_ucb.delta");
        }
    }
    if (j.contains("run_cap")) s.run_cap = as_integer(j["run_cap"], "run_cap");
    if (j.contains("bounds_mode")) {
        const auto m = as_string(j["bounds_mode"], "bounds_mode");
        if (m == "analytic") s.bounds_mode = BoundsMode::analytic;
        else if (m == "exhaustive") s.bounds_mode = BoundsMode::exhaustive;
        else throw ScenarioError("bounds_mode", "expected \"analytic\" or \"exhaustive\"");
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ScenarioError("<root>", std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

void set_scenario_param(Scenario &s, const std::string &name, const std::string &value) {
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error &) {
        v = value;
    }
    json j = scenario_to_json(s);
    if (name == "n") {
        j["observables"] = {{"rotated", v}};
    } else if (name == "grid" || name == "slack") {
        if (!j["betting"].contains("cbce")) throw ScenarioError("betting", "sweeping " + name + " needs cbce betting");
        j["betting"]["cbce"][name] = v;
    } else if (name == "delta") {
        j["policy"] = {{"emcd_ucb", {{"delta", v}}}};
    } else {
        if (name == "betting" || name == "observables" || !j.contains(name)) {
            throw ScenarioError(name, "not a sweepable parameter");
        }
        j[name] = v;
    }
    s = scenario_from_json(j);
}

}  // namespace qcpd
