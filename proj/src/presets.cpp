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

#include <sstream>

#include "qcpd/harness.hpp"

namespace qcpd {

namespace {

struct Scale {
    double alpha;
    long arl_cap;
    long delay_cap;
    long nu;
    long runs;
};

const Scale kFull{1e-3, 5000, 50000, 200, 100};
const Scale kDesk{1e-2, 2000, 20000, 50, 200};

std::string num(double v) { return format_real(v); }

const char *policy_tag(Policy p) {
    switch (p) {
        case Policy::escd: return "escd";
        case Policy::emcd_rr: return "emcd_rr";
        case Policy::emcd_ucb: return "emcd_ucb";
    }
    return "";
}

Scenario base(const Scale &s) {
    Scenario sc;
    sc.d = 2;
    sc.rotated = 1;
    sc.alpha = s.alpha;
    sc.theta0 = -0.5;
    sc.theta1 = 0.5;
    return sc;
}

std::vector<PresetPoint> fig3_left(const Scale &s, long runs) {
    std::vector<PresetPoint> out;
    for (double th0 : {-0.5, -0.4, -0.3, -0.2, -0.1, 0.0}) {
        for (Policy p : {Policy::escd, Policy::emcd_rr}) {
            Scenario sc = base(s);
            sc.theta0 = th0;
            sc.nu.reset();
            sc.run_cap = s.arl_cap;
            sc.policy = p;
            out.push_back({std::string(policy_tag(p)) + " theta0=" + num(th0), sc, runs});
        }
    }
    return out;
}

std::vector<PresetPoint> fig3_right(const Scale &s, std::vector<double> thetas) {
    std::vector<PresetPoint> out;
    for (double th1 : thetas) {
        for (Policy p : {Policy::escd, Policy::emcd_rr}) {
            Scenario sc = base(s);
            sc.theta1 = th1;
            sc.nu = s.nu;
            sc.run_cap = s.delay_cap;
            sc.policy = p;
            out.push_back({std::string(policy_tag(p)) + " theta1=" + num(th1), sc, s.runs});
        }
    }
    return out;
}

std::vector<PresetPoint> fig4(const Scale &s, std::vector<int> ns) {
    std::vector<PresetPoint> out;
    for (int n : ns) {
        for (Policy p : {Policy::escd, Policy::emcd_rr, Policy::emcd_ucb}) {
            Scenario sc = base(s);
            sc.rotated = n;
            sc.nu = s.nu;
            sc.run_cap = s.delay_cap;
            sc.policy = p;
            out.push_back({std::string(policy_tag(p)) + " n=" + std::to_string(n), sc, s.runs});
        }
    }
    return out;
}

std::vector<PresetPoint> fig5(const Scale &s, std::vector<int> ds, std::vector<double> thetas) {
    std::vector<PresetPoint> out;
    for (int d : ds) {
        for (double th1 : thetas) {
            for (Ensemble e : {Ensemble::local, Ensemble::joint}) {
                Scenario sc = base(s);
                sc.d = d;
                sc.ensemble = e;
                sc.theta1 = th1;
                sc.nu = s.nu;
                sc.run_cap = s.delay_cap;
                out.push_back({std::string(e == Ensemble::local ? "local" : "joint") + " d=" + std::to_string(d) +
                                   " theta1=" + num(th1),
                               sc, s.runs});
            }
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig3-left", "fig3-right", "fig4", "fig5", "desk-fig3-left", "desk-fig3-right", "desk-fig4", "desk-fig5"};
}

std::vector<PresetPoint> make_preset(const std::string &name) {
    if (name == "fig3-left") return fig3_left(kFull, 100);
    if (name == "fig3-right") return fig3_right(kFull, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    if (name == "fig4") return fig4(kFull, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    if (name == "fig5") return fig5(kFull, {1, 2, 3}, {0.2, 0.4, 0.6, 0.8, 1.0});
    if (name == "desk-fig3-left") return fig3_left(kDesk, 300);
    if (name == "desk-fig3-right") return fig3_right(kDesk, {0.25, 0.5, 0.75, 1.0});
    if (name == "desk-fig4") return fig4(kDesk, {1, 2, 4, 8});
    if (name == "desk-fig5") return fig5(kDesk, {3}, {0.6, 0.8, 1.0});
    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; known:";
    for (const auto &n : preset_names()) msg << " " << n;
    throw std::invalid_argument(msg.str());
}

}  // namespace qcpd
