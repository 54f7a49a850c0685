// Copyright 2026 the vpoint authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vpoint/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vpoint {

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
}

}  // namespace

nlohmann::json report_to_json(const Report& r) {
    nlohmann::json j;
    j["dataset"] = r.dataset;
    j["strategy"] = r.strategy;
    j["tau"] = r.tau;
    j["k"] = r.k;
    j["j"] = r.j;
    j["f"] = r.f;
    j["jf"] = r.jf;
    j["precision"] = opt_json(r.precision);
    j["recall"] = opt_json(r.recall);
    j["f1"] = opt_json(r.f1);
    j["mae"] = opt_json(r.mae);
    j["ema"] = opt_json(r.ema);
    if (!r.extra.is_null()) j["config"] = r.extra;
    return j;
}

Report report_from_json(const nlohmann::json& j) {
    Report r;
    r.dataset = j.at("dataset").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.tau = j.at("tau").get<double>();
    r.k = j.at("k").get<int>();
    r.j = j.at("j").get<double>();
    r.f = j.at("f").get<double>();
    r.jf = j.at("jf").get<double>();
    r.precision = opt_from(j, "precision");
    r.recall = opt_from(j, "recall");
    r.f1 = opt_from(j, "f1");
    r.mae = opt_from(j, "mae");
    r.ema = opt_from(j, "ema");
    if (j.contains("config")) r.extra = j["config"];
    return r;
}

std::string render_report_table(const Report& r) {
    char buf[128];
    std::string out;
    auto row = [&out, &buf](const char* name, const std::string& value) {
        std::snprintf(buf, sizeof(buf), "%-10s %s\n", name, value.c_str());
        out += buf;
    };
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    auto opt = [&num](const std::optional<double>& v) { return v ? num(*v) : std::string("-"); };

    row("dataset", r.dataset);
    row("strategy", r.strategy);
    row("tau", num(r.tau));
    row("k", std::to_string(r.k));
    row("J", num(r.j));
    row("F", num(r.f));
    row("J&F", num(r.jf));
    row("precision", opt(r.precision));
    row("recall", opt(r.recall));
    row("f1", opt(r.f1));
    row("mae", opt(r.mae));
    row("ema", opt(r.ema));
    return out;
}

void write_report(const Report& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << report_to_json(r).dump(2) << "\n";
}

Report read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report: " + path);
    return report_from_json(nlohmann::json::parse(in));
}

}  // namespace vpoint
