// Machine-readable evaluation reports with a flat table rendering.
//
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

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace vpoint {

struct Report {
    std::string dataset;
    std::string strategy;
    double tau = 0.0;
    int k = 0;
    double j = 0.0;
    double f = 0.0;
    double jf = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> mae;
    std::optional<double> ema;
    nlohmann::json extra;  // full config echo
};

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// One-line-per-field table for terminals.
std::string render_report_table(const Report& r);

void write_report(const Report& r, const std::string& path);
Report read_report(const std::string& path);

}  // namespace vpoint
