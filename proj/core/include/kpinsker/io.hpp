// Copyright 2026 The kpinsker Authors
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

// Serialization of tables, solutions, curves and reports.

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpinsker/harmonics.hpp"
#include "kpinsker/pinsker.hpp"
#include "kpinsker/simulator.hpp"
#include "kpinsker/spectrum.hpp"

namespace kpinsker {

// FNV-1a 64 as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

std::string spectrum_json(const SpectrumTable& table);

// {kappa_star, N, q, dstar, blocks:[{degree, eigenvalue, multiplicity, weight}],
//  identity_residual, boundary_ambiguous}
std::string solution_json(const PinskerSolution& solution);

std::string report_json(const SimReport& report);
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const SimReport& report);

std::string basis_json(const HarmonicBasis& basis);

// gamma,zeta per s; gamma,cstar,regime,jump per s.
void write_rate_csv(std::ostream& out, std::span<const RateCurve> curves);
void write_constant_csv(std::ostream& out, std::span<const Rational> s_values,
                        std::span<const std::vector<ConstantPoint>> curves);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<bool> marked;  // filled dot at this point
};

// Minimal line chart: one polyline per series, dots where marked.
std::string line_plot_svg(std::string_view title, std::string_view x_label, std::string_view y_label,
                          std::span<const PlotSeries> series);

}  // namespace kpinsker
