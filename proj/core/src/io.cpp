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

#include "kpinsker/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace kpinsker {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json block_multiplicity(double real, std::uint64_t exact) {
  if (exact != 0) return exact;
  return real;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string spectrum_json(const SpectrumTable& table) {
  json j;
  j["dimension"] = table.dimension();
  j["exhaustive"] = table.exhaustive();
  json blocks = json::array();
  for (const auto& b : table.blocks()) {
    json e;
    e["degree"] = b.degree;
    e["eigenvalue"] = b.eigenvalue;
    e["multiplicity"] = block_multiplicity(b.multiplicity, b.exact_multiplicity);
    e["cumulative"] = block_multiplicity(b.cumulative, b.exact_cumulative);
    blocks.push_back(e);
  }
  j["blocks"] = blocks;
  json order = json::array();
  for (auto idx : table.order()) order.push_back(table.blocks()[idx].degree);
  j["sorted_degrees"] = order;
  return j.dump(2);
}

std::string solution_json(const PinskerSolution& s) {
  json j;
  j["kappa_star"] = s.kappa_star;
  j["N"] = block_multiplicity(s.cutoff, s.exact_cutoff);
  j["q"] = s.top_degree;
  j["dstar"] = s.dstar;
  json blocks = json::array();
  for (const auto& b : s.blocks) {
    if (!b.retained) continue;
    json e;
    e["degree"] = b.degree;
    e["eigenvalue"] = b.eigenvalue;
    e["multiplicity"] = block_multiplicity(b.multiplicity, b.exact_multiplicity);
    e["weight"] = b.weight;
    blocks.push_back(e);
  }
  j["blocks"] = blocks;
  j["identity_residual"] = s.identity_residual;
  j["boundary_ambiguous"] = s.boundary_ambiguous;
  j["block_aligned"] = s.block_aligned;
  j["sample_size"] = s.sample_size;
  return j.dump(2);
}

std::string report_json(const SimReport& r) {
  json j;
  j["config_hash"] = r.config_hash;
  j["d"] = r.dimension;
  j["gamma"] = r.gamma;
  j["s"] = r.smoothness;
  j["n"] = r.sample_size;
  j["reps"] = r.reps;
  j["seed"] = r.seed;
  j["mean"] = r.mean_risk;
  j["stderr"] = r.stderr_risk;
  j["dstar"] = r.dstar;
  j["ratio"] = r.ratio;
  j["worst_target"] = r.targets.empty() ? std::string() : r.targets[r.worst].name;
  j["mean_term_bound"] = r.mean_term_bound;
  json targets = json::array();
  for (const auto& t : r.targets) {
    json e;
    e["name"] = t.name;
    e["mean"] = t.mean_risk;
    e["stderr"] = t.stderr_risk;
    e["mean_term"] = t.mean_term;
    e["mean_term_stderr"] = t.stderr_mean_term;
    targets.push_back(e);
  }
  j["targets"] = targets;
  return j.dump(2);
}

void write_report_csv_header(std::ostream& out) { out << "config_hash,d,gamma,s,reps,mean,stderr,dstar,ratio,seed\n"; }

void write_report_csv_row(std::ostream& out, const SimReport& r) {
  out << r.config_hash << ',' << r.dimension << ',' << r.gamma << ',' << r.smoothness << ',' << r.reps << ','
      << num(r.mean_risk) << ',' << num(r.stderr_risk) << ',' << num(r.dstar) << ',' << num(r.ratio) << ',' << r.seed
      << '\n';
}

std::string basis_json(const HarmonicBasis& basis) {
  json j;
  j["dimension"] = basis.dimension;
  j["degree"] = basis.degree;
  json fns = json::array();
  for (const auto& f : basis.functions) {
    json terms = json::array();
    for (const auto& t : f.terms()) {
      json e;
      e["coefficient"] = t.coefficient;
      e["exponents"] = t.exponents;
      terms.push_back(e);
    }
    fns.push_back(terms);
  }
  j["functions"] = fns;
  return j.dump(2);
}

void write_rate_csv(std::ostream& out, std::span<const RateCurve> curves) {
  out << "s,gamma,zeta,zeta_value,plateau\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      bool on_plateau = false;
      for (const auto& pl : c.plateaus) {
        if (pl.gamma_begin <= p.gamma && p.gamma <= pl.gamma_end) on_plateau = true;
      }
      out << c.s.str() << ',' << p.gamma.str() << ',' << p.zeta.str() << ',' << num(p.zeta.to_double()) << ','
          << (on_plateau ? 1 : 0) << '\n';
    }
  }
}

void write_constant_csv(std::ostream& out, std::span<const Rational> s_values,
                        std::span<const std::vector<ConstantPoint>> curves) {
  out << "s,gamma,cstar,regime,jump\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (const auto& p : curves[i]) {
      out << s_values[i].str() << ',' << p.gamma.str() << ',' << num(p.cstar) << ',' << to_string(p.regime) << ','
          << (p.jump ? 1 : 0) << '\n';
    }
  }
}

std::string line_plot_svg(std::string_view title, std::string_view x_label, std::string_view y_label,
                          std::span<const PlotSeries> series) {
  constexpr double width = 720, height = 480, left = 70, right = 150, top = 40, bottom = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  y0 = std::min(y0, 0.0);
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
    << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
    << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = x0 + (x1 - x0) * t / 5.0, yv = y0 + (y1 - y0) * t / 5.0;
    o << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << num(std::round(xv * 1000) / 1000) << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << num(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
    << xml_escape(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
    << top + ph / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % std::size(palette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.y[i])) o << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
    }
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.marked.size(); ++i) {
      if (s.marked[i] && std::isfinite(s.y[i])) {
        o << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
      }
    }
    o << "<text x=\"" << left + pw + 12 << "\" y=\"" << top + 16 + 18 * k << "\" font-size=\"12\" fill=\"" << color
      << "\">" << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace kpinsker
