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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "kpinsker/pinsker.hpp"
#include "kpinsker/rational.hpp"
#include "kpinsker/simulator.hpp"
#include "kpinsker/spectrum.hpp"

namespace kpinsker::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericError = 3 };

enum class Format { csv, json, svg };

struct KernelSection {
  std::string label;
  std::string preset = "rbf";
  std::vector<double> coefficients;  // overrides preset when non-empty
  unsigned truncation_degree = 60;
  std::optional<unsigned> k_max;
  std::vector<std::pair<double, std::uint64_t>> synthetic;  // eigenvalue, multiplicity

  bool is_synthetic() const { return !synthetic.empty(); }
  KernelSpec spec() const;
};

struct ProblemSection {
  int d = 30;
  Rational gamma{3, 2};
  Rational s{1};
  double alpha = 1.0;
  double radius = 1.0;
  double sigma = 1.0;
  std::optional<std::uint64_t> n;

  ProblemConfig config() const;
  ProblemConfig config_at(int dimension) const;
};

struct SimulationSection {
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  std::vector<std::string> targets{"family"};  // family, zero, uniform, prior, single_block:k
  std::size_t gram_cap = kDefaultGramCap;
};

struct OutputSection {
  std::optional<Format> format;  // unset: the command's natural format
  std::string path;
};

// 1/20, 2/20, ..., 9.
std::vector<Rational> default_gamma_grid();

struct CurvesSection {
  std::vector<Rational> s{Rational(1, 100), Rational(1, 2), Rational(1), Rational(3), Rational(8)};
  std::vector<Rational> gamma = default_gamma_grid();
};

struct VerifySection {
  std::vector<int> d_grid{100, 500, 2000};
  std::size_t reps = 400;
  std::optional<std::pair<unsigned, double>> corrupt_eigenvalue;  // degree, replacement value
};

struct RunConfig {
  KernelSection kernel;
  ProblemSection problem;
  SimulationSection simulation;
  OutputSection output;
  CurvesSection curves;
  VerifySection verify;

  // Canonical JSON text; the config hash is taken over it.
  std::string canonical() const;
  std::string hash() const;
};

// Parses a JSON document; unknown keys and malformed values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

Format parse_format(const std::string& name);

// The whole command line in-process; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpinsker::cli
