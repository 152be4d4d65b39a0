#pragma once

#include "pk/algebra.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace pk {

struct SuiteOptions {
  uint64_t seed = kDefaultSeed;
  int trials = kDefaultTrials;
  // Relations under the kappa_physical+alpha_beta_shift substitution run only with this set.
  bool alpha_beta_shift = false;
};

struct SuiteSection {
  std::string suite, name;
  bool pass = true;
  std::vector<std::string> warnings, notes;
  std::string text;
  std::string json;  // section report, JSON text
};

struct SuiteReport {
  std::string model, suite;
  SuiteOptions options;
  std::vector<SuiteSection> sections;

  bool passed() const;
  std::string to_text() const;
  std::string to_json() const;
};

struct UnknownSuite : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// algebra, ansatz, supercharges, solutions, finite, all
const std::vector<std::string>& suite_names();
SuiteReport run_suite(const ModelSpec& m, const std::string& suite, const SuiteOptions& opt = {});

// "Q+" -> "Qp", "U-" -> "Um"; other names unchanged.
std::string canonical_op_name(const std::string& name);

struct BracketResult {
  std::string a, b, kind, basis_source;
  std::vector<std::string> basis;
  BasisExpansion expansion;
  std::string str() const;  // "anticommutator = H0 - w*Y"
};

// Bracket of two named operators expanded over the first table or closure basis holding both (graded ones first), else the
// model's last closure basis, else the listed generators. std::out_of_range for unknown names.
BracketResult bracket_names(const ModelSpec& m, const std::string& a, const std::string& b,
                            uint64_t seed = kDefaultSeed, int trials = kDefaultTrials);

}  // namespace pk
