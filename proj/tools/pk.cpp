// Command-line front end: derive, verify, bracket, models, export.
#include "pk/suites.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

uint64_t default_seed() {
  if (const char* s = std::getenv("PK_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed PK_SEED=" << s << "\n";
    }
  }
  return pk::kDefaultSeed;
}

struct Common {
  uint64_t seed = default_seed();
  int trials = pk::kDefaultTrials;
  bool json = false;
};

void add_common(CLI::App* c, Common& o) {
  c->add_option("--seed", o.seed, "random seed (default 42, or $PK_SEED)");
  c->add_option("--trials", o.trials, "oracle trials")->check(CLI::PositiveNumber);
  c->add_flag("--json", o.json, "machine-readable output");
}

// nullopt after printing the reason on failure
std::optional<pk::ModelSpec> load(const std::string& id) {
  try {
    return pk::resolve_model(id);
  } catch (const std::exception& e) {
    std::cerr << "cannot load model " << id << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

int cmd_derive(const std::string& id, int order, const Common& o) {
  auto m = load(id);
  if (!m) return kUsage;
  pk::DeterminingSystem det = pk::determining_system(*m, order);
  if (o.json) {
    std::cout << det.to_json() << "\n";
  } else {
    std::cout << det.equations.size() << " determining equations (order " << order << ")\n" << det.to_text();
    for (const auto& f : det.findings) std::cout << "finding: " << f << "\n";
  }
  return kPass;
}

int cmd_verify(const std::string& id, const std::string& suite, bool shift, const Common& o) {
  auto m = load(id);
  if (!m) return kUsage;
  pk::SuiteOptions so{o.seed, o.trials, shift};
  pk::SuiteReport r;
  try {
    r = pk::run_suite(*m, suite, so);
  } catch (const pk::UnknownSuite& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  std::cout << (o.json ? r.to_json() + "\n" : r.to_text());
  for (const auto& s : r.sections)
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  return r.passed() ? kPass : kFail;
}

int cmd_bracket(const std::string& id, const std::string& a, const std::string& b, const Common& o) {
  auto m = load(id);
  if (!m) return kUsage;
  pk::BracketResult r;
  try {
    r = pk::bracket_names(*m, a, b, o.seed, o.trials);
  } catch (const std::out_of_range& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  if (o.json) {
    json j = {{"model", m->name}, {"a", r.a},       {"b", r.b},
              {"kind", r.kind},   {"basis", r.basis}, {"basis_source", r.basis_source},
              {"in_span", r.expansion.in_span}};
    if (r.expansion.in_span) {
      json c = json::object();
      for (size_t k = 0; k < r.expansion.names.size(); ++k)
        if (!r.expansion.coeffs[k].is_zero()) c[r.expansion.names[k]] = r.expansion.coeffs[k].str();
      j["coefficients"] = c;
      j["value"] = r.expansion.str();
    } else if (r.expansion.witness) {
      j["witness"] = r.expansion.witness->str();
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << r.str() << "\n";
  }
  return kPass;
}

int cmd_models(const Common& o) {
  json arr = json::array();
  for (const auto& n : pk::builtin_names()) {
    pk::ModelSpec m = pk::builtin(n);
    arr.push_back({{"name", n},
                   {"dim", m.dim},
                   {"generators", m.generator_names.size()},
                   {"tables", m.tables.size()},
                   {"relations", m.relations.size()},
                   {"solutions", m.solutions.size()},
                   {"ansatz", m.ansatz.has_value()}});
  }
  if (o.json) {
    std::cout << arr.dump(2) << "\n";
    return kPass;
  }
  for (const auto& j : arr)
    std::cout << j["name"].get<std::string>() << "  dim " << j["dim"] << ", " << j["generators"] << " generators, "
              << j["tables"] << " tables, " << j["relations"] << " relations, " << j["solutions"] << " solutions"
              << (j["ansatz"].get<bool>() ? ", ansatz" : "") << "\n";
  return kPass;
}

int cmd_export(const std::string& id, const std::string& file) {
  auto m = load(id);
  if (!m) return kUsage;
  try {
    pk::save_model(*m, file);
  } catch (const std::exception& e) {
    std::cerr << "cannot write " << file << ": " << e.what() << "\n";
    return kUsage;
  }
  std::cout << "wrote " << m->name << " to " << file << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry and superalgebra checks for Schroedinger-Pauli models"};
  app.require_subcommand(1);
  Common o;
  std::string model, suite, a, b, file;
  int order = 2;
  bool shift = false;

  auto* derive = app.add_subcommand("derive", "print the determining equations of a model");
  derive->add_option("model", model, "builtin id or model file")->required();
  derive->add_option("--order", order, "prolongation order")->check(CLI::Range(1, 4));
  add_common(derive, o);

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("model", model, "builtin id or model file")->required();
  verify->add_option("suite", suite, "algebra|ansatz|supercharges|solutions|finite|all")->required();
  verify->add_flag("--alpha-beta-shift", shift, "run the relations that need the alpha+beta shift");
  add_common(verify, o);

  auto* br = app.add_subcommand("bracket", "expand the bracket of two named operators");
  br->add_option("model", model, "builtin id or model file")->required();
  br->add_option("a", a, "operator name, e.g. Q+")->required();
  br->add_option("b", b, "operator name")->required();
  add_common(br, o);

  auto* models = app.add_subcommand("models", "list builtin models");
  add_common(models, o);

  auto* exp = app.add_subcommand("export", "write a model document");
  exp->add_option("model", model, "builtin id or model file")->required();
  exp->add_option("file", file, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }
  try {
    if (*derive) return cmd_derive(model, order, o);
    if (*verify) return cmd_verify(model, suite, shift, o);
    if (*br) return cmd_bracket(model, a, b, o);
    if (*models) return cmd_models(o);
    if (*exp) return cmd_export(model, file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
