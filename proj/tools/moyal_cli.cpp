#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "moyal/harness.hpp"

using namespace moyal;

namespace {

Complex parse_complex(const std::string& flag, const std::string& s) {
  std::stringstream ss(s);
  std::string re, im;
  std::getline(ss, re, ',');
  std::getline(ss, im);
  try {
    std::size_t u1 = 0, u2 = 0;
    double r = std::stod(re, &u1);
    double i = im.empty() ? 0.0 : std::stod(im, &u2);
    if (u1 != re.size() || u2 != im.size()) throw std::invalid_argument(s);
    return {r, i};
  } catch (const std::exception&) {
    throw ConfigError(flag + ": expected re,im, got " + s);
  }
}

std::vector<double> parse_list(const std::string& flag, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": not a number: " + item);
    }
  }
  return out;
}

struct RawFlags {
  std::string epsilon, a, nu, format = "text", catalog, out, domain;
  std::vector<std::string> tol;
  int mmax = -1, truncate = -1;
  std::uint64_t seed = 0;
  bool seed_set = false, single_thread = false;
};

ScenarioConfig build_config(const RawFlags& f) {
  ScenarioConfig cfg = ScenarioConfig::from_environment();
  if (!f.epsilon.empty()) cfg.epsilon = parse_complex("--epsilon", f.epsilon);
  if (!f.a.empty()) cfg.a = parse_complex("--a", f.a);
  if (!f.nu.empty()) cfg.nus = parse_list("--nu", f.nu);
  if (f.mmax >= 0) cfg.mmax = f.mmax;
  if (f.truncate >= 0) cfg.truncate = f.truncate;
  for (const auto& t : f.tol) cfg.set_tolerance(t);
  cfg.format = parse_format(f.format);
  if (f.seed_set) cfg.seed = f.seed;
  cfg.single_thread = f.single_thread;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.domain.empty()) cfg.domain = f.domain;
  if (!f.catalog.empty()) {
    std::ifstream in(f.catalog);
    if (!in) throw ConfigError("--catalog: cannot read " + f.catalog);
    try {
      cfg.catalog = catalog_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("--catalog: ") + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void emit(const Report& rep, const ScenarioConfig& cfg) {
  std::string body = rep.render(cfg.format);
  std::cout << body;
  if (cfg.output_dir.empty()) return;
  std::filesystem::create_directories(cfg.output_dir);
  auto path = std::filesystem::path(cfg.output_dir) / (rep.scenario + "." + format_extension(cfg.format));
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moyal expansion verification"};
  app.require_subcommand(1);
  RawFlags f;
  auto common = [&f](CLI::App* s) {
    s->add_option("--epsilon", f.epsilon, "unimodular epsilon as re,im");
    s->add_option("--a", f.a, "gauge parameter a as re,im");
    s->add_option("--nu", f.nu, "comma separated nu values");
    s->add_option("--mmax", f.mmax, "largest m for coefficient checks");
    s->add_option("--truncate", f.truncate, "largest partial-sum order M");
    s->add_option("--tol", f.tol, "tolerance override name=value (repeatable)");
    s->add_option("--format", f.format, "json, csv or text");
    s->add_option("--seed", f.seed, "random seed")->each([&f](const std::string&) { f.seed_set = true; });
    s->add_flag("--single-thread", f.single_thread, "run check groups sequentially");
    s->add_option("--out", f.out, "output directory (default $MOYAL_OUTPUT_DIR)");
    s->add_option("--catalog", f.catalog, "JSON file replacing the built-in domain table");
  };
  int example = 0;
  auto* ex = app.add_subcommand("example", "run one worked example");
  ex->add_option("n", example, "1, 2, 3 or 4")->required();
  common(ex);
  auto* co = app.add_subcommand("coeffs", "coefficients 1/[nu]_m for one domain");
  co->add_option("--domain", f.domain, "interval, product, flat-real or flat-complex");
  common(co);
  auto* ca = app.add_subcommand("catalog", "domain table and dimension identities");
  common(ca);
  auto* va = app.add_subcommand("verify-all", "every check group");
  common(va);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfigError;
  }

  try {
    ScenarioConfig cfg = build_config(f);
    Report rep;
    if (ex->parsed())
      rep = cmd_example(example, cfg);
    else if (co->parsed())
      rep = cmd_coeffs(cfg);
    else if (ca->parsed())
      rep = cmd_catalog(cfg);
    else
      rep = cmd_verify_all(cfg);
    emit(rep, cfg);
    return rep.exit_code();
  } catch (const ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}
