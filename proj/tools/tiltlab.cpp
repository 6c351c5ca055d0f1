// tiltlab command-line interface: cmin, ideals, verify, alcove.
//
// Exit codes: 0 success, 1 verification failure, 2 window/resource error, 3 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tiltlab/tiltlab.hpp"

using namespace tiltlab;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitWindow = 2;
constexpr int kExitUsage = 3;

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Reads key=value lines ('#' starts a comment) into the run configuration.
void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    try {
      if (key == "ell") cfg.ell = std::stoi(val);
      else if (key == "window") cfg.window = std::stoi(val);
      else if (key == "suite") cfg.suite = val;
      else if (key == "budget") cfg.budget = std::stoi(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "cache_dir") cfg.cache_dir = val;
      else if (key == "output") cfg.output = val;
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

/// Finds --config before CLI11 parsing so that file values become the flag defaults.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

void emit(const json& j, const std::string& output, int indent = -1) {
  std::string text = j.dump(indent);
  if (output.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  out << text << "\n";
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (long long x : alcove::parse_weight(s)) out.push_back(static_cast<int>(x));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string config_path = find_config_path(argc, argv);
  try {
    if (!config_path.empty()) load_config_file(config_path, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"tiltlab: minimal tilting complexes and tensor ideals for quantum sl2 at roots of unity"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", config_path, "key=value configuration file (flags override it)");
  app.add_option("--cache-dir", cfg.cache_dir, "directory for the C_min cache (also TILTLAB_CACHE)");
  app.add_option("--output", cfg.output, "write the JSON result to this file instead of stdout");

  auto* cmin = app.add_subcommand("cmin", "minimal tilting complex of a standard module");
  std::string module_spec;
  cmin->add_option("--ell", cfg.ell, "odd order of the root of unity")->capture_default_str();
  cmin->add_option("--module", module_spec, "module as kind:n with kind in L|delta|nabla|T")->required();

  auto* ideals = app.add_subcommand("ideals", "thick tensor ideals of tilting modules on a window");
  std::string ideals_action, generators;
  ideals->add_option("action", ideals_action, "enumerate | generate")->required()->check(CLI::IsMember({"enumerate", "generate"}));
  ideals->add_option("generators", generators, "comma-separated generator weights (for generate)");
  ideals->add_option("--ell", cfg.ell, "odd order of the root of unity")->capture_default_str();
  ideals->add_option("--window", cfg.window, "largest tilting label W considered")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run a property suite and print its JSON report");
  verify->add_option("--suite", cfg.suite)
      ->check(CLI::IsMember({"lemmas", "two-out-of-three", "bijection", "alcove-cross"}))
      ->capture_default_str();
  verify->add_option("--ell", cfg.ell, "odd order of the root of unity")->capture_default_str();
  verify->add_option("--window", cfg.window, "largest tilting label W considered")->capture_default_str();
  verify->add_option("--budget", cfg.budget, "number of sampled cases per check")->capture_default_str();
  verify->add_option("--seed", cfg.seed, "sampler seed")->capture_default_str();

  auto* alc = app.add_subcommand("alcove", "alcove combinatorics for a simple root system");
  std::string alc_action, type, lambda_str;
  long long p = 0, bound = -1;
  alc->add_option("action", alc_action, "d | regular | steinberg | negligible | orbit")
      ->required()
      ->check(CLI::IsMember({"d", "regular", "steinberg", "negligible", "orbit"}));
  alc->add_option("--type", type, "root system type, e.g. A2, G2")->required();
  alc->add_option("--p", p, "prime (or l)")->required()->check(CLI::PositiveNumber);
  alc->add_option("--lambda", lambda_str, "dominant weight in fundamental-weight coordinates, e.g. 3,3")->required();
  alc->add_option("--bound", bound, "orbit bound on <mu, alpha_0^vee> (default 3p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (!cfg.cache_dir.empty()) setenv("TILTLAB_CACHE", cfg.cache_dir.c_str(), 1);
  else if (const char* env = std::getenv("TILTLAB_CACHE")) cfg.cache_dir = env;

  try {
    if (*cmin) {
      if (cfg.ell < 3 || cfg.ell % 2 == 0) throw std::invalid_argument("ell must be odd and at least 3");
      NamedModule M = parse_module_spec(cfg.ell, module_spec);
      auto C = minimal_tilting_complex(M.module).complex;
      emit(json{{"ell", cfg.ell}, {"module", M.name}, {"degrees", labels_json(C)}}, cfg.output);
      return 0;
    }
    if (*ideals) {
      cfg.suite = "ideals";
      cfg.validate();
      if (ideals_action == "enumerate") {
        json list = json::array();
        for (const auto& I : enumerate_tilt_ideals(cfg.ell, cfg.window)) {
          json ij{{"members", I.members}};
          ij["prime"] = I.is_proper() ? json(is_prime_on_window(I)) : json(nullptr);
          list.push_back(ij);
        }
        emit(json{{"ell", cfg.ell}, {"W", cfg.window}, {"count", list.size()}, {"ideals", list}}, cfg.output);
      } else {
        if (generators.empty()) throw std::invalid_argument("generate needs a comma-separated list of generators");
        auto gens = parse_int_list(generators);
        TiltIdeal I = generate_tilt_ideal(std::set<int>(gens.begin(), gens.end()), cfg.ell, cfg.window);
        json out{{"ell", cfg.ell}, {"W", cfg.window}, {"generators", gens}, {"members", I.members}, {"full", I.is_full()}};
        out["prime"] = I.is_proper() ? json(is_prime_on_window(I)) : json(nullptr);
        emit(out, cfg.output);
      }
      return 0;
    }
    if (*verify) {
      json report = suites::run_suite(cfg);
      emit(report, cfg.output, 2);
      return report["pass"].get<bool>() ? 0 : kExitFailure;
    }
    if (*alc) {
      auto R = alcove::build_root_system(type);
      alcove::Weight lambda = alcove::parse_weight(lambda_str);
      alcove::require_dominant(R, lambda);
      json out{{"type", R.type}, {"p", p}, {"lambda", lambda}};
      out["d"] = alcove::separating_hyperplane_count(R, lambda, p);
      out["p_regular"] = alcove::is_p_regular(R, lambda, p);
      out["negligible"] = alcove::is_negligible_weight(R, lambda, p);
      auto st = alcove::steinberg_decompose(R, lambda, p);
      out["steinberg"] = {st.restricted, st.twist};
      if (alc_action == "orbit") out["orbit"] = alcove::dot_orbit(R, lambda, p, bound >= 0 ? bound : 3 * p);
      std::string key = alc_action == "regular" ? "p_regular" : alc_action;
      out["result"] = out[key];
      emit(out, cfg.output);
      return 0;
    }
  } catch (const WindowError& e) {
    std::cerr << "window error: " << e.what() << " (bound " << e.bound() << ")\n";
    return kExitWindow;
  } catch (const WindowOverflow& e) {
    std::cerr << "window error: " << e.what() << "\n";
    return kExitWindow;
  } catch (const ClosureError& e) {
    std::cerr << "window error: " << e.what() << "\n";
    return kExitWindow;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
