#include "cli.hpp"

#include "suites.hpp"

#include "moptree/asymptotics.hpp"
#include "moptree/spectral.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace moptree::cli {

namespace {

using CB = Complex<BigFloat>;

const std::vector<std::string> kCommands{"compute", "verify", "export"};
const std::vector<std::string> kComputeTargets{"mop",     "recurrence", "tree-green", "theta",      "chi",
                                               "converge", "density",   "support",    "random-path"};
const std::vector<std::string> kVerifySuites{"identities", "bounds", "interlacing", "green-crosscheck", "asymptotics",
                                             "all"};
const std::vector<std::string> kParamNames{"n",     "N",     "window", "depth", "kappa",  "j",    "c",
                                           "m-max", "steps", "trials", "seed",  "points", "kind", "form",
                                           "vertex", "step-line"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void validate_config(const RunConfig& c) {
  if (!contains(kCommands, c.command)) {
    config_error("unknown command '" + c.command + "'");
  }
  if (c.command == "compute" && !contains(kComputeTargets, c.target)) {
    config_error("unknown compute subcommand '" + c.target + "'");
  }
  if (c.command == "verify" && !contains(kVerifySuites, c.target)) {
    config_error("unknown verify suite '" + c.target + "'");
  }
  if (c.command == "export" && c.target != "tree") {
    config_error("unknown export kind '" + c.target + "'");
  }
  if (c.system.empty()) {
    config_error("--system is required");
  }
  for (const auto& [k, v] : c.params) {
    if (!contains(kParamNames, k)) {
      config_error("unknown parameter '" + k + "'");
    }
  }
  if (!c.backend.empty() && c.backend != "rational" && c.backend.rfind("bigfloat:", 0) != 0) {
    config_error("backend must be rational or bigfloat:BITS, got '" + c.backend + "'");
  }
}

int int_param(const RunConfig& c, const std::string& key, int fallback, int lo = 0, int hi = 1 << 30) {
  auto it = c.params.find(key);
  if (it == c.params.end()) {
    return fallback;
  }
  try {
    std::size_t used = 0;
    long long v = std::stoll(it->second, &used);
    if (used != it->second.size() || v < lo || v > hi) {
      throw std::invalid_argument(key);
    }
    return static_cast<int>(v);
  } catch (const std::logic_error&) {
    config_error("--" + key + " expects an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                 "], got '" + it->second + "'");
  }
}

std::uint64_t seed_param(const RunConfig& c, std::uint64_t fallback) {
  auto it = c.params.find("seed");
  if (it == c.params.end()) {
    return fallback;
  }
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(it->second, &used);
    if (used != it->second.size()) {
      throw std::invalid_argument("seed");
    }
    return v;
  } catch (const std::logic_error&) {
    config_error("--seed expects an unsigned integer, got '" + it->second + "'");
  }
}

MultiIndex index_param(const RunConfig& c, const std::string& key, int d, const MultiIndex& fallback) {
  auto it = c.params.find(key);
  if (it == c.params.end()) {
    return fallback;
  }
  MultiIndex n = parse_multi_index(it->second);
  if (n.d() != d) {
    config_error("--" + key + " has " + std::to_string(n.d()) + " components, system has d = " + std::to_string(d));
  }
  return n;
}

std::vector<Rational> kappa_param(const RunConfig& c, int d, int default_label) {
  std::vector<Rational> kappa(d, Rational(0));
  auto it = c.params.find("kappa");
  if (it == c.params.end()) {
    kappa[default_label] = 1;
    return kappa;
  }
  kappa = parse_rational_list(it->second);
  if (static_cast<int>(kappa.size()) != d) {
    config_error("--kappa needs " + std::to_string(d) + " entries");
  }
  Rational sum(0);
  for (const auto& k : kappa) {
    if (k < 0) {
      config_error("--kappa entries must be nonnegative");
    }
    sum += k;
  }
  if (sum != 1) {
    config_error("--kappa entries must sum to 1");
  }
  return kappa;
}

template <class T>
std::vector<T> convert_all(const std::vector<Rational>& v) {
  std::vector<T> out;
  for (const auto& x : v) {
    out.push_back(from_rational<T>(x));
  }
  return out;
}

std::vector<Complex<Rational>> z_param(const RunConfig& c, std::vector<Complex<Rational>> fallback) {
  if (c.z.empty()) {
    return fallback;
  }
  std::vector<Complex<Rational>> out;
  for (const auto& s : c.z) {
    auto [re, im] = parse_complex(s);
    out.emplace_back(re, im);
  }
  return out;
}

template <class T>
Complex<T> to_complex(const Complex<Rational>& z) {
  return Complex<T>(from_rational<T>(z.re), from_rational<T>(z.im));
}

SystemSpec as_float(SystemSpec sys) {
  if (sys.backend.backend == Backend::rational) {
    sys.backend.backend = Backend::bigfloat;
  }
  return sys;
}

int digits(const SystemSpec& sys) { return static_cast<int>(digits10_for_bits(sys.backend.precision_bits)); }

template <class T>
std::string decimal(const T& x, int dig) {
  return to_string(to_bigfloat(x), dig);
}

// {"value": decimal, "exact": "p/q"} on the exact backend, {"value": decimal} otherwise.
template <class T>
ordered_json number_json(const T& x, int dig) {
  ordered_json j;
  j["value"] = decimal(x, dig);
  if constexpr (is_exact_v<T>) {
    j["exact"] = to_string(x);
  }
  return j;
}

template <class T>
ordered_json poly_json(const Poly<T>& p, int dig) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : p.coeffs()) {
    arr.push_back(number_json(c, dig));
  }
  return arr;
}

std::string csv_value(const BigFloat& x, int dig) { return to_string(x, dig); }

std::string backend_tag(const SystemSpec& sys) {
  return sys.backend.backend == Backend::rational ? "rational" : "bigfloat:" + std::to_string(sys.backend.precision_bits);
}

// ---- compute -------------------------------------------------------------

template <class T>
Artifact compute_mop(const RunConfig& cfg, const SystemSpec& sys) {
  const int d = sys.d();
  const MultiIndex n = index_param(cfg, "n", d, MultiIndex(std::vector<int>(d, 1)));
  auto fam = make_family<T>(sys);
  const int dig = digits(sys);
  ordered_json j;
  j["index"] = n.components();
  j["backend"] = backend_tag(sys);
  j["precision_bits"] = sys.backend.precision_bits;
  auto norm = normality_report(fam->moments(), n);
  j["normal"] = norm.normal;
  const auto& p2 = fam->type2(n);
  j["P"] = poly_json(p2.P, dig);
  j["type2_residual"] = decimal(type2_residual(*fam, n), dig);
  if (n.total() > 0) {
    const auto& p1 = fam->type1(n);
    ordered_json A = ordered_json::array();
    for (const auto& a : p1.A) {
      A.push_back(poly_json(a, dig));
    }
    j["A"] = A;
    j["type1_residual"] = decimal(type1_residual(*fam, n), dig);
  }
  if (validate(sys).bounded) {
    ordered_json zeros = ordered_json::array();
    for (const auto& per : type2_zeros(*fam, n)) {
      ordered_json arr = ordered_json::array();
      for (const auto& b : per) {
        arr.push_back({{"lo", decimal(b.lo, dig)}, {"hi", decimal(b.hi, dig)}});
      }
      zeros.push_back(arr);
    }
    j["zeros"] = zeros;
  }
  return {"mop.json", j.dump(2) + "\n"};
}

template <class T>
Artifact compute_recurrence(const RunConfig& cfg, const SystemSpec& sys) {
  const int d = sys.d();
  const MultiIndex w = index_param(cfg, "window", d, MultiIndex(std::vector<int>(d, 3)));
  auto table = make_table<T>(sys);
  table->fill(w);
  const int dig = digits(sys);
  std::ostringstream os;
  for (int i = 0; i < d; ++i) {
    os << "n" << i + 1 << ",";
  }
  os << "j,coefficient,value(bits=" << sys.backend.precision_bits << "),exact,provenance\n";
  const char* prov = provenance_name(table->provenance());
  for (const auto& n : box_indices(w)) {
    for (int j = 0; j < d; ++j) {
      for (int kind = 0; kind < 2; ++kind) {
        const T v = kind == 0 ? table->a(n, j) : table->b(n, j);
        for (int i = 0; i < d; ++i) {
          os << n[i] << ",";
        }
        os << j + 1 << "," << (kind == 0 ? "a" : "b") << "," << decimal(v, dig) << ",";
        if constexpr (is_exact_v<T>) {
          os << to_string(v);
        }
        os << "," << prov << "\n";
      }
    }
  }
  return {"recurrence.csv", os.str()};
}

template <class T>
Artifact compute_tree_green(const RunConfig& cfg, const SystemSpec& sys) {
  const int d = sys.d();
  const MultiIndex N = index_param(cfg, "N", d, MultiIndex(std::vector<int>(d, 1)));
  const auto kq = kappa_param(cfg, d, 0);
  const auto kappa = convert_all<T>(kq);
  const auto zs = z_param(cfg, {Complex<Rational>(2, 1)});
  auto form = cfg.params.count("form") ? cfg.params.at("form") : std::string(is_exact_v<T> ? "K" : "J");
  if (form != "K" && form != "J") {
    config_error("--form must be K or J");
  }
  auto table = make_table<T>(sys);
  auto op = assemble_finite<T>(*table, kappa, N, form == "J");
  const int Y = int_param(cfg, "vertex", 0, 0, op.size() - 1);
  const int dig = digits(sys);
  std::ostringstream os;
  os << "z_re,z_im,method,value_re,value_im\n";
  auto row = [&](const Complex<Rational>& zq, const char* method, const Complex<T>& v) {
    os << decimal(zq.re, dig) << "," << decimal(zq.im, dig) << "," << method << "," << decimal(v.re, dig) << ","
       << decimal(v.im, dig) << "\n";
  };
  for (const auto& zq : zs) {
    const Complex<T> z = to_complex<T>(zq);
    auto g = green_direct(op, Y, 0, z);
    row(zq, green_method_name(g.method), g.value);
    auto f = green_formula_finite(table->family(), op, Y, z);
    row(zq, green_method_name(f.method), f.value);
    if (Y == 0) {
      Complex<T> inv(0);
      for (int j = 0; j < d; ++j) {
        if (!is_zero(kappa[j])) {
          inv += Complex<T>(kappa[j]) / cf_finite<T>(*table, N, j, z).value;
        }
      }
      row(zq, green_method_name(GreenMethod::continued_fraction), Complex<T>(1) / inv);
    }
  }
  return {"green.csv", os.str()};
}

Artifact compute_theta(const RunConfig& cfg, const SystemSpec& sys) {
  const int d = sys.d();
  const auto kappa = convert_all<BigFloat>(kappa_param(cfg, d, d - 1));
  const int D = int_param(cfg, "depth", 12, 1, 40);
  const auto zs = z_param(cfg, {Complex<Rational>(5)});
  auto table = make_table<BigFloat>(as_float(sys));
  const int dig = digits(sys);
  std::ostringstream os;
  os << "z_re,z_im,method,value_re,value_im\n";
  for (const auto& zq : zs) {
    auto v = theta_infinite(*table, kappa, to_complex<BigFloat>(zq), D);
    for (auto [method, value] : {std::pair{"truncated", v.truncated}, std::pair{"formula", v.formula}}) {
      os << decimal(zq.re, dig) << "," << decimal(zq.im, dig) << "," << method << "," << csv_value(value.re, dig)
         << "," << csv_value(value.im, dig) << "\n";
    }
  }
  return {"theta.csv", os.str()};
}

Artifact compute_chi(const RunConfig& cfg, const SystemSpec& sys) {
  auto map = solve_surface(sys);
  auto j = ordered_json::parse(surface_to_json(map));
  if (!cfg.z.empty()) {
    const int dig = digits(sys);
    ordered_json values = ordered_json::array();
    for (const auto& zq : z_param(cfg, {})) {
      CB z = to_complex<BigFloat>(zq);
      CB w = chi_sheet0(map, z);
      values.push_back({{"z", {decimal(zq.re, dig), decimal(zq.im, dig)}}, {"chi", {csv_value(w.re, dig), csv_value(w.im, dig)}}});
    }
    j["chi"] = values;
  }
  return {"chi.json", j.dump(2) + "\n"};
}

std::vector<Artifact> compute_converge(const RunConfig& cfg, const SystemSpec& sys) {
  const int d = sys.d();
  std::vector<Rational> c(d, Rational(1, d));
  if (auto it = cfg.params.find("c"); it != cfg.params.end()) {
    c = parse_rational_list(it->second);
  }
  const int m_max = int_param(cfg, "m-max", 20, 1, 400);
  std::vector<CB> zs;
  for (const auto& zq : z_param(cfg, {Complex<Rational>(2), Complex<Rational>(5), Complex<Rational>(1, 1)})) {
    zs.push_back(to_complex<BigFloat>(zq));
  }
  auto rep = convergence_study(as_float(sys), c, m_max, zs);
  ordered_json j;
  j["skipped"] = rep.skipped;
  if (rep.skipped) {
    j["note"] = rep.note;
    return {{"convergence.json", j.dump(2) + "\n"}};
  }
  j["ok"] = rep.ok;
  j["coefficients"] = provenance_name(rep.coefficients);
  ordered_json streams = ordered_json::array();
  for (const auto& s : rep.streams) {
    streams.push_back({{"name", s.name},
                       {"decreasing", s.decreasing},
                       {"slope", s.slope},
                       {"first", to_string(s.errors.front(), 12)},
                       {"last", to_string(s.errors.back(), 12)}});
  }
  j["streams"] = streams;
  return {{"convergence.csv", convergence_to_csv(rep)}, {"convergence.json", j.dump(2) + "\n"}};
}

std::vector<Artifact> compute_density(const RunConfig& cfg, const SystemSpec& sys) {
  if (sys.d() != 2) {
    config_error("density needs a d = 2 system");
  }
  const int points = int_param(cfg, "points", 50, 1, 100000);
  auto fam = make_family<BigFloat>(as_float(sys));
  const auto& mt = fam->moments();
  const int dig = digits(sys);
  std::ostringstream os;
  os << "x,density\n";
  for (const auto& m : sys.measures) {
    const BigFloat lo = to_bigfloat(m.lo), hi = to_bigfloat(m.hi);
    for (int k = 0; k < points; ++k) {
      BigFloat x = lo + (hi - lo) * (BigFloat(k) + BigFloat(0.5)) / points;
      os << csv_value(x, dig) << "," << csv_value(density_kuk1(mt, x), dig) << "\n";
    }
  }
  ordered_json j;
  j["kappa"] = {"0", "1"};
  j["mass"] = to_string(density_mass(mt), 20);
  return {{"density.csv", os.str()}, {"density_mass.json", j.dump(2) + "\n"}};
}

Artifact compute_support(const RunConfig& cfg, const SystemSpec& sys) {
  const int d = sys.d();
  const MultiIndex N = index_param(cfg, "N", d, MultiIndex(std::vector<int>(d, 1)));
  const int j = int_param(cfg, "j", 1, 1, d) - 1;
  auto table = make_table<BigFloat>(as_float(sys));
  auto rep = spectral_support_check(*table, N, j);
  const int dig = digits(sys);
  ordered_json out;
  out["N"] = N.components();
  out["j"] = j + 1;
  out["ok"] = rep.ok;
  out["vertices"] = rep.vertices;
  out["distinct_support"] = rep.distinct_support;
  ordered_json atoms = ordered_json::array();
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
    atoms.push_back({{"x", csv_value(rep.eigenvalues[k], dig)}, {"weight", csv_value(rep.weights[k], dig)}});
  }
  out["atoms"] = atoms;
  out["weight_sum"] = to_string(rep.weight_sum, 20);
  out["max_root_distance"] = to_string(rep.max_root_distance, 12);
  out["max_transform_error"] = to_string(rep.max_transform_error, 12);
  out["failures"] = rep.failures;
  return {"support.json", out.dump(2) + "\n"};
}

Artifact compute_random_path(const RunConfig& cfg, const SystemSpec& sys) {
  const int steps = int_param(cfg, "steps", 400, 1, 100000);
  const int trials = int_param(cfg, "trials", 50, 2, 100000);
  const std::uint64_t seed = seed_param(cfg, 1);
  const SystemSpec fs = as_float(sys);
  auto map = solve_surface(fs);
  PropagatedCoefficients<BigFloat> coeffs(fs, steps + sys.d() + 1);
  auto rep = random_path_stats(coeffs, map.A, steps, seed, trials);
  ordered_json j;
  j["steps"] = rep.steps;
  j["trials"] = rep.trials;
  j["seed"] = rep.seed;
  j["mean"] = rep.mean;
  j["stddev"] = rep.stddev;
  j["stderr"] = rep.stderr_mean;
  j["target"] = rep.target;
  j["within_3se"] = rep.within_3se;
  j["relative_error"] = rep.relative_error;
  j["rates"] = rep.rates;
  return {"random_path.json", j.dump(2) + "\n"};
}

template <class T>
std::vector<Artifact> compute_exact_capable(const RunConfig& cfg, const SystemSpec& sys) {
  if (cfg.target == "mop") {
    return {compute_mop<T>(cfg, sys)};
  }
  if (cfg.target == "recurrence") {
    return {compute_recurrence<T>(cfg, sys)};
  }
  return {compute_tree_green<T>(cfg, sys)};
}

SuiteOptions suite_options(const RunConfig& cfg, const SystemSpec& sys) {
  SuiteOptions opt;
  const int d = sys.d();
  opt.window = index_param(cfg, "window", d, MultiIndex(std::vector<int>(d, 3)));
  opt.step_line_max = int_param(cfg, "step-line", 12, 0, 200);
  std::vector<int> gN(d, 2);
  gN[0] = 3;
  opt.green_N = index_param(cfg, "N", d, MultiIndex(gN));
  opt.z = z_param(cfg, {});
  return opt;
}

void write_artifacts(const std::string& dir, const std::vector<Artifact>& arts, std::ostream& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    config_error("cannot create output directory " + dir + ": " + ec.message());
  }
  ordered_json written = ordered_json::array();
  for (const auto& a : arts) {
    const fs::path p = fs::path(dir) / a.name;
    std::ofstream f(p, std::ios::binary);
    if (!f) {
      config_error("cannot write " + p.string());
    }
    f << a.content;
    written.push_back(p.string());
  }
  out << ordered_json{{"written", written}}.dump() << "\n";
}

void report_error(std::ostream& err, const std::string& name, const std::string& context) {
  err << ordered_json{{"error", name}, {"context", context}}.dump() << "\n";
}

}  // namespace

// ---- RunConfig ---------------------------------------------------------------

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["target"] = target;
  j["system"] = system;
  j["out"] = out;
  j["backend"] = backend;
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : params) {
    p[k] = v;
  }
  j["params"] = p;
  j["z"] = z;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::ParseError, "run config must be a JSON object");
  }
  static const std::vector<std::string> keys{"command", "target", "system", "out", "backend", "params", "z"};
  for (const auto& [k, v] : j.items()) {
    if (!contains(keys, k)) {
      config_error("unknown run config field '" + k + "'");
    }
  }
  RunConfig c;
  auto str = [&](const char* key, std::string& dst, bool required) {
    if (!j.contains(key)) {
      if (required) {
        config_error(std::string("run config lacks '") + key + "'");
      }
      return;
    }
    if (!j[key].is_string()) {
      config_error(std::string("run config field '") + key + "' must be a string");
    }
    dst = j[key].get<std::string>();
  };
  str("command", c.command, true);
  str("target", c.target, true);
  str("system", c.system, true);
  str("out", c.out, false);
  str("backend", c.backend, false);
  if (j.contains("params")) {
    if (!j["params"].is_object()) {
      config_error("run config field 'params' must be an object");
    }
    for (const auto& [k, v] : j["params"].items()) {
      if (!v.is_string()) {
        config_error("parameter '" + k + "' must be a string");
      }
      c.params[k] = v.get<std::string>();
    }
  }
  if (j.contains("z")) {
    if (!j["z"].is_array()) {
      config_error("run config field 'z' must be an array");
    }
    for (const auto& v : j["z"]) {
      if (!v.is_string()) {
        config_error("z entries must be \"re,im\" strings");
      }
      c.z.push_back(v.get<std::string>());
    }
  }
  validate_config(c);
  return c;
}

std::pair<Rational, Rational> parse_complex(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) {
    return {parse_rational(text), Rational(0)};
  }
  if (text.find(',', comma + 1) != std::string::npos) {
    throw Error(ErrorCode::ParseError, "z value '" + text + "' has more than two parts");
  }
  return {parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1))};
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    out.push_back(parse_rational(part));
  }
  if (out.empty()) {
    throw Error(ErrorCode::ParseError, "empty list");
  }
  return out;
}

RunConfig parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"Multiple orthogonal polynomials and their Jacobi operators on trees", "mop-trees"};
  app.set_help_flag();
  app.require_subcommand(0, 1);

  RunConfig cfg;
  std::string config_file;
  std::map<std::string, std::string> values;
  app.add_option("--config", config_file, "Run config JSON (replaces the other options)");
  app.add_option("--system", cfg.system, "System definition JSON");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--backend", cfg.backend, "rational or bigfloat:BITS");
  app.add_option("--z", cfg.z, "Evaluation point re,im (repeatable)")->take_all();
  for (const auto& name : kParamNames) {
    app.add_option("--" + name, values[name]);
  }
  auto* compute = app.add_subcommand("compute", "Compute artifacts");
  compute->fallthrough();
  compute->add_option("target", cfg.target)->required();
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->fallthrough();
  verify->add_option("target", cfg.target)->required();
  auto* exp = app.add_subcommand("export", "Dump tree and operator");
  exp->fallthrough();
  exp->add_option("target", cfg.target);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }

  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) {
      config_error("cannot open run config " + config_file);
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("run config: ") + e.what());
    }
    return RunConfig::from_json(j);
  }
  if (compute->parsed()) {
    cfg.command = "compute";
  } else if (verify->parsed()) {
    cfg.command = "verify";
  } else if (exp->parsed()) {
    cfg.command = "export";
    if (cfg.target.empty()) {
      cfg.target = "tree";
    }
  } else {
    config_error("expected one of compute, verify, export");
  }
  for (const auto& [k, v] : values) {
    if (!v.empty()) {
      cfg.params[k] = v;
    }
  }
  validate_config(cfg);
  return cfg;
}

SystemSpec load_configured_system(const RunConfig& cfg) {
  SystemSpec sys = load_system(cfg.system);
  if (cfg.backend == "rational") {
    sys.backend.backend = Backend::rational;
  } else if (!cfg.backend.empty()) {
    const std::string bits = cfg.backend.substr(std::string("bigfloat:").size());
    std::size_t used = 0;
    unsigned long b = 0;
    try {
      b = std::stoul(bits, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != bits.size() || used == 0 || b < 64 || b > 65536) {
      config_error("bigfloat precision must be an integer in [64, 65536], got '" + bits + "'");
    }
    sys.backend.backend = Backend::bigfloat;
    sys.backend.precision_bits = static_cast<unsigned>(b);
  }
  validate(sys);
  return sys;
}

std::vector<Artifact> run_compute(const RunConfig& cfg, const SystemSpec& sys) {
  const std::string& t = cfg.target;
  if (t == "mop" || t == "recurrence" || t == "tree-green") {
    return sys.backend.backend == Backend::rational ? compute_exact_capable<Rational>(cfg, sys)
                                                    : compute_exact_capable<BigFloat>(cfg, sys);
  }
  if (t == "theta") {
    return {compute_theta(cfg, sys)};
  }
  if (t == "chi") {
    return {compute_chi(cfg, sys)};
  }
  if (t == "converge") {
    return compute_converge(cfg, sys);
  }
  if (t == "density") {
    return compute_density(cfg, sys);
  }
  if (t == "support") {
    return {compute_support(cfg, sys)};
  }
  if (t == "random-path") {
    return {compute_random_path(cfg, sys)};
  }
  config_error("unknown compute subcommand '" + t + "'");
}

namespace {

template <class T>
std::vector<Artifact> export_tree(const RunConfig& cfg, const SystemSpec& sys) {
  const int d = sys.d();
  const std::string kind = cfg.params.count("kind") ? cfg.params.at("kind") : "finite";
  auto form = cfg.params.count("form") ? cfg.params.at("form") : std::string(is_exact_v<T> ? "K" : "J");
  if (form != "K" && form != "J") {
    config_error("--form must be K or J");
  }
  auto table = make_table<T>(sys);
  TreeOperator<T> op;
  if (kind == "finite") {
    const MultiIndex N = index_param(cfg, "N", d, MultiIndex(std::vector<int>(d, 1)));
    op = assemble_finite<T>(*table, convert_all<T>(kappa_param(cfg, d, 0)), N, form == "J");
  } else if (kind == "truncated") {
    const int D = int_param(cfg, "depth", 3, 0, 60);
    op = assemble_infinite<T>(*table, convert_all<T>(kappa_param(cfg, d, 0)), D, form == "J");
  } else {
    config_error("--kind must be finite or truncated");
  }
  return {{"tree.json", tree_to_json(*op.tree)}, {"operator.csv", operator_to_csv(op)}};
}

}  // namespace

std::vector<Artifact> run_export(const RunConfig& cfg, const SystemSpec& sys) {
  return sys.backend.backend == Backend::rational ? export_tree<Rational>(cfg, sys) : export_tree<BigFloat>(cfg, sys);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate_config(cfg);
    SystemSpec sys = load_configured_system(cfg);
    PrecisionScope scope(sys.backend.precision_bits);

    if (cfg.command == "verify") {
      auto results = verify_suite(cfg.target, sys, suite_options(cfg, sys));
      bool failed = false;
      ordered_json j;
      j["system"] = cfg.system;
      j["backend"] = backend_tag(sys);
      j["suites"] = ordered_json::array();
      for (const auto& r : results) {
        failed = failed || r.failed();
        j["suites"].push_back(r.to_json());
      }
      j["status"] = failed ? "fail" : "pass";
      const std::string text = j.dump(2) + "\n";
      if (!cfg.out.empty()) {
        write_artifacts(cfg.out, {{"verify_" + cfg.target + ".json", text}}, err);
      }
      out << text;
      return failed ? 1 : 0;
    }

    auto arts = cfg.command == "compute" ? run_compute(cfg, sys) : run_export(cfg, sys);
    if (cfg.out.empty()) {
      out << arts.front().content;
      if (!arts.front().content.empty() && arts.front().content.back() != '\n') {
        out << "\n";
      }
    } else {
      write_artifacts(cfg.out, arts, out);
    }
    return 0;
  } catch (const Error& e) {
    report_error(err, error_name(e.code()), e.context());
    return is_config_error(e.code()) ? 2 : 3;
  } catch (const nlohmann::json::exception& e) {
    report_error(err, "ParseError", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return 3;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const bool print_config = std::find(args.begin(), args.end(), "--print-config") != args.end();
  std::vector<std::string> rest;
  for (const auto& a : args) {
    if (a != "--print-config") {
      rest.push_back(a);
    }
  }
  if (rest.empty() || rest[0] == "--help" || rest[0] == "-h") {
    out << "usage: mop-trees <compute|verify|export> --system FILE [--out DIR] "
           "[--backend rational|bigfloat:BITS] [subcommand flags]\n"
           "       mop-trees --config RUN.json [--print-config]\n"
           "compute: mop, recurrence, tree-green, theta, chi, converge, density, support, random-path\n"
           "verify:  identities, bounds, interlacing, green-crosscheck, asymptotics, all\n"
           "export:  tree (--kind finite|truncated)\n";
    return rest.empty() ? 2 : 0;
  }
  RunConfig cfg;
  try {
    cfg = parse_command_line(rest);
  } catch (const Error& e) {
    report_error(err, error_name(e.code()), e.context());
    return 2;
  }
  if (print_config) {
    out << cfg.to_json().dump(2) << "\n";
    return 0;
  }
  return run(cfg, out, err);
}

}  // namespace moptree::cli
