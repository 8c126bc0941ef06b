#include "cli/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tpa/model.hpp"
#include "tpa/report.hpp"

namespace tpa::cli {
namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* what) {
  throw Error(Errc::invalid_config, "'" + key + "': cannot read '" + value + "' as " + what);
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad(key, text, "a number");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad(key, text, "an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad(key, text, "a boolean");
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_num(v[i]);
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!trim(item).empty()) out.push_back(parse_double(key, item));
  return out;
}

// Typed bindings from a member pointer to the text get/set pair.
template <class T>
struct Codec;

template <>
struct Codec<double> {
  static std::optional<std::string> get(const double& v) { return fmt_num(v); }
  static void set(double& v, const std::string& k, const std::string& s) { v = parse_double(k, s); }
};
template <>
struct Codec<int> {
  static std::optional<std::string> get(const int& v) { return std::to_string(v); }
  static void set(int& v, const std::string& k, const std::string& s) { v = parse_int<int>(k, s); }
};
template <>
struct Codec<unsigned long long> {
  static std::optional<std::string> get(const unsigned long long& v) { return std::to_string(v); }
  static void set(unsigned long long& v, const std::string& k, const std::string& s) {
    v = parse_int<unsigned long long>(k, s);
  }
};
template <>
struct Codec<bool> {
  static std::optional<std::string> get(const bool& v) { return v ? "true" : "false"; }
  static void set(bool& v, const std::string& k, const std::string& s) { v = parse_bool(k, s); }
};
template <>
struct Codec<std::string> {
  static std::optional<std::string> get(const std::string& v) { return v; }
  static void set(std::string& v, const std::string&, const std::string& s) { v = trim(s); }
};
template <>
struct Codec<std::optional<double>> {
  static std::optional<std::string> get(const std::optional<double>& v) {
    return v ? std::optional(fmt_num(*v)) : std::nullopt;
  }
  static void set(std::optional<double>& v, const std::string& k, const std::string& s) {
    const std::string t = trim(s);
    if (t.empty() || t == "auto" || t == "null") v.reset();
    else v = parse_double(k, t);
  }
};
template <>
struct Codec<std::vector<double>> {
  static std::optional<std::string> get(const std::vector<double>& v) { return list_text(v); }
  static void set(std::vector<double>& v, const std::string& k, const std::string& s) { v = parse_list(k, s); }
};

template <class T>
Field make_field(std::string key, T RunConfig::*member, std::string help, bool in_hash = true) {
  const bool flag = std::is_same_v<T, bool>;
  return Field{key, std::move(help), flag, in_hash,
               [member](const RunConfig& c) { return Codec<T>::get(c.*member); },
               [member, key](RunConfig& c, const std::string& s) { Codec<T>::set(c.*member, key, s); }};
}

std::vector<Field> make_fields() {
  using C = RunConfig;
  return {
      make_field("command", &C::command, "curve, optimize, sweep, reference or coherent"),
      make_field("family", &C::family,
                 "gaussian-product, entangled-gaussian, rising-exp, decaying-exp, optimal or coherent"),
      make_field("gamma_ratio", &C::gamma_ratio, "Γe/Γf"),
      make_field("delta1", &C::delta1, "first transition detuning, Δ1/Γf"),
      make_field("delta2", &C::delta2, "second transition detuning, Δ2/Γf"),
      make_field("mu_free", &C::mu_free, "optimize the delay (mu or t_shift) instead of fixing it at 0"),
      make_field("omega1", &C::omega1, "first photon width, Ω1/Γf"),
      make_field("omega2", &C::omega2, "second photon width, Ω2/Γf"),
      make_field("mu", &C::mu, "delay of the second photon, μΓf"),
      make_field("omega_plus", &C::omega_plus, "entangled sum width, Ω+/Γf"),
      make_field("omega_minus", &C::omega_minus, "entangled difference width, Ω−/Γf"),
      make_field("t_shift", &C::t_shift, "decaying-exponential shift of the second photon, t_s Γf"),
      make_field("t_star", &C::t_star, "optimal-state target time, t* Γf"),
      make_field("t0", &C::t0, "optimal-state start time, t0 Γf; unset means -infinity"),
      make_field("n1", &C::n1, "coherent mean photon number, first mode"),
      make_field("n2", &C::n2, "coherent mean photon number, second mode"),
      make_field("t_min", &C::t_min, "start of the sampling window, t Γf"),
      make_field("t_max", &C::t_max, "end of the sampling window, t Γf"),
      make_field("samples", &C::samples, "points per curve or density axis"),
      make_field("kind", &C::kind,
                 "sweep kind: ratio, comparison, asymptotic, entropy, sensitivity, detuning or densities"),
      make_field("ratios", &C::ratios, "comma-separated Γe/Γf values"),
      make_field("policy", &C::policy, "sensitivity-map delay policy: reoptimize or frozen"),
      make_field("grid", &C::grid, "points per map axis (0: 21 for sensitivity, 41 for detuning)"),
      make_field("axis1_min", &C::axis1_min, "first map axis lower end"),
      make_field("axis1_max", &C::axis1_max, "first map axis upper end"),
      make_field("axis2_min", &C::axis2_min, "second map axis lower end"),
      make_field("axis2_max", &C::axis2_max, "second map axis upper end"),
      make_field("fast", &C::fast, "coarser default maps: 11-point sensitivity, 21-point detuning"),
      make_field("out", &C::out, "output directory", false),
      make_field("name", &C::name, "output file stem"),
      make_field("jobs", &C::jobs, "worker threads for sweeps", false),
      make_field("seed", &C::seed, "multistart jitter seed; 0 disables jitter"),
      make_field("preset", &C::preset, "preset name, e.g. fig5"),
      make_field("tol", &C::tol, "relative tolerance for quadrature and the density-matrix integrator"),
      make_field("schmidt_max_grid", &C::schmidt_max_grid, "largest grid for numeric Schmidt decompositions"),
  };
}

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a{
      {"gamma_e_over_gamma_f", "gamma_ratio"},
      {"ratio", "gamma_ratio"},
      {"delta1_over_gamma_f", "delta1"},
      {"delta2_over_gamma_f", "delta2"},
  };
  return a;
}

}  // namespace

const std::vector<Field>& fields() {
  static const std::vector<Field> table = make_fields();
  return table;
}

std::string canonical_key(std::string_view key) {
  std::string k = trim(key);
  for (char& c : k) c = c == '-' ? '_' : char(std::tolower(static_cast<unsigned char>(c)));
  if (auto it = aliases().find(k); it != aliases().end()) k = it->second;
  for (const auto& f : fields())
    if (f.key == k) return k;
  throw Error(Errc::invalid_config, "unknown setting '" + std::string(key) + "'");
}

const Field& field(std::string_view key) {
  const std::string k = canonical_key(key);
  for (const auto& f : fields())
    if (f.key == k) return f;
  throw Error(Errc::invalid_config, "unknown setting '" + std::string(key) + "'");
}

void set_value(RunConfig& cfg, std::string_view key, const std::string& value) {
  field(key).set(cfg, value);
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::invalid_config, "configuration JSON must be an object");
  for (const auto& [k, v] : j.items()) {
    std::string text;
    if (v.is_string()) text = v.get<std::string>();
    else if (v.is_boolean()) text = v.get<bool>() ? "true" : "false";
    else if (v.is_null()) text = "";
    else if (v.is_number_integer()) text = v.dump();
    else if (v.is_number()) text = fmt_num(v.get<double>());
    else if (v.is_array()) {
      std::vector<double> xs;
      for (const auto& x : v) {
        if (!x.is_number()) throw Error(Errc::invalid_config, "'" + k + "' must be a list of numbers");
        xs.push_back(x.get<double>());
      }
      text = list_text(xs);
    } else {
      throw Error(Errc::invalid_config, "'" + k + "' has an unsupported value");
    }
    set_value(cfg, k, text);
  }
}

void apply_text(RunConfig& cfg, const std::string& text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::invalid_config, std::string("malformed configuration JSON: ") + e.what());
    }
    apply_json(cfg, j);
    return;
  }
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_config, "line " + std::to_string(line_no) + ": expected key = value");
    set_value(cfg, t.substr(0, eq), t.substr(eq + 1));
  }
}

void apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_failure, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  apply_text(cfg, ss.str());
}

std::string to_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : fields())
    if (auto v = f.get(cfg)) out += f.key + " = " + *v + "\n";
  return out;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields())
    if (auto v = f.get(cfg)) j[f.key] = *v;
  return j;
}

std::string canonical_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields())
    if (f.in_hash)
      if (auto v = f.get(cfg)) j[f.key] = *v;
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) { return hex64(fnv1a64(canonical_json(cfg))); }

}  // namespace tpa::cli
