#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pbf::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("config: cannot parse " + std::string(key) + " value '" + std::string(text) + "'");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value)) throw ConfigError("config: " + std::string(key) + " must be finite");
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: " + std::string(key) + " expects true/false, got '" + std::string(text) + "'");
}

Variant parse_variant(std::string_view text) {
  text = trim(text);
  if (text == "eq1" || text == "EQ1") return Variant::Eq1;
  if (text == "eq2" || text == "EQ2") return Variant::Eq2;
  throw ConfigError("config: variant must be eq1 or eq2, got '" + std::string(text) + "'");
}

// "m,n:wb,wf;..."
std::map<Grade, std::pair<double, double>> parse_grade_omega(std::string_view text) {
  std::map<Grade, std::pair<double, double>> out;
  for (auto term : split(text, ';')) {
    if (term.empty()) continue;
    const auto halves = split(term, ':');
    if (halves.size() != 2) throw ConfigError("config: grade_omega term '" + std::string(term) + "' is not m,n:wb,wf");
    const auto g = split(halves[0], ',');
    const auto w = split(halves[1], ',');
    if (g.size() != 2 || w.size() != 2)
      throw ConfigError("config: grade_omega term '" + std::string(term) + "' is not m,n:wb,wf");
    out[{parse_number<int>("grade_omega", g[0]), parse_number<int>("grade_omega", g[1])}] = {
        parse_number<double>("grade_omega", w[0]), parse_number<double>("grade_omega", w[1])};
  }
  return out;
}

}  // namespace

Complex parse_complex(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() == 1) return {parse_number<double>("complex", parts[0]), 0.0};
  if (parts.size() == 2) return {parse_number<double>("complex", parts[0]), parse_number<double>("complex", parts[1])};
  throw ConfigError("config: complex value must be 're' or 're,im', got '" + std::string(text) + "'");
}

std::vector<std::pair<Label, Complex>> parse_initial_state(std::string_view text) {
  std::vector<std::pair<Label, Complex>> terms;
  for (auto term : split(text, ';')) {
    if (term.empty()) continue;
    const auto colon = term.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError("config: initial term '" + std::string(term) + "' is not m,n,i:re,im");
    const auto lab = split(term.substr(0, colon), ',');
    if (lab.size() != 3) throw ConfigError("config: initial label '" + std::string(term) + "' is not m,n,i");
    terms.push_back({Label{parse_number<int>("initial", lab[0]), parse_number<int>("initial", lab[1]),
                           parse_number<int>("initial", lab[2])},
                     parse_complex(term.substr(colon + 1))});
  }
  if (terms.empty()) throw ConfigError("config: initial state is empty");
  return terms;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("config: duplicate key '" + key + "'");

    if (key == "p") c.p = parse_number<int>(key, value);
    else if (key == "M") c.M = parse_number<int>(key, value);
    else if (key == "M_keep") c.M_keep = parse_number<int>(key, value);
    else if (key == "rank_tol") c.rank_tol = parse_number<double>(key, value);
    else if (key == "relation_tol") c.relation_tol = parse_number<double>(key, value);
    else if (key == "max_ambient") c.max_ambient = parse_number<std::size_t>(key, value);
    else if (key == "variant") c.variant = parse_variant(value);
    else if (key == "omega_b") c.omega_b = parse_number<double>(key, value);
    else if (key == "omega_f") c.omega_f = parse_number<double>(key, value);
    else if (key == "lambda") c.lambda = parse_number<double>(key, value);
    else if (key == "lambda1") c.lambda1 = parse_complex(value);
    else if (key == "lambda2") c.lambda2 = parse_complex(value);
    else if (key == "lambda3") c.lambda3 = parse_complex(value);
    else if (key == "lambda4") c.lambda4 = parse_complex(value);
    else if (key == "hermitize") c.hermitize = parse_bool(key, value);
    else if (key == "grade_omega") c.grade_omega = parse_grade_omega(value);
    else if (key == "initial") c.initial = parse_initial_state(value);
    else if (key == "t_max") c.t_max = parse_number<double>(key, value);
    else if (key == "steps") c.steps = parse_number<int>(key, value);
    else if (key == "rep") c.rep = std::filesystem::path(std::string(value));
    else if (key == "out") c.out = std::filesystem::path(std::string(value));
    else if (key == "debug_klein_fault") c.debug_klein_fault = parse_number<int>(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (c.p < 1) fail("p must be >= 1, got " + std::to_string(c.p));
  if (c.M < 2) fail("M must be >= 2, got " + std::to_string(c.M));
  if (c.m_keep() < 0 || c.m_keep() > c.M - 1)
    fail("M_keep must lie in [0, M-1], got " + std::to_string(c.m_keep()));
  if (!(c.rank_tol > 0.0)) fail("rank_tol must be > 0");
  if (!(c.relation_tol > 0.0)) fail("relation_tol must be > 0");
  if (c.max_ambient == 0) fail("max_ambient must be > 0");
  if (c.steps < 1) fail("steps must be >= 1");
  if (!(c.t_max >= 0.0)) fail("t_max must be >= 0");
  if (c.debug_klein_fault && (*c.debug_klein_fault < 1 || *c.debug_klein_fault >= c.p))
    fail("debug_klein_fault must lie in [1, p)");
  if (c.variant == Variant::Eq2) {
    try {
      resolve_couplings(c.lambda1, c.lambda2, c.lambda3, c.lambda4, c.hermitize);
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
  }
}

ModelParams RunConfig::model_params() const {
  ModelParams params;
  params.variant = variant;
  params.omega_b = omega_b;
  params.omega_f = omega_f;
  params.lambda = lambda;
  params.hermitize = hermitize;
  params.couplings = resolve_couplings(lambda1, lambda2, lambda3, lambda4, hermitize);
  params.grade_frequencies = grade_omega;
  return params;
}

BuildOptions RunConfig::build_options() const {
  BuildOptions options;
  options.max_ambient = max_ambient;
  options.klein_fault_component = debug_klein_fault;
  return options;
}

}  // namespace pbf::cli
