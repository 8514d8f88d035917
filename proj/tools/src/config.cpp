#include "elm_cli/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "elm/errors.hpp"

namespace elm::cli {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Adaptive: return "adaptive";
    case Mode::Uniform: return "uniform";
    case Mode::Algorithm1: return "algorithm1";
    case Mode::Convergence: return "convergence";
    case Mode::Trace: return "trace";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v, std::size_t line) {
  if (v.empty()) throw ParseError(line, "missing value");
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    throw ParseError(line, "not a number: '" + v + "'");
  return d;
}

int to_int(const std::string& v, std::size_t line) {
  const double d = to_double(v, line);
  if (d != static_cast<double>(static_cast<long long>(d)) || std::abs(d) > 1e9)
    throw ParseError(line, "not an integer: '" + v + "'");
  return static_cast<int>(d);
}

std::vector<double> to_list(const std::string& v, std::size_t line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), line));
  if (out.empty()) throw ParseError(line, "empty list");
  return out;
}

Mode to_mode(const std::string& v, std::size_t line) {
  if (v == "adaptive") return Mode::Adaptive;
  if (v == "uniform") return Mode::Uniform;
  if (v == "algorithm1") return Mode::Algorithm1;
  if (v == "convergence") return Mode::Convergence;
  if (v == "trace") return Mode::Trace;
  throw ParseError(line, "unknown mode '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, std::size_t)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const char* key, double Tolerances::*field) {
      t[key] = [field](RunConfig& c, const std::string& v, std::size_t l) {
        c.tolerances.*field = to_double(v, l);
      };
    };
    auto param = [&t](const char* key, std::optional<double> ProblemParams::*field) {
      t[key] = [field](RunConfig& c, const std::string& v, std::size_t l) {
        c.params.*field = to_double(v, l);
      };
    };
    t["benchmark"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      if (v.empty()) throw ParseError(l, "missing value");
      c.benchmark = v;
    };
    t["mode"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.mode = to_mode(v, l); };
    num("tol_time", &Tolerances::tol_time);
    num("tol_space", &Tolerances::tol_space);
    num("tol_coarsen", &Tolerances::tol_coarsen);
    num("delta1", &Tolerances::delta1);
    num("delta2", &Tolerances::delta2);
    num("theta", &Tolerances::theta);
    num("theta_mark", &Tolerances::theta_mark);
    num("k0", &Tolerances::k0);
    num("k_min", &Tolerances::k_min);
    num("k_max", &Tolerances::k_max);
    t["T"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      c.tolerances.T = to_double(v, l);
      c.params.final_time = c.tolerances.T;
      c.final_time_set = true;
    };
    t["max_refine_loops"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      c.tolerances.max_refine_loops = to_int(v, l);
    };
    param("epsilon", &ProblemParams::epsilon);
    param("lambda", &ProblemParams::lambda);
    param("x0", &ProblemParams::x0);
    param("y0", &ProblemParams::y0);
    param("b", &ProblemParams::b);
    t["cells_per_unit"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      c.cells_per_unit = to_int(v, l);
    };
    t["output_dir"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      if (v.empty()) throw ParseError(l, "missing value");
      c.output_dir = v;
    };
    t["snapshot_every"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      c.snapshot_every = to_int(v, l);
    };
    t["solver_tolerance"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      c.solver_tolerance = to_double(v, l);
    };
    t["study_ks"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.study_ks = to_list(v, l); };
    t["trace_ks"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.trace_ks = to_list(v, l); };
    t["trace_field"] = [](RunConfig& c, const std::string& v, std::size_t) { c.trace_field = v; };
    t["trace_grid"] = [](RunConfig& c, const std::string& v, std::size_t l) { c.trace_grid = to_int(v, l); };
    t["trace_time"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      c.trace_time = to_double(v, l);
    };
    t["composition"] = [](RunConfig& c, const std::string& v, std::size_t l) {
      if (v == "lie") c.composition = Composition::Lie;
      else if (v == "strang") c.composition = Composition::Strang;
      else throw ParseError(l, "composition must be 'lie' or 'strang'");
    };
    return t;
  }();
  return table;
}

void validate(RunConfig& c) {
  if (c.benchmark.empty()) throw ValidationError("benchmark", "missing benchmark");
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), c.benchmark) == names.end())
    throw ValidationError("benchmark", "unknown benchmark '" + c.benchmark + "'");
  if (c.params.epsilon && !(*c.params.epsilon > 0.0))
    throw ValidationError("epsilon", "must be positive");
  if (c.params.lambda && !(*c.params.lambda > 0.0))
    throw ValidationError("lambda", "must be positive");
  if (!c.final_time_set) c.tolerances.T = make_problem(c.benchmark, c.params).final_time;
  c.tolerances.validate();
  if (c.cells_per_unit < 1) throw ValidationError("cells_per_unit", "must be at least 1");
  if (c.snapshot_every < 0) throw ValidationError("snapshot_every", "must be non-negative");
  if (!(c.solver_tolerance > 0.0 && c.solver_tolerance < 1.0))
    throw ValidationError("solver_tolerance", "must lie in (0, 1)");
  for (double k : c.study_ks)
    if (!(k > 0.0)) throw ValidationError("study_ks", "entries must be positive");
  for (double k : c.trace_ks)
    if (!(k > 0.0)) throw ValidationError("trace_ks", "entries must be positive");
  if (c.trace_grid < 1) throw ValidationError("trace_grid", "must be at least 1");
  static const std::set<std::string> fields{"zero", "rotation", "shear", "sine_cells", "abc",
                                            "abc_perturbed"};
  if (!c.trace_field.empty() && !fields.count(c.trace_field))
    throw ValidationError("trace_field", "unknown field '" + c.trace_field + "'");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(line_no, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(line_no, "duplicate key '" + key + "'");
    it->second(c, value, line_no);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace elm::cli
