#include "rnm/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rnm::config {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  // shortest decimal that parses back to the same bits
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_num(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || v[0] == '-')
    throw ConfigError(key + ": not a nonnegative integer: '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_num(key, v);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw ConfigError(key + ": not an integer: '" + v + "'");
  return i;
}

Cutoff parse_cutoff(const std::string& key, const std::string& v) {
  if (v == "inf") return Cutoff::infinite();
  return Cutoff::finite(parse_num(key, v));
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.empty()) return out;
  for (const auto& part : split(v, ','))
    out.push_back(parse_num(key, part));
  return out;
}

std::vector<Cutoff> parse_cutoffs(const std::string& key,
                                  const std::string& v) {
  std::vector<Cutoff> out;
  if (v.empty()) return out;
  for (const auto& part : split(v, ','))
    out.push_back(parse_cutoff(key, part));
  return out;
}

std::vector<Vec2> parse_pairs(const std::string& key, const std::string& v) {
  std::vector<Vec2> out;
  if (v.empty()) return out;
  for (const auto& pair : split(v, ';')) {
    const auto xy = split(pair, ',');
    if (xy.size() != 2)
      throw ConfigError(key + ": expected 'x,y' pairs separated by ';'");
    out.emplace_back(parse_num(key, xy[0]), parse_num(key, xy[1]));
  }
  return out;
}

action::ErenMode parse_eren(const std::string& key, const std::string& v) {
  if (v == "modesum" || v == "grid_sum") return action::ErenMode::grid_sum;
  if (v == "quadrature" || v == "continuum") return action::ErenMode::quadrature;
  throw ConfigError(key + ": expected modesum or quadrature, got '" + v + "'");
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

std::string join(const std::vector<Cutoff>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].is_finite() ? format_double(v[i].radius()) : "inf";
  }
  return out;
}

std::string join(const std::vector<Vec2>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += "; ";
    out += format_double(v[i].x) + "," + format_double(v[i].y);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "m_p") c.model.m_p = parse_num(key, val);
    else if (key == "m_b") c.model.m_b = parse_num(key, val);
    else if (key == "g") c.model.g = parse_num(key, val);
    else if (key == "lambda") c.lambda = parse_cutoff(key, val);
    else if (key == "grid.radial") c.grid.radial = parse_int(key, val);
    else if (key == "grid.angular") c.grid.angular = parse_int(key, val);
    else if (key == "grid.r_max") c.grid.r_max = parse_num(key, val);
    else if (key == "grid.breaks") c.grid.breaks = parse_list(key, val);
    else if (key == "grid.tol") c.grid_tol = parse_num(key, val);
    else if (key == "levy.eps") c.eps = parse_num(key, val);
    else if (key == "action.tol_id") c.tol_id = parse_num(key, val);
    else if (key == "mc.n_paths") c.n_paths = parse_uint(key, val);
    else if (key == "mc.seed") c.seed = parse_uint(key, val);
    else if (key == "mc.t") c.times = parse_list(key, val);
    else if (key == "mc.xi") c.xis = parse_pairs(key, val);
    else if (key == "mc.lambdas") c.lambdas = parse_cutoffs(key, val);
    else if (key == "oracle.n_max") c.n_max = parse_int(key, val);
    else if (key == "oracle.max_dim") c.max_dim = parse_int(key, val);
    else if (key == "oracle.eren_mode") c.eren = parse_eren(key, val);
    else if (key == "oracle.scan_lambdas") c.scan_lambdas = parse_list(key, val);
    else if (key == "oracle.scan_radial_per_octave")
      c.scan_radial_per_octave = parse_int(key, val);
    else if (key == "oracle.scan_angular") c.scan_angular = parse_int(key, val);
    else if (key == "compare.budget") c.compare_budget = parse_num(key, val);
    else if (key == "experiment") c.experiment = val;
    else if (key == "output_dir") c.output_dir = val;
    else throw ConfigError("unknown config key: '" + key + "'");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate() const {
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (grid.radial < 1 || grid.radial > 100000)
    throw ConfigError("grid.radial: out of range");
  if (grid.angular < 2 || grid.angular % 2 != 0)
    throw ConfigError("grid.angular: must be even and >= 2");
  if (!(grid.r_max > 0.0)) throw ConfigError("grid.r_max: must be > 0");
  for (double b : grid.breaks)
    if (!(b > 0.0) || !(b < grid.r_max))
      throw ConfigError("grid.breaks: entries must lie in (0, r_max)");
  if (!(grid_tol > 0.0)) throw ConfigError("grid.tol: must be > 0");
  if (!(eps > 0.0) || eps > 1.0)
    throw ConfigError("levy.eps: must lie in (0, 1]");
  if (!(tol_id > 0.0)) throw ConfigError("action.tol_id: must be > 0");
  if (n_paths == 0 || n_paths > 20000000)
    throw ConfigError("mc.n_paths: out of range");
  if (times.empty()) throw ConfigError("mc.t: at least one time");
  for (double t : times)
    if (!(t > 0.0)) throw ConfigError("mc.t: times must be > 0");
  if (xis.empty()) throw ConfigError("mc.xi: at least one momentum");
  if (n_max < 0 || n_max > 12) throw ConfigError("oracle.n_max: out of range");
  if (max_dim < 1) throw ConfigError("oracle.max_dim: must be >= 1");
  for (double l : scan_lambdas)
    if (!(l > 0.0)) throw ConfigError("oracle.scan_lambdas: must be > 0");
  if (scan_radial_per_octave < 1 || scan_angular < 2)
    throw ConfigError("oracle scan resolution: out of range");
  if (!(compare_budget >= 0.0)) throw ConfigError("compare.budget: must be >= 0");
  if (experiment.empty()) throw ConfigError("experiment: must not be empty");
}

std::string RunConfig::canonical() const {
  // numerics-affecting keys only: experiment and output_dir are plumbing
  // and stay out of the hash
  std::ostringstream os;
  os << "m_p = " << format_double(model.m_p) << "\n";
  os << "m_b = " << format_double(model.m_b) << "\n";
  os << "g = " << format_double(model.g) << "\n";
  os << "lambda = "
     << (lambda.is_finite() ? format_double(lambda.radius()) : "inf") << "\n";
  os << "grid.radial = " << grid.radial << "\n";
  os << "grid.angular = " << grid.angular << "\n";
  os << "grid.r_max = " << format_double(grid.r_max) << "\n";
  os << "grid.breaks = " << join(grid.breaks) << "\n";
  os << "grid.tol = " << format_double(grid_tol) << "\n";
  os << "levy.eps = " << format_double(eps) << "\n";
  os << "action.tol_id = " << format_double(tol_id) << "\n";
  os << "mc.n_paths = " << n_paths << "\n";
  os << "mc.seed = " << seed << "\n";
  os << "mc.t = " << join(times) << "\n";
  os << "mc.xi = " << join(xis) << "\n";
  os << "mc.lambdas = " << join(lambdas) << "\n";
  os << "oracle.n_max = " << n_max << "\n";
  os << "oracle.max_dim = " << max_dim << "\n";
  os << "oracle.eren_mode = "
     << (eren == action::ErenMode::grid_sum ? "modesum" : "quadrature") << "\n";
  os << "oracle.scan_lambdas = " << join(scan_lambdas) << "\n";
  os << "oracle.scan_radial_per_octave = " << scan_radial_per_octave << "\n";
  os << "oracle.scan_angular = " << scan_angular << "\n";
  os << "compare.budget = " << format_double(compare_budget) << "\n";
  return os.str();
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

}  // namespace rnm::config
