#include "spectral_limits/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "spectral_limits/errors.hpp"

namespace spectral_limits {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// Drops a trailing comment that is not inside a string.
std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
}

ConfigScalar parse_scalar(const std::string& tok, int line_no) {
  if (tok.empty()) fail(line_no, "empty value");
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') fail(line_no, "unterminated string " + tok);
    return tok.substr(1, tok.size() - 2);
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  std::string clean;
  for (char c : tok) {
    if (c != '_') clean.push_back(c);
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(clean, &used);
  } catch (const std::exception&) {
    fail(line_no, "cannot parse value '" + tok + "'");
  }
  if (used != clean.size()) fail(line_no, "cannot parse value '" + tok + "'");
  return v;
}

ConfigValue parse_value(const std::string& raw, int line_no) {
  if (raw.empty()) fail(line_no, "missing value");
  if (raw.front() != '[') {
    const auto s = parse_scalar(raw, line_no);
    if (const auto* d = std::get_if<double>(&s)) return *d;
    if (const auto* b = std::get_if<bool>(&s)) return *b;
    return std::get<std::string>(s);
  }
  if (raw.back() != ']') fail(line_no, "arrays must close on the same line");
  std::vector<ConfigScalar> items;
  std::string cur;
  bool in_string = false;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      const auto t = trim(cur);
      if (!t.empty()) items.push_back(parse_scalar(t, line_no));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const auto t = trim(cur);
  if (!t.empty()) items.push_back(parse_scalar(t, line_no));
  return items;
}

double as_number(const std::string& key, const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw ConfigError("config key '" + key + "' must be a number");
}

long long as_integer(const std::string& key, const ConfigValue& v) {
  const double d = as_number(key, v);
  if (d != std::floor(d)) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<long long>(d);
}

std::size_t as_count(const std::string& key, const ConfigValue& v) {
  const auto i = as_integer(key, v);
  if (i < 0) throw ConfigError("config key '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(i);
}

std::string as_string(const std::string& key, const ConfigValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("config key '" + key + "' must be a string");
}

bool as_bool(const std::string& key, const ConfigValue& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw ConfigError("config key '" + key + "' must be true or false");
}

/// A scalar or an array of numbers.
std::vector<double> as_numbers(const std::string& key, const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return {*d};
  const auto* arr = std::get_if<std::vector<ConfigScalar>>(&v);
  if (arr == nullptr) throw ConfigError("config key '" + key + "' must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& s : *arr) {
    const auto* d = std::get_if<double>(&s);
    if (d == nullptr) throw ConfigError("config key '" + key + "' must hold numbers only");
    out.push_back(*d);
  }
  return out;
}

std::vector<std::string> as_strings(const std::string& key, const ConfigValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return {*s};
  const auto* arr = std::get_if<std::vector<ConfigScalar>>(&v);
  if (arr == nullptr) throw ConfigError("config key '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : *arr) {
    const auto* str = std::get_if<std::string>(&s);
    if (str == nullptr) throw ConfigError("config key '" + key + "' must hold strings only");
    out.push_back(*str);
  }
  return out;
}

}  // namespace

std::map<std::string, ConfigValue> parse_key_values(std::string_view text) {
  std::map<std::string, ConfigValue> out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[' && body.find('=') == std::string::npos) {
      if (body.back() != ']') fail(line_no, "malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const auto key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    const auto full = section.empty() ? key : section + "." + key;
    if (out.count(full) != 0) fail(line_no, "duplicate key '" + full + "'");
    out.emplace(full, parse_value(trim(std::string_view(body).substr(eq + 1)), line_no));
  }
  return out;
}

std::string to_string(Report r) {
  switch (r) {
    case Report::spectrum: return "spectrum";
    case Report::alignment: return "alignment";
    case Report::regularity: return "regularity";
    case Report::distortion: return "distortion";
    case Report::energy: return "energy";
    case Report::moser: return "moser";
  }
  return "unknown";
}

Report report_from_string(const std::string& name) {
  for (auto r : {Report::spectrum, Report::alignment, Report::regularity, Report::distortion, Report::energy,
                 Report::moser}) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown report '" + name + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  cfg.source = std::string(text);
  for (const auto& [key, v] : parse_key_values(text)) {
    if (key == "manifold") cfg.manifold = as_string(key, v);
    else if (key == "radius") cfg.radius = as_number(key, v);
    else if (key == "dim") cfg.dim = static_cast<int>(as_integer(key, v));
    else if (key == "periods") cfg.periods = as_numbers(key, v);
    else if (key == "warp") cfg.warp = as_number(key, v);
    else if (key == "density") cfg.density = as_string(key, v);
    else if (key == "amplitude") cfg.amplitude = as_number(key, v);
    else if (key == "n") {
      cfg.n.clear();
      for (double d : as_numbers(key, v)) {
        if (d < 0.0 || d != std::floor(d)) throw ConfigError("config key 'n' must hold nonnegative integers");
        cfg.n.push_back(static_cast<std::size_t>(d));
      }
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (double d : as_numbers(key, v)) {
        if (d < 0.0 || d != std::floor(d)) throw ConfigError("config key 'seeds' must hold nonnegative integers");
        cfg.seeds.push_back(static_cast<std::uint64_t>(d));
      }
    } else if (key == "eps_rule") {
      const auto s = as_string(key, v);
      if (s == "schedule") cfg.eps_rule = EpsRule::schedule;
      else if (s == "fixed") cfg.eps_rule = EpsRule::fixed;
      else throw ConfigError("eps_rule must be \"schedule\" or \"fixed\"");
    } else if (key == "eps") cfg.eps = as_number(key, v);
    else if (key == "eps_scale") cfg.eps_scale = as_number(key, v);
    else if (key == "graph") cfg.graph = graph_kind_from_string(as_string(key, v));
    else if (key == "metric") {
      const auto s = as_string(key, v);
      if (s == "embedded") cfg.metric = DistanceMetric::embedded;
      else if (s == "geodesic") cfg.metric = DistanceMetric::geodesic;
      else throw ConfigError("metric must be \"embedded\" or \"geodesic\"");
    } else if (key == "k_max") cfg.k_max = static_cast<int>(as_integer(key, v));
    else if (key == "reports") {
      cfg.reports.clear();
      for (const auto& s : as_strings(key, v)) cfg.reports.push_back(report_from_string(s));
    } else if (key == "threads") cfg.threads = static_cast<unsigned>(std::max<long long>(1, as_integer(key, v)));
    else if (key == "reference.fixture") cfg.reference_fixture = as_string(key, v);
    else if (key == "reference.mesh") cfg.reference_mesh = static_cast<int>(as_integer(key, v));
    else if (key == "reference.l_max") cfg.reference_l_max = static_cast<int>(as_integer(key, v));
    else if (key == "alignment.cluster") {
      const auto c = as_numbers(key, v);
      if (c.size() != 2) throw ConfigError("alignment.cluster must be [k, l]");
      cfg.align_k = static_cast<int>(c[0]);
      cfg.align_l = static_cast<int>(c[1]);
    } else if (key == "regularity.sigma") cfg.sigma = as_number(key, v);
    else if (key == "regularity.centers") cfg.centers = as_count(key, v);
    else if (key == "regularity.max_exact_ball") cfg.max_exact_ball = as_count(key, v);
    else if (key == "regularity.moser_p") {
      cfg.moser_p = as_numbers(key, v);
    } else if (key == "distortion.p") cfg.distortion_p = as_number(key, v);
    else if (key == "distortion.K") cfg.distortion_K = as_number(key, v);
    else if (key == "distortion.n_mc") cfg.distortion_n_mc = as_count(key, v);
    else if (key == "distortion.n_outer") cfg.distortion_n_outer = as_count(key, v);
    else if (key == "distortion.n_inner") cfg.distortion_n_inner = as_count(key, v);
    else if (key == "sweep.svg") cfg.svg = as_bool(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ManifoldModel ExperimentConfig::make_manifold() const {
  const auto kind = manifold_kind_from_string(manifold);
  switch (kind) {
    case ManifoldKind::circle: return ManifoldModel::circle(radius);
    case ManifoldKind::sphere: return ManifoldModel::sphere(dim == 0 ? 2 : dim, radius);
    case ManifoldKind::flat_torus: return ManifoldModel::flat_torus(periods);
    case ManifoldKind::spindle: return ManifoldModel::spindle(dim == 0 ? 3 : dim, warp);
  }
  throw ConfigError("unknown manifold");
}

DensitySpec ExperimentConfig::make_density(const ManifoldModel& mfd) const {
  if (density == "uniform") return DensitySpec::uniform();
  if (density == "cosine_tilt") return DensitySpec::cosine_tilt(mfd, amplitude);
  throw ConfigError("density must be \"uniform\" or \"cosine_tilt\" in config files");
}

double ExperimentConfig::epsilon(std::size_t n_points) const {
  if (eps_rule == EpsRule::fixed) return eps;
  return eps_scale * epsilon_schedule(n_points, make_manifold().dim());
}

void ExperimentConfig::validate() const {
  if (n.empty()) throw ConfigError("config: n list is empty");
  for (auto v : n) {
    if (v < 16) throw ConfigError("config: every n must be >= 16 (got " + std::to_string(v) + ")");
  }
  if (seeds.empty()) throw ConfigError("config: seeds list is empty");
  if (eps_rule == EpsRule::fixed && !(eps > 0.0)) throw ConfigError("config: eps_rule = \"fixed\" needs eps > 0");
  if (!(eps_scale > 0.0)) throw ConfigError("config: eps_scale must be positive");
  if (k_max < 1) throw ConfigError("config: k_max must be >= 1");
  if (align_k < 0 || align_l < align_k) throw ConfigError("config: alignment.cluster needs 0 <= k <= l");
  if (!(sigma >= 1.0)) throw ConfigError("config: regularity.sigma must be >= 1");
  std::set<Report> seen(reports.begin(), reports.end());
  if (seen.size() != reports.size()) throw ConfigError("config: duplicate entries in reports");
  const auto mfd = make_manifold();
  make_density(mfd).validate(mfd);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace spectral_limits
