#include "bosonlab/lab/config.hpp"

#include <algorithm>
#include <cctype>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bosonlab::lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || !(std::islower(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  for (char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  require(r.ec == std::errc() && r.ptr == end && std::isfinite(out), "config key '" + key + "': not a number: " + v);
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  require(r.ec == std::errc() && r.ptr == end, "config key '" + key + "': not an integer: " + v);
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, r.ptr};
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + f(v[i]);
  return s;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "d",        "m",          "n_list",     "epsilon", "a",           "profile",          "v0",
      "r",        "profile_table", "dt",      "t",       "snapshot_spacing", "k_max",         "beta",
      "eta",      "family_size", "seed",      "amplitude", "memory_budget", "output_dir"};
  return keys;
}

ConfigEntries parse_config_text(const std::string& text) {
  ConfigEntries out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    require(eq != std::string::npos, where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(valid_key(key), where + "malformed key '" + key + "'");
    require(!value.empty(), where + "empty value for '" + key + "'");
    require(out.emplace(key, value).second, where + "duplicate key '" + key + "'");
  }
  return out;
}

ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig apply_entries(ExperimentConfig c, const ConfigEntries& entries) {
  const auto& keys = config_keys();
  for (const auto& [key, v] : entries) {
    require(std::find(keys.begin(), keys.end(), key) != keys.end(), "unknown config key '" + key + "'");
    if (key == "d") c.d = static_cast<int>(to_integer(key, v));
    else if (key == "m") c.points_per_axis = static_cast<int>(to_integer(key, v));
    else if (key == "n_list") {
      c.n_list.clear();
      for (const auto& item : split_list(v)) c.n_list.push_back(static_cast<int>(to_integer(key, item)));
    } else if (key == "epsilon") c.epsilon = to_double(key, v);
    else if (key == "a") {
      c.range = to_double(key, v);
      c.epsilon.reset();
    } else if (key == "profile") c.profile = v;
    else if (key == "v0") c.v0 = to_double(key, v);
    else if (key == "r") c.radius = to_double(key, v);
    else if (key == "profile_table") {
      c.table_radii.clear();
      c.table_values.clear();
      for (const auto& item : split_list(v)) {
        const auto colon = item.find(':');
        require(colon != std::string::npos, "profile_table entries are radius:value");
        c.table_radii.push_back(to_double(key, trim(item.substr(0, colon))));
        c.table_values.push_back(to_double(key, trim(item.substr(colon + 1))));
      }
    } else if (key == "dt") c.dt = to_double(key, v);
    else if (key == "t") c.duration = to_double(key, v);
    else if (key == "snapshot_spacing") c.snapshot_spacing = to_double(key, v);
    else if (key == "k_max") c.k_max = static_cast<int>(to_integer(key, v));
    else if (key == "beta") c.beta = to_double(key, v);
    else if (key == "eta") c.eta = to_double(key, v);
    else if (key == "family_size") c.family_size = static_cast<int>(to_integer(key, v));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_integer(key, v));
    else if (key == "amplitude") c.initial_amplitude = to_double(key, v);
    else if (key == "memory_budget") {
      const long long bytes = to_integer(key, v);
      require(bytes > 0, "memory_budget must be positive");
      c.memory_budget = static_cast<std::size_t>(bytes);
    } else if (key == "output_dir") c.output_dir = v;
  }
  return c;
}

PotentialProfile ExperimentConfig::potential() const {
  switch (profile_kind_from_string(profile)) {
    case ProfileKind::bump: return PotentialProfile::bump(v0, radius);
    case ProfileKind::square_well: return PotentialProfile::square_well(v0, radius);
    case ProfileKind::tabulated: return PotentialProfile::tabulated(table_radii, table_values);
  }
  return {};
}

double ExperimentConfig::range_for(int particles) const {
  return epsilon ? std::pow(static_cast<double>(particles), -*epsilon) : range;
}

ManyBodyConfig ExperimentConfig::manybody(int particles) const {
  ManyBodyConfig m;
  m.d = d;
  m.points_per_axis = points_per_axis;
  m.particles = particles;
  m.range = range_for(particles);
  m.profile = potential();
  m.dt = dt;
  m.memory_budget = memory_budget;
  return m;
}

void ExperimentConfig::validate() const {
  const Grid grid = make_grid(d, points_per_axis);
  potential().validate();
  require(!n_list.empty(), "n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i)
    require(i == 0 || n_list[i] > n_list[i - 1], "n_list must be strictly ascending");
  if (epsilon) require(*epsilon > 0.0 && *epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(dt > 0.0 && duration > 0.0, "dt and t must be positive");
  const double h = spacing();
  const long per_snap = std::lround(h / dt);
  require(per_snap >= 1 && std::abs(per_snap * dt - h) <= 1e-9 * h, "snapshot_spacing must be a whole number of steps");
  const long snaps = std::lround(duration / h);
  require(snaps >= 1 && std::abs(snaps * h - duration) <= 1e-9 * duration,
          "t must be a whole number of snapshot spacings");
  require(k_max >= 1 && k_max <= 2, "k_max must be 1 or 2");
  require(family_size >= 1 && family_size <= 8, "family_size must be between 1 and 8");
  require(initial_amplitude >= 0.0 && initial_amplitude < 1.0, "amplitude must lie in [0, 1)");
  require(beta * points_per_axis >= 2.0 && beta < 0.5, "beta violates the mollifier guard beta*M >= 2, beta < 1/2");
  require(eta * points_per_axis >= 2.0 && eta < 0.5, "eta violates the mollifier guard eta*M >= 2, eta < 1/2");
  for (int n : n_list) {
    require(n >= k_max, "every N must be at least k_max");
    manybody(n).validate();
  }
  (void)grid;
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["d"] = std::to_string(d);
  kv["m"] = std::to_string(points_per_axis);
  kv["n_list"] = join(n_list, [](int n) { return std::to_string(n); });
  if (epsilon) kv["epsilon"] = num(*epsilon);
  else kv["a"] = num(range);
  kv["profile"] = profile;
  kv["v0"] = num(v0);
  kv["r"] = num(radius);
  if (!table_radii.empty()) {
    std::vector<std::string> items;
    for (std::size_t i = 0; i < table_radii.size(); ++i) items.push_back(num(table_radii[i]) + ":" + num(table_values[i]));
    kv["profile_table"] = join(items, [](const std::string& s) { return s; });
  }
  kv["dt"] = num(dt);
  kv["t"] = num(duration);
  kv["snapshot_spacing"] = num(spacing());
  kv["k_max"] = std::to_string(k_max);
  kv["beta"] = num(beta);
  kv["eta"] = num(eta);
  kv["family_size"] = std::to_string(family_size);
  kv["seed"] = std::to_string(seed);
  kv["amplitude"] = num(initial_amplitude);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

namespace {

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string ExperimentConfig::hash() const { return fnv1a(canonical()); }

std::string ExperimentConfig::dynamics_hash() const {
  static const std::vector<std::string> skip{"t", "snapshot_spacing", "k_max", "beta", "eta", "family_size", "n_list"};
  std::istringstream in(canonical());
  std::string line, kept;
  while (std::getline(in, line)) {
    const std::string key = line.substr(0, line.find(' '));
    if (std::find(skip.begin(), skip.end(), key) == skip.end()) kept += line + "\n";
  }
  return fnv1a(kept);
}

}  // namespace bosonlab::lab
