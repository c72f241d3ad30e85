#include "sce/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sce {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Scenario Scenario::parse(const std::string& text) {
  Scenario sc;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      sc.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    sc.data_[section][key] = trim(line.substr(eq + 1));
  }
  return sc;
}

bool Scenario::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string Scenario::get_str(const std::string& section,
                              const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end())
    throw ConfigError("missing section [" + section + "]");
  const auto k = s->second.find(key);
  if (k == s->second.end())
    throw ConfigError("missing key '" + key + "' in [" + section + "]");
  return k->second;
}

std::string Scenario::get_str(const std::string& section, const std::string& key,
                              const std::string& def) const {
  return has(section, key) ? get_str(section, key) : def;
}

double Scenario::get_num(const std::string& section, const std::string& key) const {
  const std::string v = get_str(section, key);
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not a number: " + v);
  }
  if (trim(v.substr(pos)) != "" || !std::isfinite(x))
    throw ConfigError("key '" + key + "' in [" + section + "] is not a finite number: " + v);
  return x;
}

double Scenario::get_num(const std::string& section, const std::string& key,
                         double def) const {
  return has(section, key) ? get_num(section, key) : def;
}

long Scenario::get_int(const std::string& section, const std::string& key,
                       long def) const {
  if (!has(section, key)) return def;
  const double x = get_num(section, key);
  const long n = std::lround(x);
  if (x != static_cast<double>(n))
    throw ConfigError("key '" + key + "' in [" + section + "] is not an integer");
  return n;
}

bool Scenario::get_bool(const std::string& section, const std::string& key,
                        bool def) const {
  if (!has(section, key)) return def;
  const std::string v = get_str(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "' in [" + section + "] is not a boolean: " + v);
}

std::vector<double> Scenario::get_list(const std::string& section,
                                       const std::string& key) const {
  std::string v = get_str(section, key);
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    std::size_t pos = 0;
    double x;
    try {
      x = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' in [" + section + "] has a non-numeric entry: " + tok);
    }
    if (pos != tok.size() || !std::isfinite(x))
      throw ConfigError("key '" + key + "' in [" + section + "] has a non-finite entry: " + tok);
    out.push_back(x);
  }
  return out;
}

FourierSeries Scenario::get_fourier(const std::string& section,
                                    const std::string& prefix) const {
  FourierSeries f;
  f.mean = get_num(section, prefix + "_mean", 0.0);
  if (has(section, prefix + "_cos")) f.cosc = get_list(section, prefix + "_cos");
  if (has(section, prefix + "_sin")) f.sinc = get_list(section, prefix + "_sin");
  f.omega = get_num(section, prefix + "_omega", 1.0);
  if (!(f.omega > 0)) throw ConfigError(prefix + "_omega must be > 0");
  return f;
}

HamiltonianModel Scenario::hamiltonian() const {
  const std::string kind = get_str("hamiltonian", "kind");
  if (kind == "harmonic") return HamiltonianModel::harmonic();
  if (kind == "free_particle") return HamiltonianModel::free_particle();
  if (kind == "pendulum") return HamiltonianModel::pendulum();
  if (kind == "quartic") return HamiltonianModel::quartic();
  if (kind == "dilation")
    return HamiltonianModel::dilation(get_fourier("hamiltonian", "g"));
  if (kind == "isotropic")
    return HamiltonianModel::isotropic(get_fourier("hamiltonian", "g"));
  if (kind == "mathieu")
    return HamiltonianModel::mathieu(get_num("hamiltonian", "lambda"),
                                     get_num("hamiltonian", "mu"),
                                     get_num("hamiltonian", "omega"));
  if (kind == "hill") return HamiltonianModel::hill(get_fourier("hamiltonian", "f"));
  if (kind == "singular")
    return HamiltonianModel::singular(get_fourier("hamiltonian", "f"),
                                      get_num("hamiltonian", "g"));
  throw ConfigError("unknown hamiltonian kind: " + kind);
}

bool Scenario::potential_form() const {
  const std::string kind = get_str("hamiltonian", "kind");
  return kind == "harmonic" || kind == "free_particle" || kind == "pendulum" ||
         kind == "quartic" || kind == "mathieu" || kind == "hill" ||
         kind == "singular";
}

std::function<double(double, double)> Scenario::potential() const {
  const std::string kind = get_str("hamiltonian", "kind");
  if (kind == "harmonic")
    return [](double x, double) { return 0.5 * x * x; };
  if (kind == "free_particle")
    return [](double, double) { return 0.0; };
  if (kind == "pendulum")
    return [](double x, double) { return -std::cos(x); };
  if (kind == "quartic")
    return [](double x, double) { return 0.25 * x * x * x * x; };
  if (kind == "mathieu" || kind == "hill") {
    FourierSeries f;
    if (kind == "mathieu") {
      f.mean = get_num("hamiltonian", "mu");
      f.cosc = {get_num("hamiltonian", "lambda")};
      f.omega = get_num("hamiltonian", "omega");
    } else {
      f = get_fourier("hamiltonian", "f");
    }
    return [f](double x, double t) { return 0.5 * f(t) * x * x; };
  }
  if (kind == "singular") {
    const FourierSeries f = get_fourier("hamiltonian", "f");
    const double g2 = std::pow(get_num("hamiltonian", "g"), 2);
    return [f, g2](double x, double t) {
      return 0.5 * f(t) * x * x + g2 / (x * x);
    };
  }
  throw ConfigError("hamiltonian kind '" + kind + "' has no potential form");
}

void Scenario::set(const std::string& section, const std::string& key,
                   const std::string& value) {
  data_[section][key] = value;
}

std::string Scenario::resolved() const {
  std::ostringstream out;
  for (const auto& [section, kv] : data_) {
    out << "[" << section << "]\n";
    for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace sce
