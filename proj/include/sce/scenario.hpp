#pragma once

// Scenario files: flat INI-style sections of key = value pairs that
// describe a Hamiltonian, an initial state and a run block.  Function
// valued inputs (drives g(t), f(t)) are finite Fourier series.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sce/classical_dynamics.hpp"

namespace sce {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Scenario {
 public:
  static Scenario load(const std::string& path);
  static Scenario parse(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& def) const;
  double get_num(const std::string& section, const std::string& key) const;
  double get_num(const std::string& section, const std::string& key,
                 double def) const;
  long get_int(const std::string& section, const std::string& key,
               long def) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool def) const;
  std::vector<double> get_list(const std::string& section,
                               const std::string& key) const;

  /// Fourier series from keys <prefix>_mean, <prefix>_cos, <prefix>_sin,
  /// <prefix>_omega in the given section.
  FourierSeries get_fourier(const std::string& section,
                            const std::string& prefix) const;

  /// Builds the model described by [hamiltonian] kind = ... .
  HamiltonianModel hamiltonian() const;

  /// Potential V0(x) of the Hamiltonian when it has the form
  /// p^2/2 + V0(x, t); throws ConfigError otherwise.
  std::function<double(double, double)> potential() const;
  bool potential_form() const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  /// Canonical dump (sections and keys sorted) for CSV headers.
  std::string resolved() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

}  // namespace sce
