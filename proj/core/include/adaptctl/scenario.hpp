#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adaptctl/pso.hpp"
#include "adaptctl/simulation.hpp"
#include "adaptctl/types.hpp"

namespace adaptctl {

// Flat `key = value` scenario file with dotted sections (plant.*,
// controller.*, reference.*, sim.*, observer.*, fuzzy.*, pso.*). Values are
// numbers, words, or space/comma-separated numeric lists. `#` starts a
// comment. Keys a build does not consume are rejected with their line
// number.
class Scenario {
 public:
  static Scenario from_file(const std::string& path);
  static Scenario from_string(const std::string& text,
                              const std::string& name = "<inline>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  long get_int(const std::string& key, long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  Eigen::VectorXd get_vector(const std::string& key) const;
  Eigen::VectorXd get_vector(const std::string& key,
                             const Eigen::VectorXd& dflt) const;

  // Remaining plant.* keys (minus plant.name) as numeric overrides.
  std::map<std::string, double> plant_overrides() const;

  // Throws ConfigError naming the first key never consumed by a getter.
  void ensure_all_consumed() const;

  const std::string& source_name() const { return name_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  std::string name_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;  // insertion order for error reporting

  const Entry& require(const std::string& key) const;
};

Scenario parse_scenario(const std::string& path);

// Assemble plant + controller (+ observer) from a parsed scenario. Consumes
// keys; unknown leftovers raise ConfigError.
ClosedLoop build_closed_loop(const Scenario& sc);

struct PsoSetup {
  SwarmConfig swarm;
  FuzzyObjectiveScenario objective;
};

// pso.* keys plus an embedded fuzzy_l1 closed-loop description.
PsoSetup build_pso(const Scenario& sc);

}  // namespace adaptctl
