#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rca/bodies.hpp"
#include "rca/gexp.hpp"
#include "rca/risk.hpp"
#include "rca/space.hpp"

namespace rca {

struct TreeSpec {
  BinaryTree tree;
  Driver driver;
  RandVar terminal;  // leaf payoff; defaults to max(B_T, 0) when omitted
};

// A fully validated problem instance. Every invariant of every referenced
// object is checked at load time, so the check runners can assume well-formed
// inputs and every later throw is a solver matter, not an ingestion one.
struct Scenario {
  FiniteProbSpace space{Eigen::ArrayXd::Ones(1)};
  SigmaAlgebra algebra{std::vector<int>{0}};
  std::map<std::string, RandVar> vectors;
  std::map<std::string, ConvexBody> bodies;
  std::map<std::string, RiskSpec> risks;
  std::map<std::string, TreeSpec> trees;
  std::vector<std::string> suites;  // suite-all section filter; empty = all
  std::uint64_t seed = 1;
  double p = 2.0;           // norm exponent for distance-flavored checks
  int trials = 200;         // randomized-suite workload
  int probes = 48;          // probe-grid workload
  bool closedness = false;  // enable the brute closedness certification
};

Scenario parseScenario(const std::string& text);
Scenario loadScenario(const std::string& path);

}  // namespace rca
