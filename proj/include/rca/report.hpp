#pragma once

#include <string>
#include <vector>

namespace rca {

// One atomwise comparison row. atom/block are -1 when the row is aggregate.
struct Witness {
  int atom = -1;
  int block = -1;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  std::string note;
};

// Outcome of a single verification, tagged with the statement it exercises.
// `seconds` is measured wall time and deliberately never serialized: report
// bodies must be byte-identical across runs of the same scenario and seed.
struct CheckRecord {
  std::string id;       // stable slash-separated identifier, e.g. "gauge/sandwich"
  std::string anchor;   // source statement, e.g. "Thm 3.6"
  bool pass = false;
  std::string context;  // replay info: seed, trial index, named inputs
  std::vector<Witness> witnesses;
  double seconds = 0.0;
};

struct Report {
  std::vector<CheckRecord> records;

  bool allPass() const;
  void sortById();
  void append(Report other);
};

Witness makeWitness(int atom, int block, double lhs, double rhs, std::string note = "");

std::string toJson(const Report& report);
std::string toCsv(const Report& report);

}  // namespace rca
