#include "rca/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace rca {

bool Report::allPass() const {
  return std::all_of(records.begin(), records.end(),
                     [](const CheckRecord& r) { return r.pass; });
}

void Report::sortById() {
  std::stable_sort(records.begin(), records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
}

void Report::append(Report other) {
  for (auto& r : other.records) records.push_back(std::move(r));
}

Witness makeWitness(int atom, int block, double lhs, double rhs, std::string note) {
  Witness w;
  w.atom = atom;
  w.block = block;
  w.lhs = lhs;
  w.rhs = rhs;
  w.gap = lhs - rhs;
  w.note = std::move(note);
  return w;
}

namespace {

// JSON has no +-inf; extended-real witness values fall back to strings.
nlohmann::json numberOrString(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

void formatDouble(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string toJson(const Report& report) {
  nlohmann::json root;
  root["schema"] = "rca-report/1";
  root["pass"] = report.allPass();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& rec : report.records) {
    nlohmann::json item;
    item["id"] = rec.id;
    item["anchor"] = rec.anchor;
    item["pass"] = rec.pass;
    item["context"] = rec.context;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& w : rec.witnesses) {
      nlohmann::json row;
      row["atom"] = w.atom;
      row["block"] = w.block;
      row["lhs"] = numberOrString(w.lhs);
      row["rhs"] = numberOrString(w.rhs);
      row["gap"] = numberOrString(w.gap);
      row["note"] = w.note;
      rows.push_back(std::move(row));
    }
    item["witnesses"] = std::move(rows);
    checks.push_back(std::move(item));
  }
  root["checks"] = std::move(checks);
  return root.dump(2) + "\n";
}

std::string toCsv(const Report& report) {
  std::string out = "atom,block,lhs,rhs,gap\n";
  for (const auto& rec : report.records) {
    out += "# ";
    out += rec.id;
    out += " | ";
    out += rec.anchor;
    out += " | ";
    out += rec.pass ? "PASS" : "FAIL";
    if (!rec.context.empty()) {
      out += " | ";
      out += rec.context;
    }
    out += "\n";
    for (const auto& w : rec.witnesses) {
      out += std::to_string(w.atom);
      out += ',';
      out += std::to_string(w.block);
      out += ',';
      formatDouble(out, w.lhs);
      out += ',';
      formatDouble(out, w.rhs);
      out += ',';
      formatDouble(out, w.gap);
      out += '\n';
    }
  }
  return out;
}

}  // namespace rca
