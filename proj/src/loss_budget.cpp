#include "freqmux/loss_budget.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "freqmux/errors.hpp"

namespace freqmux::loss {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void check_entry(const LossEntry& e) {
  if (!(e.db >= 0.0) || !std::isfinite(e.db)) {
    throw DomainError("loss entry '" + e.name + "' must have a finite loss >= 0 dB");
  }
}

ArmDiscrepancy compare(double table, double measured, double tolerance,
                       std::optional<std::pair<double, double>> interval) {
  ArmDiscrepancy d{table, measured, measured - table, 0.0, false, interval, true};
  d.relative = table > 0.0 ? d.absolute / table : 0.0;
  d.within_tolerance = std::abs(d.absolute) <= tolerance;
  if (interval) d.within_interval = table >= interval->first && table <= interval->second;
  return d;
}

void write_arm(std::ostream& out, const char* name, const ArmDiscrepancy& d) {
  out << name << ".table = " << d.table << '\n'
      << name << ".measured = " << d.measured << '\n'
      << name << ".absolute = " << d.absolute << '\n'
      << name << ".relative = " << d.relative << '\n'
      << name << ".within_tolerance = " << (d.within_tolerance ? "true" : "false") << '\n';
  if (d.interval) {
    out << name << ".interval = [" << d.interval->first << ", " << d.interval->second << "]\n"
        << name << ".within_interval = " << (d.within_interval ? "true" : "false") << '\n';
  }
}

}  // namespace

Arm parse_arm(const std::string& label) {
  std::string l = trim(label);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "signal") return Arm::kSignal;
  if (l == "herald") return Arm::kHerald;
  if (l == "both") return Arm::kBoth;
  throw DomainError("unknown arm label '" + label + "'");
}

const char* arm_label(Arm arm) {
  switch (arm) {
    case Arm::kSignal: return "signal";
    case Arm::kHerald: return "herald";
    case Arm::kBoth: return "both";
  }
  return "?";
}

LossTable::LossTable(std::vector<LossEntry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) check_entry(e);
}

void LossTable::add(LossEntry entry) {
  check_entry(entry);
  entries_.push_back(std::move(entry));
}

LossTable LossTable::concatenated(const LossTable& other) const {
  auto all = entries_;
  all.insert(all.end(), other.entries_.begin(), other.entries_.end());
  return LossTable(std::move(all));
}

LossTable load_loss_table(std::istream& in) {
  LossTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 3) throw DomainError("loss table: expected name,dB,arm in: " + s);
    double db = 0.0;
    try {
      std::size_t used = 0;
      db = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;
      }
      throw DomainError("loss table: bad dB value in: " + s);
    }
    first = false;
    t.add({fields[0], db, parse_arm(fields[2])});
  }
  return t;
}

LossTable load_loss_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open loss table: " + path);
  return load_loss_table(in);
}

double arm_efficiency(const LossTable& table, Arm arm) {
  double db = 0.0;
  for (const auto& e : table.entries()) {
    if (e.arm == arm || (e.arm == Arm::kBoth && arm != Arm::kBoth)) db += e.db;
  }
  return std::pow(10.0, -db / 10.0);
}

void ReconcileReport::write(std::ostream& out) const {
  write_arm(out, "signal", signal);
  write_arm(out, "herald", herald);
}

ReconcileReport reconcile(const LossTable& table, double klyshko_eta_s, double klyshko_eta_h,
                          const ReconcileOptions& options) {
  return {compare(arm_efficiency(table, Arm::kSignal), klyshko_eta_s, options.tolerance,
                  options.signal_interval),
          compare(arm_efficiency(table, Arm::kHerald), klyshko_eta_h, options.tolerance,
                  options.herald_interval)};
}

}  // namespace freqmux::loss
