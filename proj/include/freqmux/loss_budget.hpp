#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace freqmux::loss {

enum class Arm { kSignal, kHerald, kBoth };

Arm parse_arm(const std::string& label);
const char* arm_label(Arm arm);

struct LossEntry {
  std::string name;
  double db;
  Arm arm;
};

class LossTable {
 public:
  LossTable() = default;
  explicit LossTable(std::vector<LossEntry> entries);

  const std::vector<LossEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  void add(LossEntry entry);
  LossTable concatenated(const LossTable& other) const;

 private:
  std::vector<LossEntry> entries_;
};

// CSV rows "name,dB,arm" (arm: signal|herald|both). A header line whose
// second field is not numeric is skipped, as are blank and '#' lines.
LossTable load_loss_table(std::istream& in);
LossTable load_loss_table_file(const std::string& path);

// 10^(-sum dB / 10) over entries on `arm` (entries marked both count for
// either arm). Asking for Arm::kBoth sums only the shared entries.
double arm_efficiency(const LossTable& table, Arm arm);

struct ArmDiscrepancy {
  double table;
  double measured;
  double absolute;  // measured - table
  double relative;  // absolute / table
  bool within_tolerance;
  std::optional<std::pair<double, double>> interval;
  bool within_interval = true;
};

struct ReconcileOptions {
  double tolerance = 0.02;  // absolute band on efficiencies
  // Optional measured ranges; the table value is checked against them.
  std::optional<std::pair<double, double>> signal_interval;
  std::optional<std::pair<double, double>> herald_interval;
};

struct ReconcileReport {
  ArmDiscrepancy signal;
  ArmDiscrepancy herald;

  // key = value lines.
  void write(std::ostream& out) const;
};

ReconcileReport reconcile(const LossTable& table, double klyshko_eta_s, double klyshko_eta_h,
                          const ReconcileOptions& options = {});

}  // namespace freqmux::loss
