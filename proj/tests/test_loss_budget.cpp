#include <doctest.h>

#include <cmath>
#include <sstream>

#include "freqmux/errors.hpp"
#include "freqmux/loss_budget.hpp"

using namespace freqmux;
using namespace freqmux::loss;

namespace {

LossTable component_table(double snspd_db) {
  return LossTable({{"SNSPD", snspd_db, Arm::kBoth},
                    {"coupling herald", 3.0, Arm::kHerald},
                    {"coupling signal", 1.5, Arm::kSignal},
                    {"delay", 0.18, Arm::kSignal},
                    {"EOM", 2.2, Arm::kSignal},
                    {"FBG", 4.6, Arm::kHerald},
                    {"filter insertion", 0.46, Arm::kSignal},
                    {"KTP", 0.82, Arm::kBoth},
                    {"filter bandwidth", 3.0, Arm::kSignal}});
}

double db_to_eta(double db) { return std::pow(10.0, -db / 10.0); }

}  // namespace

TEST_CASE("an arm without entries is lossless") {
  LossTable t;
  CHECK(arm_efficiency(t, Arm::kSignal) == 1.0);
  t.add({"FBG", 4.6, Arm::kHerald});
  CHECK(arm_efficiency(t, Arm::kSignal) == 1.0);
  CHECK(arm_efficiency(t, Arm::kHerald) == doctest::Approx(db_to_eta(4.6)));
}

TEST_CASE("component table reproduces the Klyshko efficiencies") {
  const auto t = component_table(0.81);
  const double es = arm_efficiency(t, Arm::kSignal);
  const double eh = arm_efficiency(t, Arm::kHerald);
  CHECK(es == doctest::Approx(db_to_eta(0.81 + 1.5 + 0.18 + 2.2 + 0.46 + 0.82 + 3.0)).epsilon(1e-12));
  CHECK(eh == doctest::Approx(db_to_eta(0.81 + 3.0 + 4.6 + 0.82)).epsilon(1e-12));
  CHECK(std::abs(es - 0.13) <= 0.005);
  CHECK(std::abs(eh - 0.12) <= 0.005);
  CHECK(arm_efficiency(t, Arm::kBoth) == doctest::Approx(db_to_eta(0.81 + 0.82)));
}

TEST_CASE("concatenated tables multiply efficiencies") {
  const auto a = component_table(0.81);
  LossTable b({{"extra fibre", 0.7, Arm::kSignal}, {"splice", 0.1, Arm::kBoth}});
  const auto c = a.concatenated(b);
  for (Arm arm : {Arm::kSignal, Arm::kHerald}) {
    CHECK(std::abs(arm_efficiency(c, arm) - arm_efficiency(a, arm) * arm_efficiency(b, arm)) < 1e-12);
  }
  CHECK(c.entries().size() == a.entries().size() + b.entries().size());
}

TEST_CASE("negative losses and unknown arms are rejected") {
  LossTable t;
  CHECK_THROWS_AS(t.add({"gain", -1.0, Arm::kSignal}), DomainError);
  CHECK_THROWS_AS(parse_arm("idler"), DomainError);
  CHECK(parse_arm("both") == Arm::kBoth);
  CHECK(std::string(arm_label(Arm::kHerald)) == "herald");
}

TEST_CASE("CSV loss tables load with header, comments and blank lines") {
  std::istringstream in(
      "name,dB,arm\n"
      "# detectors\n"
      "SNSPD,0.81,both\n"
      "\n"
      "FBG,4.6,herald\n"
      "EOM,2.2,signal\n");
  const auto t = load_loss_table(in);
  REQUIRE(t.entries().size() == 3);
  CHECK(t.entries()[1].name == "FBG");
  CHECK(arm_efficiency(t, Arm::kHerald) == doctest::Approx(db_to_eta(5.41)));
  std::istringstream bad("SNSPD,abc,both\nFBG,1,herald\n");
  CHECK_NOTHROW(load_loss_table(bad));
  std::istringstream worse("SNSPD,1,both\nFBG,x,herald\n");
  CHECK_THROWS_AS(load_loss_table(worse), Error);
  CHECK_THROWS_AS(load_loss_table_file("/nonexistent/loss.csv"), Error);
}

TEST_CASE("reconciliation reports signed discrepancies") {
  const auto t = component_table(0.81);
  const double es = arm_efficiency(t, Arm::kSignal);
  const double eh = arm_efficiency(t, Arm::kHerald);
  const auto exact = reconcile(t, es, eh);
  CHECK(exact.signal.absolute == doctest::Approx(0.0));
  CHECK(exact.herald.relative == doctest::Approx(0.0));
  CHECK(exact.signal.within_tolerance);

  const auto off = reconcile(t, es + 0.01, eh - 0.03);
  CHECK(off.signal.absolute == doctest::Approx(0.01));
  CHECK(off.signal.relative == doctest::Approx(0.01 / es));
  CHECK(off.signal.within_tolerance);
  CHECK_FALSE(off.herald.within_tolerance);

  ReconcileOptions opts;
  opts.signal_interval = std::make_pair(0.11, 0.15);
  opts.herald_interval = std::make_pair(0.125, 0.15);
  const auto iv = reconcile(t, 0.14, 0.13, opts);
  CHECK(iv.signal.within_interval);
  CHECK_FALSE(iv.herald.within_interval);
  std::ostringstream out;
  iv.write(out);
  CHECK(out.str().find(" = ") != std::string::npos);
}
