#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bspaa/config.hpp"
#include "bspaa/reports.hpp"

using namespace bspaa;

namespace {
RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}
}  // namespace

TEST(Config, ParsesSectionsAndComments) {
  const RunConfig c = parse(
      "# header\n[prior]\nalpha = 2  # shape\nbeta = 0.8\nl = 12\n[cost]\nCa = 0\nCr = 40\n"
      "[plan]\nn = 4\nt1 = 0.1\nt2 = 0.3\nm = 2\n[run]\nseed = 9\nreplicates = 50000\nn_cap = 6\n"
      "ed_coefficient = unit\nregion_order = 24\n");
  EXPECT_EQ(c.prior.shape, 2.0);
  EXPECT_EQ(c.prior.accel_upper, 12.0);
  EXPECT_EQ(c.cost.accel_cost, 0.0);
  EXPECT_EQ(c.cost.reject_cost, 40.0);
  EXPECT_EQ(c.cost.item_cost, 0.5);
  ASSERT_TRUE(c.plan);
  EXPECT_EQ(c.plan->accel_threshold, 2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.replicates, 50000);
  EXPECT_EQ(*c.n_cap, 6);
  EXPECT_EQ(c.optimizer.risk.ed_coefficient, EdCoefficient::kUnit);
  EXPECT_EQ(c.optimizer.risk.region_order, 24);
}

TEST(Config, RejectsUnknownAndPartial) {
  EXPECT_THROW(parse("[prior]\ngamma = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse("[priors]\nalpha = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse("[plan]\nn = 3\nt1 = 0.1\n"), std::invalid_argument);
  EXPECT_THROW(parse("[prior]\nalpha = abc\n"), std::invalid_argument);
  EXPECT_THROW(parse("[plan]\nn = 2.5\nt1 = 0.1\nt2 = 0.2\nm = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse("[prior]\nl = 0.5\n"), std::invalid_argument);
}

TEST(Sweep, CartesianIds) {
  const RunConfig c = parse("[sweep]\nCt = 5, 10\nCa = 0, 0.1, 0.2\n");
  const auto s = expand_sweep(c);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s[0].id, "Ct=5|Ca=0");
  EXPECT_EQ(s[1].id, "Ct=5|Ca=0.1");
  EXPECT_EQ(s[5].config.cost.time_cost, 10.0);
  EXPECT_EQ(s[5].config.cost.accel_cost, 0.2);
  const auto base = expand_sweep(parse(""));
  ASSERT_EQ(base.size(), 1u);
  EXPECT_EQ(base[0].id, "base");
}

TEST(Datasets, RoundTripAndValidation) {
  std::istringstream in("n=3 t1=0.1 t2=0.3 m=2\n0.05\n0.2\nn=2 t1=0.1 t2=0.3 m=0\n");
  const auto sets = parse_datasets(in);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].failure_times.size(), 2u);
  EXPECT_TRUE(sets[1].failure_times.empty());
  std::ostringstream out;
  write_dataset(out, sets[0]);
  std::istringstream back(out.str());
  const auto again = parse_datasets(back);
  EXPECT_EQ(again[0].failure_times, sets[0].failure_times);
  std::istringstream late("n=2 t1=0.1 t2=0.3 m=1\n0.4\n");
  EXPECT_THROW(parse_datasets(late), std::invalid_argument);
  std::istringstream many("n=1 t1=0.1 t2=0.3 m=1\n0.1\n0.2\n");
  EXPECT_THROW(parse_datasets(many), std::invalid_argument);
}

TEST(Csv, HeaderOrder) {
  EXPECT_EQ(csv_columns().size(), 32u);
  EXPECT_EQ(csv_header().substr(0, 40), "scenario_id,alpha,beta,l,Cs,vs,Ca,Ct,Cr,");
  EXPECT_EQ(csv_columns().back(), "RRS2_pct");
  EXPECT_EQ(format_number(0.1234567), "0.123457");
}

TEST(Csv, DeviationFlags) {
  std::istringstream a(csv_header() + "\nx,3,1,10,0.5,0.2,0.1,5,30,2,3,2,3,0.169,0.238,2,0.22,2.013,27.704\n");
  std::istringstream b(csv_header() + "\ny,3,1,10,0.5,0.2,0.1,5,30,2,3,2,3,0.17,0.238,2,0.22,2.013,28.5\n");
  const auto d = flag_deviations(read_csv(a), read_csv(b), 0.01);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].column, "R_B");
}

TEST(Cli, DecideWritesOneRowPerDataset) {
  RunFlags f;
  f.config_path = std::string(BSPAA_SOURCE_DIR) + "/configs/voltage_example.ini";
  std::ostringstream out, err;
  ASSERT_EQ(run("decide", f, out, err), 0) << err.str();
  std::istringstream in(out.str());
  const auto rows = read_csv(in);
  ASSERT_EQ(rows.size(), 7u);
  const char* expected[] = {"reject", "reject", "accept", "reject", "reject", "accept", "accept"};
  for (int i = 0; i < 7; ++i) EXPECT_EQ(rows[i].at("decision"), expected[i]);
  EXPECT_EQ(run("nonsense", f, out, err), 2);
}
