#include "bspaa/reports.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bspaa/decision.hpp"
#include "bspaa/errors.hpp"
#include "bspaa/mc_oracle.hpp"
#include "bspaa/rng.hpp"

namespace bspaa {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "scenario_id", "alpha",    "beta",       "l",        "Cs",     "vs",   "Ca",   "Ct",
      "Cr",          "a0",       "a1",         "a2",       "n_B",    "t1_B", "t2_B", "m_B",
      "E_tau_B",     "E_D_B",    "R_B",        "n_star",   "tau_star", "E_tau_star", "E_D_star", "R1",
      "n_A",         "t1_A",     "t2_A",       "E_tau_A",  "E_D_A",  "R2",   "RRS1_pct", "RRS2_pct"};
  return cols;
}

std::string csv_header() {
  std::string h;
  for (const std::string& c : csv_columns()) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_row(const std::string& scenario_id, const PriorSpec& prior, const CostModel& cost,
                    const OptimalPlan& bspaa, const ComparisonReport* report) {
  std::vector<std::string> f;
  f.push_back(scenario_id);
  for (double v : {prior.shape, prior.rate, prior.accel_upper, cost.item_cost, cost.salvage, cost.accel_cost,
                   cost.time_cost, cost.reject_cost, cost.loss0, cost.loss1, cost.loss2}) {
    f.push_back(format_number(v));
  }
  const SamplingPlan& b = bspaa.plan;
  f.push_back(std::to_string(b.sample_size));
  for (double v : {b.switch_time, b.censor_time}) f.push_back(format_number(v));
  f.push_back(std::to_string(b.accel_threshold));
  for (double v : {bspaa.evaluation.expected_duration, bspaa.evaluation.expected_failures,
                   bspaa.evaluation.bayes_risk}) {
    f.push_back(format_number(v));
  }
  if (report) {
    const OptimalPlan& s = report->cbsp;
    f.push_back(std::to_string(s.plan.sample_size));
    for (double v : {s.plan.censor_time, s.evaluation.expected_duration, s.evaluation.expected_failures,
                     s.evaluation.bayes_risk}) {
      f.push_back(format_number(v));
    }
    const OptimalPlan& a = report->cbspa;
    f.push_back(std::to_string(a.plan.sample_size));
    for (double v : {a.plan.switch_time, a.plan.censor_time, a.evaluation.expected_duration,
                     a.evaluation.expected_failures, a.evaluation.bayes_risk, report->rrs1, report->rrs2}) {
      f.push_back(format_number(v));
    }
  } else {
    f.resize(csv_columns().size());
  }
  std::string row;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) row += ',';
    row += f[i];
  }
  return row;
}

std::vector<CsvRecord> read_csv(std::istream& in) {
  std::vector<CsvRecord> rows;
  std::string line;
  std::vector<std::string> header;
  const auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      continue;
    }
    const std::vector<std::string> cells = split(line);
    if (cells.size() > header.size()) throw std::invalid_argument("csv row has more cells than the header");
    CsvRecord r;
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

const std::vector<std::string> kInputColumns = {"alpha", "beta", "l", "Cs", "vs", "Ca", "Ct", "Cr", "a0", "a1", "a2"};

std::optional<double> cell_value(const CsvRecord& r, const std::string& col) {
  const auto it = r.find(col);
  if (it == r.end() || it->second.empty()) return std::nullopt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Digits after the decimal point as printed.
int printed_decimals(const CsvRecord& r, const std::string& col) {
  const std::string& t = r.at(col);
  const auto dot = t.find('.');
  if (dot == std::string::npos) return 0;
  std::size_t end = dot + 1;
  while (end < t.size() && std::isdigit(static_cast<unsigned char>(t[end]))) ++end;
  return static_cast<int>(end - dot - 1);
}

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

bool same_inputs(const CsvRecord& a, const CsvRecord& b) {
  for (const std::string& c : kInputColumns) {
    const auto x = cell_value(a, c);
    const auto y = cell_value(b, c);
    if (!x || !y || std::abs(*x - *y) > 1e-9 * std::max(1.0, std::abs(*y))) return false;
  }
  return true;
}

}  // namespace

std::vector<Deviation> flag_deviations(const std::vector<CsvRecord>& computed,
                                       const std::vector<CsvRecord>& reference, double threshold) {
  std::vector<Deviation> out;
  for (const CsvRecord& row : computed) {
    for (const CsvRecord& ref : reference) {
      if (!same_inputs(row, ref)) continue;
      for (std::size_t i = 12; i < csv_columns().size(); ++i) {
        const std::string& col = csv_columns()[i];
        const auto r = cell_value(ref, col);
        const auto c = cell_value(row, col);
        if (!r || !c) continue;
        // Computed values are rounded to the reference's printed precision first.
        const double diff = std::abs(round_to(*c, printed_decimals(ref, col)) - *r);
        const double rel = *r != 0.0 ? diff / std::abs(*r) : (diff == 0.0 ? 0.0 : INFINITY);
        if (rel > threshold) out.push_back({row.at("scenario_id"), ref.at("scenario_id"), col, *c, *r, rel});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

const char* decision_name(Decision d) { return d == Decision::kAccept ? "accept" : "reject"; }

std::string plan_text(const SamplingPlan& p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << '(' << p.sample_size << ", " << p.switch_time << ", " << p.censor_time
     << ", " << p.accel_threshold << ')';
  return os.str();
}

void print_evaluation(std::ostream& out, const PlanEvaluation& e) {
  out << std::fixed << std::setprecision(6) << "  bayes_risk            " << e.bayes_risk << '\n'
      << "  expected_failures     " << e.expected_failures << '\n'
      << "  expected_duration     " << e.expected_duration << '\n'
      << "  expected_accelerated  " << e.expected_accelerated << '\n'
      << "  r1_term               " << e.r1_term << '\n';
  out << std::defaultfloat;
}

// Writes to `path` when set, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot write '" + path + "'");
    }
    os_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

const SamplingPlan& require_plan(const RunConfig& c) {
  if (!c.plan) throw std::invalid_argument("this subcommand needs a [plan] section");
  return *c.plan;
}

int cmd_optimize(const RunConfig& c, const RunFlags& flags, std::ostream& out) {
  const OptimalPlan best = optimize_plan(c.prior, c.cost, c.n_cap, c.optimizer);
  out << "optimal plan (n, t1, t2, m) = " << plan_text(best.plan) << '\n';
  print_evaluation(out, best.evaluation);
  out << "incumbents:\n";
  for (const TraceEntry& t : best.search_trace) out << "  " << plan_text(t.plan) << "  " << format_number(t.risk) << '\n';
  Sink sink(flags.out, out);
  *sink << csv_header() << '\n' << csv_row("base", c.prior, c.cost, best) << '\n';
  return 0;
}

int cmd_risk(const RunConfig& c, std::ostream& out) {
  const SamplingPlan& plan = require_plan(c);
  out << "plan " << plan_text(plan) << '\n';
  print_evaluation(out, bayes_risk(plan, c.prior, c.cost, c.optimizer.risk));
  return 0;
}

int cmd_decide(const RunConfig& c, const RunFlags& flags, std::ostream& out) {
  if (c.dataset.empty()) throw std::invalid_argument("decide needs [run] dataset = <path>");
  const std::vector<Dataset> sets = load_datasets(c.dataset);
  Sink sink(flags.out, out);
  std::ostream& o = *sink;
  o << "set,n,t1,t2,m,d1,d2,delta,w1,w2,phi_minus_Cr,decision\n";
  int idx = 0;
  for (const Dataset& d : sets) {
    ++idx;
    const TestOutcome outcome = make_outcome(d.plan, d.failure_times);
    const SufficientStats s = sufficient_stats(outcome, d.plan);
    const double margin = posterior_expected_loss(s, c.prior, c.cost) - c.cost.reject_cost;
    const Decision a = margin <= 0.0 ? Decision::kAccept : Decision::kReject;
    o << idx << ',' << d.plan.sample_size << ',' << format_number(d.plan.switch_time) << ','
      << format_number(d.plan.censor_time) << ',' << d.plan.accel_threshold << ',' << s.failures1 << ','
      << s.failures2 << ',' << (s.stress_raised ? 1 : 0) << ',' << format_number(s.exposure1) << ','
      << format_number(s.exposure2) << ',' << format_number(margin) << ',' << decision_name(a) << '\n';
  }
  return 0;
}

int cmd_simulate(const RunConfig& c, const RunFlags& flags, std::ostream& out) {
  const SamplingPlan& plan = require_plan(c);
  if (plan.sample_size < 1) throw std::invalid_argument("simulate needs n >= 1");
  Sink sink(flags.out, out);
  for (int i = 0; i < c.simulate_count; ++i) {
    Engine rng = make_engine(c.seed, static_cast<std::uint64_t>(i));
    const ModelParams theta = c.simulate_params ? *c.simulate_params : prior_sample_with(c.prior, rng);
    const TestOutcome o = simulate_test_with(plan, theta, rng);
    *sink << "# set " << (i + 1) << " lambda=" << format_number(theta.hazard)
          << " phi=" << format_number(theta.accel_factor) << '\n';
    write_dataset(*sink, Dataset{plan, o.failure_times});
  }
  return 0;
}

void print_comparison(std::ostream& out, const ComparisonReport& r) {
  out << "BSPAA (n, t1, t2, m) = " << plan_text(r.bspaa.plan) << "  R_B = " << format_number(r.bspaa.evaluation.bayes_risk)
      << "  E[tau] = " << format_number(r.bspaa.evaluation.expected_duration)
      << "  E[D] = " << format_number(r.bspaa.evaluation.expected_failures) << '\n';
  out << "CBSP  (n, tau) = (" << r.cbsp.plan.sample_size << ", " << format_number(r.cbsp.plan.censor_time)
      << ")  R1 = " << format_number(r.cbsp.evaluation.bayes_risk)
      << "  E[tau] = " << format_number(r.cbsp.evaluation.expected_duration)
      << "  E[D] = " << format_number(r.cbsp.evaluation.expected_failures) << '\n';
  out << "CBSPA (n, t1, t2) = (" << r.cbspa.plan.sample_size << ", " << format_number(r.cbspa.plan.switch_time) << ", "
      << format_number(r.cbspa.plan.censor_time) << ")  R2 = " << format_number(r.cbspa.evaluation.bayes_risk)
      << "  E[tau] = " << format_number(r.cbspa.evaluation.expected_duration)
      << "  E[D] = " << format_number(r.cbspa.evaluation.expected_failures) << '\n';
  out << "RRS1 = " << format_number(r.rrs1) << "%  RRS2 = " << format_number(r.rrs2) << "%\n";
}

int cmd_compare(const RunConfig& c, const RunFlags& flags, std::ostream& out) {
  const ComparisonReport r = compare_plans(c.prior, c.cost, c.n_cap, c.optimizer);
  print_comparison(out, r);
  Sink sink(flags.out, out);
  *sink << csv_header() << '\n' << csv_row("base", c.prior, c.cost, r.bspaa, &r) << '\n';
  return 0;
}

int cmd_sweep(const RunConfig& c, const RunFlags& flags, std::ostream& out, std::ostream& err) {
  const std::vector<Scenario> scenarios = expand_sweep(c);
  std::vector<std::string> rows(scenarios.size());
  std::vector<std::string> failures(scenarios.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenarios.size()) break;
      const RunConfig& sc = scenarios[i].config;
      try {
        const ComparisonReport r = compare_plans(sc.prior, sc.cost, sc.n_cap, sc.optimizer);
        rows[i] = csv_row(scenarios[i].id, sc.prior, sc.cost, r.bspaa, &r);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(c.threads, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int status = 0;
  {
    Sink sink(flags.out, out);
    *sink << csv_header() << '\n';
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      if (!failures[i].empty()) {
        err << "scenario " << scenarios[i].id << " failed: " << failures[i] << '\n';
        status = 3;
        continue;
      }
      *sink << rows[i] << '\n';
    }
  }
  if (!c.reference.empty()) {
    std::ifstream ref_in(c.reference);
    if (!ref_in) throw std::invalid_argument("cannot open reference table '" + c.reference + "'");
    const std::vector<CsvRecord> reference = read_csv(ref_in);
    std::stringstream computed_text;
    computed_text << csv_header() << '\n';
    for (const std::string& r : rows) {
      if (!r.empty()) computed_text << r << '\n';
    }
    const std::vector<CsvRecord> computed = read_csv(computed_text);
    const std::vector<Deviation> devs = flag_deviations(computed, reference);
    const std::string review_path = flags.out.empty() ? "sweep_review.txt" : flags.out + ".review.txt";
    std::ofstream review(review_path);
    review << "# cells deviating from the reference table by more than 1%\n";
    review << "scenario_id,reference_id,column,computed,reference,relative_pct\n";
    for (const Deviation& d : devs) {
      review << d.scenario_id << ',' << d.reference_id << ',' << d.column << ',' << format_number(d.computed) << ','
             << format_number(d.reference) << ',' << format_number(100.0 * d.relative) << '\n';
    }
    out << devs.size() << " cell(s) off the reference by more than 1%; see " << review_path << '\n';
  }
  return status;
}

int cmd_oracle(const RunConfig& c, const RunFlags& flags, std::ostream& out) {
  const SamplingPlan& plan = require_plan(c);
  const PlanEvaluation e = bayes_risk(plan, c.prior, c.cost, c.optimizer.risk);
  const McReport mc = mc_evaluate(plan, make_rule(RuleKind::kBayes, c.prior, c.cost), c.prior, c.cost, c.replicates,
                                  c.seed, c.threads);
  Sink sink(flags.out, out);
  std::ostream& o = *sink;
  o << "quantity,closed_form,mc_mean,mc_stderr,z\n";
  const auto line = [&](const char* name, double closed, const McEstimate& m) {
    const double z = m.std_error > 0.0 ? (closed - m.mean) / m.std_error : 0.0;
    o << name << ',' << format_number(closed) << ',' << format_number(m.mean) << ',' << format_number(m.std_error)
      << ',' << format_number(z) << '\n';
  };
  line("bayes_risk", e.bayes_risk, mc.risk);
  line("expected_failures", e.expected_failures, mc.components.failures);
  line("expected_duration", e.expected_duration, mc.components.duration);
  line("expected_accelerated", e.expected_accelerated, mc.components.accelerated);
  return 0;
}

}  // namespace

int run(const std::string& subcommand, const RunFlags& flags, std::ostream& out, std::ostream& err) {
  try {
    if (flags.config_path.empty()) throw std::invalid_argument("--config is required");
    RunConfig c = load_config(flags.config_path);
    if (flags.seed) c.seed = *flags.seed;
    if (flags.replicates) c.replicates = *flags.replicates;
    if (flags.n_cap) c.n_cap = *flags.n_cap;
    if (flags.threads) c.threads = *flags.threads;
    if (flags.ed_coefficient) c.optimizer.risk.ed_coefficient = *flags.ed_coefficient;
    c.validate();
    if (subcommand == "optimize") return cmd_optimize(c, flags, out);
    if (subcommand == "risk") return cmd_risk(c, out);
    if (subcommand == "decide") return cmd_decide(c, flags, out);
    if (subcommand == "simulate") return cmd_simulate(c, flags, out);
    if (subcommand == "compare") return cmd_compare(c, flags, out);
    if (subcommand == "sweep") return cmd_sweep(c, flags, out, err);
    if (subcommand == "oracle") return cmd_oracle(c, flags, out);
    err << "unknown subcommand '" << subcommand << "'\n";
    return 2;
  } catch (const CapabilityError& e) {
    err << "capability limit: " << e.what() << '\n';
    return 4;
  } catch (const ConvergenceError& e) {
    err << "non-convergence: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace bspaa
