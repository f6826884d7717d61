#include "bspaa/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <cmath>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bspaa {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': '" + t + "' is not a number");
  }
  if (used != t.size()) throw std::invalid_argument("key '" + key + "': '" + t + "' is not a number");
  return v;
}

long long parse_integer(const std::string& text, const std::string& key) {
  const double v = parse_real(text, key);
  if (v != std::floor(v)) throw std::invalid_argument("key '" + key + "': expected an integer");
  return static_cast<long long>(v);
}

using Setter = std::function<void(RunConfig&, double)>;

const std::map<std::string, Setter>& override_setters() {
  static const std::map<std::string, Setter> setters = {
      {"alpha", [](RunConfig& c, double v) { c.prior.shape = v; }},
      {"beta", [](RunConfig& c, double v) { c.prior.rate = v; }},
      {"l", [](RunConfig& c, double v) { c.prior.accel_upper = v; }},
      {"Cs", [](RunConfig& c, double v) { c.cost.item_cost = v; }},
      {"vs", [](RunConfig& c, double v) { c.cost.salvage = v; }},
      {"Ca", [](RunConfig& c, double v) { c.cost.accel_cost = v; }},
      {"Ct", [](RunConfig& c, double v) { c.cost.time_cost = v; }},
      {"Cr", [](RunConfig& c, double v) { c.cost.reject_cost = v; }},
      {"a0", [](RunConfig& c, double v) { c.cost.loss0 = v; }},
      {"a1", [](RunConfig& c, double v) { c.cost.loss1 = v; }},
      {"a2", [](RunConfig& c, double v) { c.cost.loss2 = v; }},
  };
  return setters;
}

const std::set<std::string> kPriorKeys = {"alpha", "beta", "l"};
const std::set<std::string> kCostKeys = {"Cs", "vs", "Ca", "Ct", "Cr", "a0", "a1", "a2"};

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void RunConfig::validate() const {
  prior.validate();
  cost.validate();
  if (plan) plan->validate();
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (n_cap && *n_cap < 0) throw std::invalid_argument("n_cap must be >= 0");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (simulate_count < 1) throw std::invalid_argument("simulate_count must be >= 1");
  if (simulate_params) simulate_params->validate();
  for (const SweepAxis& axis : sweep) {
    if (axis.values.empty()) throw std::invalid_argument("sweep key '" + axis.key + "' has no values");
  }
}

void apply_override(RunConfig& config, const std::string& key, double value) {
  const auto& setters = override_setters();
  const auto it = setters.find(key);
  if (it == setters.end()) throw std::invalid_argument("unknown override key '" + key + "'");
  it->second(config, value);
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  // The ini reader only knows ';' comments; drop '#' comments first.
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    cleaned << line << '\n';
  }
  pt::ptree tree;
  std::istringstream text(cleaned.str());
  try {
    pt::read_ini(text, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  RunConfig c;
  std::optional<long long> plan_n;
  std::optional<long long> plan_m;
  std::optional<double> plan_t1;
  std::optional<double> plan_t2;
  std::optional<double> hazard;
  std::optional<double> accel;
  const auto resolve = [&](const std::string& p) {
    if (p.empty() || std::filesystem::path(p).is_absolute() || base_dir.empty()) return p;
    return (std::filesystem::path(base_dir) / p).string();
  };

  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw std::invalid_argument("config: key '" + section + "' outside any section");
    for (const auto& [key, node] : body) {
      const std::string value = trim(node.data());
      const std::string where = section + "." + key;
      if (section == "prior") {
        if (!kPriorKeys.count(key)) throw std::invalid_argument("config: unknown key " + where);
        apply_override(c, key, parse_real(value, where));
      } else if (section == "cost") {
        if (!kCostKeys.count(key)) throw std::invalid_argument("config: unknown key " + where);
        apply_override(c, key, parse_real(value, where));
      } else if (section == "plan") {
        if (key == "n") {
          plan_n = parse_integer(value, where);
        } else if (key == "t1") {
          plan_t1 = parse_real(value, where);
        } else if (key == "t2") {
          plan_t2 = parse_real(value, where);
        } else if (key == "m") {
          plan_m = parse_integer(value, where);
        } else {
          throw std::invalid_argument("config: unknown key " + where);
        }
      } else if (section == "sweep") {
        if (!kPriorKeys.count(key) && !kCostKeys.count(key)) {
          throw std::invalid_argument("config: unknown sweep key " + where);
        }
        SweepAxis axis{key, {}};
        std::stringstream items(value);
        std::string item;
        while (std::getline(items, item, ',')) axis.values.push_back(parse_real(item, where));
        c.sweep.push_back(std::move(axis));
      } else if (section == "run") {
        if (key == "seed") {
          c.seed = static_cast<std::uint64_t>(parse_integer(value, where));
        } else if (key == "replicates") {
          c.replicates = parse_integer(value, where);
        } else if (key == "n_cap") {
          c.n_cap = static_cast<int>(parse_integer(value, where));
        } else if (key == "threads") {
          c.threads = static_cast<int>(parse_integer(value, where));
        } else if (key == "ed_coefficient") {
          if (value == "vs") {
            c.optimizer.risk.ed_coefficient = EdCoefficient::kSalvage;
          } else if (value == "unit") {
            c.optimizer.risk.ed_coefficient = EdCoefficient::kUnit;
          } else {
            throw std::invalid_argument("config: ed_coefficient must be 'vs' or 'unit'");
          }
        } else if (key == "dataset") {
          c.dataset = resolve(value);
        } else if (key == "reference") {
          c.reference = resolve(value);
        } else if (key == "region_order") {
          c.optimizer.risk.region_order = static_cast<int>(parse_integer(value, where));
        } else if (key == "phi_order") {
          c.optimizer.risk.phi_order = static_cast<int>(parse_integer(value, where));
        } else if (key == "patience") {
          c.optimizer.patience = static_cast<int>(parse_integer(value, where));
        } else if (key == "simulate_count") {
          c.simulate_count = static_cast<int>(parse_integer(value, where));
        } else if (key == "hazard") {
          hazard = parse_real(value, where);
        } else if (key == "accel_factor") {
          accel = parse_real(value, where);
        } else {
          throw std::invalid_argument("config: unknown key " + where);
        }
      } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
      }
    }
  }

  if (plan_n || plan_t1 || plan_t2 || plan_m) {
    if (!(plan_n && plan_t1 && plan_t2 && plan_m)) {
      throw std::invalid_argument("config: [plan] needs all of n, t1, t2, m");
    }
    c.plan = SamplingPlan{static_cast<int>(*plan_n), *plan_t1, *plan_t2, static_cast<int>(*plan_m)};
  }
  if (hazard || accel) {
    if (!(hazard && accel)) throw std::invalid_argument("config: hazard and accel_factor go together");
    c.simulate_params = ModelParams{*hazard, *accel};
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path().string());
}

std::vector<Scenario> expand_sweep(const RunConfig& config) {
  std::vector<Scenario> out;
  if (config.sweep.empty()) {
    out.push_back({"base", config});
    return out;
  }
  std::vector<std::size_t> idx(config.sweep.size(), 0);
  while (true) {
    Scenario s{"", config};
    s.config.sweep.clear();
    for (std::size_t a = 0; a < config.sweep.size(); ++a) {
      const SweepAxis& axis = config.sweep[a];
      const double v = axis.values[idx[a]];
      apply_override(s.config, axis.key, v);
      if (!s.id.empty()) s.id += '|';
      s.id += axis.key + "=" + format_value(v);
    }
    out.push_back(std::move(s));
    std::size_t a = config.sweep.size();
    while (a > 0) {
      --a;
      if (++idx[a] < config.sweep[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

std::vector<Dataset> parse_datasets(std::istream& in) {
  std::vector<Dataset> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "dataset line " + std::to_string(line_no);
    if (line.find('=') != std::string::npos) {
      std::map<std::string, std::string> fields;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(where + ": malformed header token '" + tok + "'");
        fields[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      if (fields.size() != 4 || !fields.count("n") || !fields.count("t1") || !fields.count("t2") ||
          !fields.count("m")) {
        throw std::invalid_argument(where + ": header must be 'n=<int> t1=<real> t2=<real> m=<int>'");
      }
      Dataset d;
      d.plan.sample_size = static_cast<int>(parse_integer(fields["n"], where));
      d.plan.switch_time = parse_real(fields["t1"], where);
      d.plan.censor_time = parse_real(fields["t2"], where);
      d.plan.accel_threshold = static_cast<int>(parse_integer(fields["m"], where));
      d.plan.validate();
      out.push_back(std::move(d));
      continue;
    }
    if (out.empty()) throw std::invalid_argument(where + ": failure time before any header");
    Dataset& d = out.back();
    const double z = parse_real(line, where);
    if (!(z > 0.0) || z > d.plan.censor_time) {
      throw std::invalid_argument(where + ": failure time outside (0, t2]");
    }
    d.failure_times.push_back(z);
    if (static_cast<int>(d.failure_times.size()) > d.plan.sample_size) {
      throw std::invalid_argument(where + ": more failure times than items on test");
    }
  }
  return out;
}

std::vector<Dataset> load_datasets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset file '" + path + "'");
  return parse_datasets(in);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  const auto old = out.precision(10);
  out << "n=" << dataset.plan.sample_size << " t1=" << dataset.plan.switch_time << " t2=" << dataset.plan.censor_time
      << " m=" << dataset.plan.accel_threshold << '\n';
  for (double z : dataset.failure_times) out << z << '\n';
  out.precision(old);
}

}  // namespace bspaa
