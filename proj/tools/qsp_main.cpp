// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run scenarios, parameter sweeps, bound audits, and
// emit plot-ready data. Exit codes: 0 success with all hard checks passing,
// 1 when a hard check fails or the run cannot complete, 2 on usage or
// scenario errors.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsp/analysis.hpp"
#include "qsp/executor.hpp"
#include "qsp/scenario.hpp"

namespace {

using nlohmann::ordered_json;

ordered_json parse_scalar(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (...) {
  }
  // reciprocals like 1/8 stay strings; the scenario schema parses them
  if (v.find('/') != std::string::npos) return v;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (...) {
  }
  return v;
}

// Applies one dotted-path assignment to the scenario document. "params."
// aliases "overrides." so accuracy knobs read naturally on the command line.
void apply_set(ordered_json& doc, const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (parts.empty() || parts.front().empty()) {
    throw qsp::ScenarioError("--set needs a non-empty dotted key, got '" + key + "'");
  }
  if (parts.front() == "params") parts.front() = "overrides";
  ordered_json* cursor = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    cursor = &(*cursor)[parts[i]];
    if (!cursor->is_object() && !cursor->is_null()) {
      throw qsp::ScenarioError("--set path '" + key + "' walks through a non-object");
    }
  }
  (*cursor)[parts.back()] = parse_scalar(value);
}

struct SetArg {
  std::string key;
  std::vector<std::string> values;  // comma-separated grid values
};

SetArg parse_set(const std::string& arg) {
  const std::size_t eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw qsp::ScenarioError("--set expects key=value, got '" + arg + "'");
  }
  SetArg out;
  out.key = arg.substr(0, eq);
  std::size_t start = eq + 1;
  while (true) {
    const std::size_t comma = arg.find(',', start);
    out.values.push_back(arg.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) return {std::stoull(spec)};
  const std::uint64_t lo = std::stoull(spec.substr(0, colon));
  const std::uint64_t hi = std::stoull(spec.substr(colon + 1));
  if (hi < lo) throw qsp::ScenarioError("--seeds range must be low:high");
  if (hi - lo > 1000000) throw qsp::ScenarioError("--seeds range is unreasonably large");
  std::vector<std::uint64_t> seeds;
  seeds.reserve(hi - lo + 1);
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qsp::ScenarioError("cannot open scenario file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw qsp::ScenarioError("cannot write output file " + out_path);
  out << text;
}

std::string rows_csv(const std::vector<qsp::AuditRow>& rows) {
  std::string out = "name,bound,lhs,rhs,margin,pass,hard,applicable,note\n";
  for (const qsp::AuditRow& r : rows) {
    char buf[64];
    std::string line = r.name + ",\"" + r.bound + "\",";
    std::snprintf(buf, sizeof(buf), "%.17g", r.lhs);
    line += std::string(buf) + ",";
    std::snprintf(buf, sizeof(buf), "%.17g", r.rhs);
    line += std::string(buf) + ",";
    std::snprintf(buf, sizeof(buf), "%.17g", r.margin);
    line += std::string(buf) + ",";
    line += std::string(r.pass ? "1" : "0") + "," + (r.hard ? "1" : "0") + "," +
            (r.applicable ? "1" : "0") + ",\"" + r.note + "\"\n";
    out += line;
  }
  return out;
}

struct CommonOpts {
  std::vector<std::string> scenarios;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "structured";
  std::vector<std::string> sets;
  std::string seeds_range;
  int max_retries = 16;
  std::string counting_mode;
  bool strict_phases = false;
  int grid = 10000;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_scenario) {
  auto* sc = cmd->add_option("--scenario", o.scenarios, "scenario file (.scn)");
  if (needs_scenario) sc->required();
  cmd->add_option("--seed", o.seed, "root seed (default: scenario seed, else random)");
  cmd->add_option("--out", o.out_path, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "structured | csv")
      ->check(CLI::IsMember({"structured", "csv"}));
  cmd->add_option("--set", o.sets,
                  "override scenario fields, dotted path (params.epsilon=1/8); "
                  "comma-separated values form a sweep grid");
  cmd->add_option("--max-retries", o.max_retries, "extra post-selection attempts")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--counting-mode", o.counting_mode, "exact | sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  cmd->add_flag("--strict-phases", o.strict_phases,
                "apply each conditional phase shift separately");
}

qsp::TargetSpec load_with_sets(const std::string& path, const std::vector<std::string>& sets,
                               bool allow_grid_commas = false) {
  ordered_json doc = ordered_json::parse(slurp(path));
  for (const std::string& s : sets) {
    const SetArg a = parse_set(s);
    if (a.values.size() != 1 && !allow_grid_commas) {
      throw qsp::ScenarioError("--set grids (comma values) are only valid for sweep");
    }
    apply_set(doc, a.key, a.values.front());
  }
  return qsp::load_scenario_text(doc.dump(), path);
}

qsp::RunOptions make_options(const CommonOpts& o) {
  qsp::RunOptions opt;
  opt.max_retries = o.max_retries;
  opt.strict_phases = o.strict_phases;
  if (!o.counting_mode.empty()) {
    opt.counting_mode = o.counting_mode == "exact" ? qsp::CountingMode::Exact
                                                   : qsp::CountingMode::Sampled;
  }
  return opt;
}

std::uint64_t pick_seed(const CommonOpts& o, const qsp::TargetSpec& spec,
                        const std::string& path) {
  if (o.seed) return *o.seed;
  const ordered_json doc = ordered_json::parse(slurp(path));
  if (doc.contains("seed")) return spec.seed;
  std::random_device rd;  // recorded in the report, so the run stays reproducible
  return (std::uint64_t(rd()) << 32) ^ rd();
}

int cmd_run(const CommonOpts& o, bool audit_only, bool profile_only) {
  const std::string& path = o.scenarios.front();
  const qsp::TargetSpec spec = load_with_sets(path, o.sets);
  qsp::RunOptions opt = make_options(o);
  opt.seed = pick_seed(o, spec, path);

  const qsp::RunReport rep = qsp::run_full(spec, opt);
  const qsp::BoundAudit audit = qsp::audit_run(rep, spec);
  const std::vector<qsp::AuditRow> resources = qsp::resource_table(rep);
  std::size_t resource_failures = 0;
  for (const qsp::AuditRow& r : resources) {
    if (r.hard && r.applicable && !r.pass) ++resource_failures;
  }

  if (profile_only) {
    if (!rep.prepared) {
      std::cerr << "profile: preparation failed after " << rep.attempts
                << " attempt(s); no state to profile\n";
      return 1;
    }
    const qsp::OracleBank bank(spec, rep.params.epsilon);
    emit(o.out_path,
         qsp::profile_csv(qsp::sorted_profile(rep.stage1_state, spec, bank,
                                              rep.schedule.f)));
  } else if (audit_only) {
    std::vector<qsp::AuditRow> rows = audit.rows;
    rows.insert(rows.end(), resources.begin(), resources.end());
    const std::vector<qsp::AuditRow> trig = qsp::verify_trig_inequalities(o.grid);
    rows.insert(rows.end(), trig.begin(), trig.end());
    emit(o.out_path, o.format == "csv" ? rows_csv(rows)
                                       : qsp::rows_to_json(rows).dump(2) + "\n");
  } else if (o.format == "csv") {
    std::vector<qsp::AuditRow> rows = audit.rows;
    rows.insert(rows.end(), resources.begin(), resources.end());
    emit(o.out_path, rows_csv(rows));
  } else {
    emit(o.out_path, qsp::render_report(rep, audit, resources));
  }

  if (!rep.prepared) {
    std::cerr << "run: preparation failed after " << rep.attempts << " attempt(s)\n";
    return 1;
  }
  if (!audit.hard_ok() || resource_failures > 0) {
    std::cerr << "run: " << (audit.hard_failures() + resource_failures)
              << " hard check(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  // expand the --set grid into labelled points
  std::vector<SetArg> args;
  args.reserve(o.sets.size());
  for (const std::string& s : o.sets) args.push_back(parse_set(s));
  std::vector<std::vector<std::pair<std::string, std::string>>> combos{{}};
  for (const SetArg& a : args) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& combo : combos) {
      for (const std::string& v : a.values) {
        auto c = combo;
        c.emplace_back(a.key, v);
        next.push_back(std::move(c));
      }
    }
    combos = std::move(next);
  }

  std::vector<qsp::SweepPoint> points;
  for (const std::string& path : o.scenarios) {
    const std::string text = slurp(path);
    for (const auto& combo : combos) {
      ordered_json doc = ordered_json::parse(text);
      std::string label;
      for (const auto& [k, v] : combo) {
        apply_set(doc, k, v);
        label += (label.empty() ? "" : ";") + k + "=" + v;
      }
      points.push_back({qsp::load_scenario_text(doc.dump(), path), label});
    }
  }

  std::vector<std::uint64_t> seeds;
  if (!o.seeds_range.empty()) {
    seeds = parse_seeds(o.seeds_range);
  } else {
    seeds = {o.seed ? *o.seed : 0};
  }

  const std::vector<qsp::SweepRow> rows = qsp::sweep(points, seeds, make_options(o));
  emit(o.out_path, qsp::sweep_csv(rows));
  return 0;
}

int cmd_trigcheck(const CommonOpts& o) {
  const std::vector<qsp::AuditRow> rows = qsp::verify_trig_inequalities(o.grid);
  emit(o.out_path, o.format == "csv" ? rows_csv(rows)
                                     : qsp::rows_to_json(rows).dump(2) + "\n");
  for (const qsp::AuditRow& r : rows) {
    if (!r.pass) {
      std::cerr << "trigcheck: " << r.name << " violated\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"staged amplitude-amplification state preparation toolkit"};
  app.require_subcommand(1);

  CommonOpts run_o, sweep_o, audit_o, profile_o, trig_o;
  CLI::App* run = app.add_subcommand("run", "run one scenario and report everything");
  add_common(run, run_o, true);
  CLI::App* sweep = app.add_subcommand("sweep", "run a scenario/seed/override grid");
  add_common(sweep, sweep_o, true);
  sweep->add_option("--seeds", sweep_o.seeds_range, "seed range low:high (or one seed)");
  CLI::App* audit = app.add_subcommand("audit", "run one scenario, print all bound checks");
  add_common(audit, audit_o, true);
  audit->add_option("--grid", audit_o.grid, "trig verification grid size");
  CLI::App* profile = app.add_subcommand("profile", "emit the sorted amplitude profile");
  add_common(profile, profile_o, true);
  CLI::App* trig = app.add_subcommand("trigcheck", "verify the arcsine/arccosine caps");
  trig->add_option("--grid", trig_o.grid, "grid size (>= 100)");
  trig->add_option("--out", trig_o.out_path, "output file (default: stdout)");
  trig->add_option("--format", trig_o.format, "structured | csv")
      ->check(CLI::IsMember({"structured", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_o, false, false);
    if (sweep->parsed()) return cmd_sweep(sweep_o);
    if (audit->parsed()) return cmd_run(audit_o, true, false);
    if (profile->parsed()) return cmd_run(profile_o, false, true);
    if (trig->parsed()) return cmd_trigcheck(trig_o);
  } catch (const qsp::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qsp::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
