#include "taskspace/cli.hpp"

#include "taskspace/depth_first.hpp"
#include "taskspace/error.hpp"
#include "taskspace/light_first.hpp"
#include "taskspace/online_bounds.hpp"
#include "taskspace/optimal.hpp"
#include "taskspace/report.hpp"
#include "taskspace/simulator.hpp"
#include "taskspace/spectral.hpp"
#include "taskspace/validate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace taskspace {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string file;
  std::string format = "text";
  std::string out;
  double tol = kDefaultTol;
  bool compact = false;
};

struct Loaded {
  TaskSystem system;
  std::vector<std::string> notes;
};

Loaded load(const Common& c) {
  std::ifstream in(c.file);
  if (!in) throw UsageError("cannot open " + c.file);
  std::stringstream buf;
  buf << in.rdbuf();
  TaskSystem ts = [&] {
    try {
      return parse_task_system(buf.str());
    } catch (const ParseError& e) {
      throw Error(ErrorKind::Parse, c.file + ": " + e.what());
    }
  }();
  if (!c.compact) return {std::move(ts), {}};
  auto cp = compact(ts);
  std::vector<std::string> notes;
  if (!cp.removed.empty()) {
    std::string names;
    for (TypeId t : cp.removed) names += (names.empty() ? "" : " ") + ts.name(t);
    notes.push_back("compaction removed types: " + names);
  }
  return {std::move(cp.system), std::move(notes)};
}

Report base_report(const std::string& command, const TaskSystem& ts, const Common& c) {
  Report r;
  r.command = command;
  r.system.types = ts.size();
  r.system.rules = ts.rule_count();
  r.system.init = ts.name(ts.init());
  r.system.names.assign(ts.names().begin(), ts.names().end());
  r.provenance.emplace_back("version", kVersion);
  r.provenance.emplace_back("tol", format_number(c.tol));
  return r;
}

void row(Report& r, std::optional<std::int64_t> k, std::string quantity, std::string type, double value,
         std::optional<double> se = std::nullopt) {
  r.rows.push_back({k, std::move(quantity), std::move(type), value, se});
}

std::int64_t as_k(std::size_t k) { return static_cast<std::int64_t>(k); }

void per_type(Report& r, const TaskSystem& ts, const std::string& quantity, const TypedVector& v,
              std::optional<std::int64_t> k = std::nullopt) {
  for (TypeId t = 0; t < ts.size(); ++t) row(r, k, quantity, ts.name(t), v(static_cast<Eigen::Index>(t)));
}

std::string type_list(const TaskSystem& ts, const std::vector<TypeId>& types) {
  std::string s;
  for (TypeId t : types) s += (s.empty() ? "" : " ") + ts.name(t);
  return s.empty() ? "(none)" : s;
}

LambdaOrder lambda_from(const TaskSystem& ts, const std::vector<std::size_t>& swaps) {
  LambdaOrder lambda(ts);
  for (std::size_t i : swaps) {
    try {
      lambda.swap(ts, i);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--swap: ") + e.what());
    }
  }
  return lambda;
}

void write(const Report& report, const Common& c, std::ostream& out) {
  const auto format = parse_format(c.format);
  const std::string text = emit(report, format.value_or(Format::Text));
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw UsageError("cannot write " + c.out);
  file << text;
}

void add_common(CLI::App* sub, Common& c, bool with_compact) {
  sub->add_option("system", c.file, "Task system file")->required();
  sub->add_option("--format", c.format, "Output format: csv, json or text")
      ->check(CLI::IsMember({"csv", "json", "text"}))
      ->capture_default_str();
  sub->add_option("--out", c.out, "Write the report to this file instead of stdout");
  sub->add_option("--tol", c.tol, "Numeric tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  if (with_compact) sub->add_flag("--compact", c.compact, "Remove non-compact types before the analysis");
}

void require_subcritical(const TaskSystem& ts, double tol) {
  if (!validate(ts, tol).completes_ae) throw Error(ErrorKind::InvalidSystem, "system does not complete with probability 1");
  if (classify(ts, tol).kind != Criticality::Subcritical)
    throw Error(ErrorKind::Critical, "the analysis requires a subcritical system; this one is critical");
}

// Each command returns the exit code; the report is written either way.
using Command = std::function<int(std::ostream&)>;

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Space analysis of stochastic task systems", "taskspace"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common c;
  Command command;

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check probabilities, reachability, termination and compactness");
  add_common(validate_cmd, c, false);
  validate_cmd->callback([&] {
    command = [&](std::ostream& os) {
      const auto ts = load(c).system;
      const auto v = validate(ts, c.tol);
      auto r = base_report("validate", ts, c);
      r.classification = v.ok() ? "valid" : "invalid";
      per_type(r, ts, "lfp", v.lfp);
      row(r, {}, "lfp_gap", ts.name(ts.init()), v.lfp_gap);
      row(r, {}, "prob_sum_error", ts.name(ts.init()), v.max_prob_sum_error);
      r.notes.push_back(std::string("completes with probability 1: ") + (v.completes_ae ? "yes" : "no"));
      r.notes.push_back("unreachable types: " + type_list(ts, v.unreachable_types));
      std::vector<TypeId> non_compact;
      for (TypeId t = 0; t < ts.size(); ++t)
        if (std::find(v.compact_types.begin(), v.compact_types.end(), t) == v.compact_types.end())
          non_compact.push_back(t);
      r.notes.push_back("non-compact types: " + type_list(ts, non_compact));
      write(r, c, os);
      return v.ok() ? kExitOk : kExitFailure;
    };
  });

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Critical or subcritical, with expected completion times");
  add_common(classify_cmd, c, false);
  classify_cmd->callback([&] {
    command = [&](std::ostream& os) {
      const auto ts = load(c).system;
      if (!validate(ts, c.tol).completes_ae)
        throw Error(ErrorKind::InvalidSystem, "system does not complete with probability 1");
      const auto cl = classify(ts, c.tol);
      auto r = base_report("classify", ts, c);
      r.classification = std::string(to_string(cl.kind));
      row(r, {}, "spectral_radius", ts.name(ts.init()), cl.spectral_radius_estimate);
      if (cl.expected_times) per_type(r, ts, "expected_time", *cl.expected_times);
      if (cl.kind == Criticality::Critical)
        r.notes.push_back("expected completion time is infinite; so is the expected space of every online scheduler");
      write(r, c, os);
      return kExitOk;
    };
  });

  // optimal-dist
  std::size_t kmax = 10;
  auto* dist_cmd = app.add_subcommand("optimal-dist", "Distribution of the optimal offline completion space");
  add_common(dist_cmd, c, false);
  dist_cmd->add_option("--kmax", kmax, "Largest k")->capture_default_str();
  dist_cmd->callback([&] {
    command = [&](std::ostream& os) {
      const auto ts = load(c).system;
      const auto cdf = optimal_space_cdf(ts, kmax);
      const auto tail = optimal_space_tail(ts, kmax);
      auto r = base_report("optimal-dist", ts, c);
      for (std::size_t k = 0; k <= kmax; ++k) per_type(r, ts, "cdf", cdf.row(k), as_k(k));
      for (std::size_t k = 1; k <= kmax; ++k) per_type(r, ts, "tail", tail.row(k), as_k(k));
      std::string degraded;
      for (std::size_t k = 0; k <= kmax; ++k)
        if (cdf.degraded[k]) degraded += (degraded.empty() ? "" : " ") + std::to_string(k);
      if (!degraded.empty()) r.notes.push_back("Kleene-degraded rows (lower bounds on the cdf): k = " + degraded);
      write(r, c, os);
      return kExitOk;
    };
  });

  // optimal-mean
  int bits = 30;
  auto* mean_cmd = app.add_subcommand("optimal-mean", "Expected optimal offline completion space");
  add_common(mean_cmd, c, false);
  mean_cmd->add_option("--bits", bits, "Requested precision in bits")->check(CLI::Range(1, 50))->capture_default_str();
  mean_cmd->callback([&] {
    command = [&](std::ostream& os) {
      const auto ts = load(c).system;
      if (!validate(ts, c.tol).completes_ae)
        throw Error(ErrorKind::InvalidSystem, "system does not complete with probability 1; the expectation is infinite");
      const auto e = optimal_space_expectation(ts, bits);
      auto r = base_report("optimal-mean", ts, c);
      const std::string x0 = ts.name(ts.init());
      row(r, {}, "mean", x0, e.value);
      row(r, {}, "terms", x0, static_cast<double>(e.terms));
      row(r, {}, "error_bound", x0, e.error_bound);
      r.provenance.emplace_back("bits", std::to_string(bits));
      if (e.degraded) r.notes.push_back("some Newton steps were replaced by Kleene steps");
      write(r, c, os);
      return kExitOk;
    };
  });

  // online-bounds
  double margin = kDefaultMargin;
  bool refine = false;
  auto* online_cmd = app.add_subcommand("online-bounds", "Tail bounds valid for every online scheduler");
  add_common(online_cmd, c, true);
  online_cmd->add_option("--kmax", kmax, "Largest k")->capture_default_str();
  online_cmd->add_option("--margin", margin, "Multiplier on the threshold for w (> 1)")->capture_default_str();
  online_cmd->add_flag("--refine", refine, "Try to replace v and w by a fixed point of f above 1");
  online_cmd->callback([&] {
    command = [&](std::ostream& os) {
      auto [ts, notes] = load(c);
      const auto cert = make_certificate(ts, margin, refine);
      auto r = base_report("online-bounds", ts, c);
      r.notes = std::move(notes);
      const std::string x0 = ts.name(ts.init());
      for (std::size_t k = 1; k <= kmax; ++k) {
        const auto b = online_tail_bounds(cert, ts.init(), k);
        row(r, as_k(k), "lower", x0, b.lower);
        row(r, as_k(k), "upper", x0, b.upper);
      }
      per_type(r, ts, "v", cert.v);
      per_type(r, ts, "w", cert.w);
      row(r, {}, "v_min", x0, cert.v_min);
      row(r, {}, "w_max", x0, cert.w_max);
      r.provenance.emplace_back("margin", format_number(margin));
      if (cert.refined) r.notes.push_back("v and w replaced by a fixed point of f");
      if (!cert.valid(kCertificateTol)) {
        r.notes.push_back("certificate check failed: f(v) <= v or f(w) >= w violated");
        write(r, c, os);
        return kExitFailure;
      }
      write(r, c, os);
      return kExitOk;
    };
  });

  // light-first
  std::optional<std::size_t> ell;
  bool estimate = false;
  auto* light_cmd = app.add_subcommand("light-first", "Tail bounds for the v-light-first scheduler");
  add_common(light_cmd, c, true);
  light_cmd->add_option("--kmax", kmax, "Largest k")->capture_default_str();
  auto* ell_opt = light_cmd->add_option("--ell", ell, "Bound on simultaneous non-accumulating tasks");
  light_cmd->add_flag("--estimate-ell", estimate, "Estimate ell by a bounded state search")->excludes(ell_opt);
  light_cmd->add_option("--margin", margin, "Multiplier on the threshold for w (> 1)")->capture_default_str();
  light_cmd->add_flag("--refine", refine, "Use a fixed point of f above 1 as v when one is found");
  light_cmd->callback([&] {
    command = [&](std::ostream& os) {
      auto [ts, notes] = load(c);
      const auto cert = make_certificate(ts, margin, refine);
      auto r = base_report("light-first", ts, c);
      r.notes = std::move(notes);
      std::optional<std::size_t> use_ell = ell;
      if (estimate) {
        const auto e = estimate_ell(ts, cert.v);
        use_ell = e.ell;
        r.notes.push_back("ell estimated by a saturated state search (accumulating counts capped at " +
                          std::to_string(kDefaultAccCap) + "); not proven sound");
        if (!e.complete) r.notes.push_back("state cap reached; ell is a partial maximum");
      }
      const auto an = analyze_light_first(ts, cert.v, use_ell);
      const std::string x0 = ts.name(ts.init());
      per_type(r, ts, "v", cert.v);
      for (TypeId t : an.accumulating) row(r, {}, "accumulating", ts.name(t), 1.0);
      row(r, {}, "v_min", x0, an.v_min);
      row(r, {}, "v_minmax", x0, an.v_minmax);
      row(r, {}, "v_minacc", x0, an.v_minacc);
      if (use_ell) row(r, {}, "ell", x0, static_cast<double>(*use_ell));
      for (std::size_t k = 1; k <= kmax; ++k) {
        const auto b = light_first_bounds(ts, cert.v, an, k);
        row(r, as_k(k), "basic", x0, b.basic);
        if (b.refined) row(r, as_k(k), "refined", x0, *b.refined);
        row(r, as_k(k), "online_upper", x0, online_tail_bounds(cert, ts.init(), k).upper);
      }
      if (use_ell) r.notes.push_back("refined bound is conditional on ell = " + std::to_string(*use_ell));
      if (cert.refined) r.notes.push_back("v is a fixed point of f");
      write(r, c, os);
      return kExitOk;
    };
  });

  // depth-first
  std::vector<std::size_t> swaps;
  bool want_mean = false;
  auto* df_cmd = app.add_subcommand("depth-first", "Distribution, decay rate and mean for a depth-first scheduler");
  add_common(df_cmd, c, true);
  df_cmd->add_option("--kmax", kmax, "Largest k")->capture_default_str();
  df_cmd->add_option("--swap", swaps, "Rule indices whose children run in the opposite order")->delimiter(',');
  df_cmd->add_flag("--mean", want_mean, "Also compute the expected space");
  df_cmd->add_option("--bits", bits, "Requested precision in bits")->check(CLI::Range(1, 50))->capture_default_str();
  df_cmd->callback([&] {
    command = [&](std::ostream& os) {
      auto [ts, notes] = load(c);
      require_subcritical(ts, c.tol);
      const auto lambda = lambda_from(ts, swaps);
      const auto table = df_tail_table(ts, lambda, kmax);
      const auto decay = df_decay_rate(ts, lambda);
      auto r = base_report("depth-first", ts, c);
      r.notes = std::move(notes);
      const std::string x0 = ts.name(ts.init());
      for (std::size_t k = 1; k <= kmax; ++k) per_type(r, ts, "tail", table.row(k), as_k(k));
      row(r, {}, "rho", x0, decay.rho);
      if (want_mean) {
        const auto e = df_expectation(ts, lambda, bits);
        row(r, {}, "mean", x0, e.value);
        row(r, {}, "terms", x0, static_cast<double>(e.terms));
        row(r, {}, "error_bound", x0, e.error_bound);
        r.provenance.emplace_back("bits", std::to_string(bits));
        if (e.degraded) r.notes.push_back("requested precision below double resolution; reported error_bound is achieved");
      }
      write(r, c, os);
      return kExitOk;
    };
  });

  // simulate
  std::string policy_name = "optimal";
  SimulationOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the completion space tail");
  add_common(sim_cmd, c, true);
  sim_cmd->add_option("--policy", policy_name, "fifo, random, stack, light-first or optimal")
      ->check(CLI::IsMember({"fifo", "random", "stack", "light-first", "optimal"}))
      ->capture_default_str();
  sim_cmd->add_option("--samples", sim.samples, "Number of samples")->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--kmax", sim.kmax, "Largest k")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--node-cap", sim.node_cap, "Censor samples with more nodes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0: all)")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--swap", swaps, "Stack policy: rule indices whose children run in the opposite order")->delimiter(',');
  sim_cmd->add_option("--margin", margin, "Light-first policy: multiplier on the threshold for w")
      ->capture_default_str();
  sim_cmd->add_flag("--refine", refine, "Light-first policy: use a fixed point of f above 1 as v");
  sim_cmd->callback([&] {
    command = [&](std::ostream& os) {
      auto [ts, notes] = load(c);
      Scheduler scheduler = OptimalScheduler{};
      if (policy_name == "fifo") scheduler = Policy::fifo();
      if (policy_name == "random") scheduler = Policy::random();
      if (policy_name == "stack") scheduler = Policy::stack(lambda_from(ts, swaps));
      if (policy_name == "light-first") scheduler = Policy::light_first(make_certificate(ts, margin, refine).v);
      const auto est = estimate_tail(ts, scheduler, sim);
      auto r = base_report("simulate", ts, c);
      r.notes = std::move(notes);
      const std::string x0 = ts.name(ts.init());
      for (std::size_t k = 1; k <= sim.kmax; ++k)
        row(r, as_k(k), "tail", x0, est.tail[k - 1], est.standard_error[k - 1]);
      row(r, {}, "mean_peak", x0, est.mean_peak, est.mean_peak_stderr);
      row(r, {}, "mean_nodes", x0, est.mean_nodes, est.mean_nodes_stderr);
      row(r, {}, "max_peak", x0, static_cast<double>(est.max_peak));
      for (TypeId t = 0; t < est.max_type_peaks.size(); ++t)
        row(r, {}, "max_type_count", ts.name(t), static_cast<double>(est.max_type_peaks[t]));
      row(r, {}, "samples", x0, static_cast<double>(est.samples));
      row(r, {}, "censored", x0, static_cast<double>(est.censored));
      r.provenance.emplace_back("policy", policy_name);
      r.provenance.emplace_back("seed", std::to_string(sim.seed));
      r.provenance.emplace_back("samples", std::to_string(sim.samples));
      r.provenance.emplace_back("node_cap", std::to_string(sim.node_cap));
      if (est.censored > 0)
        r.notes.push_back(std::to_string(est.censored) +
                          " samples exceeded the node cap and are excluded from the estimates");
      write(r, c, os);
      return kExitOk;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (!command) return kExitUsage;

  try {
    return command(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InitNotCompactError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace taskspace
