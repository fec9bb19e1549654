// Command-line front end: compute, validate, axioms, sweep, and matrix
// workflows over a single instance. All report files are deterministic;
// human-readable summaries go to standard error.

#include <CLI11.hpp>

#include <respo/respo.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace respo;

struct Options {
  std::string instance_path;
  std::string graph_path;
  std::string impacts_path;
  std::string output_path;
  double gamma = 0.0;
  double epsilon = 1e-9;
  std::uint64_t q = 0;
  std::string method = "series";
  std::string qeps = "strict";
  std::string normalize_policy = "reject";
  double row_tolerance = 1e-6;
  double pair_tolerance = 0.0;
  double tolerance = 1e-8;
  std::string gammas;
};

bool flag_given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoFailure, "cannot read '" + path + "'");
  return buffer.str();
}

void write_output(const Options& o, const std::string& text) {
  if (o.output_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(o.output_path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open '" + o.output_path + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::IoFailure, "cannot write '" + o.output_path + "'");
}

ZeroRowPolicy policy_of(const Options& o) {
  return o.normalize_policy == "self-loop" ? ZeroRowPolicy::SelfLoop : ZeroRowPolicy::Reject;
}

struct LoadedInstance {
  RowStochasticMatrix matrix;
  ImpactVector impacts;
  std::optional<double> default_gamma;
};

LoadedInstance load_instance(const Options& o) {
  const bool has_instance = !o.instance_path.empty();
  const bool has_graph = !o.graph_path.empty();
  if (has_instance == has_graph) {
    fail(ErrorCode::UsageError, has_instance
                                    ? "--instance and --graph are mutually exclusive"
                                    : "one of --instance or --graph is required");
  }
  if (has_instance) {
    if (!o.impacts_path.empty()) {
      fail(ErrorCode::UsageError, "--impacts only applies to the --graph form");
    }
    const InstanceDocument doc = parse_instance_json(read_file(o.instance_path));
    return LoadedInstance{instance_matrix(doc, o.row_tolerance, policy_of(o)),
                          instance_impacts(doc), doc.gamma};
  }
  if (o.impacts_path.empty()) fail(ErrorCode::UsageError, "--graph requires --impacts");
  const RawWeightMatrix raw = parse_edges_csv(read_file(o.graph_path));
  ImpactVector impacts = parse_impacts_csv(read_file(o.impacts_path), raw.players());
  return LoadedInstance{normalize(raw, policy_of(o)), std::move(impacts), std::nullopt};
}

DiscountFactor resolve_gamma(const Options& o, const CLI::App* sub,
                             const std::optional<double>& fallback) {
  if (flag_given(sub, "--gamma")) return DiscountFactor(o.gamma);
  if (fallback) return DiscountFactor(*fallback);
  fail(ErrorCode::UsageError, "no discount factor: pass --gamma or store one in the instance");
}

std::uint64_t resolve_depth(const Options& o, const CLI::App* sub, DiscountFactor gamma,
                            const ImpactVector& iota) {
  if (flag_given(sub, "--q")) return o.q;
  const DepthMode mode = o.qeps == "paper" ? DepthMode::Paper : DepthMode::Strict;
  return min_truncation_depth(gamma, iota, o.epsilon, mode);
}

void print_summary(const ResponsibilityReport& report) {
  std::fprintf(stderr, "%-12s %14s %14s %14s\n", "player", "total", "direct", "indirect");
  for (std::size_t i = 0; i < report.players.size(); ++i) {
    std::fprintf(stderr, "%-12s %14.6f %14.6f %14.6f\n", report.players.id(i).c_str(),
                 report.total[i], report.direct[i], report.indirect[i]);
  }
  std::fprintf(stderr, "gamma = %.6f, method = %s", report.gamma,
               std::string(to_string(report.method)).c_str());
  if (report.q_used) {
    std::fprintf(stderr, ", q = %llu", static_cast<unsigned long long>(*report.q_used));
  }
  if (report.certified_error) {
    std::fprintf(stderr, ", certified error <= %.3g", *report.certified_error);
  }
  std::fputc('\n', stderr);
}

int cmd_compute(const Options& o, const CLI::App* sub) {
  const LoadedInstance inst = load_instance(o);
  const DiscountFactor gamma = resolve_gamma(o, sub, inst.default_gamma);
  const ResponsibilityReport report =
      o.method == "exact"
          ? exact_value(inst.matrix, inst.impacts, gamma)
          : truncated_value(inst.matrix, inst.impacts, gamma,
                            resolve_depth(o, sub, gamma, inst.impacts));
  write_output(o, write_report_json(report));
  print_summary(report);
  return 0;
}

int cmd_validate(const Options& o) {
  // load_instance already throws (exit 2) on any structural violation; what
  // remains is the diagnostic report for a valid instance.
  const LoadedInstance inst = load_instance(o);
  std::string out;
  out += "players: " + std::to_string(inst.matrix.n()) + "\n";
  for (std::size_t i = 0; i < inst.matrix.n(); ++i) {
    out += "row " + inst.matrix.players().id(i) +
           ": sum = " + format_real(compensated_sum(inst.matrix.row(i))) + "\n";
  }
  const auto independents = independent_players(inst.matrix);
  out += "independent players:";
  if (independents.empty()) out += " (none)";
  for (const auto& id : independents) out += " " + id;
  out += "\n";
  const auto pairs = symmetric_pairs(inst.matrix, o.pair_tolerance);
  out += "symmetric pairs:";
  if (pairs.empty()) out += " (none)";
  for (const auto& [a, b] : pairs) out += " {" + a + "," + b + "}";
  out += "\n";
  out += "matrix: valid\n";
  write_output(o, out);
  return 0;
}

int cmd_axioms(const Options& o, const CLI::App* sub) {
  const LoadedInstance inst = load_instance(o);
  const DiscountFactor gamma = resolve_gamma(o, sub, inst.default_gamma);
  const std::uint64_t q = resolve_depth(o, sub, gamma, inst.impacts);

  // Additivity needs two impact maps; split the instance's own by player
  // parity so the parts recombine to the original values exactly.
  const std::size_t n = inst.impacts.size();
  std::vector<double> even(n, 0.0);
  std::vector<double> odd(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    (i % 2 == 0 ? even[i] : odd[i]) = inst.impacts.value(i);
  }

  std::vector<AxiomVerdict> verdicts;
  verdicts.push_back(check_efficiency(inst.matrix, inst.impacts, gamma, o.tolerance));
  verdicts.push_back(check_additivity(inst.matrix, ImpactVector(inst.matrix.players(), even),
                                      ImpactVector(inst.matrix.players(), odd), gamma,
                                      o.tolerance));
  verdicts.push_back(check_symmetry(inst.matrix, inst.impacts, gamma, o.tolerance));
  verdicts.push_back(check_independent(inst.matrix, inst.impacts, gamma, o.tolerance));
  verdicts.push_back(check_truncated_mass(inst.matrix, inst.impacts, gamma, q, o.tolerance));
  verdicts.push_back(check_bounds(inst.matrix, inst.impacts, gamma, o.tolerance));

  std::string out;
  bool all_pass = true;
  for (const auto& v : verdicts) {
    out += std::string(to_string(v.axiom)) + ": " + std::string(to_string(v.status)) +
           " (max violation = " + format_real(v.max_violation) +
           ", tolerance = " + format_real(v.tolerance) + ")\n";
    if (v.applicable() && !v.passed()) all_pass = false;
  }
  write_output(o, out);
  return all_pass ? 0 : 2;
}

struct GammaRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t steps = 0;
};

GammaRange parse_gamma_range(const std::string& text) {
  std::vector<std::string> parts(1);
  for (char c : text) {
    if (c == ':') {
      parts.emplace_back();
    } else {
      parts.back() += c;
    }
  }
  const auto bad = [&] {
    fail(ErrorCode::UsageError, "--gammas expects MIN:MAX:STEPS, got '" + text + "'");
  };
  if (parts.size() != 3) bad();
  GammaRange range;
  const auto real = [&](const std::string& s, double& out) {
    const auto* end = s.data() + s.size();
    if (std::from_chars(s.data(), end, out).ptr != end || s.empty()) bad();
  };
  real(parts[0], range.lo);
  real(parts[1], range.hi);
  const auto* end = parts[2].data() + parts[2].size();
  if (parts[2].empty() || std::from_chars(parts[2].data(), end, range.steps).ptr != end) bad();
  return range;
}

int cmd_sweep(const Options& o) {
  const LoadedInstance inst = load_instance(o);
  const GammaRange range = parse_gamma_range(o.gammas);
  if (!(range.lo > 0.0 && range.hi < 1.0)) {
    fail(ErrorCode::InvalidGammaGrid,
         "sweep grid must lie strictly inside (0,1); 0 and 1 are not valid discount factors");
  }
  const auto grid = gamma_grid(range.lo, range.hi, range.steps);
  const SweepMethod method = o.method == "exact" ? SweepMethod::Exact : SweepMethod::Series;
  const SweepTable table = gamma_sweep(inst.matrix, inst.impacts, grid, method, o.epsilon);
  write_output(o, write_sweep_csv(table));
  return 0;
}

int cmd_matrix(const Options& o, const CLI::App* sub) {
  const LoadedInstance inst = load_instance(o);
  const DiscountFactor gamma = resolve_gamma(o, sub, inst.default_gamma);
  const auto prop = propagation_matrix(inst.matrix, gamma, o.q);
  write_output(o, write_matrix_csv(inst.matrix.players(), prop));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allocates a network's total impact across its nodes via discounted walks"};
  app.require_subcommand(1);
  Options o;

  const auto add_input = [&](CLI::App* sub) {
    sub->add_option("--instance", o.instance_path, "Single-file JSON instance");
    sub->add_option("--graph", o.graph_path, "Edge-list CSV (source,target,weight)");
    sub->add_option("--impacts", o.impacts_path, "Impacts CSV (node,impact); used with --graph");
    sub->add_option("--output", o.output_path, "Output file (default: standard output)");
    sub->add_option("--row-tolerance", o.row_tolerance,
                    "Allowed row-sum deviation before rejection");
    sub->add_option("--normalize", o.normalize_policy,
                    "Zero-row handling when normalizing raw weights")
        ->check(CLI::IsMember({"self-loop", "reject"}));
  };
  const auto add_gamma = [&](CLI::App* sub) {
    sub->add_option("--gamma", o.gamma, "Discount factor, strictly between 0 and 1");
  };
  const auto add_depth = [&](CLI::App* sub) {
    auto* eps = sub->add_option("--epsilon", o.epsilon,
                                "Accuracy target for automatic depth selection");
    auto* q = sub->add_option("--q", o.q, "Fixed truncation depth (overrides --epsilon)");
    q->excludes(eps);
    sub->add_option("--qeps", o.qeps, "Depth selection rule")
        ->check(CLI::IsMember({"paper", "strict"}));
  };

  CLI::App* compute = app.add_subcommand("compute", "Allocate the total impact across players");
  add_input(compute);
  add_gamma(compute);
  add_depth(compute);
  compute->add_option("--method", o.method, "Computation route")
      ->check(CLI::IsMember({"series", "exact"}));

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check an instance and report its structure");
  add_input(validate_cmd);
  validate_cmd->add_option("--pair-tolerance", o.pair_tolerance,
                           "Entry tolerance when matching symmetric pairs");

  CLI::App* axioms_cmd =
      app.add_subcommand("axioms", "Verify the allocation's defining properties");
  add_input(axioms_cmd);
  add_gamma(axioms_cmd);
  add_depth(axioms_cmd);
  axioms_cmd->add_option("--tolerance", o.tolerance, "Accepted numerical violation per property");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Tabulate allocations over a grid of discount factors");
  add_input(sweep_cmd);
  sweep_cmd->add_option("--gammas", o.gammas, "Grid as MIN:MAX:STEPS")->required();
  sweep_cmd->add_option("--epsilon", o.epsilon, "Accuracy target for the series route");
  sweep_cmd->add_option("--method", o.method, "Computation route")
      ->check(CLI::IsMember({"series", "exact"}));

  CLI::App* matrix_cmd =
      app.add_subcommand("matrix", "Dump the damped walk-propagation matrix as CSV");
  add_input(matrix_cmd);
  add_gamma(matrix_cmd);
  matrix_cmd->add_option("--q", o.q, "Walk-length cutoff of the dumped matrix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: UsageError: %s\n", e.what());
    return 2;
  }

  try {
    const CLI::App* chosen = app.get_subcommands().front();
    if (chosen == compute) return cmd_compute(o, chosen);
    if (chosen == validate_cmd) return cmd_validate(o);
    if (chosen == axioms_cmd) return cmd_axioms(o, chosen);
    if (chosen == sweep_cmd) return cmd_sweep(o);
    return cmd_matrix(o, chosen);
  } catch (const respo::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return e.code() == respo::ErrorCode::SingularSystem ? 1 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Internal: %s\n", e.what());
    return 1;
  }
}
