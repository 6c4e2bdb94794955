// dlf: generate digraphs, decompose them into directed linear forests,
// compute exact linear arboricity on small inputs, inspect the parameter
// recursion and validate colorings.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlf/oracle.hpp"
#include "dlf/pipeline.hpp"

#ifdef DLF_HAVE_OPENMP
#include <omp.h>
#endif

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kBudget = 3 };

struct Globals {
  std::uint64_t seed = 1;
  bool json = false;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dlf::InvalidInput("cli", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dlf::InvalidInput("cli", "cannot write " + path);
  out << text;
}

dlf::GraphFormat format_of(const std::string& path, const std::string& flag) {
  if (flag == "json") return dlf::GraphFormat::Json;
  if (flag == "edgelist") return dlf::GraphFormat::EdgeList;
  return path.ends_with(".json") ? dlf::GraphFormat::Json : dlf::GraphFormat::EdgeList;
}

// "k3star" style names resolve to symmetric complete digraphs.
dlf::Digraph load_digraph(const std::string& input, const std::string& format) {
  static const std::regex named("k(\\d+)star");
  std::smatch m;
  if (std::regex_match(input, m, named)) return dlf::symmetric_complete(std::stoul(m[1]));
  return dlf::parse_digraph(read_file(input), format_of(input, format));
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw dlf::InvalidInput("cli", path + ": " + e.what());
  }
}

void emit(const Globals& g, const json& j, const std::string& human) {
  if (g.json) {
    std::cout << j.dump(2) << '\n';
  } else if (!g.quiet) {
    std::cout << human;
  }
}

// ---------------------------------------------------------------------------
// gen

struct GenOpts {
  std::string family = "symmetric-complete";
  std::size_t n = 3, d = 2, proposals = 0;
  std::string format = "edgelist";
  std::string out;
};

int cmd_gen(const Globals& g, const GenOpts& o) {
  dlf::Digraph d;
  if (o.family == "symmetric-complete") d = dlf::symmetric_complete(o.n);
  else if (o.family == "path") d = dlf::directed_path(o.n);
  else if (o.family == "cycle") d = dlf::directed_cycle(o.n);
  else if (o.family == "random-regular") d = dlf::random_regular_digraph(o.n, o.d, g.seed);
  else if (o.family == "random-bounded")
    d = dlf::random_bounded_digraph(o.n, o.d, o.proposals ? o.proposals : o.n * o.d, g.seed);
  else if (o.family == "eulerian")
    d = dlf::eulerian_orientation(dlf::random_even_regular_multigraph(o.n, o.d, g.seed));
  else throw dlf::InvalidInput("cli", "unknown family '" + o.family + "'");
  const auto fmt = o.format == "json" ? dlf::GraphFormat::Json : dlf::GraphFormat::EdgeList;
  const std::string text = dlf::serialize_digraph(d, fmt);
  if (!o.out.empty()) write_file(o.out, text);
  json j{{"config",
          {{"command", "gen"}, {"family", o.family}, {"n", o.n}, {"d", o.d},
           {"proposals", o.proposals}, {"seed", g.seed}, {"format", o.format}}},
         {"vertices", d.vertex_count()},
         {"arcs", d.arc_count()},
         {"max_degree", dlf::max_degree(d)}};
  if (o.out.empty()) {
    if (g.json) j["digraph"] = text;
    else std::cout << text;
    if (g.json) std::cout << j.dump(2) << '\n';
    return kOk;
  }
  j["output"] = o.out;
  emit(g, j,
       "wrote " + o.out + ": " + std::to_string(d.vertex_count()) + " vertices, " +
           std::to_string(d.arc_count()) + " arcs\n");
  return kOk;
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeOpts {
  std::string input, format, lists_path;
  std::size_t list_size = 0;
  std::string reserve_profile = "desk";
  double reserve_p = -1;
  std::size_t reserve_max_tries = 100;
  bool reserve_lenient = false;
  dlf::DeskReserveKnobs knobs;
  std::string profile = "desk";
  double p = 0.25;
  std::string log_base = "nat";
  std::size_t ell = 0, max_retries = 16, finish_max_resamples = 0;
  std::string stop = "fraction:0";
  bool no_verify = false, serial = false;
  std::size_t trials = 1;
  std::string coloring_out, stats_out;
};

dlf::LogBase parse_log_base(const std::string& s) {
  if (s == "nat") return dlf::LogBase::Natural;
  if (s == "2") return dlf::LogBase::Base2;
  throw dlf::InvalidInput("cli", "log base must be nat or 2");
}

dlf::DecomposeConfig make_config(const Globals& g, const DecomposeOpts& o, const dlf::Digraph& d) {
  dlf::DecomposeConfig cfg;
  cfg.seed = g.seed;
  cfg.list_size = o.list_size;
  if (!o.lists_path.empty()) {
    cfg.lists = dlf::lists_from_json(d, load_json(o.lists_path));
  } else if (o.list_size == 0) {
    throw dlf::InvalidInput("cli", "decompose needs --list-size or --lists");
  }
  cfg.reserve_profile = dlf::parse_reserve_profile(o.reserve_profile);
  if (o.reserve_p >= 0) cfg.reserve_p = o.reserve_p;
  cfg.reserve_max_tries = o.reserve_max_tries;
  cfg.reserve_strict = !o.reserve_lenient;
  cfg.knobs = o.knobs;
  if (o.profile == "paper") cfg.nibble.profile = dlf::Profile::Paper;
  else if (o.profile != "desk") throw dlf::InvalidInput("cli", "profile must be paper or desk");
  cfg.nibble.p = o.p;
  cfg.nibble.log_base = parse_log_base(o.log_base);
  cfg.nibble.ell_int = o.ell;
  cfg.nibble.max_retries = o.max_retries;
  cfg.nibble.verify = !o.no_verify;
  cfg.nibble.exec = o.serial ? dlf::Exec::Serial : dlf::Exec::Parallel;
  cfg.stop = dlf::StopRule::parse(o.stop);
  cfg.finish_max_resamples = o.finish_max_resamples;
  return cfg;
}

std::string summary_line(const dlf::DecomposeResult& r, std::uint64_t seed) {
  std::ostringstream s;
  s << "seed " << seed << ": " << (r.valid() ? "valid" : "INVALID") << ", " << r.colors_used
    << " colors, " << r.nibble.stats.size() << " nibble rounds (" << r.nibble.stop_reason
    << "), " << r.nibble_colored << " arcs by nibble, " << r.finish.colors.size()
    << " by finisher, " << r.finish.resamples << " resamples\n";
  return s.str();
}

int cmd_decompose(const Globals& g, const DecomposeOpts& o) {
  const dlf::Digraph d = load_digraph(o.input, o.format);
  const dlf::DecomposeConfig base = make_config(g, o, d);

  if (o.trials > 1) {
    // Independent seeds g.seed, g.seed+1, ...; results kept in seed order.
    const auto k = static_cast<std::int64_t>(o.trials);
    std::vector<json> rows(o.trials);
    std::vector<std::string> lines(o.trials);
    std::vector<int> codes(o.trials, kOk);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < k; ++t) {
      dlf::DecomposeConfig cfg = base;
      cfg.seed = g.seed + static_cast<std::uint64_t>(t);
      try {
        const auto r = dlf::decompose(d, cfg);
        rows[t] = {{"seed", cfg.seed}, {"stats", dlf::decompose_stats_json(cfg, r)["summary"]}};
        lines[t] = summary_line(r, cfg.seed);
        codes[t] = r.valid() ? kOk : kInvalid;
      } catch (const dlf::BudgetExhausted& e) {
        rows[t] = {{"seed", cfg.seed}, {"error", e.what()}, {"module", e.module()}};
        lines[t] = "seed " + std::to_string(cfg.seed) + ": [" + e.module() + "] " + e.what() + "\n";
        codes[t] = kBudget;
      } catch (const dlf::Error& e) {
        rows[t] = {{"seed", cfg.seed}, {"error", e.what()}, {"module", e.module()}};
        lines[t] = "seed " + std::to_string(cfg.seed) + ": [" + e.module() + "] " + e.what() + "\n";
        codes[t] = kInvalid;
      }
    }
    json j{{"config", dlf::config_to_json(base)}, {"trials", rows}};
    j["config"]["command"] = "decompose";
    j["config"]["input"] = o.input;
    std::string human;
    for (const auto& l : lines) human += l;
    emit(g, j, human);
    return *std::max_element(codes.begin(), codes.end());
  }

  const auto r = dlf::decompose(d, base);
  json stats = dlf::decompose_stats_json(base, r);
  stats["config"]["command"] = "decompose";
  stats["config"]["input"] = o.input;
  const json coloring = dlf::coloring_to_json(d, r.coloring);
  if (!r.valid()) {
    // Never write a coloring that fails its own verifier.
    std::cerr << "dlf: merged coloring failed validation (seed " << g.seed << ")\n";
    std::cerr << stats["violations"].dump(2) << '\n';
    return kInvalid;
  }
  if (!o.coloring_out.empty()) write_file(o.coloring_out, coloring.dump(2) + "\n");
  if (!o.stats_out.empty()) write_file(o.stats_out, stats.dump(2) + "\n");
  json out = stats;
  out["coloring"] = coloring;
  emit(g, out, summary_line(r, g.seed));
  return kOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleOpts {
  std::string input, format, lists_path;
  std::uint64_t node_limit = 50'000'000;
  double time_limit = 60;
};

int cmd_oracle(const Globals& g, const OracleOpts& o) {
  const dlf::Digraph d = load_digraph(o.input, o.format);
  dlf::SearchBudget budget;
  budget.node_limit = o.node_limit;
  budget.time_limit = std::chrono::milliseconds(static_cast<std::int64_t>(o.time_limit * 1000));
  json config{{"command", "oracle"}, {"input", o.input}, {"node_limit", o.node_limit},
              {"time_limit_s", o.time_limit}, {"seed", g.seed}};
  if (!o.lists_path.empty()) {
    const auto lists = dlf::lists_from_json(d, load_json(o.lists_path));
    const auto r = dlf::exists_linear_list_coloring(d, lists, budget);
    json j{{"config", config}, {"status", dlf::to_string(r.status)}, {"nodes", r.nodes}};
    if (r.status == dlf::SearchStatus::Found) {
      dlf::PartialColoring gamma(d);
      for (dlf::ArcId a = 0; a < d.arc_count(); ++a) gamma.assign(a, r.coloring[a]);
      j["coloring"] = dlf::coloring_to_json(d, gamma);
    }
    emit(g, j, std::string("linear list coloring: ") + dlf::to_string(r.status) + "\n");
    if (r.status == dlf::SearchStatus::Indeterminate) return kBudget;
    return r.status == dlf::SearchStatus::Found ? kOk : kInvalid;
  }
  const auto r = dlf::exact_la(d, budget);
  json j = dlf::la_result_to_json(d, r);
  j["config"] = config;
  if (r.value) {
    emit(g, j, std::to_string(*r.value) + "\n");
    return kOk;
  }
  emit(g, j,
       "undecided: " + std::to_string(r.lower) + " <= la <= " + std::to_string(r.upper) + "\n");
  return kBudget;
}

// ---------------------------------------------------------------------------
// params

struct ParamsOpts {
  std::uint64_t delta = 0;
  std::string log_base = "nat";
  std::string precision = "extended";
};

int cmd_params(const Globals& g, const ParamsOpts& o) {
  dlf::Precision prec = dlf::Precision::Extended;
  if (o.precision == "double") prec = dlf::Precision::Double;
  else if (o.precision == "quad") prec = dlf::Precision::Quad;
  else if (o.precision != "extended") throw dlf::InvalidInput("cli", "unknown precision");
  const auto traj = dlf::compute_trajectory(o.delta, parse_log_base(o.log_base), prec);
  const auto report = dlf::check_size_bounds(traj);
  json j = dlf::trajectory_to_json(traj);
  j["bounds"] = dlf::size_report_to_json(report);
  j["config"] = {{"command", "params"}, {"delta", o.delta}, {"log_base", o.log_base},
                 {"precision", o.precision}, {"seed", g.seed}};
  std::ostringstream h;
  h << "delta " << o.delta << ": i0 = " << traj.i0 << ", " << traj.records.size()
    << " records\n";
  for (const auto& b : report.checks) {
    h << "  " << (b.passed ? "ok   " : "FAIL ") << b.name << '\n';
  }
  emit(g, j, h.str());
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
  std::string input, format, coloring_path, lists_path;
  std::size_t s = 1, t = 1;
  bool allow_cycles = false;
  bool compat = false;
  std::size_t N = 0, k_max = 3;
};

int cmd_verify(const Globals& g, const VerifyOpts& o, bool suspicious) {
  const dlf::Digraph d = load_digraph(o.input, o.format);
  const dlf::PartialColoring gamma = dlf::coloring_from_json(d, load_json(o.coloring_path));
  std::optional<dlf::ListAssignment> lists;
  if (!o.lists_path.empty()) lists = dlf::lists_from_json(d, load_json(o.lists_path));
  json config{{"command", suspicious ? "verify suspicious-bounds" : "verify"},
              {"input", o.input}, {"coloring", o.coloring_path}, {"lists", o.lists_path},
              {"seed", g.seed}};

  if (suspicious) {
    if (!lists) throw dlf::InvalidInput("cli", "suspicious-bounds needs --lists");
    std::size_t N = o.N;
    if (N == 0) {
      const dlf::NibbleState st(d, *lists);
      N = std::max<std::size_t>(1, dlf::realized_sizes(st).max_neighbors);
    }
    config["N"] = N;
    config["k_max"] = o.k_max;
    const auto r = dlf::count_bound_check(d, *lists, gamma, N, o.k_max);
    json j{{"config", config}, {"report", dlf::count_report_to_json(r)}};
    const bool ok = r.precondition_ok() && r.bounds_ok();
    emit(g, j, std::string("suspicious-path bounds: ") + (ok ? "ok" : "violated") + "\n");
    return ok ? kOk : kInvalid;
  }

  config["s"] = o.s;
  config["t"] = o.t;
  config["acyclic"] = !o.allow_cycles;
  const auto report = dlf::validate_coloring(d, gamma, o.s, o.t, !o.allow_cycles,
                                             lists ? &*lists : nullptr);
  json j{{"config", config}, {"coloring", dlf::report_to_json(report)}};
  bool ok = report.valid();
  if (o.compat) {
    if (!lists) throw dlf::InvalidInput("cli", "--compat needs --lists");
    const auto c = dlf::is_compatible(d, *lists, gamma);
    j["compatibility"] = dlf::report_to_json(c);
    ok = ok && c.valid();
  }
  j["valid"] = ok;
  std::ostringstream h;
  h << (ok ? "valid" : "invalid") << ": " << gamma.colored_count() << " of " << d.arc_count()
    << " arcs colored, " << report.violations.size() << " violations\n";
  for (const auto& v : report.violations) {
    h << "  " << dlf::to_string(v.kind);
    if (v.vertex) h << " at " << *v.vertex;
    if (v.color) h << " color " << *v.color;
    if (!v.walk.empty()) {
      h << " walk";
      for (auto x : v.walk) h << ' ' << x;
    }
    h << '\n';
  }
  emit(g, j, h.str());
  return ok ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed linear forest decomposition toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Root seed for every random stream");
  app.add_flag("--json", g.json, "Print machine-readable JSON");
  app.add_flag("--quiet", g.quiet, "Suppress the human summary");

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a digraph");
  gen_cmd->add_option("--family", gen.family,
                      "symmetric-complete|path|cycle|random-regular|random-bounded|eulerian");
  gen_cmd->add_option("--n", gen.n, "Vertices");
  gen_cmd->add_option("--d", gen.d, "Degree (eulerian: half the multigraph degree)");
  gen_cmd->add_option("--proposals", gen.proposals, "random-bounded: arcs proposed");
  gen_cmd->add_option("--format", gen.format, "edgelist|json");
  gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");

  DecomposeOpts dec;
  auto* dec_cmd = app.add_subcommand("decompose", "Reserve, nibble and finish");
  dec_cmd->add_option("--input", dec.input, "Digraph file or k<n>star, e.g. k5star")->required();
  dec_cmd->add_option("--format", dec.format, "edgelist|json (default by extension)");
  dec_cmd->add_option("--list-size", dec.list_size, "Uniform lists {0..k-1}");
  dec_cmd->add_option("--lists", dec.lists_path, "Explicit lists (JSON)");
  dec_cmd->add_option("--reserve-profile", dec.reserve_profile, "paper|desk|none");
  dec_cmd->add_option("--reserve-p", dec.reserve_p, "Reserve inclusion probability");
  dec_cmd->add_option("--reserve-max-tries", dec.reserve_max_tries);
  dec_cmd->add_flag("--reserve-lenient", dec.reserve_lenient,
                    "Check (c)/(d) for every color, not just reserved ones");
  dec_cmd->add_option("--reserve-a", dec.knobs.a_frac, "Desk A as a fraction of |list|");
  dec_cmd->add_option("--reserve-b", dec.knobs.b_frac, "Desk B as a fraction of |list|");
  dec_cmd->add_option("--reserve-b-min", dec.knobs.b_min, "Desk B floor");
  dec_cmd->add_option("--reserve-c", dec.knobs.c_frac, "Desk C as a fraction of max degree");
  dec_cmd->add_option("--profile", dec.profile, "Nibble profile paper|desk");
  dec_cmd->add_option("--p", dec.p, "Activation probability");
  dec_cmd->add_option("--log-base", dec.log_base, "nat|2");
  dec_cmd->add_option("--ell", dec.ell, "Path length bound (0 derives it)");
  dec_cmd->add_option("--stop", dec.stop, "i0 | fraction:x | list:n [,max:n]");
  dec_cmd->add_option("--max-retries", dec.max_retries, "Desk retries per round");
  dec_cmd->add_flag("--no-verify", dec.no_verify, "Skip per-round invariant checks");
  dec_cmd->add_flag("--serial", dec.serial, "Use the serial kernels");
  dec_cmd->add_option("--finish-max-resamples", dec.finish_max_resamples);
  dec_cmd->add_option("--trials", dec.trials, "Independent seeds seed..seed+k-1");
  dec_cmd->add_option("--coloring-out", dec.coloring_out);
  dec_cmd->add_option("--stats-out", dec.stats_out);

  OracleOpts orc;
  auto* orc_cmd = app.add_subcommand("oracle", "Exact linear arboricity by search");
  orc_cmd->add_option("--input", orc.input, "Digraph file or k<n>star, e.g. k5star")->required();
  orc_cmd->add_option("--format", orc.format);
  orc_cmd->add_option("--lists", orc.lists_path, "Decide linear list colorability instead");
  orc_cmd->add_option("--node-limit", orc.node_limit);
  orc_cmd->add_option("--time-limit", orc.time_limit, "Seconds");

  ParamsOpts par;
  auto* par_cmd = app.add_subcommand("params", "Parameter recursion and size bounds");
  par_cmd->add_option("--delta", par.delta)->required();
  par_cmd->add_option("--log-base", par.log_base, "nat|2");
  par_cmd->add_option("--precision", par.precision, "double|extended|quad");

  VerifyOpts ver;
  auto* ver_cmd = app.add_subcommand("verify", "Validate a coloring");
  ver_cmd->add_option("--input", ver.input)->required();
  ver_cmd->add_option("--format", ver.format);
  ver_cmd->add_option("--coloring", ver.coloring_path)->required();
  ver_cmd->add_option("--lists", ver.lists_path);
  ver_cmd->add_option("--s", ver.s, "In-degree bound per color");
  ver_cmd->add_option("--t", ver.t, "Out-degree bound per color");
  ver_cmd->add_flag("--allow-cycles", ver.allow_cycles);
  ver_cmd->add_flag("--compat", ver.compat, "Also check list compatibility");
  auto* sus_cmd = ver_cmd->add_subcommand("suspicious-bounds", "Suspicious-path count bounds");
  sus_cmd->add_option("--N", ver.N, "Color-neighbor bound (0: realized maximum)");
  sus_cmd->add_option("--k-max", ver.k_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(g, gen);
    if (*dec_cmd) return cmd_decompose(g, dec);
    if (*orc_cmd) return cmd_oracle(g, orc);
    if (*par_cmd) return cmd_params(g, par);
    if (*ver_cmd) return cmd_verify(g, ver, static_cast<bool>(*sus_cmd));
  } catch (const dlf::BudgetExhausted& e) {
    std::cerr << "dlf: [" << e.module() << "] " << e.what() << " (seed " << g.seed << ")\n";
    return kBudget;
  } catch (const dlf::PathOverflow& e) {
    std::cerr << "dlf: [" << e.module() << "] " << e.what() << " (seed " << g.seed << ")\n";
    return kBudget;
  } catch (const dlf::InvalidInput& e) {
    std::cerr << "dlf: [" << e.module() << "] " << e.what() << '\n';
    return kUsage;
  } catch (const dlf::ParseError& e) {
    std::cerr << "dlf: [" << e.module() << "] " << e.what() << '\n';
    return kUsage;
  } catch (const dlf::Error& e) {
    std::cerr << "dlf: [" << e.module() << "] " << e.what() << " (seed " << g.seed << ")\n";
    return kInvalid;
  }
  return kUsage;
}
