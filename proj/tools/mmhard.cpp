// mmhard: generate, verify and attack hard instances for matching-size estimation.
//
// Exit codes: 0 success, 1 a check failed, 2 usage error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmhard/mmhard.hpp"

namespace {

using namespace mmhard;

constexpr const char* kVersion = "mmhard 0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamFlags {
  std::string file, preset_name;
  std::vector<std::string> toy;
  std::string delta, L, r, N1, zeta, xi, gamma, tau, d;

  void add(CLI::App* app) {
    app->add_option("--params", file, "parameter file (key = value lines)");
    app->add_option("--preset", preset_name, "named parameter set: small, small-r3, small-l2, medium, large");
    app->add_option("--toy", toy, "toy parameters as key=value tokens");
    app->add_option("--delta", delta, "derive paper-faithful parameters for this delta");
    app->add_option("--L", L, "levels");
    app->add_option("--r", r, "layers");
    app->add_option("--N1", N1, "base subset size N_1");
    app->add_option("--zeta", zeta, "zeta");
    app->add_option("--xi", xi, "xi");
    app->add_option("--gamma", gamma, "gamma");
    app->add_option("--tau", tau, "tau");
    app->add_option("--d", d, "block degrees d_1,...,d_L");
  }

  // File or --toy first, then individual flags override. --delta alone derives paper parameters.
  ParamSet resolve() const {
    std::string text;
    if (!preset_name.empty()) {
      try {
        text = to_kv(preset(preset_name));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    if (!file.empty()) {
      std::ifstream is(file);
      if (!is) throw UsageError("cannot read parameter file " + file);
      std::stringstream ss;
      ss << is.rdbuf();
      text += ss.str();
    }
    for (const std::string& kv : toy) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--toy expects key=value, got '" + kv + "'");
      text += kv.substr(0, eq) + " = " + kv.substr(eq + 1) + "\n";
    }
    const std::pair<const char*, const std::string*> flags[] = {{"L", &L},       {"r", &r},   {"N1", &N1},
                                                               {"zeta", &zeta}, {"xi", &xi}, {"gamma", &gamma},
                                                               {"tau", &tau},   {"d", &d}};
    std::string overrides;
    for (auto [k, v] : flags)
      if (!v->empty()) overrides += std::string(k) + " = " + *v + "\n";
    if (!delta.empty() && text.empty() && overrides.empty()) return derive_paper_params(parse_rational(delta));
    if (!delta.empty()) text += "delta = " + delta + "\n";
    text += overrides;
    if (text.empty()) throw UsageError("no parameters given (use --preset, --params, --toy, --delta or --L ...)");
    return from_kv(text);
  }
};

ParamSet checked(const ParamSet& p) {
  const ValidationReport rep = validate(p);
  if (!rep.ok) throw ParamError(ParamErrc::ValidationFailed, "invalid parameters:\n" + rep.to_string(), rep);
  return p;
}

Side parse_side(const std::string& s) {
  if (s == "yes" || s == "YES") return Side::Yes;
  if (s == "no" || s == "NO") return Side::No;
  throw UsageError("--side must be yes or no");
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

void write_manifest(const std::string& path, const std::string& cmd, const std::string& sub,
                    const std::vector<std::pair<std::string, std::string>>& fields, const ParamSet* p) {
  std::ostringstream os;
  os << "tool = " << kVersion << "\n"
     << "subcommand = " << sub << "\n"
     << "command = " << cmd << "\n";
  for (auto& [k, v] : fields) os << k << " = " << v << "\n";
  if (p) os << "# params\n" << to_kv(*p);
  write_text_atomic(path, os.str());
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<QueryRecord> read_queries(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read transcript " + path);
  return read_transcript_csv(is);
}

int run(int argc, char** argv) {
  CLI::App app{"Hard-instance generator and query-oracle harness for matching-size estimation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  const std::string cmd = command_line(argc, argv);

  // gen
  auto* gen = app.add_subcommand("gen", "build an instance and save it");
  ParamFlags gen_p;
  gen_p.add(gen);
  std::string gen_side = "yes", gen_out;
  std::uint64_t gen_seed = 1;
  bool gen_coupled = false, gen_dry = false;
  gen->add_option("--side", gen_side, "yes or no");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_flag("--coupled", gen_coupled, "share the seed tree between YES and NO (experimental pairing)");
  gen->add_option("-o,--out", gen_out, "output instance file");
  gen->add_flag("--dry-run", gen_dry, "print resolved parameters and the validation report only");

  // verify
  auto* ver = app.add_subcommand("verify", "exact matching sizes and gap of a YES/NO pair");
  std::string ver_yes, ver_no, ver_csv;
  ver->add_option("yes", ver_yes, "YES instance")->required();
  ver->add_option("no", ver_no, "NO instance")->required();
  ver->add_option("--csv", ver_csv, "append the report as a CSV row");

  // attack
  auto* att = app.add_subcommand("attack", "play the distinguishing game");
  ParamFlags att_p;
  att_p.add(att);
  std::string att_algo = "full_scan", att_budget = "unlimited", att_csv;
  double att_exp = -1;
  std::uint64_t att_trials = 20, att_seed = 1, att_samples = 64, att_probes = 64, att_starts = 8;
  unsigned att_jobs = 1;
  att->add_option("--algo", att_algo, "full_scan | sampled_greedy | special_edge_chaser");
  att->add_option("--budget", att_budget, "query budget per trial, or 'unlimited'");
  att->add_option("--budget-exp", att_exp, "budget = ceil(n^x)");
  att->add_option("--trials", att_trials, "number of trials");
  att->add_option("--seed", att_seed, "master seed");
  att->add_option("--jobs", att_jobs, "worker threads");
  att->add_option("--samples", att_samples, "sampled_greedy: vertices to sample");
  att->add_option("--probes", att_probes, "sampled_greedy: probes per vertex");
  att->add_option("--starts", att_starts, "special_edge_chaser: chain starts");
  att->add_option("--csv", att_csv, "write the result as CSV");

  // stats
  auto* sta = app.add_subcommand("stats", "structural statistics of a transcript");
  std::string sta_inst, sta_tr, sta_tr_out, sta_csv, sta_hist;
  std::uint64_t sta_budget = 0, sta_seed = 1, sta_cutoff = 64;
  sta->add_option("instance", sta_inst, "instance file")->required();
  sta->add_option("--transcript", sta_tr, "transcript CSV to analyze");
  sta->add_option("--random-budget", sta_budget, "instead, issue this many uniform random queries");
  sta->add_option("--seed", sta_seed, "seed for --random-budget");
  sta->add_option("--transcript-out", sta_tr_out, "save the generated transcript");
  sta->add_option("--cutoff", sta_cutoff, "shallow-subgraph size cutoff when delta is undefined");
  sta->add_option("--csv", sta_csv, "write statistics as CSV");
  sta->add_option("--histogram", sta_hist, "write the shallow-size histogram as CSV");

  // replay
  auto* rep = app.add_subcommand("replay", "re-execute a transcript against an instance");
  std::string rep_inst, rep_tr, rep_out;
  rep->add_option("instance", rep_inst, "instance file")->required();
  rep->add_option("transcript", rep_tr, "transcript CSV")->required();
  rep->add_option("-o,--out", rep_out, "write the answer log");

  // report
  auto* rpt = app.add_subcommand("report", "aggregate CSV files (mean, min, quantiles, max)");
  std::vector<std::string> rpt_in;
  std::string rpt_out;
  rpt->add_option("csv", rpt_in, "CSV files with a common header")->required();
  rpt->add_option("-o,--out", rpt_out, "write the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen->parsed()) {
    const ParamSet p = gen_p.resolve();
    const ValidationReport vr = validate(p);
    if (gen_dry) {
      std::cout << to_kv(p) << "n_total = " << to_string(p.n_total) << "\n"
                << "dummy_count = " << to_string(p.dummy_count) << "\n"
                << "log10_epsilon = " << p.log10_epsilon << "\n"
                << vr.to_string();
      return vr.ok ? 0 : 1;
    }
    if (!vr.ok) throw ParamError(ParamErrc::ValidationFailed, "invalid parameters:\n" + vr.to_string(), vr);
    if (gen_out.empty()) throw UsageError("gen needs -o unless --dry-run");
    AssembleOptions opt;
    opt.coupled = gen_coupled;
    const Instance inst = assemble(p, parse_side(gen_side), gen_seed, opt);
    save(inst, gen_out);
    write_manifest(gen_out + ".run.manifest", cmd, "gen",
                   {{"seed", std::to_string(gen_seed)}, {"side", to_string(inst.side)},
                    {"coupled", gen_coupled ? "true" : "false"}},
                   &p);
    std::cout << "wrote " << gen_out << ": n=" << inst.n << " core_edges=" << inst.core_edge_count()
              << " side=" << to_string(inst.side) << "\n";
    return 0;
  }

  if (ver->parsed()) {
    const Instance y = load(ver_yes);
    const Instance n = load(ver_no);
    if (!(y.params == n.params)) throw UsageError("instances were built from different parameters");
    const GapReport g = verify_gap(y, n, y.params);
    std::cout << to_json(g) << "\n";
    if (!ver_csv.empty()) {
      write_text_atomic(ver_csv, gap_csv_header() + "\n" + gap_csv_row(g) + "\n");
      write_manifest(ver_csv + ".manifest", cmd, "verify",
                     {{"yes", ver_yes}, {"yes_seed", std::to_string(y.master_seed)}, {"no", ver_no},
                      {"no_seed", std::to_string(n.master_seed)}},
                     &y.params);
    }
    return g.pass ? 0 : 1;
  }

  if (att->parsed()) {
    const ParamSet p = checked(att_p.resolve());
    AlgorithmConfig cfg;
    const auto algo = parse_algorithm(att_algo);
    if (!algo) throw UsageError("unknown algorithm '" + att_algo + "'");
    cfg.algorithm = *algo;
    cfg.sample_vertices = att_samples;
    cfg.per_vertex_probes = att_probes;
    cfg.starts = att_starts;
    std::uint64_t budget = kUnlimited;
    if (att_exp >= 0) {
      budget = static_cast<std::uint64_t>(std::ceil(std::pow(to_double(p.n_total), att_exp)));
    } else if (att_budget != "unlimited") {
      try {
        budget = std::stoull(att_budget);
      } catch (const std::logic_error&) {
        throw UsageError("--budget must be a count or 'unlimited'");
      }
    }
    if (att_trials == 0) throw UsageError("--trials must be at least 1");
    const GameResult r = play_game(cfg, p, budget, att_trials, att_seed, att_jobs);
    std::cout << r.algorithm << ": " << r.success_count << "/" << r.trials << " correct (rate " << r.success_rate
              << ", 95% CI [" << r.wilson_lo << ", " << r.wilson_hi << "]), " << r.abstentions
              << " abstentions, mean queries " << r.mean_queries << "\n";
    const std::string csv = game_csv_header() + "\n" + game_csv_row(r) + "\n";
    std::cout << csv;
    const std::string out = att_csv.empty() ? "mmhard-attack" : att_csv;
    if (!att_csv.empty()) write_text_atomic(att_csv, csv);
    write_manifest(out + ".manifest", cmd, "attack",
                   {{"algorithm", r.algorithm},
                    {"budget", budget == kUnlimited ? "unlimited" : std::to_string(budget)},
                    {"trials", std::to_string(att_trials)},
                    {"seed", std::to_string(att_seed)},
                    {"samples", std::to_string(att_samples)},
                    {"probes", std::to_string(att_probes)},
                    {"starts", std::to_string(att_starts)}},
                   &p);
    return 0;
  }

  if (sta->parsed()) {
    const Instance inst = load(sta_inst);
    Transcript t;
    if (!sta_tr.empty()) {
      const ReplayResult rr = replay(inst, read_queries(sta_tr));
      if (rr.mismatches) {
        std::cerr << "transcript does not match the instance (" << rr.mismatches << " differing answers)\n";
        return 1;
      }
      t = rr.transcript;
    } else if (sta_budget > 0) {
      t = random_query_transcript(inst, sta_budget, sta_seed, RecordMode::Full);
      if (!sta_tr_out.empty()) write_text_atomic(sta_tr_out, transcript_csv(t));
    } else {
      throw UsageError("stats needs --transcript or --random-budget");
    }
    StatsConfig cfg;
    cfg.toy_cutoff = sta_cutoff;
    const StructuralStats s = analyze(t, inst, cfg);
    const std::string csv = stats_csv_header(inst.L()) + "\n" + stats_csv_row(s) + "\n";
    std::cout << csv;
    if (!sta_csv.empty()) write_text_atomic(sta_csv, csv);
    if (!sta_hist.empty()) write_text_atomic(sta_hist, histogram_csv(s));
    const std::string out = sta_csv.empty() ? "mmhard-stats" : sta_csv;
    write_manifest(out + ".manifest", cmd, "stats",
                   {{"instance", sta_inst},
                    {"instance_seed", std::to_string(inst.master_seed)},
                    {"transcript", sta_tr.empty() ? "(generated)" : sta_tr},
                    {"random_budget", std::to_string(sta_budget)},
                    {"seed", std::to_string(sta_seed)},
                    {"cutoff", std::to_string(sta_cutoff)}},
                   &inst.params);
    return s.unspoiled_non_tree == 0 ? 0 : 1;
  }

  if (rep->parsed()) {
    const Instance inst = load(rep_inst);
    const ReplayResult rr = replay(inst, read_queries(rep_tr));
    Transcript log;
    log.queries = rr.log;
    const std::string csv = transcript_csv(log);
    if (!rep_out.empty()) {
      write_text_atomic(rep_out, csv);
      write_manifest(rep_out + ".manifest", cmd, "replay",
                     {{"instance", rep_inst}, {"transcript", rep_tr}, {"mismatches", std::to_string(rr.mismatches)}},
                     &inst.params);
    } else {
      std::cout << csv;
    }
    std::cerr << rr.log.size() << " queries replayed, " << rr.mismatches << " mismatches\n";
    return rr.mismatches == 0 ? 0 : 1;
  }

  if (rpt->parsed()) {
    std::vector<std::string> texts;
    for (const std::string& f : rpt_in) texts.push_back(slurp(f));
    const std::string summary = aggregate_csv(texts);
    std::cout << summary;
    if (!rpt_out.empty()) {
      write_text_atomic(rpt_out, summary);
      std::vector<std::pair<std::string, std::string>> fields;
      for (const std::string& f : rpt_in) fields.emplace_back("input", f);
      write_manifest(rpt_out + ".manifest", cmd, "report", fields, nullptr);
    }
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mmhard::ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mmhard::TranscriptFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mmhard::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == mmhard::IoErrc::Io ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
