// Copyright 2026 The lsw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lsw/error.hpp"
#include "lsw/experiments.hpp"
#include "lsw/kernel.hpp"
#include "lsw/observables.hpp"
#include "lsw/orbits.hpp"
#include "lsw/plot.hpp"
#include "lsw/pot.hpp"
#include "lsw/random.hpp"
#include "lsw/textio.hpp"
#include "lsw/weights.hpp"

namespace lsw::cli {

namespace {

using textio::fmt17;

// Flag validation failure: exit status 1.
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void usage_if(bool bad, const std::string& msg) {
  if (bad) throw Usage(msg);
}

struct Common {
  std::uint64_t seed = 1;
  double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
  Params params() const { return Params{sigma, rho, beta}; }
};

// Writes to `path`, or to `out` when path is empty or "-".
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  write(f);
  if (!f) fail(ErrorCode::kIo, "write failed for " + path);
}

OrbitLibrary library_prefix(const std::string& path, std::size_t P) {
  OrbitLibrary lib = load_library(path);
  if (P > 0) {
    require(P <= lib.orbits.size(), "P=" + std::to_string(P) + " exceeds the library size " +
                                        std::to_string(lib.orbits.size()));
    lib.orbits.resize(P);
  }
  return lib;
}

struct MeasureSource {
  std::string library, snippets;
  std::size_t P = 0;

  void add(CLI::App* sub) {
    sub->add_option("--library", library, "orbit library file");
    sub->add_option("--snippets", snippets, "snippet library file");
    sub->add_option("--P", P, "use the first P measures (0: all)");
  }
  void validate() const {
    usage_if(library.empty() == snippets.empty(), "give exactly one of --library or --snippets");
  }
  MeasureKind kind() const { return library.empty() ? MeasureKind::kSnippet : MeasureKind::kOrbit; }
  std::vector<ReferenceMeasure> load(const Params& p) const {
    if (!library.empty()) return orbit_measures(library_prefix(library, P), p);
    std::vector<Snippet> s = load_snippets(snippets);
    if (P > 0) {
      require(P <= s.size(), "P exceeds the snippet count");
      s.resize(P);
    }
    return snippet_measures(s);
  }
};

void write_theta_scan(const ThetaScan& scan, std::ostream& out) {
  out << "theta,distance_ones,distance_identity\n";
  for (const ThetaScanPoint& p : scan.points) {
    out << fmt17(p.theta) << ',' << fmt17(p.distance_ones) << ',' << fmt17(p.distance_identity) << '\n';
  }
}

ThetaScan read_theta_scan(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  ThetaScan scan;
  std::string line;
  int line_no = 0;
  double best = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "theta,distance_ones,distance_identity") textio::parse_error(1, "not a theta-scan file");
      continue;
    }
    const auto f = textio::split(line, ',');
    if (f.size() != 3) textio::parse_error(line_no, "expected three columns");
    ThetaScanPoint p{textio::parse_double(f[0], line_no), textio::parse_double(f[1], line_no),
                     textio::parse_double(f[2], line_no)};
    const double gap = std::abs(p.distance_ones - p.distance_identity);
    if (scan.points.empty() || gap < best) {
      best = gap;
      scan.theta_star = p.theta;
    }
    scan.points.push_back(p);
  }
  if (scan.points.empty()) textio::parse_error(line_no, "no theta-scan rows");
  return scan;
}

Trajectory chaotic_for(const Common& c, std::size_t N, double dt, int s) {
  return chaotic_samples(c.params(), N, dt, derive_seed(c.seed, "chaotic", static_cast<std::uint64_t>(s)));
}

std::vector<double> averages_for(const std::vector<ReferenceMeasure>& measures, const Observable& o) {
  return measure_averages(measures, o.fn);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Least-squares weighting of reference measures for chaotic averages", "lsw"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "master seed for all random streams");
  app.add_option("--sigma", common.sigma, "Lorenz sigma");
  app.add_option("--rho", common.rho, "Lorenz rho");
  app.add_option("--beta", common.beta, "Lorenz beta");

  std::function<void()> action;

  // find-orbits
  auto* find = app.add_subcommand("find-orbits", "build a complete periodic-orbit library");
  int lmax = 0;
  std::string lib_out;
  SearchBudget budget;
  find->add_option("--lmax", lmax, "largest symbol length")->required();
  find->add_option("--out", lib_out, "library file")->required();
  find->add_option("--search-time", budget.search_time, "length of each search run");
  find->add_option("--max-runs", budget.max_runs, "number of search runs");
  find->add_option("--candidates", budget.candidates_per_word, "refinement attempts per word");
  find->callback([&] {
    usage_if(lmax < 2, "--lmax must be at least 2");
    usage_if(budget.search_time <= 0.0 || budget.max_runs < 1 || budget.candidates_per_word < 1,
             "search budget must be positive");
    action = [&] {
      budget.seed = derive_seed(common.seed, "orbit-search", 0);
      const OrbitLibrary lib = build_complete_library(lmax, common.params(), budget);
      save_library(lib, lib_out);
      out << "wrote " << lib.orbits.size() << " orbits to " << lib_out << '\n';
    };
  });

  // snippets
  auto* snip = app.add_subcommand("snippets", "cut one chaotic run into equal snippets");
  int snip_count = 0;
  double snip_total = 0.0, snip_spacing = 0.01;
  std::string match_lib, snip_out;
  snip->add_option("--count", snip_count, "number of snippets (default: library size)");
  snip->add_option("--match-library", match_lib, "match total duration and count to this library");
  snip->add_option("--total", snip_total, "total duration");
  snip->add_option("--spacing", snip_spacing, "largest sample spacing");
  snip->add_option("--out", snip_out, "snippet file")->required();
  snip->callback([&] {
    usage_if(match_lib.empty() && (snip_count < 1 || snip_total <= 0.0),
             "give --match-library or both --count and --total");
    usage_if(snip_spacing <= 0.0, "--spacing must be positive");
    action = [&] {
      int count = snip_count;
      double total = snip_total;
      if (!match_lib.empty()) {
        const OrbitLibrary lib = load_library(match_lib);
        if (count < 1) count = static_cast<int>(lib.orbits.size());
        if (total <= 0.0) {
          for (const PeriodicOrbit& o : lib.orbits) total += o.period;
        }
      }
      const std::vector<Snippet> s = sample_snippets(common.params(), total, count,
                                                     derive_seed(common.seed, "snippets", 0), snip_spacing);
      save_snippets(s, snip_out);
      out << "wrote " << s.size() << " snippets of duration " << fmt17(s.front().duration) << " to "
          << snip_out << '\n';
    };
  });

  // theta-scan
  auto* scan = app.add_subcommand("theta-scan", "Frobenius distances of A(theta) to J and I");
  std::string grid = "1e-2:1e6:log25", scan_out, scan_plot;
  MeasureSource scan_src;
  scan_src.add(scan);
  scan->add_option("--grid", grid, "lo:hi:logK or a comma list");
  scan->add_option("--out", scan_out, "CSV output (default stdout)");
  scan->add_option("--plot", scan_plot, "SVG output");
  scan->callback([&] {
    scan_src.validate();
    std::vector<double> g;
    try {
      g = parse_theta_grid(grid);
    } catch (const Error& e) {
      throw Usage(e.what());
    }
    action = [&, g] {
      const ThetaScan s = theta_scan(scan_src.load(common.params()), g);
      emit(scan_out, out, [&](std::ostream& o) { write_theta_scan(s, o); });
      if (!scan_plot.empty()) write_svg(theta_scan_chart(s), scan_plot);
      err << "theta* = " << fmt17(s.theta_star) << '\n';
    };
  });

  // build-system
  auto* build = app.add_subcommand("build-system", "assemble the correlation system A w = b");
  double theta = 100.0, dt = 2.0;
  double N_flag = 0.0;
  int s_index = 1;
  std::string sys_out;
  MeasureSource build_src;
  build_src.add(build);
  build->add_option("--theta", theta, "kernel variance");
  build->add_option("--N", N_flag, "chaotic samples")->required();
  build->add_option("--dt", dt, "chaotic sample spacing");
  build->add_option("--s", s_index, "chaotic seed index");
  build->add_option("--out", sys_out, "system file (default stdout)");
  build->callback([&] {
    build_src.validate();
    usage_if(theta <= 0.0, "--theta must be positive");
    usage_if(N_flag < 1.0 || N_flag != std::floor(N_flag), "--N must be a positive integer");
    usage_if(dt <= 0.0, "--dt must be positive");
    usage_if(s_index < 1, "--s must be at least 1");
    action = [&] {
      const auto N = static_cast<std::size_t>(N_flag);
      const std::vector<ReferenceMeasure> m = build_src.load(common.params());
      const Trajectory traj = chaotic_for(common, N, dt, s_index);
      const CorrelationSystem sys = build_system(m, traj, KernelConfig{theta, KernelMode::kGaussian}, N,
                                                 static_cast<std::uint64_t>(s_index));
      emit(sys_out, out, [&](std::ostream& o) { save_system(sys, o); });
    };
  });

  // weights
  auto* wts = app.add_subcommand("weights", "compute a weight vector");
  std::string method_flag, system_path, w_out, w_kind = "orbit", determinant = "leading", history;
  double alpha = 1e-10;
  double w_N = 0.0, w_dt = 2.0;
  int w_s = 1;
  MeasureSource w_src;
  w_src.add(wts);
  wts->add_option("--method", method_flag, "lsw|nnls|constrained|markov|uniform|pot")->required();
  wts->add_option("--alpha", alpha, "Tikhonov regularization");
  wts->add_option("--system", system_path, "correlation system (lsw, nnls, constrained)");
  wts->add_option("--N", w_N, "chaotic samples (markov)");
  wts->add_option("--dt", w_dt, "chaotic sample spacing (markov)");
  wts->add_option("--s", w_s, "chaotic seed index (markov)");
  wts->add_option("--kind", w_kind, "orbit|snippet: what a system's measures are");
  wts->add_option("--determinant", determinant, "leading|multipliers (pot)");
  wts->add_option("--history", history, "objective per iteration (constrained)");
  wts->add_option("--out", w_out, "weight file (default stdout)");
  wts->callback([&] {
    WeightMethod m;
    try {
      m = parse_method(method_flag);
    } catch (const Error& e) {
      throw Usage(e.what());
    }
    usage_if(alpha < 0.0, "--alpha must be non-negative");
    usage_if(w_kind != "orbit" && w_kind != "snippet", "--kind must be orbit or snippet");
    usage_if(determinant != "leading" && determinant != "multipliers",
             "--determinant must be leading or multipliers");
    switch (m) {
      case WeightMethod::kLsw:
      case WeightMethod::kNnls:
      case WeightMethod::kConstrained:
        usage_if(system_path.empty(), "--system is required for this method");
        break;
      case WeightMethod::kUniform:
        usage_if(w_src.P == 0 && w_src.library.empty() && w_src.snippets.empty(),
                 "uniform weights need --P or a library");
        break;
      case WeightMethod::kPot:
        usage_if(w_src.library.empty(), "--library is required for pot weights");
        break;
      case WeightMethod::kMarkov:
        w_src.validate();
        usage_if(w_N < 1.0 || w_N != std::floor(w_N), "--N must be a positive integer");
        usage_if(w_dt <= 0.0 || w_s < 1, "--dt must be positive and --s at least 1");
        break;
    }
    action = [&, m] {
      WeightVector w;
      if (m == WeightMethod::kLsw || m == WeightMethod::kNnls || m == WeightMethod::kConstrained) {
        const CorrelationSystem sys = load_system(system_path);
        if (m == WeightMethod::kLsw) {
          w = solve_tikhonov(sys, alpha);
        } else if (m == WeightMethod::kNnls) {
          w = solve_nnls_normalized(sys);
          err << "nnls support " << w.support << " of " << w.size() << '\n';
        } else {
          ConstrainedOptions opt;
          opt.record_objective = !history.empty();
          const ConstrainedResult r = solve_constrained(sys, uniform_weights(sys.size()).w, opt);
          w = r.weights;
          if (!w.converged) err << "warning: constrained solve hit the iteration cap\n";
          if (!history.empty()) {
            emit(history, out, [&](std::ostream& o) {
              for (double v : r.objective) o << fmt17(v) << '\n';
            });
          }
        }
        w.kind = parse_kind(w_kind);
        w.provenance.s = static_cast<long long>(sys.seed);
        if (m != WeightMethod::kLsw) w.provenance.alpha = std::numeric_limits<double>::quiet_NaN();
      } else if (m == WeightMethod::kUniform) {
        std::size_t P = w_src.P;
        if (P == 0) P = w_src.library.empty() ? load_snippets(w_src.snippets).size()
                                              : load_library(w_src.library).orbits.size();
        w = uniform_weights(P);
        w.kind = w_src.snippets.empty() ? MeasureKind::kOrbit : MeasureKind::kSnippet;
      } else if (m == WeightMethod::kPot) {
        const OrbitLibrary lib = library_prefix(w_src.library, w_src.P);
        const int n = complete_truncation(lib, lib.orbits.size());
        PotOptions opt;
        opt.determinant = determinant == "leading" ? DeterminantMode::kLeadingExponent
                                                   : DeterminantMode::kMultipliers;
        w = pot_weights(CycleData::from_library(lib), n, opt);
      } else {
        const auto N = static_cast<std::size_t>(w_N);
        const std::vector<ReferenceMeasure> ms = w_src.load(common.params());
        w = markov_weights(ms, chaotic_for(common, N, w_dt, w_s), N);
        w.kind = w_src.kind();
        w.provenance.s = w_s;
      }
      w.provenance.r = std::max<long long>(w.provenance.r, 1);
      emit(w_out, out, [&](std::ostream& o) { save_weights(w, o); });
    };
  });

  // estimate
  auto* est = app.add_subcommand("estimate", "weighted averages of observables");
  std::string est_weights, observables = "all", est_out;
  MeasureSource est_src;
  est_src.add(est);
  est->add_option("--weights", est_weights, "weight file")->required();
  est->add_option("--observables", observables, "all or a comma list of basis tags");
  est->add_option("--out", est_out, "CSV output (default stdout)");
  est->callback([&] {
    est_src.validate();
    std::vector<Observable> obs;
    try {
      obs = parse_observables(observables);
    } catch (const Error& e) {
      throw Usage(e.what());
    }
    action = [&, obs] {
      const WeightVector w = load_weights(est_weights);
      const std::vector<ReferenceMeasure> ms = est_src.load(common.params());
      emit(est_out, out, [&](std::ostream& o) {
        o << "observable,estimate\n";
        for (const Observable& a : obs) o << a.tag << ',' << fmt17(estimate_average(w, averages_for(ms, a))) << '\n';
      });
    };
  });

  // lyapunov
  auto* lyap = app.add_subcommand("lyapunov", "Benettin spectrum, or a weighted orbit estimate");
  std::string ly_weights, ly_library;
  double t_total = 1e5, t_renorm = 1.0;
  lyap->add_option("--weights", ly_weights, "weight file (weighted estimate)");
  lyap->add_option("--library", ly_library, "orbit library (weighted estimate)");
  lyap->add_option("--t-total", t_total, "Benettin integration time");
  lyap->add_option("--t-renorm", t_renorm, "Benettin renormalization interval");
  lyap->callback([&] {
    usage_if(ly_weights.empty() != ly_library.empty(), "--weights and --library go together");
    usage_if(t_renorm <= 0.0 || t_total <= t_renorm, "need 0 < --t-renorm < --t-total");
    action = [&] {
      if (!ly_weights.empty()) {
        const WeightVector w = load_weights(ly_weights);
        const OrbitLibrary lib = load_library(ly_library);
        std::vector<double> lam;
        for (const PeriodicOrbit& o : lib.orbits) lam.push_back(o.floquet_exponent);
        out << fmt17(lyapunov_estimate(w, lam)) << '\n';
        return;
      }
      const auto e = lyapunov_benettin(common.params(), t_total, t_renorm,
                                       derive_seed(common.seed, "lyapunov", 0));
      out << fmt17(e[0]) << ' ' << fmt17(e[1]) << ' ' << fmt17(e[2]) << '\n';
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "full factorial error sweep");
  std::string config_path;
  bool paper = false;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string o_output, o_library, o_snippets, o_methods, o_kinds, o_P, o_N;
  int o_R = 0, o_S = 0, o_jobs = 0;
  sweep->add_option("--config", config_path, "key = value configuration file");
  sweep->add_flag("--paper-scale", paper, "S=R=256, N up to 1e6");
  sweep->add_option("--output", o_output, "output directory");
  sweep->add_option("--library", o_library, "orbit library file");
  sweep->add_option("--snippets", o_snippets, "snippet library file");
  sweep->add_option("--methods", o_methods, "comma list of methods");
  sweep->add_option("--kinds", o_kinds, "orbit,snippet");
  sweep->add_option("--P", o_P, "comma list of library sizes");
  sweep->add_option("--N", o_N, "comma list of sample counts");
  sweep->add_option("--R", o_R, "permutations");
  sweep->add_option("--S", o_S, "seeds");
  sweep->add_option("--jobs", o_jobs, "worker threads");
  ExperimentConfig cfg;
  sweep->callback([&] {
    try {
      cfg = paper ? ExperimentConfig::paper_scale() : ExperimentConfig::desk();
      if (!config_path.empty()) cfg.load(config_path);
      if (!o_output.empty()) cfg.set("output", o_output);
      if (!o_library.empty()) cfg.set("library", o_library);
      if (!o_snippets.empty()) cfg.set("snippets", o_snippets);
      if (!o_methods.empty()) cfg.set("methods", o_methods);
      if (!o_kinds.empty()) cfg.set("kinds", o_kinds);
      if (!o_P.empty()) cfg.set("P", o_P);
      if (!o_N.empty()) cfg.set("N", o_N);
      if (o_R > 0) cfg.R = o_R;
      if (o_S > 0) cfg.S = o_S;
      if (o_jobs > 0) cfg.jobs = o_jobs;
      if (app.count("--seed") > 0) cfg.seed = common.seed;
      if (app.count("--sigma") > 0) cfg.params.sigma = common.sigma;
      if (app.count("--rho") > 0) cfg.params.rho = common.rho;
      if (app.count("--beta") > 0) cfg.params.beta = common.beta;
      cfg.validate();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      throw Usage(e.what());
    }
    usage_if(cfg.library.empty(), "the sweep needs an orbit library (library = ... or --library)");
    action = [&] {
      const OrbitLibrary lib = load_library(cfg.library);
      const SweepResult r = run_sweep(cfg, lib, nullptr, [&](const std::string& msg) { err << msg << '\n'; });
      out << "wrote " << r.rows.size() << " rows to " << cfg.output << "/results.csv\n";
    };
  });

  // plot
  auto* plot = app.add_subcommand("plot", "SVG figures from sweep or scan outputs");
  std::string from, out_dir = ".", plot_scan, plot_weights, plot_library;
  plot->add_option("--from", from, "results.csv or summary.csv");
  plot->add_option("--out-dir", out_dir, "directory for the SVG files");
  plot->add_option("--theta-scan", plot_scan, "theta-scan CSV");
  plot->add_option("--weights", plot_weights, "weight file for a weight-vs-lambda scatter");
  plot->add_option("--library", plot_library, "orbit library matching --weights");
  plot->callback([&] {
    usage_if(from.empty() && plot_scan.empty() && plot_weights.empty(), "nothing to plot");
    usage_if(plot_weights.empty() != plot_library.empty(), "--weights and --library go together");
    action = [&] {
      std::filesystem::create_directories(out_dir);
      const std::filesystem::path dir(out_dir);
      if (!from.empty()) {
        std::ifstream in(from);
        if (!in) fail(ErrorCode::kIo, "cannot open " + from);
        std::string header;
        std::getline(in, header);
        in.seekg(0);
        std::vector<SummaryRow> summary;
        if (header.rfind("method,kind,P,r,", 0) == 0) {
          summary = summarize(read_results_csv(in));
          std::ofstream s(dir / "summary.csv");
          write_summary_csv(summary, s);
        } else {
          summary = read_summary_csv(in);
        }
        write_svg(error_vs_n_chart(summary), (dir / "error-vs-N.svg").string());
        write_svg(error_vs_p_chart(summary), (dir / "error-vs-P.svg").string());
      }
      if (!plot_scan.empty()) write_svg(theta_scan_chart(read_theta_scan(plot_scan)), (dir / "theta-scan.svg").string());
      if (!plot_weights.empty()) {
        write_svg(weight_vs_lambda_chart(load_weights(plot_weights), load_library(plot_library)),
                  (dir / "weight-vs-lambda.svg").string());
      }
      out << "wrote figures to " << out_dir << '\n';
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ERROR usage: " << e.what() << '\n';
    return 1;
  } catch (const Usage& e) {
    err << "ERROR usage: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "ERROR " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  }

  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    err << "ERROR " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "ERROR internal: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace lsw::cli
