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

#include "lsw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "lsw/error.hpp"
#include "lsw/kernel.hpp"
#include "lsw/observables.hpp"
#include "lsw/pot.hpp"
#include "lsw/random.hpp"
#include "lsw/textio.hpp"

namespace fs = std::filesystem;

namespace lsw {

using textio::fmt17;

// -- configuration ----------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& token) {
  const double v = textio::parse_double(token, 0);
  require(v >= 0.0 && v == std::floor(v) && v < 9.0e15, "'" + token + "' is not a count");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_counts(const std::string& value) {
  std::vector<std::size_t> out;
  for (const std::string& t : textio::split(value, ',')) out.push_back(parse_count(trim(t)));
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorCode::kPrecondition, "'" + v + "' is not a boolean");
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += f(v[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::desk() { return {}; }

ExperimentConfig ExperimentConfig::paper_scale() {
  ExperimentConfig c;
  c.R = 256;
  c.S = 256;
  c.N = {100, 1000, 10000, 100000, 1000000};
  c.lyapunov_time = 100000.0;
  return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  try {
    if (key == "methods") {
      methods.clear();
      for (const std::string& m : textio::split(value, ',')) methods.push_back(parse_method(trim(m)));
    } else if (key == "kinds") {
      kinds.clear();
      for (const std::string& k : textio::split(value, ',')) kinds.push_back(parse_kind(trim(k)));
    } else if (key == "P") {
      P = value.empty() || value == "complete" ? std::vector<std::size_t>{} : parse_counts(value);
    } else if (key == "R") {
      R = static_cast<int>(parse_count(value));
    } else if (key == "S") {
      S = static_cast<int>(parse_count(value));
    } else if (key == "N") {
      N = parse_counts(value);
    } else if (key == "dt") {
      dt = textio::parse_double(value, 0);
    } else if (key == "theta") {
      theta = textio::parse_double(value, 0);
    } else if (key == "alpha") {
      alpha = textio::parse_double(value, 0);
    } else if (key == "truth_seeds") {
      truth_seeds = static_cast<int>(parse_count(value));
    } else if (key == "truth_samples") {
      truth_samples = parse_count(value);
    } else if (key == "lyapunov_time") {
      lyapunov_time = textio::parse_double(value, 0);
    } else if (key == "lyapunov_renorm") {
      lyapunov_renorm = textio::parse_double(value, 0);
    } else if (key == "symmetric_truth") {
      symmetric_truth = parse_bool(value);
    } else if (key == "tol") {
      tol = textio::parse_double(value, 0);
    } else if (key == "library") {
      library = value;
    } else if (key == "snippets") {
      snippets = value;
    } else if (key == "output") {
      output = value;
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(parse_count(value));
    } else if (key == "jobs") {
      jobs = static_cast<int>(parse_count(value));
    } else if (key == "sigma") {
      params.sigma = textio::parse_double(value, 0);
    } else if (key == "rho") {
      params.rho = textio::parse_double(value, 0);
    } else if (key == "beta") {
      params.beta = textio::parse_double(value, 0);
    } else {
      fail(ErrorCode::kPrecondition, "unknown configuration key '" + key + "'");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) {
      fail(ErrorCode::kPrecondition, "bad value for '" + key + "': " + value);
    }
    throw;
  }
}

void ExperimentConfig::load(std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) textio::parse_error(line_no, "expected key = value");
    set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  load(in);
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  o << "methods = " << join(methods, [](WeightMethod m) { return std::string(method_name(m)); }) << '\n'
    << "kinds = " << join(kinds, [](MeasureKind k) { return std::string(kind_name(k)); }) << '\n'
    << "P = " << (P.empty() ? std::string("complete") : join(P, [](std::size_t v) { return std::to_string(v); })) << '\n'
    << "R = " << R << '\n'
    << "S = " << S << '\n'
    << "N = " << join(N, [](std::size_t v) { return std::to_string(v); }) << '\n'
    << "dt = " << fmt17(dt) << '\n'
    << "theta = " << fmt17(theta) << '\n'
    << "alpha = " << fmt17(alpha) << '\n'
    << "truth_seeds = " << truth_seeds << '\n'
    << "truth_samples = " << truth_samples << '\n'
    << "lyapunov_time = " << fmt17(lyapunov_time) << '\n'
    << "lyapunov_renorm = " << fmt17(lyapunov_renorm) << '\n'
    << "symmetric_truth = " << (symmetric_truth ? 1 : 0) << '\n'
    << "tol = " << fmt17(tol) << '\n'
    << "library = " << library << '\n'
    << "snippets = " << snippets << '\n'
    << "output = " << output << '\n'
    << "seed = " << seed << '\n'
    << "jobs = " << jobs << '\n'
    << "sigma = " << fmt17(params.sigma) << '\n'
    << "rho = " << fmt17(params.rho) << '\n'
    << "beta = " << fmt17(params.beta) << '\n';
  return o.str();
}

void ExperimentConfig::validate() const {
  params.validate();
  require(!methods.empty(), "no weighting methods selected");
  require(!kinds.empty(), "no reference kinds selected");
  for (MeasureKind k : kinds) {
    require(k != MeasureKind::kDiscrete, "sweeps use orbit or snippet references");
  }
  require(R >= 1, "R must be at least 1");
  require(S >= 1, "S must be at least 1");
  require(!N.empty(), "N list is empty");
  for (std::size_t i = 0; i < N.size(); ++i) {
    require(N[i] >= 1, "N values must be positive");
    require(i == 0 || N[i] >= N[i - 1], "N list must be non-decreasing");
  }
  for (std::size_t v : P) require(v >= 1, "P values must be positive");
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require(theta > 0.0 && std::isfinite(theta), "theta must be positive");
  require(alpha >= 0.0, "alpha must be non-negative");
  require(lyapunov_time > 0.0 && lyapunov_renorm > 0.0 && lyapunov_renorm < lyapunov_time,
          "need 0 < lyapunov_renorm < lyapunov_time");
  require(tol > 0.0, "tol must be positive");
}

std::size_t ExperimentConfig::effective_truth_samples() const {
  if (truth_samples > 0) return truth_samples;
  return N.empty() ? 0 : *std::max_element(N.begin(), N.end());
}

int ExperimentConfig::effective_jobs() const {
  if (jobs > 0) return jobs;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// -- ground truth -----------------------------------------------------------

MomentAccumulator::MomentAccumulator()
    : mean(basis().size(), 0.0), m2(basis().size(), 0.0) {}

void MomentAccumulator::add(const State& x) {
  ++n;
  const std::vector<Observable>& b = basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double v = b[i](x);
    const double d = v - mean[i];
    mean[i] += d / static_cast<double>(n);
    m2[i] += d * (v - mean[i]);
  }
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
  const double nt = na + nb;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double d = o.mean[i] - mean[i];
    mean[i] += d * nb / nt;
    m2[i] += o.m2[i] + d * d * na * nb / nt;
  }
  n += o.n;
}

const ObservableTruth& GroundTruth::at(const std::string& tag) const {
  for (const ObservableTruth& o : observables) {
    if (o.tag == tag) return o;
  }
  fail(ErrorCode::kPrecondition, "no ground truth for observable '" + tag + "'");
}

double GroundTruth::combined_standard_error(const std::map<std::string, double>& coefficients) const {
  const std::vector<Observable>& b = basis();
  std::vector<double> values;
  for (const std::vector<double>& m : seed_means) {
    double v = 0.0;
    for (const auto& [tag, c] : coefficients) {
      std::size_t i = 0;
      while (i < b.size() && b[i].tag != tag) ++i;
      require(i < b.size(), "unknown observable '" + tag + "'");
      v += c * m[i];
    }
    values.push_back(v);
  }
  require(values.size() >= 2, "standard errors need at least two seeds");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double k = static_cast<double>(values.size());
  return std::sqrt(ss / (k - 1.0) / k);
}

namespace {

MomentAccumulator truth_run(const Params& p, std::size_t N, double dt, std::uint64_t master,
                            int k, const IntegratorOptions& opt) {
  const Trajectory t = chaotic_samples(p, N, dt, derive_seed(master, "truth-seeds", static_cast<std::uint64_t>(k)), opt);
  MomentAccumulator acc;
  for (const State& x : t.samples) acc.add(x);
  return acc;
}

std::vector<double> truth_lyapunov(const Params& p, double t_total, double t_renorm,
                                   std::uint64_t master, const IntegratorOptions& opt) {
  const auto e = lyapunov_benettin(p, t_total, t_renorm, derive_seed(master, "truth-seeds", 1u << 20), opt);
  return {e[0], e[1], e[2]};
}

GroundTruth assemble_truth(const std::vector<MomentAccumulator>& runs, std::vector<double> spectrum) {
  GroundTruth g;
  MomentAccumulator pooled;
  for (const MomentAccumulator& r : runs) {
    pooled.merge(r);
    g.seed_means.push_back(r.mean);
  }
  g.samples_per_seed = runs.empty() ? 0 : runs.front().n;
  const std::vector<Observable>& b = basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    ObservableTruth o;
    o.tag = b[i].tag;
    o.mean = pooled.mean[i];
    o.variance = pooled.n > 1 ? pooled.m2[i] / static_cast<double>(pooled.n - 1) : 0.0;
    if (runs.size() >= 2) {
      double ss = 0.0;
      for (const MomentAccumulator& r : runs) ss += (r.mean[i] - o.mean) * (r.mean[i] - o.mean);
      const double k = static_cast<double>(runs.size());
      o.standard_error = std::sqrt(ss / (k - 1.0) / k);
    } else {
      o.standard_error = std::sqrt(o.variance / static_cast<double>(std::max<long long>(pooled.n, 1)));
    }
    g.observables.push_back(o);
  }
  g.lyapunov_spectrum = std::move(spectrum);
  g.lyapunov = g.lyapunov_spectrum.empty() ? 0.0 : g.lyapunov_spectrum[0];
  return g;
}

// Runs `count` tasks on `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next++;
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

GroundTruth reference_truth(const Params& p, int S, std::size_t N, double dt,
                            std::uint64_t master_seed, double lyapunov_time,
                            double lyapunov_renorm, int jobs, const IntegratorOptions& opt) {
  require(S >= 1, "need at least one truth seed");
  require(N >= 1, "need at least one sample per seed");
  std::vector<MomentAccumulator> runs(static_cast<std::size_t>(S));
  parallel_for(runs.size(), jobs, [&](std::size_t k) {
    runs[k] = truth_run(p, N, dt, master_seed, static_cast<int>(k) + 1, opt);
  });
  return assemble_truth(runs, truth_lyapunov(p, lyapunov_time, lyapunov_renorm, master_seed, opt));
}

double relative_error(double e_true, double e_hat, double variance) {
  require(variance >= 0.0, "variance must be non-negative");
  const double v = variance > 0.0 ? variance : 1.0;
  return std::abs(e_true - e_hat) / std::sqrt(v);
}

double max_error(const std::vector<ResultRow>& rows) {
  double worst = 0.0;
  for (const Observable& o : basis()) {
    const auto it = std::find_if(rows.begin(), rows.end(),
                                 [&](const ResultRow& r) { return r.observable == o.tag; });
    require(it != rows.end(), "missing observable '" + o.tag + "' for E_max");
    worst = std::max(worst, it->E_rel);
  }
  return worst;
}

std::vector<std::size_t> permutation(std::size_t P, int r, std::uint64_t master_seed) {
  require(r >= 1, "permutation index must be at least 1");
  std::vector<std::size_t> idx(P);
  for (std::size_t i = 0; i < P; ++i) idx[i] = i;
  if (r == 1) return idx;
  std::mt19937_64 rng(derive_seed(master_seed, "permutations", static_cast<std::uint64_t>(r)));
  for (std::size_t i = P; i > 1; --i) {
    const auto j = static_cast<std::size_t>(
        (static_cast<unsigned __int128>(rng()) * static_cast<unsigned __int128>(i)) >> 64);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

OrbitLibrary permuted_library(const OrbitLibrary& lib, int r, std::uint64_t master_seed) {
  const std::vector<std::size_t> idx = permutation(lib.orbits.size(), r, master_seed);
  OrbitLibrary out;
  for (std::size_t i : idx) out.orbits.push_back(lib.orbits[i]);
  out.ordering = r == 1 ? lib.ordering : "permutation r=" + std::to_string(r);
  return out;
}

// -- summaries --------------------------------------------------------------

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile of an empty set");
  require(q >= 0.0 && q <= 1.0, "quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double f = pos - static_cast<double>(lo);
  if (f == 0.0) return values[lo];
  return values[lo] + f * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<int, int, long long, long long, std::string>;
  std::map<Key, std::size_t> slot;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> values;
  auto push = [&](const ResultRow& r, const std::string& tag, double v) {
    const Key k{static_cast<int>(r.method), static_cast<int>(r.kind), r.P, r.N, tag};
    auto it = slot.find(k);
    if (it == slot.end()) {
      it = slot.emplace(k, out.size()).first;
      SummaryRow s;
      s.method = r.method;
      s.kind = r.kind;
      s.P = r.P;
      s.N = r.N;
      s.observable = tag;
      out.push_back(s);
      values.emplace_back();
    }
    values[it->second].push_back(v);
  };

  // E_max per (method, kind, P, r, s, N) group of consecutive rows.
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    const ResultRow& h = rows[i];
    while (j < rows.size() && rows[j].method == h.method && rows[j].kind == h.kind &&
           rows[j].P == h.P && rows[j].r == h.r && rows[j].s == h.s && rows[j].N == h.N) {
      ++j;
    }
    std::vector<ResultRow> group(rows.begin() + static_cast<long>(i), rows.begin() + static_cast<long>(j));
    for (const ResultRow& r : group) push(r, r.observable, r.E_rel);
    bool complete = true;
    for (const Observable& o : basis()) {
      complete = complete && std::any_of(group.begin(), group.end(),
                                         [&](const ResultRow& r) { return r.observable == o.tag; });
    }
    if (complete) push(h, "Emax", max_error(group));
    i = j;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::vector<double>& v = values[k];
    out[k].median = quantile(v, 0.5);
    out[k].q25 = quantile(v, 0.25);
    out[k].q75 = quantile(v, 0.75);
    double m = 0.0;
    for (double x : v) m += x;
    out[k].mean = m / static_cast<double>(v.size());
    out[k].count = v.size();
  }
  return out;
}

// -- CSV --------------------------------------------------------------------

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "method,kind,P,r,s,N,observable,E_true,E_hat,E_rel\n";
  for (const ResultRow& r : rows) {
    out << method_name(r.method) << ',' << kind_name(r.kind) << ',' << r.P << ',' << r.r << ','
        << r.s << ',' << r.N << ',' << r.observable << ',' << fmt17(r.E_true) << ','
        << fmt17(r.E_hat) << ',' << fmt17(r.E_rel) << '\n';
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "method,kind,P,N,observable,median_Erel,q25,q75\n";
  for (const SummaryRow& r : rows) {
    out << method_name(r.method) << ',' << kind_name(r.kind) << ',' << r.P << ',' << r.N << ','
        << r.observable << ',' << fmt17(r.median) << ',' << fmt17(r.q25) << ',' << fmt17(r.q75)
        << '\n';
  }
}

namespace {

std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& header) {
  std::string line;
  int line_no = 0;
  std::vector<std::vector<std::string>> out;
  const std::size_t columns = textio::split(header, ',').size();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != header) textio::parse_error(1, "unexpected CSV header '" + line + "'");
      continue;
    }
    std::vector<std::string> f = textio::split(line, ',');
    if (f.size() != columns) {
      textio::parse_error(line_no, "expected " + std::to_string(columns) + " columns");
    }
    out.push_back(std::move(f));
  }
  if (line_no == 0) textio::parse_error(1, "empty CSV file");
  return out;
}

}  // namespace

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  int line_no = 1;
  for (const auto& f : read_csv(in, "method,kind,P,r,s,N,observable,E_true,E_hat,E_rel")) {
    ++line_no;
    ResultRow r;
    r.method = parse_method(f[0]);
    r.kind = parse_kind(f[1]);
    r.P = textio::parse_int(f[2], line_no);
    r.r = textio::parse_int(f[3], line_no);
    r.s = textio::parse_int(f[4], line_no);
    r.N = textio::parse_int(f[5], line_no);
    r.observable = f[6];
    r.E_true = textio::parse_double(f[7], line_no);
    r.E_hat = textio::parse_double(f[8], line_no);
    r.E_rel = textio::parse_double(f[9], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::vector<SummaryRow> rows;
  int line_no = 1;
  for (const auto& f : read_csv(in, "method,kind,P,N,observable,median_Erel,q25,q75")) {
    ++line_no;
    SummaryRow r;
    r.method = parse_method(f[0]);
    r.kind = parse_kind(f[1]);
    r.P = textio::parse_int(f[2], line_no);
    r.N = textio::parse_int(f[3], line_no);
    r.observable = f[4];
    r.median = textio::parse_double(f[5], line_no);
    r.q25 = textio::parse_double(f[6], line_no);
    r.q75 = textio::parse_double(f[7], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

// -- sweep ------------------------------------------------------------------

namespace {

bool has_method(const ExperimentConfig& cfg, WeightMethod m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

bool needs_kernel(const ExperimentConfig& cfg) {
  return has_method(cfg, WeightMethod::kLsw) || has_method(cfg, WeightMethod::kNnls) ||
         has_method(cfg, WeightMethod::kConstrained);
}

// Everything a sweep needs about one reference kind.
struct KindData {
  MeasureKind kind;
  std::vector<ReferenceMeasure> measures;  // library order, P_max entries
  std::vector<std::vector<double>> averages;  // [measure][basis observable]
  std::vector<double> exponents;              // orbits only
  Eigen::MatrixXd A;
};

// Per-seed chaotic statistics at every checkpoint N.
struct SeedData {
  // [kind][checkpoint] kernel averages b over all P_max measures
  std::vector<std::vector<Eigen::VectorXd>> b;
  // [kind][r-1][P index][checkpoint] nearest-measure visit counts
  std::vector<std::vector<std::vector<std::vector<std::vector<long long>>>>> counts;
};

struct SweepPlan {
  const ExperimentConfig& cfg;
  std::vector<std::size_t> P_list;
  std::size_t P_max = 0;
  std::vector<std::size_t> N_list;  // unique, ascending
  std::vector<std::vector<std::size_t>> perms;  // [r-1]
  std::vector<KindData> kinds;
  bool kernel = false;
  bool markov = false;
};

SeedData seed_pass(const SweepPlan& plan, int s) {
  const ExperimentConfig& cfg = plan.cfg;
  const std::size_t n_max = plan.N_list.back();
  IntegratorOptions opt;
  opt.tol = Tolerance{cfg.tol, cfg.tol};
  const Trajectory traj = chaotic_samples(cfg.params, n_max, cfg.dt,
                                          derive_seed(cfg.seed, "chaotic", static_cast<std::uint64_t>(s)), opt);
  const KernelConfig kc{cfg.theta, KernelMode::kGaussian};
  const std::size_t nk = plan.kinds.size();
  const std::size_t R = plan.perms.size();
  const std::size_t nP = plan.P_list.size();
  const std::size_t nN = plan.N_list.size();

  SeedData out;
  out.b.assign(nk, std::vector<Eigen::VectorXd>(nN));
  out.counts.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const MeasureCloud cloud(plan.kinds[k].measures);
    const std::size_t P = plan.P_max;
    std::vector<double> sums(P, 0.0), kern(P), d2(P);
    std::vector<std::vector<std::vector<long long>>> running(
        R, std::vector<std::vector<long long>>(nP));
    if (plan.markov) {
      out.counts[k].assign(R, std::vector<std::vector<std::vector<long long>>>(
                                  nP, std::vector<std::vector<long long>>(nN)));
      for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t pi = 0; pi < nP; ++pi) running[r][pi].assign(plan.P_list[pi], 0);
      }
    }
    std::size_t checkpoint = 0;
    for (std::size_t n = 0; n < n_max; ++n) {
      cloud.evaluate(traj.samples[n], kc, plan.kernel ? kern.data() : nullptr,
                     plan.markov ? d2.data() : nullptr);
      if (plan.kernel) {
        for (std::size_t q = 0; q < P; ++q) sums[q] += kern[q];
      }
      if (plan.markov) {
        for (std::size_t r = 0; r < R; ++r) {
          const std::vector<std::size_t>& perm = plan.perms[r];
          std::size_t best = 0;
          double best_d2 = d2[perm[0]];
          std::size_t pi = 0;
          for (std::size_t pos = 0; pos < plan.P_max && pi < nP; ++pos) {
            if (d2[perm[pos]] < best_d2) {
              best_d2 = d2[perm[pos]];
              best = pos;
            }
            while (pi < nP && plan.P_list[pi] == pos + 1) ++running[r][pi++][best];
          }
        }
      }
      while (checkpoint < nN && plan.N_list[checkpoint] == n + 1) {
        Eigen::VectorXd b(static_cast<Eigen::Index>(P));
        for (std::size_t q = 0; q < P; ++q) {
          b[static_cast<Eigen::Index>(q)] = plan.kernel ? sums[q] / static_cast<double>(n + 1) : 0.0;
        }
        out.b[k][checkpoint] = b;
        if (plan.markov) {
          for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t pi = 0; pi < nP; ++pi) out.counts[k][r][pi][checkpoint] = running[r][pi];
          }
        }
        ++checkpoint;
      }
    }
  }
  return out;
}

void write_seed_fragment(const SweepPlan& plan, const SeedData& d, int s, std::ostream& out) {
  out << "FRAGMENT v1 seed=" << s << '\n';
  for (std::size_t k = 0; k < plan.kinds.size(); ++k) {
    const std::string_view kn = kind_name(plan.kinds[k].kind);
    for (std::size_t c = 0; c < plan.N_list.size(); ++c) {
      out << "b " << kn << ' ' << plan.N_list[c];
      for (Eigen::Index q = 0; q < d.b[k][c].size(); ++q) out << ' ' << fmt17(d.b[k][c][q]);
      out << '\n';
    }
    if (!plan.markov) continue;
    for (std::size_t r = 0; r < plan.perms.size(); ++r) {
      for (std::size_t pi = 0; pi < plan.P_list.size(); ++pi) {
        for (std::size_t c = 0; c < plan.N_list.size(); ++c) {
          out << "m " << kn << ' ' << r + 1 << ' ' << plan.P_list[pi] << ' ' << plan.N_list[c];
          for (long long v : d.counts[k][r][pi][c]) out << ' ' << v;
          out << '\n';
        }
      }
    }
  }
}

SeedData read_seed_fragment(const SweepPlan& plan, std::istream& in) {
  const std::size_t nk = plan.kinds.size();
  const std::size_t nN = plan.N_list.size();
  const std::size_t nP = plan.P_list.size();
  const std::size_t R = plan.perms.size();
  SeedData d;
  d.b.assign(nk, std::vector<Eigen::VectorXd>(nN));
  d.counts.assign(nk, std::vector<std::vector<std::vector<std::vector<long long>>>>(
                          plan.markov ? R : 0, std::vector<std::vector<std::vector<long long>>>(
                                                   nP, std::vector<std::vector<long long>>(nN))));
  std::string line;
  int line_no = 0;
  std::size_t seen_b = 0, seen_m = 0;
  auto kind_index = [&](const std::string& name, int ln) {
    for (std::size_t k = 0; k < nk; ++k) {
      if (kind_name(plan.kinds[k].kind) == name) return k;
    }
    textio::parse_error(ln, "unexpected kind " + name);
  };
  auto checkpoint_index = [&](const std::string& tok, int ln) {
    const auto N = static_cast<std::size_t>(textio::parse_int(tok, ln));
    const auto it = std::find(plan.N_list.begin(), plan.N_list.end(), N);
    if (it == plan.N_list.end()) textio::parse_error(ln, "unexpected N");
    return static_cast<std::size_t>(it - plan.N_list.begin());
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = textio::split_ws(line);
    if (t.empty()) continue;
    if (line_no == 1) {
      textio::expect_header(t, "FRAGMENT", "v1", line_no);
      continue;
    }
    if (t[0] == "b") {
      if (t.size() != 3 + plan.P_max) textio::parse_error(line_no, "wrong b length");
      const std::size_t k = kind_index(t[1], line_no);
      const std::size_t c = checkpoint_index(t[2], line_no);
      Eigen::VectorXd b(static_cast<Eigen::Index>(plan.P_max));
      for (std::size_t q = 0; q < plan.P_max; ++q) {
        b[static_cast<Eigen::Index>(q)] = textio::parse_double(t[3 + q], line_no);
      }
      d.b[k][c] = b;
      ++seen_b;
    } else if (t[0] == "m" && plan.markov) {
      if (t.size() < 5) textio::parse_error(line_no, "short m line");
      const std::size_t k = kind_index(t[1], line_no);
      const auto r = static_cast<std::size_t>(textio::parse_int(t[2], line_no));
      const auto P = static_cast<std::size_t>(textio::parse_int(t[3], line_no));
      const auto pit = std::find(plan.P_list.begin(), plan.P_list.end(), P);
      if (r < 1 || r > R || pit == plan.P_list.end() || t.size() != 5 + P) {
        textio::parse_error(line_no, "malformed m line");
      }
      const std::size_t c = checkpoint_index(t[4], line_no);
      std::vector<long long> v(P);
      for (std::size_t q = 0; q < P; ++q) v[q] = textio::parse_int(t[5 + q], line_no);
      d.counts[k][r - 1][static_cast<std::size_t>(pit - plan.P_list.begin())][c] = std::move(v);
      ++seen_m;
    } else {
      textio::parse_error(line_no, "unexpected record '" + t[0] + "'");
    }
  }
  if (seen_b != nk * nN || (plan.markov && seen_m != nk * R * nP * nN)) {
    textio::parse_error(line_no, "incomplete fragment");
  }
  return d;
}

void write_truth_fragment(const MomentAccumulator& acc, std::ostream& out) {
  out << "FRAGMENT v1 truth n=" << acc.n << '\n';
  for (std::size_t i = 0; i < basis().size(); ++i) {
    out << basis()[i].tag << ' ' << fmt17(acc.mean[i]) << ' ' << fmt17(acc.m2[i]) << '\n';
  }
}

MomentAccumulator read_truth_fragment(std::istream& in) {
  MomentAccumulator acc;
  std::string line;
  int line_no = 0;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = textio::split_ws(line);
    if (t.empty()) continue;
    if (line_no == 1) {
      textio::expect_header(t, "FRAGMENT", "v1", line_no);
      if (t.size() != 4 || t[3].rfind("n=", 0) != 0) textio::parse_error(1, "bad truth header");
      acc.n = textio::parse_int(t[3].substr(2), 1);
      continue;
    }
    if (t.size() != 3 || i >= basis().size() || t[0] != basis()[i].tag) {
      textio::parse_error(line_no, "bad truth record");
    }
    acc.mean[i] = textio::parse_double(t[1], line_no);
    acc.m2[i] = textio::parse_double(t[2], line_no);
    ++i;
  }
  if (i != basis().size()) textio::parse_error(line_no, "incomplete truth fragment");
  return acc;
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out) fail(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
  return buf;
}

// Fields of the config that determine the numbers in the tables.
std::string fingerprint(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.jobs = 0;
  c.output.clear();
  return c.to_text();
}

class SweepLog {
 public:
  SweepLog(const fs::path& path, ProgressFn progress)
      : out_(path, std::ios::app), progress_(std::move(progress)) {}
  void operator()(const std::string& msg) {
    std::lock_guard<std::mutex> lock(mutex_);
    out_ << timestamp() << ' ' << msg << '\n';
    out_.flush();
    if (progress_) progress_(msg);
  }

 private:
  std::ofstream out_;
  ProgressFn progress_;
  std::mutex mutex_;
};

std::vector<double> row_of(const std::vector<std::vector<double>>& table, const std::vector<std::size_t>& idx,
                           std::size_t column) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(table[i][column]);
  return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const OrbitLibrary& lib,
                      const std::vector<Snippet>* snippets, const ProgressFn& progress) {
  cfg.validate();
  require(!lib.orbits.empty(), "orbit library is empty");

  SweepPlan plan{cfg, {}, 0, {}, {}, {}, false, false};
  plan.kernel = needs_kernel(cfg);
  plan.markov = has_method(cfg, WeightMethod::kMarkov);
  if (cfg.P.empty()) {
    const std::vector<long long> sizes = complete_library_sizes(
        static_cast<int>(std::max<std::size_t>(2, lib.orbits.back().symbol.size())));
    for (long long v : sizes) {
      if (static_cast<std::size_t>(v) <= lib.orbits.size()) plan.P_list.push_back(static_cast<std::size_t>(v));
    }
    if (plan.P_list.empty() || plan.P_list.back() != lib.orbits.size()) plan.P_list.push_back(lib.orbits.size());
  } else {
    plan.P_list = cfg.P;
  }
  std::sort(plan.P_list.begin(), plan.P_list.end());
  plan.P_list.erase(std::unique(plan.P_list.begin(), plan.P_list.end()), plan.P_list.end());
  plan.P_max = plan.P_list.back();
  if (plan.P_max > lib.orbits.size()) {
    fail(ErrorCode::kPrecondition, "P=" + std::to_string(plan.P_max) + " exceeds the library size " +
                                       std::to_string(lib.orbits.size()));
  }
  plan.N_list = cfg.N;
  plan.N_list.erase(std::unique(plan.N_list.begin(), plan.N_list.end()), plan.N_list.end());
  for (int r = 1; r <= cfg.R; ++r) plan.perms.push_back(permutation(plan.P_max, r, cfg.seed));

  const fs::path dir(cfg.output);
  fs::create_directories(dir / "fragments");
  const std::string print = fingerprint(cfg);
  if (fs::exists(dir / "config.txt")) {
    if (read_file(dir / "config.txt") != print) {
      fail(ErrorCode::kPrecondition, "output directory " + cfg.output +
                                         " holds a different sweep; use a fresh directory");
    }
  } else {
    write_atomically(dir / "config.txt", print);
  }
  SweepLog log(dir / "sweep.log", progress);
  log("sweep start: P_max=" + std::to_string(plan.P_max) + " R=" + std::to_string(cfg.R) +
      " S=" + std::to_string(cfg.S));

  {
    std::size_t collisions = 0;
    for (std::size_t a = 1; a < plan.perms.size(); ++a) {
      for (std::size_t b = a + 1; b < plan.perms.size(); ++b) collisions += plan.perms[a] == plan.perms[b];
    }
    log("permutation collisions among r>=2: " + std::to_string(collisions));
  }

  // Reference measures per kind.
  OrbitLibrary prefix;
  prefix.orbits.assign(lib.orbits.begin(), lib.orbits.begin() + static_cast<long>(plan.P_max));
  std::vector<Snippet> snips;
  if (std::find(cfg.kinds.begin(), cfg.kinds.end(), MeasureKind::kSnippet) != cfg.kinds.end()) {
    if (snippets != nullptr) {
      snips = *snippets;
    } else if (!cfg.snippets.empty()) {
      snips = load_snippets(cfg.snippets);
    } else {
      double total = 0.0;
      for (const PeriodicOrbit& o : prefix.orbits) total += o.period;
      snips = sample_snippets(cfg.params, total, static_cast<int>(plan.P_max),
                              derive_seed(cfg.seed, "snippets", 0));
    }
    require(snips.size() >= plan.P_max, "need at least P_max snippets");
    snips.resize(plan.P_max);
  }
  const KernelConfig kc{cfg.theta, KernelMode::kGaussian};
  for (MeasureKind kind : cfg.kinds) {
    KindData kd;
    kd.kind = kind;
    kd.measures = kind == MeasureKind::kOrbit ? orbit_measures(prefix, cfg.params)
                                              : snippet_measures(snips);
    for (const ReferenceMeasure& m : kd.measures) {
      std::vector<double> row;
      for (const Observable& o : basis()) row.push_back(measure_average(m, o.fn));
      kd.averages.push_back(std::move(row));
    }
    if (kind == MeasureKind::kOrbit) {
      for (const PeriodicOrbit& o : prefix.orbits) kd.exponents.push_back(o.floquet_exponent);
    }
    if (plan.kernel) kd.A = correlation_matrix(kd.measures, kc);
    plan.kinds.push_back(std::move(kd));
  }

  // Expensive units: truth runs, the Lyapunov run, chaotic seed passes.
  const int S_truth = cfg.effective_truth_seeds();
  const std::size_t N_truth = cfg.effective_truth_samples();
  std::vector<std::string> units;
  for (int k = 1; k <= S_truth; ++k) units.push_back("truth-" + std::to_string(k));
  units.push_back("lyapunov");
  for (int s = 1; s <= cfg.S; ++s) units.push_back("seed-" + std::to_string(s));

  std::set<std::string> done;
  {
    std::ifstream in(dir / "progress.log");
    std::string line;
    while (std::getline(in, line)) {
      const auto t = textio::split_ws(line);
      if (t.size() == 2 && t[0] == "done" && fs::exists(dir / "fragments" / (t[1] + ".txt"))) done.insert(t[1]);
    }
  }
  std::mutex progress_mutex;
  std::ofstream progress_log(dir / "progress.log", std::ios::app);
  IntegratorOptions opt;
  opt.tol = Tolerance{cfg.tol, cfg.tol};

  parallel_for(units.size(), cfg.effective_jobs(), [&](std::size_t u) {
    const std::string& name = units[u];
    if (done.count(name)) return;
    std::ostringstream text;
    if (name.rfind("truth-", 0) == 0) {
      const int k = std::stoi(name.substr(6));
      write_truth_fragment(truth_run(cfg.params, N_truth, cfg.dt, cfg.seed, k, opt), text);
    } else if (name == "lyapunov") {
      const auto e = truth_lyapunov(cfg.params, cfg.lyapunov_time, cfg.lyapunov_renorm, cfg.seed, opt);
      text << "FRAGMENT v1 lyapunov\n" << fmt17(e[0]) << ' ' << fmt17(e[1]) << ' ' << fmt17(e[2]) << '\n';
    } else {
      const int s = std::stoi(name.substr(5));
      write_seed_fragment(plan, seed_pass(plan, s), s, text);
    }
    write_atomically(dir / "fragments" / (name + ".txt"), text.str());
    std::lock_guard<std::mutex> lock(progress_mutex);
    progress_log << "done " << name << '\n';
    progress_log.flush();
    log("finished " + name);
  });

  // Everything below reads the fragments back, so fresh and resumed runs
  // follow the same path.
  std::vector<MomentAccumulator> runs;
  for (int k = 1; k <= S_truth; ++k) {
    std::istringstream in(read_file(dir / "fragments" / ("truth-" + std::to_string(k) + ".txt")));
    runs.push_back(read_truth_fragment(in));
  }
  std::vector<double> spectrum(3);
  {
    std::istringstream in(read_file(dir / "fragments" / "lyapunov.txt"));
    std::string header;
    std::getline(in, header);
    std::string a, b, c;
    in >> a >> b >> c;
    spectrum = {textio::parse_double(a, 2), textio::parse_double(b, 2), textio::parse_double(c, 2)};
  }
  SweepResult result;
  result.truth = assemble_truth(runs, spectrum);
  std::vector<SeedData> seeds;
  for (int s = 1; s <= cfg.S; ++s) {
    std::istringstream in(read_file(dir / "fragments" / ("seed-" + std::to_string(s) + ".txt")));
    seeds.push_back(read_seed_fragment(plan, in));
  }

  // Truth and variance per basis observable.
  std::vector<double> e_true, var;
  for (const ObservableTruth& o : result.truth.observables) {
    double m = o.mean;
    if (cfg.symmetric_truth) {
      if (is_odd_under_mirror(o.tag)) m = 0.0;
      if (o.tag == "1") m = 1.0;
    }
    e_true.push_back(m);
    var.push_back(o.variance);
  }

  // Cell groups: (kind, method, P index, r); each yields rows for all s, N.
  struct Group {
    std::size_t k;
    WeightMethod method;
    std::size_t pi;
    int r;
  };
  std::vector<Group> groups;
  for (std::size_t k = 0; k < plan.kinds.size(); ++k) {
    for (WeightMethod m : cfg.methods) {
      for (std::size_t pi = 0; pi < plan.P_list.size(); ++pi) {
        for (int r = 1; r <= cfg.R; ++r) {
          if (m == WeightMethod::kPot && r > 1) continue;
          groups.push_back({k, m, pi, r});
        }
      }
    }
  }
  std::vector<std::vector<ResultRow>> group_rows(groups.size());
  std::vector<std::vector<CellRecord>> group_cells(groups.size());

  parallel_for(groups.size(), cfg.effective_jobs(), [&](std::size_t g) {
    const Group& G = groups[g];
    const KindData& kd = plan.kinds[G.k];
    const std::size_t P = plan.P_list[G.pi];
    const std::vector<std::size_t> idx(plan.perms[static_cast<std::size_t>(G.r - 1)].begin(),
                                       plan.perms[static_cast<std::size_t>(G.r - 1)].begin() + static_cast<long>(P));
    const bool per_seed = G.method != WeightMethod::kUniform && G.method != WeightMethod::kPot;
    const int s_count = per_seed ? cfg.S : 1;

    auto emit = [&](const WeightVector& w, int s, std::size_t N) {
      CellRecord cell{G.method, kd.kind, static_cast<long long>(P), G.r, s, static_cast<long long>(N),
                      w.total(), w.support, w.converged, {}};
      group_cells[g].push_back(cell);
      for (std::size_t i = 0; i < basis().size(); ++i) {
        ResultRow row{G.method, kd.kind, static_cast<long long>(P), G.r, s, static_cast<long long>(N),
                      basis()[i].tag, e_true[i], 0.0, 0.0};
        row.E_hat = estimate_average(w.w, row_of(kd.averages, idx, i));
        row.E_rel = relative_error(row.E_true, row.E_hat, var[i]);
        group_rows[g].push_back(std::move(row));
      }
      if (kd.kind == MeasureKind::kOrbit) {
        std::vector<double> lam;
        for (std::size_t i : idx) lam.push_back(kd.exponents[i]);
        ResultRow row{G.method, kd.kind, static_cast<long long>(P), G.r, s, static_cast<long long>(N),
                      "lyapunov", result.truth.lyapunov, estimate_average(w.w, lam), 0.0};
        row.E_rel = relative_error(row.E_true, row.E_hat, 1.0);
        group_rows[g].push_back(std::move(row));
      }
    };
    auto skip = [&](int s, std::size_t N, const std::string& why) {
      CellRecord cell{G.method, kd.kind, static_cast<long long>(P), G.r, s, static_cast<long long>(N),
                      0.0, 0, false, why};
      group_cells[g].push_back(cell);
    };

    // Weights that do not depend on the chaotic data.
    WeightVector fixed;
    std::string fixed_error;
    if (G.method == WeightMethod::kUniform) {
      fixed = uniform_weights(P);
    } else if (G.method == WeightMethod::kPot) {
      try {
        if (kd.kind != MeasureKind::kOrbit) {
          fail(ErrorCode::kUnsupported, "POT weights need periodic orbits");
        }
        OrbitLibrary sub;
        for (std::size_t i : idx) sub.orbits.push_back(prefix.orbits[i]);
        const int n = complete_truncation(sub, P);
        fixed = pot_weights(CycleData::from_library(sub), n);
      } catch (const Error& e) {
        fixed_error = e.what();
      }
    }

    for (int s = 1; s <= s_count; ++s) {
      for (std::size_t c = 0; c < plan.N_list.size(); ++c) {
        const std::size_t N = plan.N_list[c];
        if (!per_seed) {
          if (fixed_error.empty()) {
            emit(fixed, s, N);
          } else {
            skip(s, N, fixed_error);
          }
          continue;
        }
        try {
          WeightVector w;
          if (G.method == WeightMethod::kMarkov) {
            w = markov_from_counts(seeds[static_cast<std::size_t>(s - 1)]
                                       .counts[G.k][static_cast<std::size_t>(G.r - 1)][G.pi][c]);
          } else {
            CorrelationSystem sys;
            sys.A.resize(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
            sys.b.resize(static_cast<Eigen::Index>(P));
            const Eigen::VectorXd& b = seeds[static_cast<std::size_t>(s - 1)].b[G.k][c];
            for (std::size_t i = 0; i < P; ++i) {
              sys.b[static_cast<Eigen::Index>(i)] = b[static_cast<Eigen::Index>(idx[i])];
              for (std::size_t j = 0; j < P; ++j) {
                sys.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    kd.A(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
              }
            }
            sys.theta = cfg.theta;
            sys.N = static_cast<long long>(N);
            if (G.method == WeightMethod::kLsw) {
              w = solve_tikhonov(sys, cfg.alpha);
            } else if (G.method == WeightMethod::kNnls) {
              w = solve_nnls_normalized(sys);
            } else {
              w = solve_constrained(sys, uniform_weights(P).w).weights;
            }
          }
          emit(w, s, N);
        } catch (const Error& e) {
          skip(s, N, e.what());
        }
      }
    }
  });

  for (std::size_t g = 0; g < groups.size(); ++g) {
    result.rows.insert(result.rows.end(), group_rows[g].begin(), group_rows[g].end());
    result.cells.insert(result.cells.end(), group_cells[g].begin(), group_cells[g].end());
  }
  result.summary = summarize(result.rows);

  {
    std::ostringstream o;
    write_results_csv(result.rows, o);
    write_atomically(dir / "results.csv", o.str());
  }
  {
    std::ostringstream o;
    write_summary_csv(result.summary, o);
    write_atomically(dir / "summary.csv", o.str());
  }
  {
    std::ostringstream o;
    o << "method,kind,P,N,observable,mean_Erel,count\n";
    for (const SummaryRow& r : result.summary) {
      o << method_name(r.method) << ',' << kind_name(r.kind) << ',' << r.P << ',' << r.N << ','
        << r.observable << ',' << fmt17(r.mean) << ',' << r.count << '\n';
    }
    write_atomically(dir / "summary_means.csv", o.str());
  }
  {
    std::ostringstream o;
    o << "method,kind,P,r,s,N,weight_sum,support,converged,skipped\n";
    for (const CellRecord& c : result.cells) {
      o << method_name(c.method) << ',' << kind_name(c.kind) << ',' << c.P << ',' << c.r << ','
        << c.s << ',' << c.N << ',' << fmt17(c.weight_sum) << ',' << c.support << ','
        << (c.converged ? 1 : 0) << ',' << c.skipped << '\n';
    }
    write_atomically(dir / "cells.csv", o.str());
  }
  {
    std::ostringstream o;
    o << "observable,mean,variance,standard_error\n";
    for (const ObservableTruth& t : result.truth.observables) {
      o << t.tag << ',' << fmt17(t.mean) << ',' << fmt17(t.variance) << ',' << fmt17(t.standard_error) << '\n';
    }
    o << "lyapunov," << fmt17(result.truth.lyapunov) << ",,\n";
    write_atomically(dir / "truth.csv", o.str());
  }
  log("sweep complete: " + std::to_string(result.rows.size()) + " rows");
  return result;
}

}  // namespace lsw
