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

#include "lsw/weights.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "lsw/error.hpp"
#include "lsw/kdtree.hpp"
#include "lsw/textio.hpp"

namespace lsw {

std::string_view method_name(WeightMethod m) {
  switch (m) {
    case WeightMethod::kLsw: return "lsw";
    case WeightMethod::kNnls: return "nnls";
    case WeightMethod::kConstrained: return "constrained";
    case WeightMethod::kMarkov: return "markov";
    case WeightMethod::kUniform: return "uniform";
    case WeightMethod::kPot: return "pot";
  }
  return "unknown";
}

WeightMethod parse_method(std::string_view name) {
  for (WeightMethod m : {WeightMethod::kLsw, WeightMethod::kNnls, WeightMethod::kConstrained,
                         WeightMethod::kMarkov, WeightMethod::kUniform, WeightMethod::kPot}) {
    if (method_name(m) == name) return m;
  }
  fail(ErrorCode::kPrecondition, "unknown weighting method '" + std::string(name) + "'");
}

double WeightVector::total() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) s += w[i];
  return s;
}

namespace {

double ordered_sum(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

}  // namespace

void normalize_exact(Eigen::VectorXd& w) {
  const double s = ordered_sum(w);
  require(s != 0.0 && std::isfinite(s), "cannot normalize weights with zero sum");
  w /= s;
  // Absorb the residue in the last nonzero entry: when the preceding partial
  // sum is at least 1/2, 1 - sum is exact (Sterbenz) and so is the final add.
  Eigen::Index last = w.size() - 1;
  while (last > 0 && w[last] == 0.0) --last;
  double head = 0.0;
  for (Eigen::Index i = 0; i < last; ++i) head += w[i];
  w[last] = 1.0 - head;
  for (int k = 0; k < 64; ++k) {
    const double t = ordered_sum(w);
    if (t == 1.0) return;
    w[last] = std::nextafter(w[last], t < 1.0 ? 2.0 : -2.0);
  }
}

WeightVector solve_tikhonov(const CorrelationSystem& sys, double alpha) {
  require(alpha >= 0.0, "alpha must be non-negative");
  require(sys.A.rows() == sys.b.size() && sys.A.cols() == sys.b.size(),
          "system dimensions disagree");
  const auto P = sys.b.size();
  const Eigen::MatrixXd M = sys.A + alpha * Eigen::MatrixXd::Identity(P, P);
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kSingularSystem, "A + alpha I is not positive definite; increase alpha");
  }
  Eigen::VectorXd w = llt.solve(sys.b);
  w += llt.solve(sys.b - M * w);
  if (!w.allFinite()) fail(ErrorCode::kSingularSystem, "Tikhonov solve produced non-finite weights");

  WeightVector out;
  out.w = w;
  out.method = WeightMethod::kLsw;
  out.provenance.P = P;
  out.provenance.N = sys.N;
  out.provenance.theta = sys.theta;
  out.provenance.alpha = alpha;
  out.support = (w.array() != 0.0).count();
  return out;
}

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                int max_iterations, double tol) {
  require(A.rows() == b.size(), "nnls: dimension mismatch");
  const Eigen::Index n = A.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);
  if (tol < 0.0) {
    tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().colwise().sum().maxCoeff() *
          static_cast<double>(std::max(A.rows(), n));
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd dual = A.transpose() * (b - A * x);

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    z.setZero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zp[static_cast<Eigen::Index>(k)];
  };

  int iter = 0;
  for (;;) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && dual[j] > best) {
        best = dual[j];
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = true;

    Eigen::VectorXd z;
    for (;;) {
      if (++iter > max_iterations) {
        fail(ErrorCode::kNoConvergence, "nnls exceeded its iteration budget");
      }
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
      }
      if (feasible) break;
      double step = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          step = std::min(step, x[j] / (x[j] - z[j]));
        }
      }
      x += step * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && std::abs(x[j]) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
    x = z;
    dual = A.transpose() * (b - A * x);
  }
  return {x, dual, iter};
}

WeightVector solve_nnls_normalized(const CorrelationSystem& sys) {
  const NnlsResult r = nnls(sys.A, sys.b);
  WeightVector out;
  out.method = WeightMethod::kNnls;
  out.raw = r.x;
  out.iterations = r.iterations;
  out.support = (r.x.array() > 0.0).count();
  if (out.support == 0) fail(ErrorCode::kDegenerateSolution, "nnls returned the zero vector");
  out.w = r.x;
  normalize_exact(out.w);
  for (Eigen::Index i = 0; i < out.w.size(); ++i) {
    if (r.x[i] == 0.0) out.w[i] = 0.0;
  }
  out.provenance.P = sys.b.size();
  out.provenance.N = sys.N;
  out.provenance.theta = sys.theta;
  return out;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  require(n >= 1, "cannot project an empty vector");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += u[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - candidate > 0.0) shift = candidate;
  }
  return (v.array() - shift).max(0.0).matrix();
}

ConstrainedResult solve_constrained(const CorrelationSystem& sys,
                                    const Eigen::VectorXd& w0,
                                    const ConstrainedOptions& opt) {
  const Eigen::Index P = sys.b.size();
  require(w0.size() == P, "initial point has the wrong length");
  require((w0.array() >= -1e-12).all() && std::abs(w0.sum() - 1.0) < 1e-9,
          "initial point must lie on the probability simplex");
  const Eigen::MatrixXd G = sys.A.transpose() * sys.A;
  const Eigen::VectorXd c = sys.A.transpose() * sys.b;
  const double bb = sys.b.squaredNorm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const double lipschitz = 2.0 * std::max(es.eigenvalues().maxCoeff(), 1e-300);
  auto objective = [&](const Eigen::VectorXd& w) {
    return std::max(w.dot(G * w) - 2.0 * c.dot(w) + bb, 0.0);
  };

  ConstrainedResult out;
  Eigen::VectorXd w = project_to_simplex(w0);
  double value = objective(w);
  if (opt.record_objective) out.objective.push_back(value);
  bool converged = false;
  long long it = 0;
  for (; it < opt.max_iterations; ++it) {
    const Eigen::VectorXd grad = 2.0 * (G * w - c);
    const Eigen::VectorXd next = project_to_simplex(w - grad / lipschitz);
    const double pg = lipschitz * (next - w).norm();
    const double next_value = objective(next);
    // a 1/L step never increases V; guard against round-off at the floor
    if (next_value <= value) {
      w = next;
      value = next_value;
    }
    if (opt.record_objective) out.objective.push_back(value);
    if (pg < opt.tol) {
      converged = true;
      break;
    }
  }
  out.weights.w = w;
  out.weights.method = WeightMethod::kConstrained;
  out.weights.converged = converged;
  out.weights.iterations = it;
  out.weights.support = (w.array() > 0.0).count();
  out.weights.provenance.P = P;
  out.weights.provenance.N = sys.N;
  out.weights.provenance.theta = sys.theta;
  normalize_exact(out.weights.w);
  return out;
}

WeightVector markov_from_counts(const std::vector<long long>& counts) {
  require(!counts.empty(), "need at least one measure");
  long long total = 0;
  for (long long c : counts) {
    require(c >= 0, "visit counts must be non-negative");
    total += c;
  }
  require(total > 0, "need at least one chaotic sample");
  WeightVector out;
  out.method = WeightMethod::kMarkov;
  out.w.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t p = 0; p < counts.size(); ++p) {
    out.w[static_cast<Eigen::Index>(p)] = static_cast<double>(counts[p]) / static_cast<double>(total);
  }
  normalize_exact(out.w);
  out.support = (out.w.array() > 0.0).count();
  out.provenance.P = static_cast<long long>(counts.size());
  out.provenance.N = total;
  return out;
}

WeightVector markov_from_labels(const std::vector<int>& labels, std::size_t P) {
  require(P >= 1, "need at least one measure");
  std::vector<long long> counts(P, 0);
  for (int l : labels) {
    require(l >= 0 && static_cast<std::size_t>(l) < P, "label out of range");
    ++counts[static_cast<std::size_t>(l)];
  }
  return markov_from_counts(counts);
}

WeightVector markov_weights(const std::vector<ReferenceMeasure>& measures,
                            const Trajectory& chaotic, std::size_t N) {
  require(!measures.empty(), "need at least one measure");
  require(N >= 1 && N <= chaotic.size(), "insufficient chaotic samples");
  std::vector<State> pts;
  std::vector<int> owner;
  for (std::size_t p = 0; p < measures.size(); ++p) {
    for (const State& x : measures[p].points) {
      pts.push_back(x);
      owner.push_back(static_cast<int>(p));
    }
  }
  const KdTree3 tree(std::move(pts), std::move(owner));
  std::vector<int> labels(N);
  for (std::size_t n = 0; n < N; ++n) labels[n] = tree.nearest(chaotic.samples[n]).label;
  return markov_from_labels(labels, measures.size());
}

WeightVector uniform_weights(std::size_t P) {
  require(P >= 1, "need at least one measure");
  WeightVector out;
  out.method = WeightMethod::kUniform;
  out.w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(P), 1.0 / static_cast<double>(P));
  normalize_exact(out.w);
  out.support = static_cast<long long>(P);
  out.provenance.P = static_cast<long long>(P);
  return out;
}

// -- persistence ------------------------------------------------------------

void save_weights(const WeightVector& w, std::ostream& out) {
  using textio::fmt17;
  const Provenance& pv = w.provenance;
  out << "WEIGHTS v1 method=" << method_name(w.method) << " P=" << w.w.size()
      << " r=" << pv.r << " s=" << pv.s << " N=" << pv.N << " theta=" << fmt17(pv.theta)
      << " alpha=" << fmt17(pv.alpha) << " kind=" << kind_name(w.kind) << '\n';
  for (Eigen::Index i = 0; i < w.w.size(); ++i) out << fmt17(w.w[i]) << '\n';
}

void save_weights(const WeightVector& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  save_weights(w, out);
}

WeightVector load_weights(std::istream& in) {
  using namespace textio;
  std::string line;
  int line_no = 0;
  WeightVector w;
  long long P = -1;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (P < 0) {
      expect_header(tokens, "WEIGHTS", "v1", line_no);
      const auto f = parse_fields(tokens, 2, line_no);
      w.method = parse_method(field(f, "method", line_no));
      P = parse_int(field(f, "P", line_no), line_no);
      w.provenance.P = P;
      w.provenance.r = parse_int(field(f, "r", line_no), line_no);
      w.provenance.s = parse_int(field(f, "s", line_no), line_no);
      w.provenance.N = parse_int(field(f, "N", line_no), line_no);
      w.provenance.theta = parse_double(field(f, "theta", line_no), line_no);
      w.provenance.alpha = parse_double(field(f, "alpha", line_no), line_no);
      if (const auto k = f.find("kind"); k != f.end()) w.kind = parse_kind(k->second);
      continue;
    }
    if (tokens.size() != 1) parse_error(line_no, "expected one weight per line");
    values.push_back(parse_double(tokens[0], line_no));
  }
  if (P < 0) parse_error(line_no + 1, "missing WEIGHTS header");
  if (static_cast<long long>(values.size()) != P) {
    parse_error(line_no, "expected " + std::to_string(P) + " weights, found " +
                             std::to_string(values.size()));
  }
  w.w = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  w.support = (w.w.array() != 0.0).count();
  return w;
}

WeightVector load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  return load_weights(in);
}

}  // namespace lsw
