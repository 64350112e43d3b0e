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

#include "lsw/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "lsw/error.hpp"
#include "lsw/textio.hpp"

namespace lsw {

void KernelConfig::validate() const {
  require(theta > 0.0 && std::isfinite(theta), "theta must be positive");
}

double gaussian_kernel(const State& x, const State& y, double theta) {
  require(theta > 0.0, "theta must be positive");
  return std::exp(-(y - x).squaredNorm() / (2.0 * theta));
}

double induced_kernel(const State& x, const State& y, const KernelConfig& cfg) {
  if (cfg.mode == KernelMode::kAtomOverlap) return x == y ? 1.0 : 0.0;
  return std::exp(-(y - x).squaredNorm() / (4.0 * cfg.theta));
}

double correlation_entry(const ReferenceMeasure& mp, const ReferenceMeasure& mq,
                         const KernelConfig& cfg) {
  cfg.validate();
  const double scale = -1.0 / (4.0 * cfg.theta);
  double total = 0.0;
  for (std::size_t i = 0; i < mp.size(); ++i) {
    const State& a = mp.points[i];
    double row = 0.0;
    if (cfg.mode == KernelMode::kAtomOverlap) {
      for (std::size_t j = 0; j < mq.size(); ++j) {
        if (mq.points[j] == a) row += mq.weights[j];
      }
    } else {
      for (std::size_t j = 0; j < mq.size(); ++j) {
        const double dx = a.x() - mq.points[j].x();
        const double dy = a.y() - mq.points[j].y();
        const double dz = a.z() - mq.points[j].z();
        row += mq.weights[j] * std::exp(scale * (dx * dx + dy * dy + dz * dz));
      }
    }
    total += mp.weights[i] * row;
  }
  return total;
}

double kernel_observable(const ReferenceMeasure& mp, const State& x,
                         const KernelConfig& cfg) {
  cfg.validate();
  double total = 0.0;
  for (std::size_t i = 0; i < mp.size(); ++i) {
    total += mp.weights[i] * induced_kernel(mp.points[i], x, cfg);
  }
  return total;
}

Eigen::MatrixXd correlation_matrix(const std::vector<ReferenceMeasure>& measures,
                                   const KernelConfig& cfg) {
  const auto P = static_cast<Eigen::Index>(measures.size());
  Eigen::MatrixXd A(P, P);
  for (Eigen::Index p = 0; p < P; ++p) {
    for (Eigen::Index q = p; q < P; ++q) {
      const double v = correlation_entry(measures[static_cast<std::size_t>(p)],
                                         measures[static_cast<std::size_t>(q)], cfg);
      A(p, q) = v;
      A(q, p) = v;
    }
  }
  return A;
}

// -- MeasureCloud -----------------------------------------------------------

MeasureCloud::MeasureCloud(const std::vector<ReferenceMeasure>& measures) {
  offsets_.push_back(0);
  for (const ReferenceMeasure& m : measures) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      x_.push_back(m.points[i].x());
      y_.push_back(m.points[i].y());
      z_.push_back(m.points[i].z());
      w_.push_back(m.weights[i]);
    }
    offsets_.push_back(x_.size());
  }
}

void MeasureCloud::evaluate(const State& x, const KernelConfig& cfg,
                            double* kernel, double* nearest_d2) const {
  const double scale = -1.0 / (4.0 * cfg.theta);
  const double px = x.x(), py = x.y(), pz = x.z();
  for (std::size_t m = 0; m + 1 < offsets_.size(); ++m) {
    double sum = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = offsets_[m]; i < offsets_[m + 1]; ++i) {
      const double dx = x_[i] - px, dy = y_[i] - py, dz = z_[i] - pz;
      const double d2 = dx * dx + dy * dy + dz * dz;
      best = std::min(best, d2);
      if (kernel != nullptr) {
        if (cfg.mode == KernelMode::kAtomOverlap) {
          if (d2 == 0.0) sum += w_[i];
        } else {
          sum += w_[i] * std::exp(scale * d2);
        }
      }
    }
    if (kernel != nullptr) kernel[m] = sum;
    if (nearest_d2 != nullptr) nearest_d2[m] = best;
  }
}

// -- systems ----------------------------------------------------------------

CorrelationSystem CorrelationSystem::subset(const std::vector<std::size_t>& indices) const {
  CorrelationSystem out;
  const auto P = static_cast<Eigen::Index>(indices.size());
  out.A.resize(P, P);
  out.b.resize(P);
  for (Eigen::Index i = 0; i < P; ++i) {
    const auto si = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]);
    require(si < b.size(), "subset index out of range");
    out.b[i] = b[si];
    for (Eigen::Index j = 0; j < P; ++j) {
      out.A(i, j) = A(si, static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]));
    }
    if (!ids.empty()) out.ids.push_back(ids[static_cast<std::size_t>(si)]);
  }
  out.theta = theta;
  out.N = N;
  out.seed = seed;
  return out;
}

Eigen::VectorXd kernel_averages(const std::vector<ReferenceMeasure>& measures,
                                const Trajectory& chaotic, const KernelConfig& cfg,
                                std::size_t N) {
  cfg.validate();
  require(!measures.empty(), "need at least one measure");
  require(N >= 1 && N <= chaotic.size(), "insufficient chaotic samples");
  const MeasureCloud cloud(measures);
  const std::size_t P = measures.size();
  std::vector<double> sums(P, 0.0), row(P);
  for (std::size_t n = 0; n < N; ++n) {
    cloud.evaluate(chaotic.samples[n], cfg, row.data(), nullptr);
    for (std::size_t q = 0; q < P; ++q) sums[q] += row[q];
  }
  Eigen::VectorXd b(static_cast<Eigen::Index>(P));
  for (std::size_t q = 0; q < P; ++q) b[static_cast<Eigen::Index>(q)] = sums[q] / static_cast<double>(N);
  return b;
}

CorrelationSystem build_system(const std::vector<ReferenceMeasure>& measures,
                               const Trajectory& chaotic, const KernelConfig& cfg,
                               std::size_t N, std::uint64_t seed) {
  CorrelationSystem sys;
  sys.b = kernel_averages(measures, chaotic, cfg, N);
  sys.A = correlation_matrix(measures, cfg);
  sys.theta = cfg.theta;
  sys.N = static_cast<long long>(N);
  sys.seed = seed;
  for (const ReferenceMeasure& m : measures) sys.ids.push_back(m.id);
  return sys;
}

std::string check_correlation_matrix(const Eigen::MatrixXd& A) {
  const Eigen::Index P = A.rows();
  if (A.cols() != P) return "matrix is not square";
  for (Eigen::Index i = 0; i < P; ++i) {
    for (Eigen::Index j = 0; j < P; ++j) {
      const double v = A(i, j);
      if (std::abs(v - A(j, i)) > 1e-12) return "asymmetric entry";
      if (!(v > 0.0 && v <= 1.0 + 1e-15)) return "entry outside (0,1]";
      if (std::abs(v) > std::sqrt(A(i, i) * A(j, j)) + 1e-8) return "Cauchy-Schwarz violated";
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return "eigen-solve failed";
  if (P > 0 && es.eigenvalues()[0] < -1e-8) return "matrix is not positive semidefinite";
  return {};
}

ThetaScan theta_scan(const std::vector<ReferenceMeasure>& measures,
                     const std::vector<double>& theta_grid) {
  require(!theta_grid.empty(), "theta grid is empty");
  require(!measures.empty(), "need at least one measure");
  ThetaScan out;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double theta : theta_grid) {
    const Eigen::MatrixXd A = correlation_matrix(measures, KernelConfig{theta});
    const auto P = A.rows();
    const double d_ones = (A - Eigen::MatrixXd::Ones(P, P)).norm();
    const double d_id = (A - Eigen::MatrixXd::Identity(P, P)).norm();
    out.points.push_back({theta, d_ones, d_id});
    const double gap = std::abs(d_ones - d_id);
    if (gap < best_gap || (gap == best_gap && theta < out.theta_star)) {
      best_gap = gap;
      out.theta_star = theta;
    }
  }
  return out;
}

std::vector<double> parse_theta_grid(const std::string& spec) {
  std::vector<double> out;
  const auto parts = textio::split(spec, ':');
  if (parts.size() == 3 && parts[2].rfind("log", 0) == 0) {
    const double lo = textio::parse_double(parts[0], 0);
    const double hi = textio::parse_double(parts[1], 0);
    const long long k = textio::parse_int(parts[2].substr(3), 0);
    require(lo > 0.0 && hi >= lo && k >= 1, "bad theta grid '" + spec + "'");
    if (k == 1) return {lo};
    for (long long i = 0; i < k; ++i) {
      out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(k - 1)));
    }
    return out;
  }
  for (const auto& tok : textio::split(spec, ',')) {
    const double v = textio::parse_double(tok, 0);
    require(v > 0.0, "theta values must be positive");
    out.push_back(v);
  }
  return out;
}

// -- persistence ------------------------------------------------------------

void save_system(const CorrelationSystem& sys, std::ostream& out) {
  using textio::fmt17;
  const Eigen::Index P = sys.b.size();
  out << "KSYS v1 P=" << P << " theta=" << fmt17(sys.theta) << " N=" << sys.N
      << " seed=" << sys.seed << '\n';
  for (Eigen::Index i = 0; i < P; ++i) {
    for (Eigen::Index j = 0; j < P; ++j) out << (j ? " " : "") << fmt17(sys.A(i, j));
    out << '\n';
  }
  for (Eigen::Index i = 0; i < P; ++i) out << (i ? " " : "") << fmt17(sys.b[i]);
  out << '\n';
  if (!sys.ids.empty()) {
    out << "ids";
    for (const auto& id : sys.ids) out << ' ' << id;
    out << '\n';
  }
}

void save_system(const CorrelationSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  save_system(sys, out);
}

CorrelationSystem load_system(std::istream& in) {
  using namespace textio;
  std::string line;
  int line_no = 0;
  auto next = [&]() -> std::vector<std::string> {
    while (std::getline(in, line)) {
      ++line_no;
      auto t = split_ws(line);
      if (!t.empty()) return t;
    }
    return {};
  };
  auto head = next();
  if (head.empty()) parse_error(line_no + 1, "missing KSYS header");
  expect_header(head, "KSYS", "v1", line_no);
  const auto f = parse_fields(head, 2, line_no);
  CorrelationSystem sys;
  const long long P = parse_int(field(f, "P", line_no), line_no);
  if (P < 1) parse_error(line_no, "P must be positive");
  sys.theta = parse_double(field(f, "theta", line_no), line_no);
  sys.N = parse_int(field(f, "N", line_no), line_no);
  sys.seed = static_cast<std::uint64_t>(std::stoull(field(f, "seed", line_no)));
  sys.A.resize(P, P);
  sys.b.resize(P);
  for (long long i = 0; i < P; ++i) {
    const auto row = next();
    if (static_cast<long long>(row.size()) != P) parse_error(line_no, "matrix row needs P values");
    for (long long j = 0; j < P; ++j) sys.A(i, j) = parse_double(row[static_cast<std::size_t>(j)], line_no);
  }
  const auto bl = next();
  if (static_cast<long long>(bl.size()) != P) parse_error(line_no, "b needs P values");
  for (long long i = 0; i < P; ++i) sys.b[i] = parse_double(bl[static_cast<std::size_t>(i)], line_no);
  const auto ids = next();
  if (!ids.empty()) {
    if (ids[0] != "ids" || static_cast<long long>(ids.size()) != P + 1) parse_error(line_no, "bad ids line");
    sys.ids.assign(ids.begin() + 1, ids.end());
  }
  return sys;
}

CorrelationSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  return load_system(in);
}

}  // namespace lsw
