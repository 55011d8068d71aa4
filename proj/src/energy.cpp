#include "curvem/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "curvem/kernels.hpp"
#include "curvem/parallel.hpp"
#include "curvem/rng.hpp"

namespace curvem {

double EnergySpec::p0(int m) const {
  switch (kind) {
    case EnergyKind::MengerL:
      return static_cast<double>(m) * l;
    case EnergyKind::TangentPoint:
      return 2.0 * m;
    case EnergyKind::TangentPointSup:
      return static_cast<double>(m);
  }
  return 0;
}

void EnergySpec::validate(int m) const {
  if (!(p > 0)) throw Error("p must be positive");
  if (kind == EnergyKind::MengerL && (l < 1 || l > m + 2))
    throw Error("menger order l must satisfy 1 <= l <= m+2");
}

std::string EnergySpec::name() const {
  switch (kind) {
    case EnergyKind::MengerL:
      return "menger(l=" + std::to_string(l) + ")";
    case EnergyKind::TangentPoint:
      return "tp";
    case EnergyKind::TangentPointSup:
      return "tpg";
  }
  return "?";
}

double scaling_exponent(const EnergySpec& spec, int m) { return spec.p0(m); }

double menger_curvature(std::span<const Vec> tuple) {
  const int m = static_cast<int>(tuple.size()) - 2;
  if (m < 0) throw Error("menger_curvature: tuple too short");
  std::vector<SmallVec<double>> t;
  t.reserve(tuple.size());
  for (const Vec& x : tuple) t.push_back(SmallVec<double>::from(x));
  double k = kernels::menger(t.data(), m);
  if (std::isnan(k)) throw Error("menger_curvature: all points coincide");
  return k;
}

double tangent_point_radius(const Vec& x, const Plane& Tx, const Vec& y) {
  double inv = inverse_tangent_point_radius(x, Tx.basis(), y);
  if (inv == 0) return std::numeric_limits<double>::infinity();
  return 1.0 / inv;
}

double inverse_tangent_point_radius(const Vec& x, const Mat& tangent_basis, const Vec& y) {
  if ((x - y).norm() == 0) throw Error("tangent_point_radius: x == y");
  const int m = static_cast<int>(tangent_basis.cols());
  SmallVec<double> xs = SmallVec<double>::from(x), ys = SmallVec<double>::from(y);
  SmallVec<double> tb[2];
  for (int k = 0; k < m; ++k) tb[k] = SmallVec<double>::from(tangent_basis.col(k));
  return kernels::inverse_rtp(xs, tb, m, ys);
}

namespace {

struct NodeData {
  int m = 0, n = 0, count = 0;
  std::vector<SmallVec<double>> points;
  std::vector<double> weights;
  std::vector<SmallVec<double>> tangents;  // count * m, node-major
  double total_weight = 0;

  static NodeData from(const SampleSet& S) {
    NodeData d;
    d.m = S.m;
    d.n = S.n;
    d.count = static_cast<int>(S.points.size());
    d.points.reserve(d.count);
    d.tangents.reserve(d.count * S.m);
    for (int i = 0; i < d.count; ++i) {
      d.points.push_back(SmallVec<double>::from(S.points[i]));
      for (int k = 0; k < S.m; ++k)
        d.tangents.push_back(SmallVec<double>::from(S.tangents[i].col(k)));
    }
    d.weights = S.weights;
    for (double w : S.weights) d.total_weight += w;
    return d;
  }

  double inv_rtp(int i, int j) const {
    return kernels::inverse_rtp(points[i], &tangents[static_cast<std::size_t>(i) * m], m,
                                points[j]);
  }
};

std::string tuple_diagnostic(std::span<const int> idx) {
  std::ostringstream os;
  os << "infinite integrand at nodes (";
  for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
  os << ")";
  return os.str();
}

// Supremum of the Menger kernel over completions of `base` by extra distinct
// nodes; `tuple` holds base points in [0, l), scratch space beyond.
double menger_sup_over_completions(const NodeData& d, std::vector<SmallVec<double>>& tuple,
                                   std::vector<int>& idx, int l, int pos, int from) {
  const int arity = d.m + 2;
  if (pos == arity) {
    double k = kernels::menger(tuple.data(), d.m);
    return std::isnan(k) ? std::numeric_limits<double>::infinity() : k;
  }
  double best = 0;
  for (int j = from; j < d.count; ++j) {
    bool used = false;
    for (int q = 0; q < pos; ++q)
      if (idx[q] == j) {
        used = true;
        break;
      }
    if (used) continue;
    idx[pos] = j;
    tuple[pos] = d.points[j];
    // Completions are unordered: enforce ascending order beyond the base.
    double v = menger_sup_over_completions(d, tuple, idx, l, pos + 1, j + 1);
    if (v > best) best = v;
  }
  return best;
}

double menger_l_integrand(const NodeData& d, std::vector<SmallVec<double>>& tuple,
                          std::vector<int>& idx, int l) {
  const int arity = d.m + 2;
  if (l == arity) {
    double k = kernels::menger(tuple.data(), d.m);
    return std::isnan(k) ? std::numeric_limits<double>::infinity() : k;
  }
  return menger_sup_over_completions(d, tuple, idx, l, l, 0);
}

bool tuple_excluded(const NodeData& d, const std::vector<int>& idx, int l, double radius) {
  if (radius <= 0) return false;
  for (int a = 0; a < l; ++a)
    for (int b = a + 1; b < l; ++b)
      if (norm(d.points[idx[a]] - d.points[idx[b]]) < radius) return true;
  return false;
}

struct Accumulator {
  double sum = 0;
  bool infinite = false;
  std::string diagnostic;
};

// Enumerates ordered distinct index tuples (i0 fixed) for positions >= pos.
void menger_enumerate(const NodeData& d, const EnergySpec& spec, double exclusion,
                      std::vector<SmallVec<double>>& tuple, std::vector<int>& idx, int pos,
                      double wprod, Accumulator& acc) {
  const int l = spec.l;
  if (pos == l) {
    if (tuple_excluded(d, idx, l, exclusion)) return;
    double k = menger_l_integrand(d, tuple, idx, l);
    if (std::isinf(k)) {
      acc.infinite = true;
      if (acc.diagnostic.empty())
        acc.diagnostic = tuple_diagnostic(std::span<const int>(idx.data(), l));
      return;
    }
    acc.sum += wprod * kernels::pow_p(k, spec.p);
    return;
  }
  for (int j = 0; j < d.count; ++j) {
    bool used = false;
    for (int q = 0; q < pos; ++q)
      if (idx[q] == j) {
        used = true;
        break;
      }
    if (used) continue;
    idx[pos] = j;
    tuple[pos] = d.points[j];
    menger_enumerate(d, spec, exclusion, tuple, idx, pos + 1, wprod * d.weights[j], acc);
  }
}

EnergyResult evaluate_exhaustive(const NodeData& d, const EnergySpec& spec,
                                 const QuadratureConfig& quad) {
  const int N = d.count;
  std::vector<double> partial(N, 0.0);
  std::vector<Accumulator> accs(N);

  if (spec.kind == EnergyKind::TangentPoint) {
    parallel_for_chunks(N, quad.threads, [&](int i) {
      Accumulator& acc = accs[i];
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        if (quad.exclusion_radius > 0 &&
            norm(d.points[i] - d.points[j]) < quad.exclusion_radius)
          continue;
        double inv = d.inv_rtp(i, j);
        if (std::isnan(inv) || std::isinf(inv)) {
          acc.infinite = true;
          if (acc.diagnostic.empty()) {
            int pair[2] = {i, j};
            acc.diagnostic = tuple_diagnostic(pair);
          }
          continue;
        }
        acc.sum += d.weights[j] * kernels::pow_p(inv, spec.p);
      }
      acc.sum *= d.weights[i];
    });
  } else if (spec.kind == EnergyKind::TangentPointSup) {
    parallel_for_chunks(N, quad.threads, [&](int i) {
      Accumulator& acc = accs[i];
      double sup = 0;
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        double inv = d.inv_rtp(i, j);
        if (std::isnan(inv) || std::isinf(inv)) {
          acc.infinite = true;
          if (acc.diagnostic.empty()) {
            int pair[2] = {i, j};
            acc.diagnostic = tuple_diagnostic(pair);
          }
          continue;
        }
        sup = std::max(sup, inv);
      }
      acc.sum = d.weights[i] * kernels::pow_p(sup, spec.p);
    });
  } else {
    parallel_for_chunks(N, quad.threads, [&](int i) {
      Accumulator& acc = accs[i];
      std::vector<SmallVec<double>> tuple(d.m + 2);
      std::vector<int> idx(d.m + 2, -1);
      idx[0] = i;
      tuple[0] = d.points[i];
      menger_enumerate(d, spec, quad.exclusion_radius, tuple, idx, 1, d.weights[i], acc);
    });
  }

  EnergyResult r;
  r.exhaustive = true;
  r.node_count = N;
  for (int i = 0; i < N; ++i) {
    partial[i] = accs[i].sum;
    if (accs[i].infinite && r.diagnostic.empty()) {
      r.value = std::numeric_limits<double>::infinity();
      r.diagnostic = accs[i].diagnostic;
    }
  }
  if (!std::isinf(r.value)) r.value = pairwise_sum(partial);
  return r;
}

EnergyResult evaluate_monte_carlo(const NodeData& d, const EnergySpec& spec,
                                  const QuadratureConfig& quad) {
  if (quad.samples <= 0) throw Error("monte carlo mode requires samples > 0");
  if (quad.samples > 50'000'000) throw Error("monte carlo sample count too large");
  const int factors = spec.kind == EnergyKind::TangentPoint ? 2
                      : spec.kind == EnergyKind::TangentPointSup ? 1
                                                                 : spec.l;
  // Weight-proportional node draw via prefix sums.
  std::vector<double> prefix(d.count);
  double run = 0;
  for (int i = 0; i < d.count; ++i) {
    run += d.weights[i];
    prefix[i] = run;
  }
  CounterRng rng{quad.seed};
  auto draw = [&](std::uint64_t counter) {
    double u = rng.uniform(counter) * d.total_weight;
    return static_cast<int>(std::lower_bound(prefix.begin(), prefix.end(), u) - prefix.begin());
  };

  const long long S = quad.samples;
  std::vector<double> values(S, 0.0);
  const long long block = 4096;
  int chunks = static_cast<int>((S + block - 1) / block);
  std::vector<Accumulator> accs(chunks);

  parallel_for_chunks(chunks, quad.threads, [&](int c) {
    std::vector<int> idx(factors);
    std::vector<SmallVec<double>> tuple(d.m + 2);
    long long lo = static_cast<long long>(c) * block, hi = std::min(S, lo + block);
    for (long long s = lo; s < hi; ++s) {
      bool repeated = false;
      for (int f = 0; f < factors; ++f) {
        idx[f] = draw(static_cast<std::uint64_t>(s) * factors + f);
        for (int q = 0; q < f; ++q)
          if (idx[q] == idx[f]) repeated = true;
      }
      if (repeated) continue;  // diagonal tuple: contributes zero
      double v = 0;
      if (spec.kind == EnergyKind::TangentPoint) {
        if (quad.exclusion_radius > 0 &&
            norm(d.points[idx[0]] - d.points[idx[1]]) < quad.exclusion_radius)
          continue;
        double inv = d.inv_rtp(idx[0], idx[1]);
        if (std::isnan(inv) || std::isinf(inv)) {
          accs[c].infinite = true;
          if (accs[c].diagnostic.empty())
            accs[c].diagnostic = tuple_diagnostic(std::span<const int>(idx.data(), 2));
          continue;
        }
        v = kernels::pow_p(inv, spec.p);
      } else if (spec.kind == EnergyKind::TangentPointSup) {
        double sup = 0;
        for (int j = 0; j < d.count; ++j) {
          if (j == idx[0]) continue;
          sup = std::max(sup, d.inv_rtp(idx[0], j));
        }
        v = kernels::pow_p(sup, spec.p);
      } else {
        std::vector<int> full(d.m + 2, -1);
        for (int f = 0; f < factors; ++f) {
          full[f] = idx[f];
          tuple[f] = d.points[idx[f]];
        }
        if (tuple_excluded(d, full, factors, quad.exclusion_radius)) continue;
        double k = menger_l_integrand(d, tuple, full, spec.l);
        if (std::isinf(k)) {
          accs[c].infinite = true;
          if (accs[c].diagnostic.empty())
            accs[c].diagnostic = tuple_diagnostic(std::span<const int>(idx.data(), factors));
          continue;
        }
        v = kernels::pow_p(k, spec.p);
      }
      values[s] = v;
    }
  });

  EnergyResult r;
  r.exhaustive = false;
  r.mc_samples = S;
  r.seed = quad.seed;
  r.node_count = d.count;
  for (const auto& acc : accs)
    if (acc.infinite && r.diagnostic.empty()) {
      r.value = std::numeric_limits<double>::infinity();
      r.diagnostic = acc.diagnostic;
    }
  double scale = std::pow(d.total_weight, factors);
  double mean = pairwise_sum(values) / static_cast<double>(S);
  if (!std::isinf(r.value)) {
    r.value = scale * mean;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      double dlt = values[i] - mean;
      sq[i] = dlt * dlt;
    }
    double var = S > 1 ? pairwise_sum(sq) / (static_cast<double>(S) - 1.0) : 0.0;
    r.stderr_estimate = scale * std::sqrt(var / static_cast<double>(S));
  }
  return r;
}

}  // namespace

double menger_sup_integrand(const SampleSet& S, int l, std::span<const int> base_nodes) {
  if (l < 1 || l > S.m + 2) throw Error("menger_sup_integrand: l out of range");
  if (static_cast<int>(base_nodes.size()) != l)
    throw Error("menger_sup_integrand: base tuple must have l nodes");
  NodeData d = NodeData::from(S);
  std::vector<SmallVec<double>> tuple(d.m + 2);
  std::vector<int> idx(d.m + 2, -1);
  for (int i = 0; i < l; ++i) {
    idx[i] = base_nodes[i];
    tuple[i] = d.points[base_nodes[i]];
  }
  return menger_l_integrand(d, tuple, idx, l);
}

EnergyResult evaluate_samples(const SampleSet& S, const EnergySpec& spec,
                              const QuadratureConfig& quad) {
  spec.validate(S.m);
  NodeData d = NodeData::from(S);
  if (d.count < S.m + 2) throw Error("not enough sample nodes for the energy kernel");
  if (quad.mode == QuadratureConfig::Mode::Exhaustive) return evaluate_exhaustive(d, spec, quad);
  return evaluate_monte_carlo(d, spec, quad);
}

EnergyResult evaluate(const DiscreteManifold& M, const EnergySpec& spec,
                      const QuadratureConfig& quad) {
  spec.validate(M.m());
  return evaluate_samples(sample(M, quad.density), spec, quad);
}

}  // namespace curvem
