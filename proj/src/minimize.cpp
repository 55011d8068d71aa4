#include "curvem/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvem/kernels.hpp"

namespace curvem {

namespace {

// Density-1 midpoint nodes rebuilt over a generic scalar so the whole
// pipeline (positions, weights, tangents) is differentiable.
template <class T>
struct TNodes {
  int m = 0, n = 0, count = 0;
  std::vector<SmallVec<T>> points;
  std::vector<T> weights;
  std::vector<SmallVec<T>> tangents;  // count * m
  T total_weight{0};
};

// `coords` holds the flattened vertex array; node index == cell index.
template <class T>
TNodes<T> build_nodes(const DiscreteManifold& M, const std::vector<T>& coords) {
  TNodes<T> nd;
  nd.m = M.m();
  nd.n = M.n();
  nd.count = M.cell_count();
  nd.points.resize(nd.count);
  nd.weights.resize(nd.count);
  nd.tangents.resize(static_cast<std::size_t>(nd.count) * nd.m);
  auto vertex = [&](int v) {
    SmallVec<T> p(M.n());
    for (int a = 0; a < M.n(); ++a) p[a] = coords[static_cast<std::size_t>(v) * M.n() + a];
    return p;
  };
  using std::sqrt;
  for (int c = 0; c < nd.count; ++c) {
    const auto& cell = M.cells()[c];
    if (M.m() == 1) {
      SmallVec<T> a = vertex(cell[0]), b = vertex(cell[1]);
      SmallVec<T> e = b - a;
      T len = norm(e);
      nd.points[c] = T(0.5) * (a + b);
      nd.weights[c] = len;
      nd.tangents[c] = (T(1) / len) * e;
    } else {
      SmallVec<T> a = vertex(cell[0]), b = vertex(cell[1]), cc = vertex(cell[2]);
      SmallVec<T> e1 = b - a, e2 = cc - a;
      nd.points[c] = (T(1) / T(3)) * (a + b + cc);
      SmallVec<T> tuple[3] = {a, b, cc};
      nd.weights[c] = kernels::simplex_measure_tuple(tuple, 2);
      T l1 = norm(e1);
      SmallVec<T> t1 = (T(1) / l1) * e1;
      T proj = dot(e2, t1);
      SmallVec<T> r = e2 - proj * t1;
      T l2 = norm(r);
      nd.tangents[2 * c] = t1;
      nd.tangents[2 * c + 1] = (T(1) / l2) * r;
    }
    nd.total_weight += nd.weights[c];
  }
  return nd;
}

template <class T>
T inv_rtp_node(const TNodes<T>& nd, int i, int j) {
  return kernels::inverse_rtp(nd.points[i], &nd.tangents[static_cast<std::size_t>(i) * nd.m],
                              nd.m, nd.points[j]);
}

// Full templated energy (value-based comparisons inside sups keep branch
// selection identical across scalar types).
template <class T>
T energy_value(const TNodes<T>& nd, const EnergySpec& spec) {
  const int N = nd.count;
  T total{0};
  if (spec.kind == EnergyKind::TangentPoint) {
    for (int i = 0; i < N; ++i) {
      T row{0};
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        row += nd.weights[j] * kernels::pow_p(inv_rtp_node(nd, i, j), spec.p);
      }
      total += nd.weights[i] * row;
    }
    return total;
  }
  if (spec.kind == EnergyKind::TangentPointSup) {
    for (int i = 0; i < N; ++i) {
      T sup{0};
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        T v = inv_rtp_node(nd, i, j);
        if (v > sup) sup = v;
      }
      total += nd.weights[i] * kernels::pow_p(sup, spec.p);
    }
    return total;
  }
  // MengerL: ordered distinct index tuples, sup over ascending completions.
  const int l = spec.l, arity = nd.m + 2;
  std::vector<int> idx(arity, -1);
  std::vector<SmallVec<T>> tuple(arity);
  T sum{0};
  auto kernel_sup = [&](auto&& self, int pos, int from) -> T {
    if (pos == arity) return kernels::menger(tuple.data(), nd.m);
    T best{0};
    for (int j = from; j < N; ++j) {
      bool used = false;
      for (int q = 0; q < pos; ++q)
        if (idx[q] == j) used = true;
      if (used) continue;
      idx[pos] = j;
      tuple[pos] = nd.points[j];
      T v = self(self, pos + 1, j + 1);
      if (v > best) best = v;
      idx[pos] = -1;
    }
    return best;
  };
  auto enumerate = [&](auto&& self, int pos, T wprod) -> void {
    if (pos == l) {
      T k = l == arity ? kernels::menger(tuple.data(), nd.m) : kernel_sup(kernel_sup, l, 0);
      sum += wprod * kernels::pow_p(k, spec.p);
      return;
    }
    for (int j = 0; j < N; ++j) {
      bool used = false;
      for (int q = 0; q < pos; ++q)
        if (idx[q] == j) used = true;
      if (used) continue;
      idx[pos] = j;
      tuple[pos] = nd.points[j];
      self(self, pos + 1, wprod * nd.weights[j]);
      idx[pos] = -1;
    }
  };
  enumerate(enumerate, 0, T{1});
  return sum;
}

std::vector<double> flatten(const DiscreteManifold& M) {
  std::vector<double> coords(static_cast<std::size_t>(M.vertex_count()) * M.n());
  for (int v = 0; v < M.vertex_count(); ++v)
    for (int a = 0; a < M.n(); ++a) coords[static_cast<std::size_t>(v) * M.n() + a] = M.vertex(v)(a);
  return coords;
}

std::vector<Dual> dualize(const std::vector<double>& coords, std::size_t active) {
  std::vector<Dual> d(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) d[i] = Dual(coords[i], i == active ? 1.0 : 0.0);
  return d;
}

// Sparse accumulation for the tangent-point energies: only pairs touching a
// node whose cell contains the perturbed vertex contribute derivative.
double tp_partial(const DiscreteManifold& M, const EnergySpec& spec,
                  const std::vector<double>& coords, int vertex, int axis,
                  const std::vector<int>& argmax) {
  std::vector<Dual> dc(coords.begin(), coords.end());
  dc[static_cast<std::size_t>(vertex) * M.n() + axis].b = 1.0;
  TNodes<Dual> nd = build_nodes(M, dc);
  const auto& affected = M.incident_cells(vertex);
  auto is_affected = [&](int c) {
    return std::find(affected.begin(), affected.end(), c) != affected.end();
  };
  const int N = nd.count;
  Dual acc{0, 0};
  if (spec.kind == EnergyKind::TangentPoint) {
    for (int i : affected) {
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        acc += nd.weights[i] * nd.weights[j] * kernels::pow_p(inv_rtp_node(nd, i, j), spec.p);
        if (!is_affected(j))
          acc += nd.weights[j] * nd.weights[i] * kernels::pow_p(inv_rtp_node(nd, j, i), spec.p);
      }
    }
  } else {  // TangentPointSup with frozen argmax
    for (int i = 0; i < N; ++i) {
      int js = argmax[i];
      if (!is_affected(i) && !is_affected(js)) continue;
      acc += nd.weights[i] * kernels::pow_p(inv_rtp_node(nd, i, js), spec.p);
    }
  }
  return acc.b;
}

DiscreteManifold with_coords(const DiscreteManifold& M, const std::vector<double>& coords) {
  std::vector<Vec> verts(M.vertex_count());
  for (int v = 0; v < M.vertex_count(); ++v) {
    Vec p(M.n());
    for (int a = 0; a < M.n(); ++a) p(a) = coords[static_cast<std::size_t>(v) * M.n() + a];
    verts[v] = p;
  }
  return DiscreteManifold(M.m(), M.n(), std::move(verts), M.cells());
}

}  // namespace

std::vector<Vec> energy_gradient(const DiscreteManifold& M, const EnergySpec& spec,
                                 const QuadratureConfig& quad) {
  spec.validate(M.m());
  if (quad.density != 1) throw Error("energy_gradient: density-1 quadrature required");
  if (quad.mode == QuadratureConfig::Mode::MonteCarlo)
    throw Error("energy_gradient: monte carlo gradients not supported; use exhaustive");
  std::vector<double> coords = flatten(M);
  TNodes<double> base = build_nodes(M, coords);
  double e0 = energy_value(base, spec);
  if (std::isinf(e0) || std::isnan(e0)) throw Error("energy_gradient: energy is not finite");

  std::vector<Vec> grad(M.vertex_count(), zero_vec(M.n()));
  if (spec.kind == EnergyKind::MengerL) {
    // Dense dual sweep; menger flows are small-N only.
    for (int v = 0; v < M.vertex_count(); ++v)
      for (int a = 0; a < M.n(); ++a) {
        std::vector<Dual> dc = dualize(coords, static_cast<std::size_t>(v) * M.n() + a);
        TNodes<Dual> nd = build_nodes(M, dc);
        grad[v](a) = energy_value(nd, spec).b;
      }
    return grad;
  }

  // Frozen sup selection for the gradient of the sup energy: first attaining
  // index (strict improvement keeps the lexicographically smallest).
  std::vector<int> argmax;
  if (spec.kind == EnergyKind::TangentPointSup) {
    argmax.assign(base.count, -1);
    for (int i = 0; i < base.count; ++i) {
      double best = -1;
      for (int j = 0; j < base.count; ++j) {
        if (j == i) continue;
        double vv = inv_rtp_node(base, i, j);
        if (vv > best) {
          best = vv;
          argmax[i] = j;
        }
      }
    }
  }
  for (int v = 0; v < M.vertex_count(); ++v)
    for (int a = 0; a < M.n(); ++a) grad[v](a) = tp_partial(M, spec, coords, v, a, argmax);
  return grad;
}

std::vector<Vec> finite_difference_gradient(const DiscreteManifold& M, const EnergySpec& spec,
                                            const QuadratureConfig& quad) {
  spec.validate(M.m());
  (void)quad;
  std::vector<double> coords = flatten(M);
  double h = 1e-6 * diameter(M);
  std::vector<Vec> grad(M.vertex_count(), zero_vec(M.n()));
  for (int v = 0; v < M.vertex_count(); ++v)
    for (int a = 0; a < M.n(); ++a) {
      std::size_t k = static_cast<std::size_t>(v) * M.n() + a;
      std::vector<double> cp = coords, cm = coords;
      cp[k] += h;
      cm[k] -= h;
      TNodes<double> np = build_nodes(M, cp), nm = build_nodes(M, cm);
      grad[v](a) = (energy_value(np, spec) - energy_value(nm, spec)) / (2 * h);
    }
  return grad;
}

double flow_safety_radius(const DiscreteManifold& M, double rho_G) {
  double self_dist = min_nonadjacent_distance(M);
  double safety = 0.25 * self_dist;
  if (rho_G > 0) safety = std::min(safety, rho_G);
  return safety;
}

FlowState init_flow(const DiscreteManifold& M, const EnergySpec& spec, const QuadratureConfig& quad,
                    FlowConstraint constraint) {
  spec.validate(M.m());
  FlowState st{M, spec, quad, constraint, 0, 0, 0, 0, false, {}};
  st.constraint_target =
      constraint == FlowConstraint::FixedTotalMeasure ? M.total_measure() : diameter(M);
  EnergyResult r = evaluate(M, spec, quad);
  if (std::isinf(r.value)) throw Error("init_flow: initial energy is infinite");
  st.energy = r.value;
  st.step = 0;
  return st;
}

FlowState descend(const FlowState& state, const FlowOptions& opts) {
  if (!(opts.sigma > 0 && opts.sigma < 1)) throw Error("sigma must be in (0,1)");
  FlowState next = state;
  if (state.converged) return next;

  std::vector<Vec> grad = energy_gradient(state.manifold, state.spec, state.quad);
  double gmax = 0;
  for (const auto& g : grad) gmax = std::max(gmax, g.norm());
  if (gmax == 0) {
    next.converged = true;
    return next;
  }
  double safety = flow_safety_radius(state.manifold, opts.rho_G);
  double cap = opts.sigma * safety;
  double tau = state.step > 0 ? state.step : (opts.initial_step > 0 ? opts.initial_step
                                                                    : 0.5 * cap / gmax);
  tau = std::min(tau, cap / gmax);

  std::vector<double> coords = flatten(state.manifold);
  const int V = state.manifold.vertex_count(), n = state.manifold.n();
  for (int ls = 0; ls < opts.max_line_search; ++ls, tau *= opts.backtrack) {
    std::vector<double> trial = coords;
    for (int v = 0; v < V; ++v)
      for (int a = 0; a < n; ++a) trial[static_cast<std::size_t>(v) * n + a] -= tau * grad[v](a);
    // Re-normalize the constraint by rescaling about the centroid.
    DiscreteManifold cand = state.manifold;
    try {
      cand = with_coords(state.manifold, trial);
      double current = state.constraint == FlowConstraint::FixedTotalMeasure
                           ? cand.total_measure()
                           : diameter(cand);
      double lambda = state.constraint == FlowConstraint::FixedTotalMeasure
                          ? std::pow(state.constraint_target / current, 1.0 / cand.m())
                          : state.constraint_target / current;
      Vec centroid = zero_vec(n);
      for (const auto& p : cand.vertices()) centroid += p;
      centroid /= cand.vertex_count();
      std::vector<Vec> scaled_verts(cand.vertex_count());
      for (int v = 0; v < cand.vertex_count(); ++v)
        scaled_verts[v] = centroid + lambda * (cand.vertex(v) - centroid);
      cand = DiscreteManifold(cand.m(), cand.n(), std::move(scaled_verts), cand.cells());
    } catch (const Error&) {
      continue;  // embedding or validity violated: halve the step
    }
    double max_disp = 0;
    for (int v = 0; v < V; ++v) max_disp = std::max(max_disp, (cand.vertex(v) - state.manifold.vertex(v)).norm());
    if (max_disp >= cap) continue;
    EnergyResult r = evaluate(cand, state.spec, state.quad);
    if (std::isinf(r.value)) continue;
    if (!(r.value < state.energy * (1.0 - opts.tol))) continue;

    FlowRecord rec;
    rec.iteration = state.iteration + 1;
    rec.energy = r.value;
    rec.step = tau;
    rec.max_disp = max_disp;
    rec.d_h_prev = hausdorff_distance(state.manifold, cand,
                                      0.5 * state.manifold.median_edge_length());
    rec.accepted = true;
    next.manifold = std::move(cand);
    next.energy = r.value;
    next.iteration = state.iteration + 1;
    next.step = tau * 1.5;
    next.history.push_back(rec);
    return next;
  }
  next.converged = true;
  return next;
}

int projected_crossing_count(const DiscreteManifold& M, const Vec& direction) {
  if (M.m() != 1 || M.n() != 3) throw Error("projected_crossing_count: m=1, n=3 only");
  Vec d = direction / direction.norm();
  // Build an orthonormal frame {e1, e2, d}.
  Vec tmp = zero_vec(3);
  tmp(std::abs(d(0)) < 0.9 ? 0 : 1) = 1.0;
  Vec e1 = tmp - tmp.dot(d) * d;
  e1 /= e1.norm();
  Vec e2(3);
  e2 << d(1) * e1(2) - d(2) * e1(1), d(2) * e1(0) - d(0) * e1(2), d(0) * e1(1) - d(1) * e1(0);
  auto project = [&](const Vec& p) {
    Eigen::Vector2d q;
    q << p.dot(e1), p.dot(e2);
    return q;
  };
  auto crosses = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                    const Eigen::Vector2d& d2) {
    auto orient = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
      return (q(0) - p(0)) * (r(1) - p(1)) - (q(1) - p(1)) * (r(0) - p(0));
    };
    double o1 = orient(a, b, c), o2 = orient(a, b, d2), o3 = orient(c, d2, a), o4 = orient(c, d2, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
  };
  int count = 0;
  for (int c1 = 0; c1 < M.cell_count(); ++c1)
    for (int c2 = c1 + 1; c2 < M.cell_count(); ++c2) {
      if (M.cells_adjacent(c1, c2)) continue;
      Eigen::Vector2d a = project(M.vertex(M.cells()[c1][0]));
      Eigen::Vector2d b = project(M.vertex(M.cells()[c1][1]));
      Eigen::Vector2d cc = project(M.vertex(M.cells()[c2][0]));
      Eigen::Vector2d dd = project(M.vertex(M.cells()[c2][1]));
      if (crosses(a, b, cc, dd)) ++count;
    }
  return count;
}

}  // namespace curvem
