#include "curvem/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "curvem/parallel.hpp"


namespace curvem {

RLAlpha rl_from_energy(double E, const EnergySpec& spec, int m, double c1, double c2) {
  if (!(E > 0)) throw Error("rl_from_energy: energy bound must be positive");
  if (!(c1 > 0) || !(c2 > 0)) throw Error("rl_from_energy: constants must be positive");
  double p0 = spec.p0(m);
  if (!(spec.p > p0)) throw Error("subcritical exponent: p <= p0");
  RLAlpha r;
  r.R = c1 * std::pow(E, -1.0 / (spec.p - p0));
  r.L = c2 * std::pow(E, 1.0 / spec.p);
  r.alpha = 1.0 - p0 / spec.p;
  return r;
}

Vec GraphPatch::point(int i) const {
  return center + plane.basis() * xi[i] +
         plane.orthogonal_complement().basis() * height[i];
}

namespace {

struct Table {
  std::vector<Vec> xi, height;
  double resolution = 0;
  double scale = 1.0;  // patch radius, used for noise thresholds
};

// Gathers the patch's sample table: sub-cell points of every cell meeting
// B(center, R), projected to (plane, complement) coordinates. The table is
// thinned deterministically to a budget.
Table collect_table(const DiscreteManifold& M, const Vec& center, const Mat& B, const Mat& Bp,
                    double R, int subsamples) {
  Table t;
  std::vector<Vec> pts;
  pts.push_back(center);  // sample 0: xi = 0, height = 0
  double base_res = 0;
  for (int c : M.cells_near(center, R + M.max_cell_diameter())) {
    const auto& cell = M.cells()[c];
    if (M.m() == 1) {
      const Vec &a = M.vertex(cell[0]), &b = M.vertex(cell[1]);
      int k = std::max(1, subsamples);
      for (int i = 0; i <= k; ++i) {
        Vec p = a + (static_cast<double>(i) / k) * (b - a);
        if ((p - center).norm() <= R) pts.push_back(p);
      }
      base_res = std::max(base_res, (b - a).norm() / k);
    } else {
      const Vec &a = M.vertex(cell[0]), &b = M.vertex(cell[1]), &cc = M.vertex(cell[2]);
      int k = std::max(1, subsamples);
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k - i; ++j) {
          Vec p = a + (static_cast<double>(i) / k) * (b - a) + (static_cast<double>(j) / k) * (cc - a);
          if ((p - center).norm() <= R) pts.push_back(p);
        }
      double maxedge = std::max({(b - a).norm(), (cc - b).norm(), (a - cc).norm()});
      base_res = std::max(base_res, maxedge / k);
    }
  }
  const std::size_t budget = 700;
  std::size_t stride = pts.size() > budget ? (pts.size() + budget - 1) / budget : 1;
  t.resolution = base_res * static_cast<double>(stride);
  t.scale = R;
  for (std::size_t i = 0; i < pts.size(); i += (i == 0 ? 1 : stride)) {
    Vec rel = pts[i] - center;
    t.xi.push_back(B.transpose() * rel);
    t.height.push_back(Bp.transpose() * rel);
  }
  return t;
}

// Candidate pair list for quotient estimation: neighbors in plane-coordinate
// order plus a stratified all-pairs subset. Captures both local quotients and
// interleaved sheets.
std::vector<std::pair<int, int>> candidate_pairs(const Table& t, int m) {
  const int P = static_cast<int>(t.xi.size());
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> order(P);
  std::iota(order.begin(), order.end(), 0);
  if (m == 1) {
    std::sort(order.begin(), order.end(), [&](int a, int b) { return t.xi[a](0) < t.xi[b](0); });
  } else {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (t.xi[a](0) != t.xi[b](0)) return t.xi[a](0) < t.xi[b](0);
      return t.xi[a](1) < t.xi[b](1);
    });
  }
  const int window = m == 1 ? 6 : 24;
  for (int i = 0; i < P; ++i)
    for (int w = 1; w <= window && i + w < P; ++w) pairs.emplace_back(order[i], order[i + w]);
  int stride = std::max(1, P / 72);
  for (int i = 0; i < P; i += stride)
    for (int j = i + stride; j < P; j += stride) pairs.emplace_back(i, j);
  return pairs;
}

Mat least_squares_gradient(const Table& t, int idx, int knn) {
  const int m = static_cast<int>(t.xi[0].size());
  const int hdim = static_cast<int>(t.height[0].size());
  const int P = static_cast<int>(t.xi.size());
  int k = std::min(P, std::max(knn, m + 3));
  std::vector<int> order(P);
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    return (t.xi[a] - t.xi[idx]).squaredNorm() < (t.xi[b] - t.xi[idx]).squaredNorm();
  });
  // Affine fit h ~ a + G xi over the k nearest plane coordinates.
  Eigen::MatrixXd A(k, m + 1);
  Eigen::MatrixXd Y(k, hdim);
  for (int r = 0; r < k; ++r) {
    int j = order[r];
    A(r, 0) = 1.0;
    for (int q = 0; q < m; ++q) A(r, q + 1) = t.xi[j](q) - t.xi[idx](q);
    for (int q = 0; q < hdim; ++q) Y(r, q) = t.height[j](q);
  }
  Eigen::MatrixXd sol = (A.transpose() * A).ldlt().solve(A.transpose() * Y);
  Mat G(hdim, m);
  for (int q = 0; q < hdim; ++q)
    for (int c = 0; c < m; ++c) G(q, c) = sol(c + 1, q);
  return G;
}

struct QuotientStats {
  double lip = 0, holder = 0;
  int sheet_a = -1, sheet_b = -1;  // witness of a two-sheet pair
};

QuotientStats quotient_stats(const Table& t, const std::vector<Mat>& grads, double alpha,
                             double min_sep, const std::vector<std::pair<int, int>>& pairs) {
  QuotientStats qs;
  const double noise = 1e-11 * t.scale;
  for (auto [i, j] : pairs) {
    double dxi = (t.xi[i] - t.xi[j]).norm();
    double dh = (t.height[i] - t.height[j]).norm();
    if (dxi < noise && dh < noise) continue;  // duplicate sample
    if (dh > 1.5 * dxi && dh > 1e-6 * t.scale && qs.sheet_a < 0) {
      qs.sheet_a = i;
      qs.sheet_b = j;
    }
    if (dxi > noise) qs.lip = std::max(qs.lip, dh / dxi);
    if (!grads.empty() && dxi >= min_sep) {
      double dg = operator_norm(grads[i] - grads[j]);
      qs.holder = std::max(qs.holder, dg / std::pow(dxi, alpha));
    }
  }
  return qs;
}

// Occupancy of the plane-coordinate footprint: bins inside radius R/sqrt(2)
// must all contain samples.
std::optional<Vec> coverage_hole(const Table& t, int m, double R) {
  double span = R / std::sqrt(2.0);
  double g = std::max(2.0 * t.resolution, R / 64.0);
  int bins = std::max(1, static_cast<int>(std::floor(2 * span / g)));
  g = 2 * span / bins;
  auto bin_of = [&](double x) {
    return std::clamp(static_cast<int>(std::floor((x + span) / g)), 0, bins - 1);
  };
  if (m == 1) {
    std::vector<char> occ(bins, 0);
    for (const auto& xi : t.xi) {
      if (std::abs(xi(0)) <= span) occ[bin_of(xi(0))] = 1;
    }
    for (int b = 1; b + 1 < bins; ++b)
      if (!occ[b]) {
        Vec w(1);
        w << -span + (b + 0.5) * g;
        return w;
      }
  } else {
    std::vector<char> occ(bins * bins, 0);
    for (const auto& xi : t.xi)
      if (xi.norm() <= span) occ[bin_of(xi(0)) * bins + bin_of(xi(1))] = 1;
    for (int bx = 0; bx < bins; ++bx)
      for (int by = 0; by < bins; ++by) {
        Vec c(2);
        c << -span + (bx + 0.5) * g, -span + (by + 0.5) * g;
        if (c.norm() > span - g * 1.5) continue;
        if (!occ[bx * bins + by]) return c;
      }
  }
  return std::nullopt;
}

}  // namespace

PatchResult fit_patch(const DiscreteManifold& M, int vertex, double R, const PatchConfig& cfg,
                      double alpha) {
  if (!(R > 0)) throw Error("fit_patch: R must be positive");
  PatchResult res;
  const Vec& center = M.vertex(vertex);
  Mat B = M.vertex_tangent_basis(vertex);
  Plane plane = Plane::from_orthonormal(B);
  Mat Bp = plane.orthogonal_complement().basis();

  Table t = collect_table(M, center, B, Bp, R, cfg.subsamples);
  auto pairs = candidate_pairs(t, M.m());
  QuotientStats pre = quotient_stats(t, {}, alpha, 0, pairs);
  if (pre.sheet_a >= 0) {
    PatchFailure f;
    f.reason = "non-graph geometry: samples on distinct sheets";
    f.witness_a = center + B * t.xi[pre.sheet_a] + Bp * t.height[pre.sheet_a];
    f.witness_b = center + B * t.xi[pre.sheet_b] + Bp * t.height[pre.sheet_b];
    res.failure = f;
    return res;
  }
  if (auto hole = coverage_hole(t, M.m(), R)) {
    PatchFailure f;
    f.reason = "coverage hole: no sample above plane coordinate";
    f.witness_a = *hole;
    f.witness_b = center;
    res.failure = f;
    return res;
  }

  GraphPatch p;
  p.center = center;
  p.plane = plane;
  p.radius = R;
  p.alpha = alpha;
  p.resolution = t.resolution;
  p.xi = std::move(t.xi);
  p.height = std::move(t.height);
  Table view{p.xi, p.height, p.resolution, p.radius};
  p.grad.resize(p.xi.size());
  for (std::size_t i = 0; i < p.xi.size(); ++i)
    p.grad[i] = least_squares_gradient(view, static_cast<int>(i), cfg.knn);
  QuotientStats qs = quotient_stats(view, p.grad, alpha, cfg.gradient_separation * p.resolution,
                                    pairs);
  p.lip_estimate = qs.lip;
  p.holder_L = qs.holder;
  p.grad0_norm = operator_norm(p.grad[0]);
  res.patch = std::move(p);
  return res;
}

RegularityCertificate verify_class(const DiscreteManifold& M, double R, double L, double d,
                                   double alpha, const PatchConfig& cfg) {
  if (!(R > 0 && L > 0 && d > 0)) throw Error("verify_class: parameters must be positive");
  if (!(alpha > 0 && alpha <= 1)) throw Error("verify_class: alpha must lie in (0,1]");
  RegularityCertificate cert;
  cert.R = R;
  cert.L = L;
  cert.d = d;
  cert.alpha = alpha;
  cert.slack = std::min(0.25, cfg.slack_scale * M.max_cell_diameter() / R);

  // Condition (i): containment in a ball of radius d after centering.
  Vec lo = M.vertex(0), hi = M.vertex(0);
  for (const auto& v : M.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  Vec c = 0.5 * (lo + hi);
  double radius = 0;
  for (const auto& v : M.vertices()) radius = std::max(radius, (v - c).norm());
  cert.containment_radius = radius;
  if (radius > d * (1 + 1e-9)) {
    cert.verdict = false;
    cert.reason = "diameter";
    return cert;
  }

  const int V = M.vertex_count();
  cert.per_vertex.resize(V);
  const double lip_cap = 1.0 + cert.slack;
  const double holder_cap = L * (1.0 + cert.slack);
  const double grad0_cap = std::max(1e-7, 2.0 * cert.slack);
  parallel_for_chunks(V, cfg.threads, [&](int v) {
    VertexVerdict& vv = cert.per_vertex[v];
    vv.vertex = v;
    PatchResult pr = fit_patch(M, v, R, cfg, alpha);
    if (!pr.ok()) {
      vv.pass = false;
      vv.reason = pr.failure->reason;
      return;
    }
    const GraphPatch& p = *pr.patch;
    vv.lip = p.lip_estimate;
    vv.holder = p.holder_L;
    vv.grad0 = p.grad0_norm;
    if (p.grad0_norm > grad0_cap)
      vv.reason = "Df(0) not flat";
    else if (p.lip_estimate > lip_cap)
      vv.reason = "lip(f) > 1";
    else if (p.holder_L > holder_cap)
      vv.reason = "Holder quotient exceeds L";
    vv.pass = vv.reason.empty();
  });

  cert.verdict = true;
  for (const auto& vv : cert.per_vertex) {
    cert.max_lip = std::max(cert.max_lip, vv.lip);
    cert.max_holder = std::max(cert.max_holder, vv.holder);
    if (!vv.pass && cert.verdict) {
      cert.verdict = false;
      cert.reason = "vertex " + std::to_string(vv.vertex) + ": " + vv.reason;
    }
  }
  return cert;
}

nlohmann::json RegularityCertificate::to_json() const {
  nlohmann::json j;
  j["R"] = R;
  j["L"] = L;
  j["d"] = d;
  j["alpha"] = alpha;
  j["verdict"] = verdict;
  j["reason"] = reason;
  j["containment_radius"] = containment_radius;
  j["max_lip"] = max_lip;
  j["max_holder"] = max_holder;
  j["slack"] = slack;
  j["vertex_count"] = per_vertex.size();
  nlohmann::json fails = nlohmann::json::array();
  int listed = 0;
  for (const auto& vv : per_vertex) {
    if (vv.pass || listed >= 64) continue;
    fails.push_back({{"vertex", vv.vertex},
                     {"reason", vv.reason},
                     {"lip", vv.lip},
                     {"holder", vv.holder},
                     {"grad0", vv.grad0}});
    ++listed;
  }
  j["failures"] = fails;
  nlohmann::json pass = nlohmann::json::array();
  for (const auto& vv : per_vertex) pass.push_back(vv.pass ? 1 : 0);
  j["per_vertex_pass"] = pass;
  return j;
}

GraphPatch tilt_graph(const GraphPatch& patch, const Plane& U) {
  double theta = angle(U, patch.plane);
  if (!(theta < 0.01)) throw Error("tilt angle too large");
  Mat B = patch.plane.basis();
  Mat Bp = patch.plane.orthogonal_complement().basis();
  Mat BU = U.basis();
  Mat BUp = U.orthogonal_complement().basis();

  GraphPatch g;
  g.center = patch.center;
  g.plane = U;
  g.radius = patch.radius / (1.0 + 3.0 * theta);
  g.alpha = patch.alpha;
  g.resolution = patch.resolution;
  const std::size_t P = patch.xi.size();
  g.xi.resize(P);
  g.height.resize(P);
  for (std::size_t i = 0; i < P; ++i) {
    Vec rel = B * patch.xi[i] + Bp * patch.height[i];
    g.xi[i] = BU.transpose() * rel;
    g.height[i] = BUp.transpose() * rel;
  }
  Table view{g.xi, g.height, g.resolution, g.radius};
  auto pairs = candidate_pairs(view, static_cast<int>(g.xi[0].size()));
  g.grad.resize(P);
  for (std::size_t i = 0; i < P; ++i)
    g.grad[i] = least_squares_gradient(view, static_cast<int>(i), 0);
  // Holder quotient restricted to the shrunken ball of the lemma.
  std::vector<std::pair<int, int>> inside;
  for (auto [i, j] : pairs)
    if (g.xi[i].norm() <= g.radius && g.xi[j].norm() <= g.radius) inside.emplace_back(i, j);
  QuotientStats qh = quotient_stats(view, g.grad, g.alpha, 2.0 * g.resolution, inside);
  QuotientStats ql = quotient_stats(view, {}, g.alpha, 0, pairs);
  g.lip_estimate = ql.lip;
  g.holder_L = qh.holder;
  g.grad0_norm = operator_norm(g.grad[0]);
  return g;
}

ProximityReport check_tangent_proximity(const DiscreteManifold& S1, const DiscreteManifold& S2,
                                        int x_vertex, int y_vertex, double A, double R, double L,
                                        double alpha, double d_h) {
  if (A < 1) throw Error("check_tangent_proximity: A must be >= 1");
  if (d_h < 0) d_h = hausdorff_distance(S1, S2);
  double t1 = std::pow(2.0, -6.0) / (A * A) * R * R;
  double t2 = std::pow(L, -2.0 / alpha);
  double thr = std::min({t1, t2, 1.0});
  if (d_h > 0 && d_h >= thr) {
    std::string which = thr == t1 ? "2^-6 A^-2 R^2" : (thr == t2 ? "L^{-2/alpha}" : "1");
    throw Error("proximity threshold violated: d_h >= min term " + which);
  }
  double sep = (S1.vertex(x_vertex) - S2.vertex(y_vertex)).norm();
  if (sep > A * d_h + kTol) throw Error("check_tangent_proximity: |x-y| > A d_h");

  ProximityReport rep;
  rep.d_h = d_h;
  Plane Tx = Plane::from_orthonormal(S1.vertex_tangent_basis(x_vertex));
  Plane Ty = Plane::from_orthonormal(S2.vertex_tangent_basis(y_vertex));
  rep.angle = angle(Tx, Ty);
  rep.c_ang = L * (1.0 + (4.0 * A) * (4.0 * A)) + 2.0 * A;
  rep.bound = rep.c_ang * std::pow(d_h, alpha / 2.0);
  rep.ok = rep.angle <= rep.bound + kTol;
  return rep;
}

}  // namespace curvem
