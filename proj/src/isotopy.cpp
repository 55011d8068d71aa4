#include "curvem/isotopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "curvem/parallel.hpp"
#include "curvem/rng.hpp"

namespace curvem {

namespace {

Mat raw_normal_projector(const Mat& tangent_basis) {
  const int n = static_cast<int>(tangent_basis.rows());
  return Mat::Identity(n, n) - tangent_basis * tangent_basis.transpose();
}

double bump(double t) {
  if (t >= 1.0) return 0.0;
  double s = 1.0 - t * t;
  return s * s * s;
}

// Vertices of cells within `radius` of p (deduplicated).
std::vector<int> vertices_near(const DiscreteManifold& M, const Vec& p, double radius) {
  std::vector<int> verts;
  for (int c : M.cells_near(p, radius + M.max_cell_diameter()))
    for (int k = 0; k < M.cell_size(); ++k) verts.push_back(M.cells()[c][k]);
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  return verts;
}

}  // namespace

NormalField build_normal_field(const DiscreteManifold& M, const RegularityCertificate& cert,
                               double epsilon, const NormalFieldConfig& cfg) {
  if (!(epsilon > 0 && epsilon < 0.01)) throw Error("epsilon must lie in (0, 1/100)");
  if (!cert.verdict) throw Error("build_normal_field: class certificate does not hold");

  NormalField f;
  f.base = vertex_samples(M);
  f.epsilon = epsilon;
  f.R = cert.R;
  f.L = cert.L;
  f.alpha = cert.alpha;
  const int n = M.n(), m = M.m();
  const int N = static_cast<int>(f.base.points.size());

  // Constant chain for the mollification radius.
  const double L = cert.L, R = cert.R, alpha = cert.alpha;
  double c0 = std::max(2.0 / std::min(1.0 / (L * std::sqrt(2.0)), std::pow(R, alpha)),
                       cfg.c_m * L);
  double c1 = n * c0;
  double c2 = 24.0 * (1.0 + 2.0 * c1);
  double delta0 = std::min({cfg.r_grass, std::pow(2.0 / 3.0, alpha) * c2, 1.0});
  f.r_grass_limited = (delta0 == cfg.r_grass);
  f.moll_radius_formula = std::pow(delta0 / (2.0 * c2), 1.0 / alpha) * std::pow(epsilon, 1.0 / alpha);
  f.lip_bound = std::pow(2.0 * c2, 1.0 + 1.0 / alpha) * std::pow(delta0 * epsilon, -1.0 / alpha);

  const double resolution = f.base.resolution;
  f.degenerate_mollification = f.moll_radius_formula < resolution;
  if (cfg.mollify_floor <= 0 && f.degenerate_mollification)
    throw Error("refine mesh: mollification radius " + std::to_string(f.moll_radius_formula) +
                " is below the mesh resolution " + std::to_string(resolution));
  f.moll_radius_used = std::max(f.moll_radius_formula, cfg.mollify_floor * resolution);

  std::vector<Mat> raw(N);
  for (int i = 0; i < N; ++i) raw[i] = raw_normal_projector(f.base.tangents[i]);

  f.projectors.resize(N);
  std::vector<double> deviations(N, 0.0);
  parallel_for_chunks(N, cfg.threads, [&](int i) {
    const Vec& x = f.base.points[i];
    Mat acc = Mat::Zero(n, n);
    double wsum = 0;
    for (int j : vertices_near(M, x, f.moll_radius_used)) {
      double w = bump((x - f.base.points[j]).norm() / f.moll_radius_used) * f.base.weights[j];
      if (w <= 0) continue;
      acc += w * raw[j];
      wsum += w;
    }
    if (wsum <= 0) {
      acc = raw[i];
      wsum = 1;
    }
    f.projectors[i] = nearest_rank_projector(acc / wsum, n - m);
    deviations[i] = operator_norm(f.projectors[i] - raw[i]);
  });
  f.max_deviation = *std::max_element(deviations.begin(), deviations.end());
  if (f.max_deviation > epsilon)
    throw Error("normal field deviates by " + std::to_string(f.max_deviation) +
                " > epsilon; refine mesh or relax epsilon");

  // Sampled Lipschitz quotient: local pairs plus a stratified global subset.
  double lip = 0;
  std::vector<double> lips(N, 0.0);
  parallel_for_chunks(N, cfg.threads, [&](int i) {
    double li = 0;
    for (int j : vertices_near(M, f.base.points[i], 16.0 * resolution)) {
      if (j <= i) continue;
      double dist = (f.base.points[i] - f.base.points[j]).norm();
      if (dist < 1e-14) continue;
      li = std::max(li, operator_norm(f.projectors[i] - f.projectors[j]) / dist);
    }
    lips[i] = li;
  });
  for (double v : lips) lip = std::max(lip, v);
  int stride = std::max(1, N / 96);
  for (int i = 0; i < N; i += stride)
    for (int j = i + stride; j < N; j += stride) {
      double dist = (f.base.points[i] - f.base.points[j]).norm();
      if (dist < 1e-14) continue;
      lip = std::max(lip, operator_norm(f.projectors[i] - f.projectors[j]) / dist);
    }
  f.lip_measured = lip;
  return f;
}

double delta_tub(double R, double L, double alpha, double eps, double lip_phi) {
  return std::min({R / 4.0, 0.25 * std::pow(eps / L, 1.0 / alpha), eps / (4.0 * lip_phi), 1.0});
}

namespace {

// Interpolated projector at barycentric position within a cell, retracted to
// the projector manifold.
Mat interpolated_projector(const DiscreteManifold& M, const NormalField& f, int cell,
                           const double* bary) {
  const auto& cv = M.cells()[cell];
  Mat acc = bary[0] * f.projectors[cv[0]];
  acc += bary[1] * f.projectors[cv[1]];
  if (M.m() == 2) acc += bary[2] * f.projectors[cv[2]];
  return nearest_rank_projector(acc, M.n() - M.m());
}

Vec cell_point(const DiscreteManifold& M, int cell, const double* bary) {
  const auto& cv = M.cells()[cell];
  Vec p = bary[0] * M.vertex(cv[0]) + bary[1] * M.vertex(cv[1]);
  if (M.m() == 2) p += bary[2] * M.vertex(cv[2]);
  return p;
}

double projection_residual(const DiscreteManifold& M, const NormalField& f, int cell,
                           const double* bary, const Vec& p) {
  Vec a = cell_point(M, cell, bary);
  Mat phi = interpolated_projector(M, f, cell, bary);
  Vec d = p - a;
  return (d - phi * d).norm();
}

}  // namespace

NormalProjection normal_project(const DiscreteManifold& S1, const NormalField& field,
                                const Vec& p, double search_radius) {
  NormalProjection best;
  best.residual = std::numeric_limits<double>::infinity();
  std::vector<int> cand = S1.cells_near(p, search_radius + S1.max_cell_diameter());
  if (cand.empty()) cand = S1.cells_near(p, 8 * search_radius + 4 * S1.max_cell_diameter());
  for (int c : cand) {
    if (S1.m() == 1) {
      // Coarse scan then golden-section refinement in the edge parameter.
      const int K = 24;
      double bt = 0, bres = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= K; ++k) {
        double t = static_cast<double>(k) / K;
        double bary[2] = {1 - t, t};
        double r = projection_residual(S1, field, c, bary, p);
        if (r < bres) {
          bres = r;
          bt = t;
        }
      }
      double lo = std::max(0.0, bt - 1.0 / K), hi = std::min(1.0, bt + 1.0 / K);
      const double gr = 0.61803398874989484820;
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      auto eval = [&](double t) {
        double bary[2] = {1 - t, t};
        return projection_residual(S1, field, c, bary, p);
      };
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = eval(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = eval(x2);
        }
      }
      double t = 0.5 * (lo + hi);
      double bary[2] = {1 - t, t};
      double r = projection_residual(S1, field, c, bary, p);
      if (r < best.residual) {
        best.residual = r;
        best.cell = c;
        best.a = cell_point(S1, c, bary);
        best.v = p - best.a;
      }
    } else {
      // Barycentric lattice scan with two refinement levels.
      double bu = 1.0 / 3, bv = 1.0 / 3, bres = std::numeric_limits<double>::infinity();
      double span = 1.0;
      const int K = 10;
      for (int level = 0; level < 3; ++level) {
        double cu = bu, cv = bv;
        for (int i = 0; i <= K; ++i)
          for (int j = 0; j <= K - i; ++j) {
            double u = std::clamp(cu + span * (static_cast<double>(i) / K - 0.5), 0.0, 1.0);
            double v = std::clamp(cv + span * (static_cast<double>(j) / K - 0.5), 0.0, 1.0);
            if (u + v > 1) continue;
            double bary[3] = {1 - u - v, u, v};
            double r = projection_residual(S1, field, c, bary, p);
            if (r < bres) {
              bres = r;
              bu = u;
              bv = v;
            }
          }
        span /= K;
      }
      if (bres < best.residual) {
        double bary[3] = {1 - bu - bv, bu, bv};
        best.residual = bres;
        best.cell = c;
        best.a = cell_point(S1, c, bary);
        best.v = p - best.a;
      }
    }
  }
  if (best.cell < 0) throw Error("normal_project: no candidate cells in search radius");
  return best;
}

TubularReport tubular_map_checks(const DiscreteManifold& M, const NormalField& field,
                                 double delta, long long pairs, std::uint64_t seed) {
  TubularReport rep;
  rep.pairs = pairs;
  CounterRng rng{seed};
  const int N = static_cast<int>(field.base.points.size());
  const int n = M.n();

  auto random_nd = [&](std::uint64_t ctr, int node) {
    // normal-space offset at a node: project a gaussian onto im Phi
    Vec g(n);
    for (int a = 0; a < n; ++a) g(a) = rng.normal(ctr * kMaxDim + a);
    Vec u = field.projectors[node] * g;
    double nrm = u.norm();
    if (nrm < 1e-14) {
      u.setZero();
      u(0) = 1e-14;
      nrm = u.norm();
    }
    return Vec(u / nrm);
  };

  for (long long s = 0; s < pairs; ++s) {
    std::uint64_t c = static_cast<std::uint64_t>(s) * 8;
    int i = static_cast<int>(rng.uniform(c) * N) % N;
    int j = static_cast<int>(rng.uniform(c + 1) * N) % N;
    double ru = rng.uniform(c + 2) * delta;
    double rv = rng.uniform(c + 3) * delta;
    Vec u = ru * random_nd(c + 4, i);
    Vec v = rv * random_nd(c + 5, j);
    const Vec &x = field.base.points[i], &y = field.base.points[j];

    // (ii) bilipschitz sandwich
    double lhs = ((x + u) - (y + v)).norm();
    double mag = std::sqrt((x - y).squaredNorm() + (u - v).squaredNorm());
    if (mag > 1e-14) {
      double lower = lhs / mag;
      rep.worst_lower_ratio = std::min(rep.worst_lower_ratio, lower);
      rep.worst_upper_ratio = std::max(rep.worst_upper_ratio, lower);
      if (lhs < 0.25 * mag - 1e-12 || lhs > std::sqrt(2.0) * mag + 1e-12) {
        ++rep.bilip_violations;
        if (rep.witness.empty())
          rep.witness = "bilip violation at nodes " + std::to_string(i) + "," + std::to_string(j);
      }
    }

    // (iii) distance lower bound
    if (rv > 1e-13) {
      double dist = M.distance_to(y + v);
      rep.worst_dist_ratio = std::min(rep.worst_dist_ratio, dist / rv);
      if (!(dist > 0.25 * rv)) {
        ++rep.dist_violations;
        if (rep.witness.empty())
          rep.witness = "distance bound violation at node " + std::to_string(j);
      }
    }

    // (iv) coverage round trip for a probe in Sigma + B(0, delta/2)
    Vec o(n);
    for (int a = 0; a < n; ++a) o(a) = rng.normal((c + 6) * kMaxDim + a);
    double onrm = o.norm();
    if (onrm < 1e-14) onrm = 1;
    o *= (rng.uniform(c + 7) * 0.5 * delta) / onrm;
    Vec probe = x + o;
    NormalProjection np = normal_project(M, field, probe, delta);
    double tol = std::max(0.25 * field.base.resolution, 1e-12);
    rep.worst_cover_residual = std::max(rep.worst_cover_residual, np.residual);
    if (np.residual > tol || np.v.norm() >= delta + tol) {
      ++rep.cover_violations;
      if (rep.witness.empty())
        rep.witness = "coverage round-trip failed near node " + std::to_string(i);
    }
  }
  return rep;
}

ProjectionReport project_onto(const DiscreteManifold& S2, const DiscreteManifold& S1,
                              const NormalField& field1) {
  ProjectionReport rep;
  rep.delta_tub = delta_tub(field1.R, field1.L, field1.alpha, field1.epsilon, field1.lip_measured);
  rep.rho = hausdorff_distance(S1, S2);
  if (!(rep.rho < rep.delta_tub / 8.0))
    throw Error("project_onto: d_H = " + std::to_string(rep.rho) +
                " not below delta_tub/8 = " + std::to_string(rep.delta_tub / 8.0));
  rep.C_l = 1e4 * (field1.lip_measured + 1.0) * (field1.L + 1.0);
  rep.sandwich_bound = rep.C_l * std::pow(rep.rho, field1.alpha / 2.0);

  const int V2 = S2.vertex_count();
  rep.F_points.resize(V2);
  std::vector<double> gnorm(V2), gdist(V2), resid(V2);
  parallel_for_chunks(V2, 0, [&](int i) {
    NormalProjection np = normal_project(S1, field1, S2.vertex(i), rep.delta_tub);
    rep.F_points[i] = np.a;
    gnorm[i] = np.v.norm();
    gdist[i] = S1.distance_to(S2.vertex(i));
    resid[i] = np.residual;
  });
  double res_tol = std::max(0.25 * field1.base.resolution, 1e-12);
  rep.g_ok = true;
  for (int i = 0; i < V2; ++i) {
    rep.max_G = std::max(rep.max_G, gnorm[i]);
    if (resid[i] > res_tol) {
      ++rep.search_failures;
      if (rep.witness.empty()) rep.witness = "search failure at S2 vertex " + std::to_string(i);
    }
    double ratio = gdist[i] > 0 ? gnorm[i] / gdist[i] : (gnorm[i] > res_tol ? 1e9 : 0.0);
    rep.max_G_over_dist = std::max(rep.max_G_over_dist, ratio);
    if (ratio > 4.0) {
      rep.g_ok = false;
      if (rep.witness.empty()) rep.witness = "|G| > 4 dist at S2 vertex " + std::to_string(i);
    }
  }

  // Bilipschitz sandwich over vertex pairs.
  rep.sandwich_ok = true;
  for (int i = 0; i < V2; ++i)
    for (int j = i + 1; j < V2; ++j) {
      double base = (S2.vertex(i) - S2.vertex(j)).norm();
      if (base < 1e-14) continue;
      double ratio = (rep.F_points[i] - rep.F_points[j]).norm() / base;
      rep.max_ratio_dev = std::max(rep.max_ratio_dev, std::abs(ratio - 1.0));
    }
  if (rep.max_ratio_dev > rep.sandwich_bound + 1e-12) rep.sandwich_ok = false;

  // Vertex coverage of S1 by the image (testable stand-in for surjectivity).
  rep.surjectivity_tol =
      2.0 * std::max(S1.max_cell_diameter(), S2.max_cell_diameter());
  for (int v = 0; v < S1.vertex_count(); ++v) {
    double bestd = std::numeric_limits<double>::infinity();
    for (const Vec& q : rep.F_points) bestd = std::min(bestd, (S1.vertex(v) - q).norm());
    rep.max_surjectivity_gap = std::max(rep.max_surjectivity_gap, bestd);
  }
  rep.surjective = rep.max_surjectivity_gap <= rep.surjectivity_tol;
  return rep;
}

IsotopyCertificate certify_isotopy(const DiscreteManifold& S1, const DiscreteManifold& S2,
                                   double R, double L, double d, double alpha,
                                   const NormalFieldConfig& cfg) {
  RegularityCertificate c1 = verify_class(S1, R, L, d, alpha);
  if (!c1.verdict) throw Error("certify_isotopy: first manifold fails the class: " + c1.reason);
  RegularityCertificate c2 = verify_class(S2, R, L, d, alpha);
  if (!c2.verdict) throw Error("certify_isotopy: second manifold fails the class: " + c2.reason);

  IsotopyCertificate cert;
  cert.epsilon = 1.0 / 200.0;
  cert.R = R;
  cert.L = L;
  cert.d = d;
  cert.alpha = alpha;
  cert.r_grass = cfg.r_grass;

  NormalField f1 = build_normal_field(S1, c1, cert.epsilon, cfg);
  cert.lip_phi = f1.lip_measured;
  cert.lip_phi_bound = f1.lip_bound;
  cert.r_grass_limited = f1.r_grass_limited;
  cert.degenerate_mollification = f1.degenerate_mollification;
  cert.delta_tub = delta_tub(R, L, alpha, cert.epsilon, cert.lip_phi);
  cert.C_l = 1e4 * (cert.lip_phi + 1.0) * (L + 1.0);
  cert.rho_G = std::pow(cert.C_l, -2.0 / alpha);
  if (cert.rho_G > cert.delta_tub / 8.0) {
    cert.rho_G = cert.delta_tub / 8.0;
    cert.rho_G_clamped = true;
  }
  // Resolve the Hausdorff distance finely enough to compare against rho_G.
  double res = std::min({0.5 * S1.median_edge_length(), 0.5 * S2.median_edge_length()});
  cert.d_h = hausdorff_distance(S1, S2, res);
  cert.verdict = cert.d_h > 0 && cert.d_h < cert.rho_G;
  return cert;
}

nlohmann::json IsotopyCertificate::to_json() const {
  nlohmann::json j;
  j["verdict"] = verdict;
  j["d_h"] = d_h;
  j["rho_G"] = rho_G;
  j["C_l"] = C_l;
  j["delta_tub"] = delta_tub;
  j["epsilon"] = epsilon;
  j["lip_phi_measured"] = lip_phi;
  j["lip_phi_bound"] = lip_phi_bound;
  j["constants_provenance"] = {{"R", R},   {"L", L},   {"d", d},
                               {"alpha", alpha}, {"c1", c1}, {"c2", c2},
                               {"r_grass", r_grass}};
  j["r_grass_limited"] = r_grass_limited;
  j["rho_G_clamped"] = rho_G_clamped;
  j["degenerate_mollification"] = degenerate_mollification;
  return j;
}

DiffeoConstants ambient_diffeo_constants(const IsotopyCertificate& cert) {
  if (!cert.verdict) throw Error("ambient_diffeo_constants: certificate verdict is false");
  DiffeoConstants dc;
  double eps_cap = std::pow(1.0 / (800.0 * cert.C_l), 2.0 / cert.alpha);
  dc.rho_0 = std::min({cert.delta_tub / 16.0, cert.rho_G / 2.0, eps_cap});
  dc.C_T = 256.0 / std::pow(dc.rho_0, cert.alpha / 2.0) + 4.0 * cert.C_l;
  dc.C_J = 4.0 * cert.C_l + dc.C_T;
  dc.rho_g = std::min(std::pow(dc.C_J, -2.0 / cert.alpha), dc.rho_0);
  dc.bilip_bound = 1.0 + dc.C_J * std::pow(cert.d_h, cert.alpha / 2.0);
  return dc;
}

CountResult count_isotopy_types(double E, double d, const EnergySpec& spec, int m, int n,
                                double c1, double c2, double r_grass) {
  if (!(E > 0) || !(d > 0)) throw Error("count_isotopy_types: E and d must be positive");
  RLAlpha rl = rl_from_energy(E, spec, m, c1, c2);
  CountResult r;
  r.R = rl.R;
  r.L = rl.L;
  r.alpha = rl.alpha;
  double delta0 = std::min(r_grass, 1.0);
  double e1p = std::pow(E, 1.0 / spec.p);
  r.lip_phi_bound = std::pow(e1p + 1.0, 1.0 + 1.0 / rl.alpha) * std::pow(delta0, -1.0 / rl.alpha);
  r.C_l = 1e4 * (r.lip_phi_bound + 1.0) * (rl.L + 1.0);
  r.rho_G = std::pow(r.C_l, -2.0 / rl.alpha);
  r.k = std::ceil(2.0 * d * std::sqrt(static_cast<double>(n)) / r.rho_G);
  if (r.k < 1) r.k = 1;
  r.log2_N = n * std::log2(r.k);
  r.log2_K = std::exp2(r.log2_N);  // equals k^n; +inf when it overflows a double
  r.loglog_K = n * std::log(r.k) + std::log(std::log(2.0));
  r.shape_term = std::abs(std::log(d)) + std::log(e1p + 1.0) + 1.0;
  return r;
}

}  // namespace curvem
