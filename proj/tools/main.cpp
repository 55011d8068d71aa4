// Command-line front end: energy evaluation, class verification, isotopy
// certification, type counting, Hausdorff distance, gradient flows.
//
// Exit codes: 0 success / certified, 3 certificate refused, 1 error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvem/energy.hpp"
#include "curvem/isotopy.hpp"
#include "curvem/manifold.hpp"
#include "curvem/minimize.hpp"
#include "curvem/regularity.hpp"

using nlohmann::json;
using namespace curvem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitRefused = 3;

int resolve_cli_threads(int flag_value) {
  if (const char* env = std::getenv("CURVEM_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return flag_value;
}

void emit(const json& j, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(output);
    if (!out) throw Error("cannot write " + output);
    out << j.dump(2) << "\n";
  }
}

EnergySpec parse_spec(const std::string& kind, double p, int l) {
  EnergySpec spec;
  spec.p = p;
  spec.l = l;
  if (kind == "menger")
    spec.kind = EnergyKind::MengerL;
  else if (kind == "tp")
    spec.kind = EnergyKind::TangentPoint;
  else if (kind == "tpg")
    spec.kind = EnergyKind::TangentPointSup;
  else
    throw Error("unknown energy kind: " + kind);
  return spec;
}

struct CommonOpts {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "RNG seed (64-bit)");
  cmd->add_option("--threads", c.threads, "worker threads (0 = auto; CURVEM_THREADS overrides)");
  cmd->add_option("-o,--output", c.output, "output path (default stdout)");
}

json config_echo(const CommonOpts& c) {
  return json{{"seed", c.seed}, {"threads", c.threads}, {"output", c.output.empty() ? "-" : c.output}};
}

int run_energy(const std::string& input, const std::string& kind, double p, int l,
               const std::string& quad_mode, long long samples, int density,
               double exclusion, const CommonOpts& common) {
  EnergySpec spec = parse_spec(kind, p, l);
  DiscreteManifold M = load_manifold(input);
  QuadratureConfig quad;
  quad.density = density;
  quad.seed = common.seed;
  quad.threads = resolve_cli_threads(common.threads);
  quad.exclusion_radius = exclusion;
  if (quad_mode == "mc") {
    quad.mode = QuadratureConfig::Mode::MonteCarlo;
    quad.samples = samples;
  } else if (quad_mode != "exhaustive") {
    throw Error("unknown quadrature mode: " + quad_mode);
  }

  auto t0 = std::chrono::steady_clock::now();
  EnergyResult r = evaluate(M, spec, quad);
  auto t1 = std::chrono::steady_clock::now();

  json j;
  j["config"] = config_echo(common);
  j["config"]["input"] = input;
  j["config"]["kind"] = kind;
  j["config"]["p"] = p;
  if (spec.kind == EnergyKind::MengerL) j["config"]["l"] = l;
  j["config"]["quad"] = quad_mode;
  j["config"]["density"] = density;
  if (quad.mode == QuadratureConfig::Mode::MonteCarlo) j["config"]["samples"] = samples;
  j["value"] = r.value;
  j["p"] = p;
  j["p0"] = spec.p0(M.m());
  j["alpha"] = spec.alpha(M.m());
  j["quadrature"] = r.exhaustive ? "exhaustive" : "monte_carlo";
  j["node_count"] = r.node_count;
  j["stderr"] = r.stderr_estimate;
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  j["wall_time_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  emit(j, common.output);
  return kExitOk;
}

int run_certify(const std::vector<std::string>& inputs, const std::string& mode, double R,
                double L, double d, double alpha, double E, double c1, double c2,
                const std::string& kind, double p, int l, double r_grass,
                const CommonOpts& common) {
  json j;
  j["config"] = config_echo(common);
  j["config"]["mode"] = mode;
  int exit_code = kExitOk;
  if (mode == "class") {
    if (inputs.empty()) throw Error("class mode needs one input manifold");
    DiscreteManifold M = load_manifold(inputs[0]);
    PatchConfig pc;
    pc.threads = resolve_cli_threads(common.threads);
    RegularityCertificate cert = verify_class(M, R, L, d, alpha, pc);
    j["certificate"] = cert.to_json();
    exit_code = cert.verdict ? kExitOk : kExitRefused;
  } else if (mode == "isotopy") {
    if (inputs.size() < 2) throw Error("isotopy mode needs two input manifolds");
    DiscreteManifold S1 = load_manifold(inputs[0]);
    DiscreteManifold S2 = load_manifold(inputs[1]);
    NormalFieldConfig nc;
    nc.r_grass = r_grass;
    nc.threads = resolve_cli_threads(common.threads);
    IsotopyCertificate cert = certify_isotopy(S1, S2, R, L, d, alpha, nc);
    j["certificate"] = cert.to_json();
    exit_code = cert.verdict ? kExitOk : kExitRefused;
  } else if (mode == "count") {
    if (inputs.empty()) throw Error("count mode needs one input manifold (for m, n)");
    DiscreteManifold M = load_manifold(inputs[0]);
    EnergySpec spec = parse_spec(kind, p, l);
    CountResult r = count_isotopy_types(E, d, spec, M.m(), M.n(), c1, c2, r_grass);
    j["count"] = {{"k", r.k},
                  {"log2_N", r.log2_N},
                  {"log2_K", r.log2_K},
                  {"loglog_K", r.loglog_K},
                  {"shape_term", r.shape_term},
                  {"rho_G", r.rho_G},
                  {"R", r.R},
                  {"L", r.L},
                  {"alpha", r.alpha},
                  {"C_l", r.C_l},
                  {"lip_phi_bound", r.lip_phi_bound}};
  } else {
    throw Error("unknown certify mode: " + mode);
  }
  emit(j, common.output);
  return exit_code;
}

int run_minimize(const std::string& input, const std::string& kind, double p, int l,
                 const std::string& constraint, int max_iters, double sigma,
                 const std::string& trace_path, const std::string& final_path,
                 const CommonOpts& common) {
  if (!(sigma > 0 && sigma < 1)) throw Error("sigma must be in (0,1)");
  EnergySpec spec = parse_spec(kind, p, l);
  DiscreteManifold M = load_manifold(input);
  QuadratureConfig quad;
  quad.seed = common.seed;
  quad.threads = resolve_cli_threads(common.threads);
  FlowConstraint fc = constraint == "diameter" ? FlowConstraint::FixedDiameter
                                               : FlowConstraint::FixedTotalMeasure;
  if (constraint != "diameter" && constraint != "measure")
    throw Error("constraint must be 'measure' or 'diameter'");

  FlowOptions opts;
  opts.sigma = sigma;
  opts.seed = common.seed;

  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw Error("cannot write " + trace_path);
  }
  FlowState st = init_flow(M, spec, quad, fc);
  double initial_energy = st.energy;
  for (int it = 0; it < max_iters && !st.converged; ++it) {
    st = descend(st, opts);
    if (!st.history.empty() && st.history.back().iteration == st.iteration && !st.converged) {
      const FlowRecord& rec = st.history.back();
      json line = {{"iteration", rec.iteration}, {"energy", rec.energy},
                   {"step", rec.step},           {"d_h_prev", rec.d_h_prev},
                   {"max_disp", rec.max_disp},   {"accepted", rec.accepted}};
      if (trace.is_open()) trace << line.dump() << "\n";
    }
  }
  if (!final_path.empty()) save_manifold(st.manifold, final_path);

  json j;
  j["config"] = config_echo(common);
  j["config"]["input"] = input;
  j["config"]["kind"] = kind;
  j["config"]["p"] = p;
  j["config"]["constraint"] = constraint;
  j["config"]["max_iters"] = max_iters;
  j["config"]["sigma"] = sigma;
  j["initial_energy"] = initial_energy;
  j["final_energy"] = st.energy;
  j["iterations"] = st.iteration;
  j["converged"] = st.converged;
  emit(j, common.output);
  return kExitOk;
}

int run_hausdorff(const std::string& a, const std::string& b, double resolution,
                  const CommonOpts& common) {
  DiscreteManifold A = load_manifold(a);
  DiscreteManifold B = load_manifold(b);
  HausdorffBreakdown h = hausdorff_breakdown(A, B, resolution);
  json j;
  j["config"] = config_echo(common);
  j["config"]["inputs"] = {a, b};
  j["d_h"] = h.sum;  // sum of the two one-sided sup distances
  j["a_to_b"] = h.a_to_b;
  j["b_to_a"] = h.b_to_a;
  j["max_convention"] = h.max_convention;  // diagnostic only
  j["resolution"] = h.resolution;
  emit(j, common.output);
  return kExitOk;
}

int run_sample_info(const std::string& input, int density, const CommonOpts& common) {
  DiscreteManifold M = load_manifold(input);
  SampleSet S = sample(M, density);
  json j;
  j["config"] = config_echo(common);
  j["config"]["input"] = input;
  j["config"]["density"] = density;
  j["m"] = M.m();
  j["n"] = M.n();
  j["vertices"] = M.vertex_count();
  j["cells"] = M.cell_count();
  j["components"] = M.component_count();
  j["node_count"] = S.points.size();
  j["total_weight"] = S.total_weight();
  j["diameter"] = diameter(M);
  j["median_edge"] = M.median_edge_length();
  j["min_self_distance"] = min_nonadjacent_distance(M);
  emit(j, common.output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvem: curvature energies, graph-patch classes and isotopy certificates "
               "for discrete curves and surfaces"};
  app.require_subcommand(1);

  // energy
  auto* energy_cmd = app.add_subcommand("energy", "evaluate a curvature energy");
  std::string e_input, e_kind = "tp", e_quad = "exhaustive";
  double e_p = 2.0, e_exclusion = 0.0;
  int e_l = 0, e_density = 1;
  long long e_samples = 100000;
  CommonOpts e_common;
  energy_cmd->add_option("input", e_input)->required();
  energy_cmd->add_option("--kind", e_kind, "menger | tp | tpg");
  energy_cmd->add_option("--p", e_p, "exponent p > 0");
  energy_cmd->add_option("--l", e_l, "menger order l in 1..m+2");
  energy_cmd->add_option("--quad", e_quad, "exhaustive | mc");
  energy_cmd->add_option("--samples", e_samples, "monte carlo tuple draws");
  energy_cmd->add_option("--density", e_density, "samples per cell");
  energy_cmd->add_option("--exclusion-radius", e_exclusion, "near-diagonal cutoff");
  add_common(energy_cmd, e_common);

  // certify
  auto* certify_cmd = app.add_subcommand("certify", "class / isotopy / count certificates");
  std::vector<std::string> c_inputs;
  std::string c_mode = "class", c_kind = "tp";
  double c_R = 1, c_L = 1, c_d = 1, c_alpha = 0.5, c_E = 1, c_c1 = 1, c_c2 = 1, c_p = 4,
         c_rgrass = 0.5;
  int c_l = 0;
  CommonOpts c_common;
  certify_cmd->add_option("inputs", c_inputs, "one (class/count) or two (isotopy) manifolds");
  certify_cmd->add_option("--mode", c_mode, "class | isotopy | count")->required();
  certify_cmd->add_option("--R", c_R, "graph-patch radius");
  certify_cmd->add_option("--L", c_L, "Holder-gradient constant");
  certify_cmd->add_option("--d", c_d, "containment radius");
  certify_cmd->add_option("--alpha", c_alpha, "Holder exponent in (0,1]");
  certify_cmd->add_option("--E", c_E, "energy bound (count mode)");
  certify_cmd->add_option("--c1", c_c1, "R-formula constant");
  certify_cmd->add_option("--c2", c_c2, "L-formula constant");
  certify_cmd->add_option("--kind", c_kind, "energy kind (count mode)");
  certify_cmd->add_option("--p", c_p, "energy exponent (count mode)");
  certify_cmd->add_option("--l", c_l, "menger order (count mode)");
  certify_cmd->add_option("--r-grass", c_rgrass, "projector-manifold reach (configuration)");
  add_common(certify_cmd, c_common);

  // minimize
  auto* minimize_cmd = app.add_subcommand("minimize", "isotopy-safe gradient flow");
  std::string m_input, m_kind = "tp", m_constraint = "measure", m_trace, m_final;
  double m_p = 2.0, m_sigma = 0.1;
  int m_l = 0, m_iters = 100;
  CommonOpts m_common;
  minimize_cmd->add_option("input", m_input)->required();
  minimize_cmd->add_option("--kind", m_kind, "menger | tp | tpg");
  minimize_cmd->add_option("--p", m_p, "exponent p > 0");
  minimize_cmd->add_option("--l", m_l, "menger order");
  minimize_cmd->add_option("--constraint", m_constraint, "measure | diameter");
  minimize_cmd->add_option("--max-iters", m_iters, "iteration cap");
  minimize_cmd->add_option("--sigma", m_sigma, "step fraction of the safety radius, in (0,1)");
  minimize_cmd->add_option("--trace", m_trace, "JSON-lines trace path");
  minimize_cmd->add_option("--final", m_final, "output manifold path");
  add_common(minimize_cmd, m_common);

  // hausdorff
  auto* hausdorff_cmd = app.add_subcommand("hausdorff", "Hausdorff distance (sum convention)");
  std::string h_a, h_b;
  double h_res = 0;
  CommonOpts h_common;
  hausdorff_cmd->add_option("a", h_a)->required();
  hausdorff_cmd->add_option("b", h_b)->required();
  hausdorff_cmd->add_option("--resolution", h_res, "resample spacing (0 = auto)");
  add_common(hausdorff_cmd, h_common);

  // sample-info
  auto* info_cmd = app.add_subcommand("sample-info", "mesh and quadrature summary");
  std::string i_input;
  int i_density = 1;
  CommonOpts i_common;
  info_cmd->add_option("input", i_input)->required();
  info_cmd->add_option("--density", i_density, "samples per cell");
  add_common(info_cmd, i_common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (energy_cmd->parsed())
      return run_energy(e_input, e_kind, e_p, e_l, e_quad, e_samples, e_density, e_exclusion,
                        e_common);
    if (certify_cmd->parsed())
      return run_certify(c_inputs, c_mode, c_R, c_L, c_d, c_alpha, c_E, c_c1, c_c2, c_kind, c_p,
                         c_l, c_rgrass, c_common);
    if (minimize_cmd->parsed())
      return run_minimize(m_input, m_kind, m_p, m_l, m_constraint, m_iters, m_sigma, m_trace,
                          m_final, m_common);
    if (hausdorff_cmd->parsed()) return run_hausdorff(h_a, h_b, h_res, h_common);
    if (info_cmd->parsed()) return run_sample_info(i_input, i_density, i_common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
