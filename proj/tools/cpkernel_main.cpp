// cpkernel command-line frontend: kernel algebra, complete-positivity
// verdicts and the L1 fractional-ODE solver, with machine-readable reports.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cpkernel/cp_check.hpp"
#include "cpkernel/generators.hpp"
#include "cpkernel/io.hpp"
#include "cpkernel/kernel_algebra.hpp"
#include "cpkernel/l1_fode.hpp"
#include "cpkernel/mesh.hpp"
#include "cpkernel/resolvent.hpp"
#include "cpkernel/special_functions.hpp"
#include "cpkernel/verify.hpp"
#include "cpkernel/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;     // usage or input error
constexpr int kExitNegative = 2;  // negative verdict / failed checks

struct MeshSource {
  std::string graded;     // "T,N,r"
  std::string mesh_file;  // path

  cpkernel::Mesh load() const {
    if (!graded.empty()) {
      double T = 0.0, r = 0.0;
      long long N = 0;
      char c1 = 0, c2 = 0;
      std::istringstream is(graded);
      if (!(is >> T >> c1 >> N >> c2 >> r) || c1 != ',' || c2 != ',' || !is.eof() || N < 1) {
        throw cpkernel::DomainError("--graded expects T,N,r (e.g. 1,100,2)");
      }
      return cpkernel::make_graded_mesh(T, std::size_t(N), r);
    }
    return cpkernel::read_mesh_file(mesh_file);
  }
};

void add_mesh_source(CLI::App* cmd, MeshSource& src) {
  auto* g = cmd->add_option("--graded", src.graded, "generate a graded mesh: T,N,r");
  auto* f = cmd->add_option("--mesh-file", src.mesh_file, "read mesh from file");
  g->excludes(f);
  f->excludes(g);
  cmd->callback([&src, cmd]() {
    if (src.graded.empty() && src.mesh_file.empty()) {
      throw CLI::ValidationError(cmd->get_name(), "exactly one mesh source required");
    }
  });
}

void report_header(cpkernel::JsonWriter& w, const std::string& subcommand,
                   const std::vector<std::string>& argv_echo) {
  w.key("tool").value("cpkernel");
  w.key("version").value(cpkernel::kVersion);
  w.key("subcommand").value(subcommand);
  w.key("command").begin_array();
  for (const auto& a : argv_echo) w.value(a);
  w.end_array();
}

void write_cp_report(cpkernel::JsonWriter& w, const cpkernel::CpReport& rep) {
  w.key("verdict").value(rep.completely_positive() ? "CompletelyPositive"
                                                   : "NotCompletelyPositive");
  w.key("tol").value(rep.tol);
  w.key("min_margin").value(rep.min_margin);
  w.key("failures").begin_array();
  for (const auto& f : rep.failures) {
    w.begin_object();
    w.key("condition").value(cpkernel::to_string(f.condition));
    if (f.lambda > 0.0) w.key("lambda").value(f.lambda);
    w.key("n").value(f.n);
    if (f.k >= 0) w.key("k").value(static_cast<long long>(f.k));
    w.key("magnitude").value(f.magnitude);
    w.end_object();
  }
  w.end_array();
}

void emit(const cpkernel::JsonWriter& w, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << w.str() << '\n';
  } else {
    std::ofstream f(out_path);
    if (!f) throw cpkernel::IoError("cannot open '" + out_path + "' for writing");
    f << w.str() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> argv_echo(argv, argv + argc);

  CLI::App app{"triangular kernel algebra, complete positivity and L1 fractional solver"};
  app.require_subcommand(1);

  // --- mesh ---------------------------------------------------------------
  auto* mesh_cmd = app.add_subcommand("mesh", "generate or validate a time mesh");
  MeshSource mesh_src;
  add_mesh_source(mesh_cmd, mesh_src);
  std::string mesh_out;
  mesh_cmd->add_option("--out", mesh_out, "write the mesh to this file");

  // --- l1 -----------------------------------------------------------------
  auto* l1_cmd = app.add_subcommand("l1", "build the L1 kernels C, B, A for a mesh");
  MeshSource l1_src;
  add_mesh_source(l1_cmd, l1_src);
  double l1_alpha = 0.5;
  l1_cmd->add_option("--alpha", l1_alpha, "fractional order in (0,1)")->required();
  std::string out_c, out_b, out_a;
  l1_cmd->add_option("--out-c", out_c, "write the coefficient kernel C");
  l1_cmd->add_option("--out-b", out_b, "write B = C (*) L^-1");
  l1_cmd->add_option("--out-a", out_a, "write A = B^-1");

  // --- check-cp -----------------------------------------------------------
  auto* cp_cmd = app.add_subcommand("check-cp", "complete-positivity verdict for a kernel");
  std::string cp_file;
  cp_cmd->add_option("--kernel-file", cp_file, "kernel CSV (or one value per line with --uniform)")
      ->required();
  bool cp_uniform = false, cp_scan = false;
  double cp_tol = 1e-12;
  cp_cmd->add_flag("--uniform", cp_uniform, "treat input as a sequence kernel");
  cp_cmd->add_flag("--scan", cp_scan, "also run the resolvent scan over the lambda grid");
  cp_cmd->add_option("--tol", cp_tol, "sign-condition tolerance")->check(CLI::PositiveNumber);

  // --- resolvent ----------------------------------------------------------
  auto* res_cmd = app.add_subcommand("resolvent", "resolvent kernel and identity defects");
  std::string res_file, res_out;
  double res_lambda = 1.0;
  res_cmd->add_option("--kernel-file", res_file, "kernel CSV")->required();
  res_cmd->add_option("--lambda", res_lambda, "resolvent parameter")->required();
  res_cmd->add_option("--out", res_out, "write R_lambda as kernel CSV");

  // --- solve --------------------------------------------------------------
  auto* solve_cmd = app.add_subcommand("solve", "L1 solve of D^alpha u = -A(u)");
  MeshSource solve_src;
  add_mesh_source(solve_cmd, solve_src);
  double solve_alpha = 0.5;
  solve_cmd->add_option("--alpha", solve_alpha, "fractional order in (0,1)")->required();
  std::string problem_spec, u0_spec = "1", traj_out, sidecar_out, stepper_name = "direct";
  solve_cmd->add_option("--problem", problem_spec,
                        "linear:RATE | cubic | diffusion:M,ELL")->required();
  solve_cmd->add_option("--u0", u0_spec, "initial value (scalar) or sinpi|const:V (diffusion)");
  solve_cmd->add_option("--out", traj_out, "trajectory CSV path")->required();
  solve_cmd->add_option("--sidecar", sidecar_out, "JSON sidecar path (default OUT.json)");
  solve_cmd->add_option("--stepper", stepper_name, "direct | yosida")
      ->check(CLI::IsMember({"direct", "yosida"}));
  double yosida_lambda = 0.0;
  solve_cmd->add_option("--yosida-lambda", yosida_lambda,
                        "Yosida parameter (default 1e-3 * min tau^alpha)");

  // --- ml -----------------------------------------------------------------
  auto* ml_cmd = app.add_subcommand("ml", "Mittag-Leffler E_alpha(z) for z <= 0");
  double ml_alpha = 0.5, ml_z = 0.0, ml_accuracy = 1e-10;
  ml_cmd->add_option("--alpha", ml_alpha, "order in (0,1]")->required();
  ml_cmd->add_option("--z", ml_z, "argument, z <= 0")->required();
  ml_cmd->add_option("--accuracy", ml_accuracy, "requested absolute accuracy");

  // --- verify -------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "run the full property suite");
  std::uint64_t seed = 0;
  unsigned threads_opt = 0;
  std::string verify_out;
  verify_cmd->add_option("--seed", seed, "seed for the randomized suites (default 0)");
  verify_cmd->add_option("--threads", threads_opt, "parallel checks (default: hardware)");
  verify_cmd->add_option("--out", verify_out, "write the JSON summary to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (*mesh_cmd) {
      const cpkernel::Mesh mesh = mesh_src.load();
      if (!mesh_out.empty()) cpkernel::write_mesh_file(mesh_out, mesh);
      const auto tau = cpkernel::steps(mesh);
      cpkernel::JsonWriter w;
      w.begin_object();
      report_header(w, "mesh", argv_echo);
      w.key("n_steps").value(mesh.num_steps());
      w.key("horizon").value(mesh.horizon());
      w.key("min_step").value(*std::min_element(tau.begin(), tau.end()));
      w.key("max_step").value(*std::max_element(tau.begin(), tau.end()));
      w.end_object();
      emit(w, "");
      return kExitOk;
    }

    if (*l1_cmd) {
      const cpkernel::Mesh mesh = l1_src.load();
      const cpkernel::L1Operator op = cpkernel::build_l1_operator(mesh, l1_alpha);
      if (!out_c.empty()) cpkernel::write_kernel_csv(out_c, op.C);
      if (!out_b.empty()) cpkernel::write_kernel_csv(out_b, op.B);
      if (!out_a.empty()) cpkernel::write_kernel_csv(out_a, op.A);
      const cpkernel::CpReport rep = cpkernel::check_sign_certificate(op.B);
      cpkernel::JsonWriter w;
      w.begin_object();
      report_header(w, "l1", argv_echo);
      w.key("alpha").value(l1_alpha);
      w.key("n_steps").value(mesh.num_steps());
      w.key("sign_certificate_margin").value(rep.min_margin);
      w.end_object();
      emit(w, "");
      return kExitOk;
    }

    if (*cp_cmd) {
      cpkernel::CpReport rep;
      std::optional<cpkernel::CpReport> scan_rep;
      if (cp_uniform) {
        const cpkernel::SeqKernel seq = cpkernel::read_value_per_line(cp_file);
        rep = cpkernel::check_cp_uniform(seq, cp_tol);
      } else {
        const cpkernel::TriKernel k = cpkernel::read_kernel_csv_file(cp_file);
        rep = cpkernel::check_cp_nonuniform(k, cp_tol);
        if (cp_scan) {
          const auto grid = cpkernel::default_lambda_grid();
          scan_rep = cpkernel::brute_cp_scan(k, grid, cp_tol);
        }
      }
      cpkernel::JsonWriter w;
      w.begin_object();
      report_header(w, "check-cp", argv_echo);
      write_cp_report(w, rep);
      if (scan_rep) {
        w.key("scan").begin_object();
        write_cp_report(w, *scan_rep);
        w.end_object();
      }
      w.end_object();
      emit(w, "");
      const bool cp = rep.completely_positive() &&
                      (!scan_rep || scan_rep->completely_positive());
      return cp ? kExitOk : kExitNegative;
    }

    if (*res_cmd) {
      if (!(res_lambda >= 1e-12 && res_lambda <= 1e12)) {
        throw cpkernel::DomainError("--lambda must lie in [1e-12, 1e12]");
      }
      const cpkernel::TriKernel k = cpkernel::read_kernel_csv_file(res_file);
      const cpkernel::ResolventKernel rk = cpkernel::resolvent(k, res_lambda);
      if (!res_out.empty()) cpkernel::write_kernel_csv(res_out, rk.R);
      cpkernel::JsonWriter w;
      w.begin_object();
      report_header(w, "resolvent", argv_echo);
      w.key("lambda").value(res_lambda);
      w.key("defects").begin_object();
      w.key("identity").value(cpkernel::resolvent_defining_defect(k, rk));
      w.key("commutation").value(cpkernel::commutation_defect(k, rk));
      w.key("asymptotic").value(cpkernel::asymptotic_defect(k, res_lambda));
      w.end_object();
      w.end_object();
      emit(w, "");
      return kExitOk;
    }

    if (*solve_cmd) {
      const cpkernel::Mesh mesh = solve_src.load();
      const cpkernel::L1Operator op = cpkernel::build_l1_operator(mesh, solve_alpha);

      cpkernel::FodeProblem problem;
      if (problem_spec.rfind("linear:", 0) == 0) {
        const double rate = cpkernel::parse_double(problem_spec.substr(7), "--problem linear");
        problem = cpkernel::make_linear_scalar(
            rate, cpkernel::parse_double(u0_spec, "--u0"));
      } else if (problem_spec == "cubic") {
        problem = cpkernel::make_scalar_monotone(
            [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; },
            cpkernel::parse_double(u0_spec, "--u0"));
      } else if (problem_spec.rfind("diffusion:", 0) == 0) {
        const std::string rest = problem_spec.substr(10);
        const auto comma = rest.find(',');
        if (comma == std::string::npos) {
          throw cpkernel::DomainError("--problem diffusion expects diffusion:M,ELL");
        }
        const long long m = std::stoll(rest.substr(0, comma));
        const double ell = cpkernel::parse_double(rest.substr(comma + 1), "--problem diffusion");
        if (m < 1) throw cpkernel::DomainError("diffusion needs M >= 1");
        cpkernel::State u0(std::size_t(m), 0.0);
        if (u0_spec == "sinpi") {
          for (std::size_t i = 0; i < u0.size(); ++i) {
            const double x = double(i + 1) * ell / double(m + 1);
            u0[i] = std::max(std::sin(M_PI * x / ell), 0.0);
          }
        } else if (u0_spec.rfind("const:", 0) == 0) {
          const double v = cpkernel::parse_double(u0_spec.substr(6), "--u0 const");
          std::fill(u0.begin(), u0.end(), v);
        } else {
          throw cpkernel::DomainError("--u0 for diffusion must be sinpi or const:V");
        }
        problem = cpkernel::make_diffusion_reaction(
            std::size_t(m), ell, [](double u) { return u * u * u; },
            [](double u) { return 3.0 * u * u; }, std::move(u0));
      } else {
        throw cpkernel::DomainError("--problem must be linear:RATE, cubic or diffusion:M,ELL");
      }

      cpkernel::SolveOptions options;
      options.stepper = (stepper_name == "yosida") ? cpkernel::Stepper::Yosida
                                                   : cpkernel::Stepper::Direct;
      options.yosida_lambda = yosida_lambda;
      const cpkernel::Trajectory traj = cpkernel::solve_fode(op, problem, options);
      cpkernel::write_trajectory_csv(traj_out, traj);

      cpkernel::JsonWriter w;
      w.begin_object();
      report_header(w, "solve", argv_echo);
      w.key("alpha").value(solve_alpha);
      w.key("stepper").value(stepper_name);
      w.key("residual_tol").value(options.residual_tol);
      w.key("min_state_entry").value(traj.min_entry());
      w.key("final_state").begin_array();
      for (double v : traj.states.back()) w.value(v);
      w.end_array();
      w.key("steps").begin_array();
      for (const auto& s : traj.step_stats) {
        w.begin_object();
        w.key("iterations").value(s.iterations);
        w.key("residual").value(s.residual);
        if (!std::isnan(s.contraction)) w.key("contraction").value(s.contraction);
        w.end_object();
      }
      w.end_array();
      w.end_object();
      emit(w, sidecar_out.empty() ? traj_out + ".json" : sidecar_out);
      return kExitOk;
    }

    if (*ml_cmd) {
      const double v = cpkernel::mittag_leffler({ml_alpha, ml_z, ml_accuracy});
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      std::cout << buf << '\n';
      return kExitOk;
    }

    if (*verify_cmd) {
      unsigned threads = threads_opt ? threads_opt : std::thread::hardware_concurrency();
      if (threads == 0) threads = 1;
      if (const char* cap = std::getenv("CPKERNEL_THREADS")) {
        const long c = std::strtol(cap, nullptr, 10);
        if (c >= 1) threads = std::min<unsigned>(threads, unsigned(c));
      }
      const auto results = cpkernel::run_verify(seed, threads);
      bool all_pass = true;
      cpkernel::JsonWriter w;
      w.begin_object();
      report_header(w, "verify", argv_echo);
      w.key("seed").value(static_cast<long long>(seed));
      w.key("checks").begin_array();
      for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        w.begin_object();
        w.key("name").value(r.name);
        w.key("pass").value(r.pass);
        w.key("measure").value(r.measure);
        w.key("detail").value(r.detail);
        w.end_object();
      }
      w.end_array();
      w.key("all_pass").value(all_pass);
      w.end_object();
      emit(w, verify_out);
      if (!verify_out.empty()) {
        std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES\n");
      }
      return all_pass ? kExitOk : kExitNegative;
    }
  } catch (const cpkernel::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
