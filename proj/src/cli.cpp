#include "mhmp/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mhmp/coeff.hpp"
#include "mhmp/hankel.hpp"
#include "mhmp/io.hpp"
#include "mhmp/oracle.hpp"
#include "mhmp/solve.hpp"

namespace mhmp::cli {

namespace {

using io::json;

struct Options {
  std::string input;
  std::string measure_path;
  std::string out;
  std::string emit_measure;
  std::string atoms_file;
  double tol = kDefaultRankTol;
  int samples = 20;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool normalize = false;
  std::vector<std::uint64_t> gen_args;
};

struct Loaded {
  MomentProblem p;
  std::string digest;
};

Loaded load_problem(const std::string& path) {
  const std::string text = io::read_file(path);
  return {io::problem_from_json(io::parse_json(text)), io::hex_digest(text)};
}

json base_report(const std::string& command, const std::string& digest) {
  return json{{"command", command}, {"input_digest", digest}};
}

int finish(json& report, int status, std::ostream& out) {
  report["exit_status"] = status;
  out << report.dump(2) << '\n';
  return status;
}

std::vector<cplx> sample_points(std::uint64_t seed, int count) {
  SplitMix64 rng(seed);
  std::vector<cplx> zs;
  for (int k = 0; k < count; ++k) {
    const double x = rng.uniform(-3.0, 3.0);
    const double y = rng.uniform(0.1, 3.0);
    zs.emplace_back(x, y);
  }
  return zs;
}

int cmd_check(const Options& o, std::ostream& out) {
  const Loaded in = load_problem(o.input);
  const MomentProblem& p = in.p;
  json rep = base_report("check", in.digest);
  const ClassReport cls = classify(p, o.tol);
  const BlockSystem sys = assemble(p);
  rep["m"] = p.m;
  rep["n"] = p.n;
  rep["psd"] = cls.psd;
  rep["in_Htilde"] = cls.in_Htilde;
  rep["rank_K"] = cls.rank_K;
  rep["dim_L"] = cls.L_basis.cols();
  rep["min_eigenvalue"] = min_eigenvalue(sys.K);
  rep["kernel_proj_residual"] = cls.kernel_proj_residual;
  rep["lyapunov_residual"] = lyapunov_residual(sys);
  rep["hankel_characterization"] = hankel_characterization(sys.K, p.m, p.m);
  if (cls.psd) {
    const KernelData ker = rank_kernel(sys.K, o.tol);
    rep["nu"] = neutral_rank(sys, ker, o.tol);
    rep["R"] = io::matrix_to_json(cls.R);
  }
  const int status = !cls.psd ? kExitNotPSD : (cls.in_Htilde ? kExitOk : kExitNotInClass);
  return finish(rep, status, out);
}

int cmd_normalize(const Options& o, std::ostream& out) {
  const Loaded in = load_problem(o.input);
  json rep = base_report("normalize", in.digest);
  const ClassReport cls = classify(in.p, o.tol);
  rep["psd"] = cls.psd;
  rep["in_Htilde"] = cls.in_Htilde;
  if (!cls.psd) return finish(rep, kExitNotPSD, out);
  const MomentProblem q = normalize_tail(in.p, o.tol);
  rep["changed"] = !cls.in_Htilde;
  rep["in_Htilde_after"] = classify(q, o.tol).in_Htilde;
  const json problem = io::problem_to_json(q);
  if (!o.out.empty()) io::write_file(o.out, problem.dump(2) + "\n");
  rep["problem"] = problem;
  return finish(rep, kExitOk, out);
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Loaded in = load_problem(o.input);
  const MomentProblem& p = in.p;
  json rep = base_report("solve", in.digest);
  const ClassReport cls = classify(p, o.tol);
  rep["psd"] = cls.psd;
  rep["in_Htilde"] = cls.in_Htilde;
  if (!cls.psd) return finish(rep, kExitNotPSD, out);
  if (!cls.in_Htilde && !o.normalize) {
    rep["message"] = "input is not in the kernel projection class; rerun with --normalize";
    return finish(rep, kExitNotInClass, out);
  }
  const MomentProblem q = o.normalize ? normalize_tail(p, o.tol) : p;
  rep["normalized"] = o.normalize && !cls.in_Htilde;

  RationalPick w;
  AtomicMeasure mu;
  try {
    w = canonical_solution(q, o.tol);
    mu = extract_measure(w);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonSimplePole) throw;
    rep["message"] = e.what();
    return finish(rep, kExitNonSimplePole, out);
  }

  const auto zs = sample_points(o.seed, o.samples);
  const bool fmi = fmi_check(p, [&](cplx z) { return w(z); }, zs);
  const MomentReport mom = verify_moments(mu, p);
  rep["measure"] = io::measure_to_json(mu);
  rep["fmi_samples"] = o.samples;
  rep["fmi_pass"] = fmi;
  rep["moment_residuals"] = mom.residuals;
  rep["tail_slack"] = mom.tail_slack;
  rep["moments_pass"] = mom.pass;
  if (!o.emit_measure.empty()) io::write_file(o.emit_measure, rep["measure"].dump(2) + "\n");
  return finish(rep, fmi && mom.pass ? kExitOk : kExitFailed, out);
}

int cmd_extend(const Options& o, std::ostream& out) {
  const Loaded in = load_problem(o.input);
  const MomentProblem& p = in.p;
  json rep = base_report("extend", in.digest);
  const ClassReport cls = classify(p, o.tol);
  rep["psd"] = cls.psd;
  if (!cls.psd) return finish(rep, kExitNotPSD, out);
  Extension ext;
  try {
    ext = extend(p, o.tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonSimplePole) throw;
    rep["message"] = e.what();
    return finish(rep, kExitNonSimplePole, out);
  }
  MomentProblem extended;
  extended.m = p.m;
  extended.n = p.n + 1;
  extended.s = normalize_tail(p, o.tol).s;
  extended.s.push_back(ext.s_next);
  extended.s.push_back(ext.s_next2);
  const bool psd = is_psd(ext.K_ext, o.tol);
  rep["tail_normalized"] = ext.tail_normalized;
  rep["s_next"] = io::matrix_to_json(ext.s_next);
  rep["s_next2"] = io::matrix_to_json(ext.s_next2);
  rep["extended_psd"] = psd;
  rep["extended_min_eigenvalue"] = min_eigenvalue(ext.K_ext);
  const json problem = io::problem_to_json(extended);
  if (!o.out.empty()) io::write_file(o.out, problem.dump(2) + "\n");
  return finish(rep, psd ? kExitOk : kExitFailed, out);
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Loaded in = load_problem(o.input);
  json rep = base_report("verify", in.digest);
  const AtomicMeasure mu =
      io::measure_from_json(io::parse_json(io::read_file(o.measure_path)), in.p.m);
  const MomentReport mom = verify_moments(mu, in.p);
  rep["moment_residuals"] = mom.residuals;
  rep["tail_slack"] = mom.tail_slack;
  rep["moments_pass"] = mom.pass;
  return finish(rep, mom.pass ? kExitOk : kExitFailed, out);
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.gen_args.size() < 2) {
    err << "gen needs at least m and n\n";
    return kExitUsage;
  }
  const std::size_t m = o.gen_args[0];
  const std::size_t n = o.gen_args[1];
  GeneratorSpec spec;
  MomentProblem p;
  if (!o.atoms_file.empty()) {
    if (m == 0) {
      err << "m must be positive\n";
      return kExitUsage;
    }
    const AtomicMeasure mu = io::measure_from_json(io::parse_json(io::read_file(o.atoms_file)), m);
    spec.m = m;
    spec.n = n;
    for (const auto& a : mu.atoms) spec.atoms.push_back({a.lambda, a.weight});
    p = gen_from_measure(spec);
  } else {
    const std::size_t atoms = o.gen_args.size() > 2 ? o.gen_args[2] : n + 1;
    const std::uint64_t seed = o.gen_args.size() > 3 ? o.gen_args[3] : o.seed;
    if (m < 1 || m > 3 || n > 4 || atoms > n + 1) {
      err << "gen bounds: 1 <= m <= 3, n <= 4, atoms <= n + 1\n";
      return kExitUsage;
    }
    auto generated = random_instance(m, n, atoms, seed);
    spec = std::move(generated.first);
    p = std::move(generated.second);
  }
  const std::string text = io::problem_to_json(p).dump(2) + "\n";
  json sidecar{{"m", spec.m}, {"n", spec.n}, {"seed", spec.seed}};
  AtomicMeasure mu;
  mu.m = spec.m;
  for (const auto& a : spec.atoms) mu.atoms.push_back({a.lambda, a.weight});
  sidecar["atoms"] = io::measure_to_json(mu);
  if (o.out.empty()) {
    out << text;
  } else {
    io::write_file(o.out, text);
    io::write_file(o.out + ".atoms.json", sidecar.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated matrix moment problems: classify, solve, extend", "mhmp"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "relative rank tolerance")->capture_default_str();
  };

  auto* check = app.add_subcommand("check", "classify a problem file");
  check->add_option("problem", o.input)->required();
  add_common(check);

  auto* normalize = app.add_subcommand("normalize", "replace s_2n by the normalized tail");
  normalize->add_option("problem", o.input)->required();
  normalize->add_option("-o,--out", o.out, "output problem file");
  add_common(normalize);

  auto* solve = app.add_subcommand("solve", "canonical solution and its measure");
  solve->add_option("problem", o.input)->required();
  solve->add_option("--samples", o.samples, "upper half plane sample points")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve->add_option("--seed", o.seed, "seed for sample points");
  solve->add_flag("--normalize", o.normalize, "normalize the tail first");
  solve->add_option("--emit-measure", o.emit_measure, "write the measure here");
  add_common(solve);

  auto* ext = app.add_subcommand("extend", "PSD Hankel extension by two blocks");
  ext->add_option("problem", o.input)->required();
  ext->add_option("-o,--out", o.out, "output problem file");
  add_common(ext);

  auto* verify = app.add_subcommand("verify", "check a measure against a problem");
  verify->add_option("problem", o.input)->required();
  verify->add_option("measure", o.measure_path)->required();
  add_common(verify);

  auto* gen = app.add_subcommand("gen", "generate a problem from a random or given measure");
  gen->add_option("params", o.gen_args, "m n [atoms] [seed]")->expected(2, 4);
  gen->add_option("--seed", o.seed, "seed when not given positionally");
  gen->add_option("--atoms-file", o.atoms_file, "measure file with the generating atoms");
  gen->add_option("-o,--out", o.out, "output problem file (sidecar <out>.atoms.json)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cmd_check(o, out);
    if (*normalize) return cmd_normalize(o, out);
    if (*solve) return cmd_solve(o, out);
    if (*ext) return cmd_extend(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*gen) return cmd_gen(o, out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::ShapeError:
      case ErrorKind::NotHermitian:
        return kExitUsage;
      case ErrorKind::NotPSD:
        return kExitNotPSD;
      case ErrorKind::NonSimplePole:
        return kExitNonSimplePole;
      default:
        return kExitFailed;
    }
  }
  return kExitUsage;
}

}  // namespace mhmp::cli
