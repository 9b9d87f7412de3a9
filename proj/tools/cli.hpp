#pragma once

// Command-line front end. `run` parses arguments, executes one subcommand and
// prints a JSON report to `out` and a short human summary to `err`.
// Exit status: 0 for pass or measured, 1 for fail, 2 for usage errors.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdual/extension.hpp"
#include "rdual/frames.hpp"
#include "rdual/io.hpp"
#include "rdual/linalg.hpp"
#include "rdual/oprep.hpp"
#include "rdual/random.hpp"
#include "rdual/rduals.hpp"

namespace rdual::cli {

using nlohmann::json;

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  json inputs = json::object();
  json results = json::object();
  bool measured = false;

  void residual(const std::string& name, double value, double tolerance, bool asserted = true) {
    residuals_.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"asserted", asserted}});
    if (asserted && !(value <= tolerance)) failed_ = true;
  }

  void fail(const Error& e) {
    failed_ = true;
    error_ = json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  }

  std::string verdict() const {
    if (failed_) return "fail";
    return measured ? "measured" : "pass";
  }

  json to_json(const Tolerances& tol) const {
    json doc = {{"command", command_},
                {"inputs", inputs},
                {"tolerances", {{"rank_rel", tol.rank_rel}, {"cert_rel", tol.cert_rel}, {"exact_rel", tol.exact_rel}}},
                {"results", results},
                {"residuals", residuals_},
                {"verdict", verdict()}};
    if (!error_.is_null()) doc["error"] = error_;
    return doc;
  }

  void summarize(std::ostream& err) const {
    err << command_ << ": " << verdict() << '\n';
    for (const auto& r : residuals_) {
      err << "  " << r["name"].get<std::string>() << " = " << r["value"].get<double>()
          << (r["asserted"].get<bool>() ? "  (tol " : "  (measured, ref ") << r["tolerance"].get<double>() << ")\n";
    }
    if (!error_.is_null()) err << "  error: " << error_["message"].get<std::string>() << '\n';
  }

 private:
  std::string command_;
  json residuals_ = json::array();
  json error_;
  bool failed_ = false;
};

namespace detail {

inline json scalars_to_json(const std::vector<Scalar>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(json::array({z.real(), z.imag()}));
  return out;
}

inline json input_entry(const std::string& path, const std::optional<std::string>& label) {
  return {{"path", path}, {"label", label ? json(*label) : json(nullptr)}};
}

inline VectorSeq load_sequence(Report& report, const std::string& role, const std::string& path) {
  auto m = io::parse_matrix(path);
  report.inputs[role] = input_entry(path, m.label);
  if (m.matrix.cols() != m.matrix.rows()) {
    throw Error(ErrorCode::ShapeError, path + ": expected " + std::to_string(m.matrix.rows()) + " vectors");
  }
  return VectorSeq(std::move(m.matrix));
}

inline Matrix load_matrix(Report& report, const std::string& role, const std::string& path) {
  auto m = io::parse_matrix(path);
  report.inputs[role] = input_entry(path, m.label);
  return std::move(m.matrix);
}

inline OrthonormalBasis load_basis(Report& report, const std::string& role, const std::string& path, std::size_t n,
                                   const Tolerances& tol) {
  if (path.empty()) {
    report.inputs[role] = "standard";
    return OrthonormalBasis::standard(n);
  }
  auto b = OrthonormalBasis::certify(load_sequence(report, role, path), tol);
  if (b.dim() != n) throw Error(ErrorCode::DimensionMismatch, role + " has the wrong dimension");
  return b;
}

inline json bounds_json(const std::optional<FrameBounds>& b) {
  if (!b) return nullptr;
  return {{"lower", b->lower}, {"upper", b->upper}};
}

inline json classification_json(const Classification& c) {
  return {{"rank", c.rank}, {"kind", std::string(to_string(c.kind))}, {"bounds", bounds_json(c.bounds)}};
}

inline double scale_of(const VectorSeq& s) { return std::max(1.0, max_column_norm(s.synthesis())); }

}  // namespace detail

struct Options {
  Tolerances tol;
  unsigned jobs = 1;
  std::string out_path;

  std::string seq_a, seq_b;
  std::string e_path, h_path, q_path, cert_path, sf_sqrt_path, phi_path, vbasis_path;
  std::size_t h0_index = 0;
  std::size_t gen_n = 0;
  std::string gen_kind;
  std::vector<double> gen_sv;
  std::uint64_t gen_seed = 0;
};

namespace commands {

inline void analyze(Report& r, const Options& o) {
  const VectorSeq s = detail::load_sequence(r, "sequence", o.seq_a);
  const Classification c = classify(s, o.tol);
  r.results["dimension"] = s.dim();
  r.results["classification"] = detail::classification_json(c);
  r.results["singular_values"] = singular_values(s);
  if (c.rank == 0) {
    if (!o.out_path.empty()) io::write_json_file(o.out_path, r.to_json(o.tol));
    return;
  }
  r.results["tight"] = std::abs(c.bounds->upper - c.bounds->lower) <= o.tol.cert_rel * c.bounds->upper;

  auto spec_s = hermitian_eig(frame_operator(s), o.tol).values;
  auto spec_g = hermitian_eig(gram(s), o.tol).values;
  double gap = 0.0;
  for (std::size_t k = 0; k < spec_s.size(); ++k) gap = std::max(gap, std::abs(spec_s[k] - spec_g[k]));
  r.residual("frame_gram_spectral_gap", gap, 1e-10 * std::max(1.0, spec_s.back()));

  const VectorSeq dual = canonical_dual(s, o.tol);
  const Matrix reconstruction = s.synthesis() * adjoint(dual.synthesis()) - span_projection(s, o.tol);
  r.results["canonical_dual"] = io::to_json(dual);
  r.residual("canonical_dual_reconstruction", operator_norm(reconstruction), o.tol.cert_rel);
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.to_json(o.tol));
}

inline void type1(Report& r, const Options& o) {
  const VectorSeq f = detail::load_sequence(r, "f", o.seq_a);
  const auto e = detail::load_basis(r, "e", o.e_path, f.dim(), o.tol);
  const auto h = detail::load_basis(r, "h", o.h_path, f.dim(), o.tol);
  const VectorSeq omega = rdual_type_I(f, e, h);
  r.results["omega"] = io::to_json(omega);
  r.results["classification_f"] = detail::classification_json(classify(f, o.tol));
  r.results["classification_omega"] = detail::classification_json(classify(omega, o.tol));
  const auto sf = singular_values(f);
  const auto sw = singular_values(omega);
  double gap = 0.0;
  for (std::size_t k = 0; k < sf.size(); ++k) gap = std::max(gap, std::abs(sf[k] - sw[k]));
  r.residual("singular_value_transfer", gap, 1e-10 * std::max(1.0, sf.front()));
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.results["omega"]);
}

inline void type3(Report& r, const Options& o) {
  const VectorSeq f = detail::load_sequence(r, "f", o.seq_a);
  const auto e = detail::load_basis(r, "e", o.e_path, f.dim(), o.tol);
  const auto h = detail::load_basis(r, "h", o.h_path, f.dim(), o.tol);
  const Matrix q_raw = detail::load_matrix(r, "q", o.q_path);
  const QOperator q = validate_q(q_raw, frame_operator(f), o.tol);
  const VectorSeq omega = rdual_type_III(f, e, h, q, o.tol);
  r.results["omega"] = io::to_json(omega);
  r.results["q_norm"] = q.norm();
  r.results["q_inverse_norm"] = q.inverse_norm();
  const VectorSeq back = recover_type_III(omega, e, h, q, psd_sqrt(frame_operator(f), o.tol));
  r.residual("round_trip", max_column_norm(back.synthesis() - f.synthesis()), o.tol.cert_rel * detail::scale_of(f));
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.results["omega"]);
}

inline void certify(Report& r, const Options& o) {
  const VectorSeq f = detail::load_sequence(r, "f", o.seq_a);
  const VectorSeq omega = detail::load_sequence(r, "omega", o.seq_b);
  const RDualCertificate cert = certify_symmetrical_pair(f, omega, o.tol);
  const Matrix s_f_sqrt = psd_sqrt(frame_operator(f), o.tol);
  r.results["certificate"] = io::certificate_to_json(cert, s_f_sqrt);
  r.residual("certificate_residual", cert.residual, o.tol.cert_rel * detail::scale_of(omega));
  r.residual("coefficient_identity", coefficient_identity_check(f, omega, cert, o.tol), o.tol.cert_rel);
  const VectorSeq back = recover_symmetrical(omega, cert, s_f_sqrt, o.tol);
  r.residual("symmetric_recovery", max_column_norm(back.synthesis() - f.synthesis()),
             o.tol.cert_rel * detail::scale_of(f));
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.results["certificate"]);
}

inline void recover(Report& r, const Options& o) {
  const VectorSeq omega = detail::load_sequence(r, "omega", o.seq_b);
  r.inputs["cert"] = detail::input_entry(o.cert_path, std::nullopt);
  const auto bundle = io::certificate_from_json(io::read_json_file(o.cert_path), o.tol);
  Matrix s_f_sqrt;
  if (!o.sf_sqrt_path.empty()) {
    s_f_sqrt = detail::load_matrix(r, "s_f_sqrt", o.sf_sqrt_path);
  } else if (bundle.s_f_sqrt) {
    s_f_sqrt = *bundle.s_f_sqrt;
  } else {
    throw Error(ErrorCode::UsageError, "certificate has no s_f_sqrt; pass --sf-sqrt");
  }
  const VectorSeq f = recover_symmetrical(omega, bundle.cert, s_f_sqrt, o.tol);
  r.results["f"] = io::to_json(f);
  const double forward = symmetrical_residual(f, omega, bundle.cert.e_basis, bundle.cert.h_basis,
                                              bundle.cert.s_omega_sqrt_ext, o.tol);
  r.residual("forward_check", forward, o.tol.cert_rel * detail::scale_of(omega));
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.results["f"]);
}

inline void gamma(Report& r, const Options& o) {
  const VectorSeq f = detail::load_sequence(r, "f", o.seq_a);
  const VectorSeq omega = detail::load_sequence(r, "omega", o.seq_b);
  const RDualCertificate cert = certify_symmetrical_pair(f, omega, o.tol);
  const VectorSeq g = gamma_sequence(f, cert, o.tol);
  const bool basis = classify(f, o.tol).kind == SequenceKind::riesz_basis;
  r.results["gamma"] = io::to_json(g);
  r.results["f_is_riesz_basis"] = basis;
  r.residual("biorthogonality", operator_norm(cross_gram(omega, g) - Matrix::identity(f.dim())), o.tol.cert_rel,
             basis);
  if (!basis) r.measured = true;
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.results["gamma"]);
}

inline void decide(Report& r, const Options& o) {
  const VectorSeq f = detail::load_sequence(r, "f", o.seq_a);
  const VectorSeq omega = detail::load_sequence(r, "omega", o.seq_b);
  const PairDecision d = decide_type_I_pair(f, omega, o.tol);
  r.results["is_pair"] = d.is_pair;
  r.results["spectra_f"] = d.spectra_f;
  r.results["spectra_omega"] = d.spectra_omega;
  if (d.is_pair) {
    r.results["witness_unitary_part"] = io::to_json(d.witness->unitary_part);
    r.results["e_basis"] = io::to_json(d.bases->first.matrix());
    r.results["h_basis"] = io::to_json(d.bases->second.matrix());
    const double sigma2 = std::max(d.spectra_f.front(), 1.0);
    r.residual("bases_reproduce_omega", d.bases_residual, o.tol.cert_rel * detail::scale_of(omega));
    r.residual("antiunitary_intertwining", d.witness_residual, o.tol.cert_rel * sigma2);
  }
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.to_json(o.tol));
}

inline void represent(Report& r, const Options& o) {
  const VectorSeq f = detail::load_sequence(r, "f", o.seq_a);
  const VectorSeq omega = detail::load_sequence(r, "omega", o.seq_b);
  require_same_dim(f, omega, "represent");
  OrthonormalBasis h = detail::load_basis(r, "h", o.h_path, omega.dim(), o.tol);
  if (o.h0_index >= omega.dim()) throw Error(ErrorCode::UsageError, "--h0-index out of range");
  h = rotate_basis(h, o.h0_index);
  r.results["h0_index"] = o.h0_index;

  const ShiftFamily fam = build_shift_family(omega, h, o.tol);
  const auto lambdas = lambda_family(fam, h, o.jobs);
  const CoefficientReport coeffs = coefficients(f, omega, h, fam, o.tol);
  const RepresentationReport rep = represent_inv_sqrt(fam, lambdas, h, coeffs);

  r.measured = true;
  r.results["a"] = detail::scalars_to_json(coeffs.a);
  r.results["c"] = detail::scalars_to_json(coeffs.c);
  r.results["p"] = detail::scalars_to_json(coeffs.p);
  r.results["l1_a"] = coeffs.l1_a;
  r.results["l1_c"] = coeffs.l1_c;
  r.results["error_a"] = rep.error_a;
  r.results["error_c"] = rep.error_c;
  r.results["bessel_sup"] = rep.bessel_sup;
  r.results["lambda_norms"] = rep.lambda_norms;
  r.results["max_modulus_gap"] = rep.max_modulus_gap;
  r.results["operator_a"] = io::to_json(rep.operator_a);
  r.results["operator_c"] = io::to_json(rep.operator_c);
  r.results["s_inv_sqrt_ext"] = io::to_json(fam.s_inv_sqrt_ext);
  json tail = json::array();
  double tail_excess = -std::numeric_limits<double>::infinity();
  for (const auto& row : rep.tail_table) {
    tail.push_back({{"prefix_size", row.prefix_size}, {"partial_error", row.partial_error}, {"tail_bound", row.tail_bound}});
    tail_excess = std::max(tail_excess, row.partial_error - row.tail_bound);
  }
  r.results["tail_table"] = std::move(tail);

  const double root_b = std::sqrt(rep.bessel_sup);
  double lambda_excess = 0.0;
  for (double nk : rep.lambda_norms) lambda_excess = std::max(lambda_excess, nk - root_b);
  double cp_gap = 0.0;
  for (std::size_t i = 0; i < coeffs.c.size(); ++i) cp_gap = std::max(cp_gap, std::abs(coeffs.c[i] - coeffs.p[i]));

  r.residual("shift_property", shift_property_residual(fam, h), 1e-11);
  r.residual("error_a", rep.error_a, o.tol.cert_rel);
  r.residual("lambda_norm_excess", lambda_excess, 1e-10);
  r.residual("tail_estimate_excess", tail_excess, o.tol.cert_rel);
  r.residual("error_c", rep.error_c, o.tol.cert_rel, false);
  r.residual("c_minus_p", cp_gap, o.tol.cert_rel, false);
  r.residual("modulus_gap", rep.max_modulus_gap, o.tol.cert_rel, false);
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.to_json(o.tol));
}

inline void extend(Report& r, const Options& o) {
  const Matrix phi = detail::load_matrix(r, "phi", o.phi_path);
  const Matrix basis = detail::load_matrix(r, "vbasis", o.vbasis_path);
  const SubspaceOperator op(basis, phi, o.tol);
  const Matrix ext = extend_operator(op, o.tol);
  const Matrix inv = extended_inverse(op, o.tol);
  const std::size_t n = op.ambient_dim();
  r.results["extended"] = io::to_json(ext);
  r.results["extended_inverse"] = io::to_json(inv);
  r.results["norm_phi"] = op.norm();
  r.results["norm_phi_inverse"] = op.inverse_norm();
  r.results["complement_scale"] = 1.0 / op.inverse_norm();

  const double ext_norm = operator_norm(ext);
  const double ext_inv_norm = operator_norm(inv);
  r.results["norm_extended"] = ext_norm;
  r.results["norm_extended_inverse"] = ext_inv_norm;
  r.residual("norm_preserved", std::abs(ext_norm - op.norm()), 1e-12 * std::max(1.0, op.norm()));
  r.residual("inverse_norm_preserved", std::abs(ext_inv_norm - op.inverse_norm()),
             1e-12 * std::max(1.0, op.inverse_norm()));
  r.residual("inverse_product", operator_norm(ext * inv - Matrix::identity(n)), 1e-11);
  r.residual("restriction", max_column_norm(ext * basis - basis * phi), 1e-12 * std::max(1.0, op.norm()));
  if (hermitian_defect(phi) <= o.tol.exact_rel * std::max(1.0, frobenius_norm(phi))) {
    r.residual("hermitian_preserved", hermitian_defect(ext), 1e-12 * std::max(1.0, op.norm()));
  }
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.results["extended"]);
}

inline void generate(Report& r, const Options& o) {
  GenerateSpec spec;
  spec.n = o.gen_n;
  spec.seed = o.gen_seed;
  spec.singular_values = o.gen_sv;
  if (o.gen_kind == "onb") {
    spec.kind = GenerateKind::onb;
  } else if (o.gen_kind == "spectrum") {
    spec.kind = GenerateKind::spectrum;
  } else {
    throw Error(ErrorCode::BadSpec, "--kind must be onb or spectrum");
  }
  r.inputs = {{"n", spec.n}, {"kind", o.gen_kind}, {"seed", spec.seed}, {"singular_values", spec.singular_values}};
  const VectorSeq s = generate_sequence(spec);
  std::ostringstream label;
  label << o.gen_kind << "-n" << spec.n << "-seed" << spec.seed;
  r.results["sequence"] = io::to_json(s, label.str());
  if (spec.kind == GenerateKind::onb) {
    r.residual("orthonormality", orthonormality_defect(s.synthesis()), 1e-10);
  } else {
    auto want = spec.singular_values;
    std::sort(want.rbegin(), want.rend());
    const auto got = singular_values(s);
    double gap = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) gap = std::max(gap, std::abs(got[k] - want[k]));
    r.residual("singular_values", gap, 1e-10 * std::max(1.0, want.front()));
  }
  if (!o.out_path.empty()) io::write_json_file(o.out_path, r.results["sequence"]);
}

}  // namespace commands

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riesz-dual toolkit for finite frames"};
  app.name("rdual");
  app.set_help_flag("--help", "print this help message and exit");  // -h would clash with --h
  app.require_subcommand(1);
  Options o;
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--tol-rank", o.tol.rank_rel, "relative rank threshold on singular values");
    a->add_option("--tol-cert", o.tol.cert_rel, "certificate tolerance");
    a->add_option("--jobs", o.jobs, "worker threads for independent computations")->check(CLI::PositiveNumber);
    a->add_option("--out", o.out_path, "write the produced artifact (or the report) to this path");
  };
  add_globals(&app);
  app.fallthrough();

  auto* analyze = app.add_subcommand("analyze", "classify a sequence and report its bounds");
  analyze->add_option("seq", o.seq_a)->required();

  auto* rdual = app.add_subcommand("rdual", "construct an R-dual");
  rdual->require_subcommand(1);
  rdual->fallthrough();
  auto* t1 = rdual->add_subcommand("type1", "R-dual of type I");
  t1->add_option("f", o.seq_a)->required();
  t1->add_option("--e", o.e_path);
  t1->add_option("--h", o.h_path);
  auto* t3 = rdual->add_subcommand("type3", "R-dual of type III");
  t3->add_option("f", o.seq_a)->required();
  t3->add_option("--e", o.e_path);
  t3->add_option("--h", o.h_path);
  t3->add_option("--q", o.q_path)->required();

  auto* certify = app.add_subcommand("certify", "certify a symmetrical type-III pair");
  certify->add_option("f", o.seq_a)->required();
  certify->add_option("omega", o.seq_b)->required();

  auto* recover = app.add_subcommand("recover", "recover f from omega and a certificate");
  recover->add_option("omega", o.seq_b)->required();
  recover->add_option("--cert", o.cert_path)->required();
  recover->add_option("--sf-sqrt", o.sf_sqrt_path, "operator file overriding the certificate's S_f^{1/2}");

  auto* gamma = app.add_subcommand("gamma", "biorthogonal sequence from the canonical dual");
  gamma->add_option("f", o.seq_a)->required();
  gamma->add_option("omega", o.seq_b)->required();

  auto* decide = app.add_subcommand("decide", "decide whether omega is a type-I R-dual of f");
  decide->add_option("f", o.seq_a)->required();
  decide->add_option("omega", o.seq_b)->required();

  auto* represent = app.add_subcommand("represent", "shift-operator series for the inverse square root");
  represent->add_option("f", o.seq_a)->required();
  represent->add_option("omega", o.seq_b)->required();
  represent->add_option("--h", o.h_path);
  represent->add_option("--h0-index", o.h0_index);

  auto* extend = app.add_subcommand("extend", "extend a subspace bijection to the whole space");
  extend->add_option("--phi", o.phi_path)->required();
  extend->add_option("--vbasis", o.vbasis_path)->required();

  auto* generate = app.add_subcommand("generate", "seeded random sequence");
  generate->add_option("--n", o.gen_n)->required()->check(CLI::PositiveNumber);
  generate->add_option("--kind", o.gen_kind)->required()->check(CLI::IsMember({"onb", "spectrum"}));
  generate->add_option("--sv", o.gen_sv)->delimiter(',');
  generate->add_option("--seed", o.gen_seed)->required();

  for (auto* sub : {analyze, t1, t3, certify, recover, gamma, decide, represent, extend, generate}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::string name;
  void (*handler)(Report&, const Options&) = nullptr;
  const std::vector<std::pair<CLI::App*, void (*)(Report&, const Options&)>> table = {
      {analyze, commands::analyze}, {t1, commands::type1},         {t3, commands::type3},
      {certify, commands::certify}, {recover, commands::recover},   {gamma, commands::gamma},
      {decide, commands::decide},   {represent, commands::represent}, {extend, commands::extend},
      {generate, commands::generate}};
  for (const auto& [sub, fn] : table) {
    if (sub->parsed()) {
      name = (sub == t1 || sub == t3) ? "rdual " + sub->get_name() : sub->get_name();
      handler = fn;
    }
  }

  Report report(name);
  int status = 0;
  try {
    o.tol.validate();
    handler(report, o);
  } catch (const Error& e) {
    report.fail(e);
    status = e.code() == ErrorCode::UsageError ? 2 : 1;
  }
  if (status == 0 && report.verdict() == "fail") status = 1;
  out << report.to_json(o.tol).dump(2) << '\n';
  report.summarize(err);
  return status;
}

}  // namespace rdual::cli
