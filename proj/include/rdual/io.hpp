#pragma once

// JSON sequence files.
//
//   {"dimension": n, "field_tag": "real" | "complex",
//    "vectors": [v_0, ..., v_{k-1}], "label": "optional"}
//
// Each vector is one column (length n); entries are numbers ("real") or
// [re, im] pairs ("complex"). Sequences require k == n; operators use the
// same layout with column j the image of the j-th standard basis vector.
// Subspace bases may have k < n.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rdual/frames.hpp"
#include "rdual/linalg.hpp"
#include "rdual/rduals.hpp"

namespace rdual::io {

using nlohmann::json;

struct LabeledMatrix {
  Matrix matrix;
  std::optional<std::string> label;
};

namespace detail {

inline Scalar parse_entry(const json& v, bool real_field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array()) {
    if (v.size() != 2) throw Error(ErrorCode::ShapeError, "complex entries must be [re, im] pairs");
    if (!v[0].is_number() || !v[1].is_number()) throw Error(ErrorCode::ParseError, "complex entry parts must be numbers");
    const Scalar z{v[0].get<double>(), v[1].get<double>()};
    if (real_field && z.imag() != 0.0) throw Error(ErrorCode::ValueError, "field_tag real with nonzero imaginary part");
    return z;
  }
  throw Error(ErrorCode::ParseError, "entries must be numbers or [re, im] pairs");
}

inline json entry_to_json(const Scalar& z, bool real_field) {
  if (real_field) return z.real();
  return json::array({z.real(), z.imag()});
}

}  // namespace detail

inline LabeledMatrix matrix_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "sequence file must be a JSON object");
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer() || doc["dimension"].get<long long>() < 1) {
    throw Error(ErrorCode::ParseError, "missing or invalid \"dimension\"");
  }
  if (!doc.contains("vectors") || !doc["vectors"].is_array()) throw Error(ErrorCode::ParseError, "missing \"vectors\" array");
  const std::string tag = doc.value("field_tag", std::string("complex"));
  if (tag != "real" && tag != "complex") throw Error(ErrorCode::ParseError, "field_tag must be \"real\" or \"complex\"");

  const auto n = static_cast<std::size_t>(doc["dimension"].get<long long>());
  const auto& vectors = doc["vectors"];
  Matrix m(n, vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    const auto& v = vectors[j];
    if (!v.is_array()) throw Error(ErrorCode::ParseError, "each vector must be an array");
    if (v.size() != n) {
      throw Error(ErrorCode::ShapeError, "vector " + std::to_string(j) + " has " + std::to_string(v.size()) +
                                             " entries, expected " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) m(i, j) = detail::parse_entry(v[i], tag == "real");
  }
  if (!is_finite(m)) throw Error(ErrorCode::ValueError, "non-finite entry");
  LabeledMatrix out{std::move(m), std::nullopt};
  if (doc.contains("label") && doc["label"].is_string()) out.label = doc["label"].get<std::string>();
  return out;
}

inline VectorSeq sequence_from_json(const json& doc) {
  LabeledMatrix m = matrix_from_json(doc);
  if (m.matrix.cols() != m.matrix.rows()) {
    throw Error(ErrorCode::ShapeError, "expected " + std::to_string(m.matrix.rows()) + " vectors, found " +
                                           std::to_string(m.matrix.cols()));
  }
  return VectorSeq(std::move(m.matrix));
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::out_of_range& e) {
    // numbers beyond double range, e.g. 1e999
    throw Error(ErrorCode::ValueError, path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

inline LabeledMatrix parse_matrix(const std::filesystem::path& path) { return matrix_from_json(read_json_file(path)); }

inline VectorSeq parse_sequence(const std::filesystem::path& path) { return sequence_from_json(read_json_file(path)); }

inline json to_json(const Matrix& m, const std::optional<std::string>& label = std::nullopt) {
  const bool real = std::all_of(m.data().begin(), m.data().end(), [](const Scalar& z) { return z.imag() == 0.0; });
  json vectors = json::array();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    json v = json::array();
    for (const auto& z : m.column(j)) v.push_back(detail::entry_to_json(z, real));
    vectors.push_back(std::move(v));
  }
  json doc = {{"dimension", m.rows()}, {"field_tag", real ? "real" : "complex"}, {"vectors", std::move(vectors)}};
  if (label) doc["label"] = *label;
  return doc;
}

inline json to_json(const VectorSeq& s, const std::optional<std::string>& label = std::nullopt) {
  return to_json(s.synthesis(), label);
}

// ---------------------------------------------------------------------------
// Certificates: two bases, the extended square root, the residual, and
// optionally S_f^{1/2} so that recovery can run from the bundle alone.

struct CertificateBundle {
  RDualCertificate cert;
  std::optional<Matrix> s_f_sqrt;
};

inline json certificate_to_json(const RDualCertificate& cert, const std::optional<Matrix>& s_f_sqrt = std::nullopt) {
  json doc = {{"e_basis", to_json(cert.e_basis.matrix())},
              {"h_basis", to_json(cert.h_basis.matrix())},
              {"s_omega_sqrt_ext", to_json(cert.s_omega_sqrt_ext)},
              {"residual", cert.residual}};
  if (s_f_sqrt) doc["s_f_sqrt"] = to_json(*s_f_sqrt);
  return doc;
}

inline CertificateBundle certificate_from_json(const json& doc, const Tolerances& tol = {}) {
  for (const char* key : {"e_basis", "h_basis", "s_omega_sqrt_ext", "residual"}) {
    if (!doc.is_object() || !doc.contains(key)) throw Error(ErrorCode::ParseError, std::string("certificate lacks ") + key);
  }
  if (!doc["residual"].is_number()) throw Error(ErrorCode::ParseError, "certificate residual must be a number");
  auto e = OrthonormalBasis::certify(sequence_from_json(doc["e_basis"]), tol);
  auto h = OrthonormalBasis::certify(sequence_from_json(doc["h_basis"]), tol);
  Matrix root = sequence_from_json(doc["s_omega_sqrt_ext"]).synthesis();
  CertificateBundle out{RDualCertificate{std::move(e), std::move(h), std::move(root), doc["residual"].get<double>()},
                        std::nullopt};
  if (doc.contains("s_f_sqrt")) out.s_f_sqrt = sequence_from_json(doc["s_f_sqrt"]).synthesis();
  return out;
}

inline void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::UsageError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace rdual::io
