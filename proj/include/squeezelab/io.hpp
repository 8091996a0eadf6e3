#pragma once

// JSON state files, observable spec strings and report serialization.
//
// State file:
//   { "sites": N, "local_dim": d, "kind": K, ... }
//   K = pure_product   "kets": [ket_1, ..., ket_N]
//       mixture        "terms": [{"weight": w, "kets": [...]}, ...]
//       dense_density  "matrix": d^N x d^N rows
//       preset         "preset": "example1_rho" with "p", or "oat" with "theta"
// A complex entry is a number or a [re, im] pair.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "squeezelab/dynamics.hpp"
#include "squeezelab/hilbert.hpp"
#include "squeezelab/invariant.hpp"
#include "squeezelab/observables.hpp"
#include "squeezelab/verify.hpp"
#include "squeezelab/witness.hpp"
#include "squeezelab/worked_examples.hpp"

namespace squeezelab {

using ojson = nlohmann::ordered_json;

/// Malformed input file or spec string.
class ParseError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline cplx parse_complex(const nlohmann::json& v, std::string_view where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ParseError(std::string(where) + ": expected a number or [re, im]");
}

inline CVector parse_vector(const nlohmann::json& v, std::string_view where) {
  if (!v.is_array()) throw ParseError(std::string(where) + ": expected an array");
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = parse_complex(v[i], where);
  return out;
}

inline CMatrix parse_matrix(const nlohmann::json& v, std::string_view where) {
  if (!v.is_array() || v.empty()) throw ParseError(std::string(where) + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  if (!v[0].is_array()) throw ParseError(std::string(where) + ": rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  CMatrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(where) + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = parse_complex(row[static_cast<std::size_t>(c)], where);
  }
  return out;
}

template <class T>
T required(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("state file: missing \"") + key + "\"");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("state file: \"") + key + "\" has the wrong type");
  }
}

inline CVector product_from_kets(const nlohmann::json& kets, int sites, int d) {
  if (!kets.is_array() || static_cast<int>(kets.size()) != sites)
    throw ParseError("state file: expected one ket per site (" + std::to_string(sites) + ")");
  CVector psi = CVector::Ones(1);
  for (int s = 0; s < sites; ++s) {
    const std::string where = "ket of site " + std::to_string(s + 1);
    const CVector k = parse_vector(kets[static_cast<std::size_t>(s)], where);
    if (k.size() != d) throw ParseError(where + ": length " + std::to_string(k.size()) + ", expected " + std::to_string(d));
    if (std::abs(k.norm() - 1.0) > 1e-12)
      throw InvariantViolation(where + " is not normalized (norm " + std::to_string(k.norm()) + ")");
    psi = kron(psi, k);
  }
  return psi;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace detail

inline MultiSpinState parse_state(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("state file: top level must be an object");
  const auto kind = detail::required<std::string>(doc, "kind");
  if (kind == "preset") {
    const auto name = detail::required<std::string>(doc, "preset");
    if (name == "example1_rho") return example1_state(detail::required<double>(doc, "p"));
    if (name == "oat") {
      const int sites = doc.value("sites", 5);
      return oat_state(sites, Spin::from_twice(2), detail::required<double>(doc, "theta"));
    }
    throw ParseError("state file: unknown preset \"" + name + "\" (example1_rho, oat)");
  }
  const int sites = detail::required<int>(doc, "sites");
  const int d = detail::required<int>(doc, "local_dim");
  if (sites < 1 || d < 1) throw ParseError("state file: sites and local_dim must be positive");
  checked_dimension(d, sites);
  if (kind == "pure_product") {
    if (!doc.contains("kets")) throw ParseError("state file: missing \"kets\"");
    return MultiSpinState::pure(sites, d, detail::product_from_kets(doc["kets"], sites, d));
  }
  if (kind == "mixture") {
    if (!doc.contains("terms") || !doc["terms"].is_array() || doc["terms"].empty())
      throw ParseError("state file: mixture needs a non-empty \"terms\" array");
    const auto dim = static_cast<Eigen::Index>(checked_dimension(d, sites));
    CMatrix rho = CMatrix::Zero(dim, dim);
    double total = 0.0;
    for (const auto& term : doc["terms"]) {
      const auto w = detail::required<double>(term, "weight");
      if (w < 0.0) throw InvariantViolation("mixture weight " + std::to_string(w) + " is negative");
      if (!term.contains("kets")) throw ParseError("state file: mixture term without \"kets\"");
      const CVector psi = detail::product_from_kets(term["kets"], sites, d);
      rho.noalias() += w * psi * psi.adjoint();
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvariantViolation("mixture weights sum to " + std::to_string(total) + ", not 1");
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return MultiSpinState::density(sites, d, std::move(rho), /*skip_spectrum=*/true);
  }
  if (kind == "dense_density") {
    if (!doc.contains("matrix")) throw ParseError("state file: missing \"matrix\"");
    return MultiSpinState::density(sites, d, detail::parse_matrix(doc["matrix"], "matrix"));
  }
  throw ParseError("state file: unknown kind \"" + kind +
                   "\" (pure_product, mixture, dense_density, preset)");
}

inline MultiSpinState load_state(const std::string& path) { return parse_state(detail::read_json_file(path)); }

namespace detail {
inline double parse_number(std::string_view text, std::string_view what) {
  const std::string s(text);
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double a = std::stod(s.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("");
      const std::string rest = s.substr(slash + 1);
      const double b = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("");
      return a / b;
    }
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("observables: cannot read " + std::string(what) + " from \"" + s + "\"");
  }
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}
}  // namespace detail

/// "spin:<j>", "dichotomic:<m0>,<m1>[,<factor>]" (factor 1/2 by default) or
/// "projector:<file>" with JSON {"P0", "P1"[, "U", "V"][, "factor"]}.
/// Dimensions are checked against the state the triple will act on.
inline ObservableTriple parse_observables(std::string_view spec, int sites, int local_dim) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("observables: expected spin:<j>, dichotomic:<m0>,<m1>[,factor] or projector:<file>");
  const std::string_view head = spec.substr(0, colon);
  const std::string_view body = spec.substr(colon + 1);
  const auto check_dim = [&](int d) {
    if (d != local_dim)
      throw InvalidArgument("observables act on dimension " + std::to_string(d) + ", state has local_dim " +
                            std::to_string(local_dim));
  };
  if (head == "spin") {
    const Spin spin = Spin::from_value(detail::parse_number(body, "j"));
    check_dim(spin.dim());
    return collective_spin(spin, sites);
  }
  if (head == "dichotomic") {
    const auto parts = detail::split(body, ',');
    if (parts.size() != 2 && parts.size() != 3)
      throw ParseError("observables: dichotomic needs <m0>,<m1>[,<factor>]");
    const double factor = parts.size() == 3 ? detail::parse_number(parts[2], "factor") : 0.5;
    const Spin spin = Spin::from_twice(local_dim - 1);
    return dichotomic_from_levels(spin, detail::parse_number(parts[0], "m0"),
                                  detail::parse_number(parts[1], "m1"), factor, sites);
  }
  if (head == "projector") {
    const nlohmann::json doc = detail::read_json_file(std::string(body));
    if (!doc.contains("P0") || !doc.contains("P1")) throw ParseError("projector file needs \"P0\" and \"P1\"");
    const double factor = doc.value("factor", 0.5);
    const bool with_isometries = doc.contains("U") && doc.contains("V");
    const ProjectorPair pair =
        with_isometries
            ? ProjectorPair::from_isometries(detail::parse_matrix(doc["U"], "U"), detail::parse_matrix(doc["V"], "V"))
            : ProjectorPair::from_projectors(detail::parse_matrix(doc["P0"], "P0"),
                                             detail::parse_matrix(doc["P1"], "P1"));
    if (with_isometries) {
      const CMatrix p0 = detail::parse_matrix(doc["P0"], "P0");
      const CMatrix p1 = detail::parse_matrix(doc["P1"], "P1");
      if (p0.rows() != pair.local_dim() || max_abs(p0 - pair.p0()) > 1e-10 || max_abs(p1 - pair.p1()) > 1e-10)
        throw InvalidArgument("projector file: P0, P1 disagree with U U^dag, V V^dag");
    }
    check_dim(static_cast<int>(pair.local_dim()));
    return dichotomic_from_projectors(pair, factor, sites);
  }
  throw ParseError("observables: unknown family \"" + std::string(head) + "\"");
}

inline ojson matrix_json(const RMatrix3& m) {
  ojson rows = ojson::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

inline ojson to_json(const WitnessReport& r) {
  ojson j;
  j["suite"] = to_string(r.suite);
  j["n_mean"] = r.n_mean;
  if (r.n_fixed) j["n_fixed"] = *r.n_fixed;
  j["delta"] = r.delta;
  ojson margins = ojson::object();
  for (const auto& [s, m] : r.margins) margins[s.key()] = m;
  j["margins"] = margins;
  j["min_margin"] = r.min_margin();
  j["verdict"] = r.verdict ? ojson(to_string(*r.verdict)) : ojson(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

inline ojson to_json(const InvariantReport& r, bool verbose = false) {
  ojson j;
  j["suite"] = "invariant";
  j["form"] = to_string(r.form);
  j["n_mean"] = r.n_mean;
  j["delta"] = r.delta;
  ojson margins = ojson::object();
  for (int k = 0; k < 4; ++k) margins["G" + std::to_string(k + 1)] = r.margins[k];
  j["margins"] = margins;
  j["verdict"] = r.verdict ? ojson(to_string(*r.verdict)) : ojson(nullptr);
  if (verbose) {
    j["C"] = matrix_json(r.matrices.C);
    j["gamma"] = matrix_json(r.matrices.gamma);
    j["X"] = matrix_json(r.matrices.X);
    j["lambda_min"] = r.matrices.lambda_min;
    j["lambda_max"] = r.matrices.lambda_max;
    ojson printed = ojson::object();
    for (int k = 0; k < 4; ++k) printed["G" + std::to_string(k + 1)] = r.printed_margins[k];
    j["printed_margins"] = printed;
  }
  return j;
}

inline ojson to_json(const VerifySummary& s) {
  ojson j;
  j["seed"] = s.config.seed;
  j["trials"] = s.config.trials;
  j["tolerance"] = s.config.tolerance;
  j["passed"] = s.passed();
  ojson checks = ojson::array();
  for (const auto& c : s.checks) {
    ojson e;
    e["name"] = c.name;
    e["trials"] = c.trials;
    e["min_margin"] = c.trials > 0 ? ojson(c.min_margin) : ojson(nullptr);
    e["failures"] = c.failures;
    e["failing_seeds"] = c.failing_seeds;
    checks.push_back(e);
  }
  j["checks"] = checks;
  return j;
}

}  // namespace squeezelab
