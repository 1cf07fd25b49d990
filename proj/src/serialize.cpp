#include "fcs/serialize.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fcs {

namespace {

void require_version(const Json& j, const char* what) {
  if (!j.is_object()) throw FormatError(fmt::format("{}: expected a JSON object", what));
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kSchemaVersion) {
    throw FormatError(fmt::format("{}: unsupported or missing schema version (expected {})", what, kSchemaVersion));
  }
}

int require_int(const Json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw FormatError(fmt::format("{}: missing integer field '{}'", what, key));
  }
  return j[key].get<int>();
}

double as_number(const Json& j, const char* what) {
  if (!j.is_number()) throw FormatError(fmt::format("{}: expected a number", what));
  return j.get<double>();
}

Json diagnostics_to_json(const SpectralDiagnostics& d) {
  return Json{{"rank", d.rank},
              {"sigma_m_omega", d.sigma_m_omega},
              {"sigma_m_projected", d.sigma_m_projected},
              {"condition_number", d.condition_number},
              {"frame_overlap", d.frame_overlap}};
}

}  // namespace

Json to_json(const RealMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json complex_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(m(r, c).real());
      data.push_back(m(r, c).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

RealMatrix real_matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(fmt::format("{}: expected an array of rows", what));
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw FormatError(fmt::format("{}: row {} is not an array of length {}", what, r, cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = as_number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

RealVector real_vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(fmt::format("{}: expected an array", what));
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_number(j[i], what);
  return v;
}

ComplexMatrix complex_matrix_from_json(const Json& j, const char* what) {
  if (!j.is_object()) throw FormatError(fmt::format("{}: expected {{rows, cols, data}}", what));
  require_keys(j, {"rows", "cols", "data"}, what);
  const int rows = require_int(j, "rows", what);
  const int cols = require_int(j, "cols", what);
  if (rows < 0 || cols < 0) throw FormatError(fmt::format("{}: negative dimensions", what));
  const Json& data = j.at("data");
  if (!data.is_array() || data.size() != 2 * static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw FormatError(fmt::format("{}: data must hold 2 * rows * cols numbers", what));
  }
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, k += 2) m(r, c) = {as_number(data[k], what), as_number(data[k + 1], what)};
  }
  return m;
}

Json to_json(const Realization& r) {
  Json kappa = Json::array();
  for (const auto& k : r.kappa) kappa.push_back(to_json(k));
  return Json{{"version", kSchemaVersion}, {"d_a", r.d_a}, {"m", r.m}, {"kappa", std::move(kappa)},
              {"e", to_json(r.e)},         {"rho", to_json(r.rho)}};
}

Realization realization_from_json(const Json& j) {
  require_version(j, "realization");
  Realization r;
  r.d_a = require_int(j, "d_a", "realization");
  r.m = require_int(j, "m", "realization");
  if (!j.contains("kappa") || !j["kappa"].is_array()) throw FormatError("realization: missing 'kappa'");
  for (const auto& k : j["kappa"]) r.kappa.push_back(real_matrix_from_json(k, "realization.kappa"));
  if (!j.contains("e") || !j.contains("rho")) throw FormatError("realization: missing 'e' or 'rho'");
  r.e = real_vector_from_json(j["e"], "realization.e");
  r.rho = real_vector_from_json(j["rho"], "realization.rho");
  try {
    r.check_shapes();
  } catch (const DimensionError& e) {
    throw FormatError(fmt::format("realization: {}", e.what()));
  }
  return r;
}

Json to_json(const SpectralRealization& sr) {
  Json j = to_json(sr.model);
  j["diagnostics"] = diagnostics_to_json(sr.diagnostics);
  return j;
}

SpectralRealization spectral_realization_from_json(const Json& j) {
  SpectralRealization sr;
  sr.model = realization_from_json(j);
  if (j.contains("diagnostics")) {
    const Json& d = j["diagnostics"];
    require_keys(d, {"rank", "sigma_m_omega", "sigma_m_projected", "condition_number", "frame_overlap"},
                 "diagnostics");
    sr.diagnostics.rank = require_int(d, "rank", "diagnostics");
    sr.diagnostics.sigma_m_omega = as_number(d.at("sigma_m_omega"), "diagnostics.sigma_m_omega");
    sr.diagnostics.sigma_m_projected = as_number(d.at("sigma_m_projected"), "diagnostics.sigma_m_projected");
    sr.diagnostics.condition_number = as_number(d.at("condition_number"), "diagnostics.condition_number");
    sr.diagnostics.frame_overlap = as_number(d.at("frame_overlap"), "diagnostics.frame_overlap");
  }
  return sr;
}

Json to_json(const LemmaReport& rep) {
  Json ineqs = Json::array();
  for (const auto& i : rep.inequalities) {
    ineqs.push_back(Json{{"name", i.name},
                         {"lhs", i.lhs},
                         {"rhs", i.rhs},
                         {"margin", i.margin()},
                         {"holds", i.holds()},
                         {"monitored", i.monitored}});
  }
  return Json{{"lemma", rep.lemma},
              {"status", to_string(rep.status())},
              {"precondition_met", rep.precondition_met},
              {"precondition", rep.precondition},
              {"inequalities", std::move(ineqs)}};
}

MarginalFile marginal_file_from_json(const Json& j) {
  require_version(j, "marginal file");
  require_keys(j, {"version", "d_a", "marginals"}, "marginal file");
  MarginalFile f;
  f.d_a = require_int(j, "d_a", "marginal file");
  if (f.d_a < 2) throw FormatError(fmt::format("marginal file: d_a = {} must be >= 2", f.d_a));
  if (!j.contains("marginals") || !j["marginals"].is_array()) throw FormatError("marginal file: missing 'marginals'");
  for (const auto& entry : j["marginals"]) {
    require_keys(entry, {"sites", "coefficients"}, "marginal entry");
    const int s = require_int(entry, "sites", "marginal entry");
    if (s < 1) throw FormatError(fmt::format("marginal entry: sites = {} must be >= 1", s));
    if (!entry.contains("coefficients")) throw FormatError("marginal entry: missing 'coefficients'");
    RealVector c = real_vector_from_json(entry["coefficients"], "marginal coefficients");
    if (c.size() != block_size(f.d_a, s)) {
      throw FormatError(fmt::format("marginal entry: {} sites need {} coefficients, got {}", s, block_size(f.d_a, s),
                                    c.size()));
    }
    if (!f.marginals.emplace(s, std::move(c)).second) {
      throw FormatError(fmt::format("marginal file: duplicate entry for {} sites", s));
    }
  }
  return f;
}

Json to_json(const MarginalFile& f) {
  Json list = Json::array();
  for (const auto& [s, c] : f.marginals) list.push_back(Json{{"sites", s}, {"coefficients", to_json(c)}});
  return Json{{"version", kSchemaVersion}, {"d_a", f.d_a}, {"marginals", std::move(list)}};
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(fmt::format("{}: expected a JSON object", where));
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw FormatError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
  if (!out) throw FormatError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace fcs
