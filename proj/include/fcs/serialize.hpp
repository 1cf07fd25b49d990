#pragma once

// JSON persistence (schema version 1) for realizations, learned
// realizations, lemma reports and marginal files.
//
// Real matrices are nested row arrays. Complex matrices are objects
// {"rows", "cols", "data"} with data = [re, im, re, im, ...] in row-major
// order.

#include "fcs/lemmas.hpp"
#include "fcs/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace fcs {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

Json to_json(const RealMatrix& m);
Json to_json(const RealVector& v);
Json complex_to_json(const ComplexMatrix& m);

RealMatrix real_matrix_from_json(const Json& j, const char* what);
RealVector real_vector_from_json(const Json& j, const char* what);
ComplexMatrix complex_matrix_from_json(const Json& j, const char* what);

/// {"version": 1, "d_a", "m", "kappa": [a][i][j], "e", "rho"}.
Json to_json(const Realization& r);
Realization realization_from_json(const Json& j);

/// Realization schema plus a "diagnostics" object.
Json to_json(const SpectralRealization& sr);
SpectralRealization spectral_realization_from_json(const Json& j);

/// {"lemma", "status", "precondition_met", "precondition",
///  "inequalities": [{"name", "lhs", "rhs", "margin", "holds", "monitored"}]}.
Json to_json(const LemmaReport& rep);

/// Marginal file: {"version": 1, "d_a": d, "marginals": [{"sites": s,
/// "coefficients": [...]}, ...]} with coefficients in the block Gell-Mann
/// basis (flat index as in opbasis). Throws FormatError on malformed input.
struct MarginalFile {
  int d_a = 0;
  MarginalCoefficients marginals;
};
MarginalFile marginal_file_from_json(const Json& j);
Json to_json(const MarginalFile& f);

/// Throws FormatError unless j is an object whose keys all appear in allowed.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with two-space indent and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace fcs
