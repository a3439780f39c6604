#pragma once

// File formats shared by the command-line tool, tests and bindings.
//
// Fermion matrix JSON: {"format": "dfsys.fermion_matrix/1", "m": m, "f": f,
// "entries": [[re, im], ...]} with 2m*f entries in row-major order.
// Numbers in CSV files use 12 significant digits.

#include <string>

#include "dfs/bloch.hpp"

namespace dfs::io {

inline constexpr const char* kFermionMatrixFormat = "dfsys.fermion_matrix/1";
inline constexpr const char* kCsvVersion = "1";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// %.12g
std::string format_number(double v);

std::string fermion_matrix_to_json(const FermionMatrix& psi);
// Throws ParseError on malformed input. Does not check normalization.
FermionMatrix fermion_matrix_from_json(const std::string& text);

// Header point,rho,vx,vy,vz; points 0-based.
std::string bloch_csv(const BlochConfiguration& config);
// Real symmetric matrix, one row per line.
std::string matrix_csv(const RMatrix& mat);
// Complex matrix as "re+imi" cells.
std::string complex_matrix_csv(const CMatrix& mat);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace dfs::io
