#pragma once

// Discrete causal structure: a pair of points is timelike separated when the
// roots of its closed chain are real and spacelike when they form a complex
// conjugate pair. Pairs whose discriminant lies inside the tolerance band are
// reported as Boundary.

#include <string>
#include <vector>

#include "dfs/algebra.hpp"

namespace dfs {

enum class CausalLabel { Timelike, Spacelike, Boundary };

char label_code(CausalLabel label);  // 'T', 'S', 'B'
std::string label_name(CausalLabel label);

// Band is tol * (|Tr A|^2 + |4 det A| + 1).
CausalLabel classify_pair(const ChainSpectrum& spec, double tol = kDefaultTolerances.causal_band);

struct CausalMatrix {
  int m = 0;
  std::vector<CausalLabel> labels;     // row-major
  std::vector<double> discriminants;   // row-major

  CausalLabel at(int x, int y) const;  // 1-based
  double discriminant(int x, int y) const;

  // m lines of comma-separated T/S/B codes.
  std::string to_csv() const;
  // {"m":..,"labels":[[..]],"discriminants":[[..]]}
  std::string to_json() const;
};

CausalMatrix causal_matrix(const FermionicProjector& p,
                           double tol = kDefaultTolerances.causal_band);

}  // namespace dfs
