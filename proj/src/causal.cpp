#include "dfs/causal.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace dfs {

char label_code(CausalLabel label) {
  switch (label) {
    case CausalLabel::Timelike: return 'T';
    case CausalLabel::Spacelike: return 'S';
    case CausalLabel::Boundary: return 'B';
  }
  return '?';
}

std::string label_name(CausalLabel label) {
  switch (label) {
    case CausalLabel::Timelike: return "timelike";
    case CausalLabel::Spacelike: return "spacelike";
    case CausalLabel::Boundary: return "boundary";
  }
  return "unknown";
}

CausalLabel classify_pair(const ChainSpectrum& spec, double tol) {
  const double band =
      tol * (spec.trace * spec.trace + std::abs(4.0 * spec.determinant) + 1.0);
  if (spec.discriminant > band) return CausalLabel::Timelike;
  if (spec.discriminant < -band) return CausalLabel::Spacelike;
  return CausalLabel::Boundary;
}

CausalLabel CausalMatrix::at(int x, int y) const {
  return labels.at(static_cast<std::size_t>((x - 1) * m + (y - 1)));
}

double CausalMatrix::discriminant(int x, int y) const {
  return discriminants.at(static_cast<std::size_t>((x - 1) * m + (y - 1)));
}

std::string CausalMatrix::to_csv() const {
  std::ostringstream os;
  for (int x = 1; x <= m; ++x) {
    for (int y = 1; y <= m; ++y) {
      if (y > 1) os << ',';
      os << label_code(at(x, y));
    }
    os << '\n';
  }
  return os.str();
}

std::string CausalMatrix::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  j["labels"] = nlohmann::json::array();
  j["discriminants"] = nlohmann::json::array();
  for (int x = 1; x <= m; ++x) {
    nlohmann::json row_l = nlohmann::json::array();
    nlohmann::json row_d = nlohmann::json::array();
    for (int y = 1; y <= m; ++y) {
      row_l.push_back(std::string(1, label_code(at(x, y))));
      row_d.push_back(discriminant(x, y));
    }
    j["labels"].push_back(row_l);
    j["discriminants"].push_back(row_d);
  }
  return j.dump(2);
}

CausalMatrix causal_matrix(const FermionicProjector& p, double tol) {
  CausalMatrix out;
  const int m = p.points();
  out.m = m;
  const auto spectra = all_chain_spectra(p);
  out.labels.resize(spectra.size());
  out.discriminants.resize(spectra.size());
  // A_xy and A_yx share their characteristic polynomial; the upper triangle is
  // mirrored so rounding cannot break the symmetry of the labels.
  for (int x = 0; x < m; ++x) {
    for (int y = x; y < m; ++y) {
      const auto& spec = spectra[static_cast<std::size_t>(x * m + y)];
      const CausalLabel label = classify_pair(spec, tol);
      for (const auto idx : {x * m + y, y * m + x}) {
        out.labels[static_cast<std::size_t>(idx)] = label;
        out.discriminants[static_cast<std::size_t>(idx)] = spec.discriminant;
      }
    }
  }
  return out;
}

}  // namespace dfs
