#include "dfs/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dfs::io {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fermion_matrix_to_json(const FermionMatrix& psi) {
  nlohmann::json j;
  j["format"] = kFermionMatrixFormat;
  j["m"] = psi.points();
  j["f"] = psi.particles();
  nlohmann::json entries = nlohmann::json::array();
  const CMatrix& e = psi.entries();
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) entries.push_back({e(r, c).real(), e(r, c).imag()});
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

FermionMatrix fermion_matrix_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("fermion matrix: invalid JSON: ") + e.what());
  }
  auto fail = [](const std::string& what) { throw ParseError("fermion matrix: " + what); };
  if (!j.is_object()) fail("top level must be an object");
  if (j.contains("format") && j["format"] != kFermionMatrixFormat) {
    fail("unsupported format tag " + j["format"].dump());
  }
  for (const char* key : {"m", "f", "entries"}) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
  }
  if (!j["m"].is_number_integer() || !j["f"].is_number_integer()) fail("m and f must be integers");
  const int m = j["m"].get<int>();
  const int f = j["f"].get<int>();
  if (m < 1 || f < 1 || f > m) fail("need 1 <= f <= m");
  const auto& entries = j["entries"];
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(2 * m * f)) {
    fail("entries must be an array of 2*m*f [re, im] pairs");
  }
  CMatrix psi(2 * m, f);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < psi.rows(); ++r) {
    for (Eigen::Index c = 0; c < psi.cols(); ++c, ++k) {
      const auto& z = entries[k];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        fail("entry " + std::to_string(k) + " is not a [re, im] pair");
      }
      psi(r, c) = cplx(z[0].get<double>(), z[1].get<double>());
    }
  }
  return FermionMatrix(std::move(psi));
}

std::string bloch_csv(const BlochConfiguration& config) {
  std::ostringstream os;
  os << "point,rho,vx,vy,vz\n";
  for (int x = 0; x < config.size(); ++x) {
    const auto& p = config.points[static_cast<std::size_t>(x)];
    os << x << ',' << format_number(p.rho) << ',' << format_number(p.bloch.x()) << ','
       << format_number(p.bloch.y()) << ',' << format_number(p.bloch.z()) << '\n';
  }
  return os.str();
}

std::string matrix_csv(const RMatrix& mat) {
  std::ostringstream os;
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      if (c > 0) os << ',';
      os << format_number(mat(r, c));
    }
    os << '\n';
  }
  return os.str();
}

std::string complex_matrix_csv(const CMatrix& mat) {
  std::ostringstream os;
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      if (c > 0) os << ',';
      const double im = mat(r, c).imag();
      os << format_number(mat(r, c).real()) << (im < 0 ? "-" : "+") << format_number(std::abs(im))
         << 'i';
    }
    os << '\n';
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace dfs::io
