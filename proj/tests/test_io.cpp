#include <doctest.h>

#include <random>

#include "dfs/closedform.hpp"
#include "dfs/io.hpp"
#include "oracles.hpp"

using namespace dfs;

TEST_CASE("fermion matrix JSON round trip is exact") {
  std::mt19937_64 gen(10);
  const FermionMatrix psi(oracle::random_fermion_matrix(4, 3, gen));
  const auto back = io::fermion_matrix_from_json(io::fermion_matrix_to_json(psi));
  CHECK(back.points() == 4);
  CHECK(back.particles() == 3);
  CHECK((back.entries() - psi.entries()).norm() == 0.0);
}

TEST_CASE("malformed JSON is rejected") {
  CHECK_THROWS_AS(io::fermion_matrix_from_json("{"), io::ParseError);
  CHECK_THROWS_AS(io::fermion_matrix_from_json(R"({"format":"other","m":1,"f":1,"entries":[[0,0],[1,0]]})"),
                  io::ParseError);
  CHECK_THROWS_AS(io::fermion_matrix_from_json(
                      R"({"format":"dfsys.fermion_matrix/1","m":1,"f":1,"entries":[[0,0]]})"),
                  io::ParseError);
  CHECK_NOTHROW(io::fermion_matrix_from_json(
      R"({"format":"dfsys.fermion_matrix/1","m":1,"f":1,"entries":[[0,0],[1,0]]})"));
}

TEST_CASE("golden Bloch CSV") {
  const auto c = bloch_configuration(closedform::two_point_critical());
  CHECK(io::bloch_csv(c) == "point,rho,vx,vy,vz\n0,1,0,0,1\n1,1,0,0,-1\n");
}

TEST_CASE("number format") {
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_number(2.0) == "2");
}
