#include <random>
#include <sstream>

#include "chemoloc/field_io.hpp"
#include "chemoloc/grid.hpp"
#include "doctest.h"

using namespace chemoloc;

TEST_CASE("text grid write/read is bit-exact") {
  const Grid g(6, 4, 2.0, 0.75);
  Field f(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1e3, 1e3);
  for (double& v : f.data) v = uni(rng);
  f.at(0, 0) = 1e-300;
  f.at(5, 3) = -0.1;  // not exactly representable; 17 digits must survive

  std::ostringstream os;
  write_text_grid(os, f);
  std::istringstream is(os.str());
  const Field back = read_text_grid(is);
  CHECK(back.grid == g);
  for (std::size_t k = 0; k < f.data.size(); ++k) CHECK(back.data[k] == f.data[k]);
}

TEST_CASE("text grid header and row order") {
  const Grid g(4, 5, 1.0, 1.0);
  Field f(g);
  f.at(0, 0) = 1.0;
  f.at(3, 4) = 9.0;
  std::ostringstream os;
  write_text_grid(os, f);
  std::istringstream is(os.str());
  std::string word;
  is >> word;
  CHECK(word == "FIELD");
  int nx, ny;
  double Lx, Ly;
  is >> nx >> ny >> Lx >> Ly;
  CHECK(nx == 4);
  CHECK(ny == 5);
  double v;
  is >> v;
  CHECK(v == 1.0);  // row j=0 comes first
}

TEST_CASE("malformed text grids are rejected with context") {
  std::istringstream bad_magic("GRID 2 2 1 1\n0 0\n0 0\n");
  CHECK_THROWS_AS(read_text_grid(bad_magic), ConfigError);
  std::istringstream short_row("FIELD 4 4 1 1\n0 0 0\n");
  CHECK_THROWS_AS(read_text_grid(short_row), ConfigError);
  std::istringstream bad_value("FIELD 4 4 1 1\n0 0 zero 0\n");
  CHECK_THROWS_AS(read_text_grid(bad_value), ConfigError);
}

TEST_CASE("pgm header, scaling, and orientation") {
  const Grid g(4, 4, 1.0, 1.0);
  Field f(g);
  f.at(0, 0) = 0.0;
  f.at(3, 3) = 10.0;
  std::ostringstream os;
  write_pgm(os, f);
  const std::string s = os.str();
  CHECK(s.rfind("P5\n4 4\n255\n", 0) == 0);
  const std::size_t off = std::string("P5\n4 4\n255\n").size();
  REQUIRE(s.size() == off + 16);
  // top row (j=3) is emitted first; its last pixel holds the maximum
  CHECK(static_cast<unsigned char>(s[off + 3]) == 255);
  // bottom-left pixel holds the minimum
  CHECK(static_cast<unsigned char>(s[off + 12]) == 0);

  Field c(g, 5.0);
  std::ostringstream os2;
  write_pgm(os2, c);
  const std::string s2 = os2.str();
  for (std::size_t k = off; k < s2.size(); ++k) CHECK(s2[k] == 0);  // constant maps to 0
}

TEST_CASE("format_double survives a parse round trip") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 12345.6789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
