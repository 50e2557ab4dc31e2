#include <sstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "pvsizing/lp_text.hpp"

using namespace pvsizing;

namespace {

std::string text_of(const SizingLP& built) {
  std::ostringstream os;
  lp::write_lp_text(os, built.lp, built.map.names());
  return os.str();
}

}  // namespace

TEST_CASE("single-step export lists the five named rows") {
  SizingProblemSpec spec;
  spec.grid.num_steps = 1;
  spec.households = {{"h", {0.7}, {0.2}}};
  auto built = build_lp(spec);
  const auto text = text_of(built);
  for (const char* name : {"r_dyn_1:", "r_hi_1:", "r_lo_1:", "r_rup_1:", "r_rdn_1:"}) {
    CHECK(text.find(name) != std::string::npos);
  }
  CHECK(text.find("r_zeh") == std::string::npos);
  CHECK(text.find("C_1 free") != std::string::npos);
  CHECK(text.rfind("Minimize\n", 0) == 0);
  CHECK(text.find("End\n") == text.size() - 4);

  spec.enforce_zeh = true;
  CHECK(text_of(build_lp(spec)).find("r_zeh:") != std::string::npos);
}

TEST_CASE("export re-parses to an identical LP") {
  auto hh = generate_synthetic(4, 3, 2, 0.5);
  for (bool pooled : {false, true}) {
    auto spec = pooled ? testing::community(hh, -5.0, 2.0) : testing::individual(hh[1], 10.0, 2.0);
    spec.enforce_zeh = pooled;
    auto built = build_lp(spec);
    std::istringstream in(text_of(built));
    auto parsed = lp::read_lp_text(in);
    CHECK(parsed.var_names == built.map.names());
    CHECK(parsed.lp == built.lp);
  }
}

TEST_CASE("reader accepts hand-written LPs") {
  std::istringstream in(
      "\\ a comment\n"
      "Minimize\n obj: x + 2 y\n"
      "Subject To\n c1: x + y >= 1\n c2: x - y\n   = 0\n"
      "Bounds\n x >= 0\n -inf <= y <= 5\n"
      "End\n");
  auto p = lp::read_lp_text(in);
  REQUIRE(p.var_names.size() == 2);
  CHECK(p.lp.cost == std::vector<double>{1.0, 2.0});
  CHECK(p.lp.num_ub() == 1);
  CHECK(p.lp.a_ub.at(0, 0) == -1.0);
  CHECK(p.lp.b_ub[0] == -1.0);
  CHECK(p.lp.num_eq() == 1);
  CHECK(p.lp.a_eq.at(0, 1) == -1.0);
  CHECK(p.lp.lower[1] == -lp::kInf);
  CHECK(p.lp.upper[1] == 5.0);
}

TEST_CASE("malformed LP text reports the line") {
  std::istringstream in("Minimize\n obj: x\nSubject To\n c1: x <= abc\nBounds\n x free\nEnd\n");
  try {
    lp::read_lp_text(in);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(e.row() == 4);
  }
  std::istringstream no_end("Minimize\n obj: x\nSubject To\n c1: x <= 1\n");
  CHECK_THROWS_AS(lp::read_lp_text(no_end), DataError);
}
