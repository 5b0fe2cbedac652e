#include <cmath>

#include "doctest.h"
#include "hypbdry/exact.hpp"
#include "hypbdry/io.hpp"
#include "json.hpp"

using namespace hypbdry;

TEST_CASE("quadratic field arithmetic") {
  ExactScalar r3 = ExactScalar::sqrt_of(3);
  CHECK(r3 * r3 == ExactScalar(3));
  CHECK(ExactScalar::half_power(3, 4) == ExactScalar(9));
  CHECK(ExactScalar::half_power(3, -1) == r3 / ExactScalar(3));
  CHECK(ExactScalar::half_power(3, 3) == ExactScalar(3) * r3);
  ExactScalar x = ExactScalar(Rational(1, 2)) + r3;
  CHECK((x * x.conjugate()) == ExactScalar(Rational(1, 4)) - ExactScalar(3));
  CHECK((x / x) == ExactScalar(1));
  CHECK(r3 > ExactScalar(Rational(173, 100)));
  CHECK(r3 < ExactScalar(Rational(174, 100)));
  CHECK((ExactScalar(2) - r3).sign() > 0);
  CHECK_THROWS_AS(ExactScalar::sqrt_of(3) + ExactScalar::sqrt_of(5), std::domain_error);
  CHECK((ExactScalar::sqrt_of(3) * ExactScalar(0) + ExactScalar::sqrt_of(5)) == ExactScalar::sqrt_of(5));
}

TEST_CASE("decimal rendering is correctly rounded") {
  CHECK(ExactScalar(Rational(2, 3)).to_decimal(17) == "0.66666666666666667");
  CHECK(ExactScalar(Rational(1, 3)).to_decimal(17) == "0.33333333333333333");
  CHECK(ExactScalar(Rational(1, 16)).to_decimal(17) == "0.0625");
  CHECK(ExactScalar(Rational(-5, 2)).to_decimal(3) == "-2.5");
  CHECK(ExactScalar::sqrt_of(3).to_decimal(17) == "1.7320508075688773");
  CHECK((ExactScalar::sqrt_of(3) / ExactScalar(2)).to_decimal(17) == "0.86602540378443865");
  CHECK(ExactScalar(Rational(1, 3)).to_exact_string() == "1/3");
  CHECK(std::stod(ExactScalar(Rational(2, 3)).to_decimal(17)) == 2.0 / 3.0);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("csv and json rendering") {
  Table t{{"t", "value", "label"}, {}};
  t.add({cell(2.0), cell(ExactScalar(Rational(1, 16))), cell("x")});
  t.add({cell(std::uint64_t{3}), cell(ExactScalar::sqrt_of(3)), cell_bool(true)});
  RunConfig cfg{{"command", "demo"}, {"seed", "7"}};
  std::string csv = render_csv(t, cfg);
  CHECK(csv.rfind("# hypbdry ", 0) == 0);
  CHECK(csv.find("# command: demo\n# seed: 7\nt,value,label\n2,0.0625,x\n") != std::string::npos);

  auto j = nlohmann::json::parse(render_json(t, cfg));
  CHECK(j["config"]["seed"] == "7");
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][0]["value_exact"] == "1/16");
  CHECK(j["rows"][0]["value"] == 0.0625);
  CHECK(j["rows"][0]["label"] == "x");
  CHECK(j["rows"][1]["label"] == true);
  CHECK_THROWS_AS(render(t, cfg, "xml"), std::invalid_argument);
  CHECK_THROWS(t.add({cell(1)}));
}
