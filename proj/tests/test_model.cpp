#include <doctest.h>

#include <cmath>

#include "kvwave/errors.hpp"
#include "kvwave/model.hpp"
#include "support.hpp"

using namespace kvwave;
using kvwave::testing::standard_params;

TEST_CASE("cell averages of simple profiles") {
  const Parameters p = standard_params();
  const Mesh m = build_mesh(p, 20, 10, 20);
  const CellAverages one = sample_cell_averages([](double) { return 1.0; }, m);
  REQUIRE(one.size() == 50);
  for (double v : one.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  const CellAverages lin = sample_cell_averages([](double x) { return x; }, m);
  CHECK(lin[0] == doctest::Approx(0.025).epsilon(1e-15));
}

TEST_CASE("cell average of the quadratic profile matches the antiderivative") {
  const Parameters p = standard_params();
  const Mesh m = build_mesh(p, 20, 10, 20);
  const double len = 3.0;
  const auto q = [len](double x) { return 4.0 / (len * len) * x * (len - x); };
  const auto big_q = [len](double x) {
    return 4.0 / (len * len) * (len * x * x / 2.0 - x * x * x / 3.0);
  };
  const CellAverages avg = sample_cell_averages(q, m);
  for (std::size_t k = 0; k < m.n_max(); ++k) {
    const double exact = (big_q(m.faces[k + 1]) - big_q(m.faces[k])) / m.cell_widths[k];
    CHECK(avg[k] == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("cell averages are linear and exact on cubics") {
  const Parameters p = standard_params();
  const Mesh m = build_mesh(p, 7, 4, 5);
  const auto f = [](double x) { return std::sin(x); };
  const auto g = [](double x) { return x * x * x - 2.0 * x; };
  const CellAverages af = sample_cell_averages(f, m);
  const CellAverages ag = sample_cell_averages(g, m);
  const CellAverages comb = sample_cell_averages([&](double x) { return 2.5 * f(x) - 3.0 * g(x); }, m);
  const auto big_g = [](double x) { return x * x * x * x / 4.0 - x * x; };
  for (std::size_t k = 0; k < m.n_max(); ++k) {
    CHECK(comb[k] == doctest::Approx(2.5 * af[k] - 3.0 * ag[k]).epsilon(1e-13));
    const double exact = (big_g(m.faces[k + 1]) - big_g(m.faces[k])) / m.cell_widths[k];
    CHECK(ag[k] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("non-finite profile values are rejected") {
  const Mesh m = build_mesh(standard_params(), 2, 2, 2);
  CHECK_THROWS_AS(sample_cell_averages([](double) { return std::nan(""); }, m), NumericInputError);
}

TEST_CASE("initial data compatibility") {
  InitialData ok{[](double x) { return x * (3.0 - x); }, [](double) { return 1.0; }};
  CHECK_NOTHROW(ok.validate(3.0));
  InitialData bad{[](double) { return 1.0; }, [](double) { return 0.0; }};
  CHECK_THROWS(bad.validate(3.0));
}

TEST_CASE("CFL bound") {
  const Parameters eq = standard_params();
  const Mesh m = build_mesh(eq, 20, 10, 20);
  CHECK(cfl_max_dt(eq, m) == doctest::Approx(0.05));
  const Parameters fast = standard_params(9, 1, 4);
  CHECK(cfl_max_dt(fast, m) == doctest::Approx(0.05 / 3.0));
  const Mesh fine = build_mesh(eq, 40, 20, 40);
  CHECK(cfl_max_dt(eq, fine) == doctest::Approx(0.5 * cfl_max_dt(eq, m)));
}

TEST_CASE("run admissibility") {
  const Parameters eq = standard_params();
  const Mesh m = build_mesh(eq, 20, 10, 20);
  CHECK(validate_run(eq, m, 0.025, SchemeKind::explicit_scheme).stable);
  const RunVerdict bad = validate_run(standard_params(9, 1, 4), m, 0.025, SchemeKind::explicit_scheme);
  CHECK_FALSE(bad.stable);
  CHECK(bad.message.find("CFL") != std::string::npos);
  const RunVerdict imp = validate_run(standard_params(9, 1, 4), m, 0.025, SchemeKind::implicit_scheme);
  CHECK(imp.stable);
  CHECK(imp.accuracy_warning);
  CHECK_THROWS_AS(validate_run(eq, m, 0.0, SchemeKind::explicit_scheme), InvalidArgument);
  CHECK_THROWS_AS(validate_run(eq, m, 0.0, SchemeKind::implicit_scheme), InvalidArgument);
}

TEST_CASE("scheme names") {
  CHECK(scheme_from_string("explicit") == SchemeKind::explicit_scheme);
  CHECK(scheme_from_string("implicit") == SchemeKind::implicit_scheme);
  CHECK(std::string(to_string(SchemeKind::implicit_scheme)) == "implicit");
  CHECK_THROWS_AS(scheme_from_string("leapfrog"), InvalidArgument);
}
