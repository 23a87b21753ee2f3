#include <cmath>
#include <limits>

#include "doctest.h"
#include "support.hpp"
#include "synchrosde/errors.hpp"
#include "synchrosde/funcspec.hpp"
#include "synchrosde/profile.hpp"

using namespace synchrosde;

TEST_CASE("parse builds the expected trees") {
  const auto f = parse("sgn(x)*indicator[-1,1]");
  CHECK(f.root().op == Op::Mul);
  CHECK(f.root().args[0]->op == Op::Sgn);
  CHECK(f.root().args[1]->op == Op::Indicator);

  const auto zero = parse("0");
  CHECK(zero.root().op == Op::Const);
  CHECK(zero.is_literal_zero());

  const auto pl = parse("piecewise_linear[(0,0),(0.25,1),(1,1),(2,0)]");
  REQUIRE(pl.root().op == Op::PiecewiseLinear);
  CHECK(pl.root().knots.size() == 4);
}

TEST_CASE("evaluation conventions") {
  const auto f = parse("sgn(x)*indicator[-1,1]");
  CHECK(f(0.5) == 1.0);
  CHECK(f(0.0) == 0.0);
  CHECK(f(3.0) == 0.0);
  CHECK(f(-1.0) == -1.0);
  CHECK(f(1.0) == 1.0);

  const auto pl = parse("piecewise_linear[(0,0),(0.25,1),(1,1),(2,0)]");
  CHECK(pl(-5.0) == 0.0);
  CHECK(pl(0.125) == doctest::Approx(0.5));
  CHECK(pl(1.5) == doctest::Approx(0.5));
  CHECK(pl(9.0) == 0.0);

  CHECK(parse("polynomial[1,2,3]")(2.0) == 17.0);
  CHECK(parse("polynomial[1,2,3](x-1)")(2.0) == 6.0);
  CHECK(parse("min(x, 1) + max(x, -1)")(3.0) == 4.0);
  CHECK(parse("2 - 3 - 4")(0.0) == -5.0);
  CHECK(parse("8 / 4 / 2")(0.0) == 1.0);
  CHECK(parse("-2*x + 1e-1")(1.0) == doctest::Approx(-1.9));
  CHECK(parse("sign(-3)")(0.0) == -1.0);
  CHECK(parse("exp(0) + sin(0) + cos(0)")(0.0) == 2.0);
  CHECK(parse("indicator[0,1](x - 2)")(2.5) == 1.0);
}

TEST_CASE("division by zero is a domain error") {
  const auto f = parse("1/x");
  CHECK(f(2.0) == 0.5);
  CHECK_THROWS_AS(f(0.0), DomainError);
}

TEST_CASE("parse errors carry offsets") {
  auto offset_of = [](const char* text) -> std::size_t {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    FAIL("expected a parse error for " << text);
    return 0;
  };
  CHECK(offset_of("foo(x)") == 0);
  CHECK(offset_of("x + bar") == 4);
  CHECK(offset_of("piecewise_linear[(0,0),(0,1)]") == 23);
  CHECK(offset_of("x +") == 3);
  CHECK(offset_of("(x") == 2);
  CHECK(offset_of("x x") == 2);
  CHECK_THROWS_AS(parse("indicator[1,0]"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("builders validate their literals") {
  CHECK_THROWS_AS(expr::indicator(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(expr::piecewise_linear({{0, 0}, {0, 1}}), DomainError);
  CHECK_THROWS_AS(FunctionDescriptor(expr::var(), DeclaredMetadata{-1.0, {}, {}, {}}), ConfigError);
}

TEST_CASE("compose substitutes the inner expression") {
  const auto outer = parse("abs(x) + 1");
  const auto inner = parse("2*x - 3");
  const auto c = compose(outer, inner);
  for (double x : {-2.0, 0.0, 1.5, 4.0}) CHECK(c(x) == std::abs(2 * x - 3) + 1);
}

TEST_CASE("print/parse round trip on random expressions") {
  testing::Rng r(11);
  const char* atoms[] = {"x", "abs(x)", "sgn(x)", "indicator[-1,2]", "exp(-abs(x))", "sin(x)",
                         "cos(2*x)", "piecewise_linear[(-1,0),(0,1),(3,-2)]", "polynomial[1,-2,0.5]",
                         "min(x,0.3)", "max(x,-0.7)"};
  const char* ops[] = {"+", "-", "*"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = atoms[r.integer(0, 10)];
    const int terms = r.integer(1, 4);
    for (int i = 0; i < terms; ++i) {
      text = "(" + text + ")" + ops[r.integer(0, 2)] + "(" + testing::num(r.uniform(-3, 3)) + "*" +
             atoms[r.integer(0, 10)] + ")";
    }
    const auto f = parse(text);
    const auto g = parse(f.to_string());
    CHECK(g.to_string() == f.to_string());
    for (int k = 0; k < 10; ++k) {
      const double x = r.uniform(-5, 5);
      const double a = f(x), b = g(x);
      CHECK(std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("round trip preserves values on 1000 points") {
  const auto f = parse("(-0.5)*sgn(x - 0.25)*indicator[-1.5,1.5] + 3.25e-3*exp(-2*abs(x))");
  const auto g = parse(f.to_string());
  testing::Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = r.uniform(-4, 4);
    CHECK(std::abs(f(x) - g(x)) <= 1e-15 * std::max(1.0, std::abs(f(x))));
  }
}

TEST_CASE("breakpoints and support analysis") {
  const auto f = parse("sgn(x)*indicator[-1,1]");
  const auto bps = f.breakpoints();
  CHECK(std::find(bps.begin(), bps.end(), 0.0) != bps.end());
  CHECK(std::find(bps.begin(), bps.end(), -1.0) != bps.end());
  CHECK(std::find(bps.begin(), bps.end(), 1.0) != bps.end());
  REQUIRE(f.proven_support_radius());
  CHECK(*f.proven_support_radius() == 1.0);

  CHECK_FALSE(parse("exp(-abs(x))").proven_support_radius());
  CHECK(parse("indicator[0,1](2*x - 1)").proven_support_radius().value() == doctest::Approx(1.0));
  CHECK(parse("piecewise_linear[(-2,0),(0,1),(3,0)]").proven_support_radius().value() == 3.0);
  CHECK_FALSE(parse("piecewise_linear[(-2,0),(0,1),(3,1)]").proven_support_radius());
}

TEST_CASE("tail mass of exponential envelopes") {
  // ∫_{|x|>R} A e^{-k|x|} dx = 2A e^{-kR}/k.
  const auto t = parse("1.5*exp(-2*abs(x))").tail_mass_bound(3.0);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(2 * 1.5 * std::exp(-6.0) / 2.0).epsilon(1e-14));
  CHECK(parse("indicator[-1,1]").tail_mass_bound(2.0).value() == 0.0);
  CHECK_FALSE(parse("1").tail_mass_bound(2.0));
  CHECK_FALSE(parse("1/(1 + x*x)").tail_mass_bound(2.0));
}

TEST_CASE("profile of basic functions") {
  const auto one = profile(parse("1"), 10.0, 1e-3);
  CHECK(one.sup_norm_est == 1.0);
  CHECK(one.lipschitz_est == 0.0);
  CHECK(one.inf_sq_est == 1.0);

  const auto a = profile(parse("sgn(x)*indicator[-1,1]"), 10.0, 1e-3);
  CHECK(a.sup_norm_est == 1.0);
  REQUIRE(a.support_radius_est);
  CHECK(*a.support_radius_est == 1.0);
  CHECK(a.l1_norm_est.value() == doctest::Approx(2.0).epsilon(1e-9));

  const auto pl = profile(parse("piecewise_linear[(0,0),(0.25,1),(1,1),(2,0)]"), 10.0, 1e-3);
  CHECK(pl.lipschitz_est == doctest::Approx(4.0).epsilon(1e-12));

  const auto g = profile(parse("exp(-abs(x))"), 10.0, 1e-3);
  CHECK_FALSE(g.support_radius_est);
  CHECK(g.l1_norm_est.value() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_FALSE(g.l1_tail_truncated);

  const auto flat = profile(parse("1"), 10.0, 1e-3);
  CHECK_FALSE(flat.l1_norm_est);
}

TEST_CASE("lipschitz estimates match a brute-force pairwise scan") {
  testing::Rng r(3);
  for (const char* text : {"sin(3*x)", "piecewise_linear[(-1,2),(0.5,-1),(2,0)]", "abs(x - 0.3)",
                           "exp(-abs(x))*cos(x)"}) {
    const auto f = parse(text);
    const auto p = profile(f, 4.0, 1e-3);
    double brute = 0.0;
    for (int i = 0; i < 200000; ++i) {
      const double x = r.uniform(-4, 4);
      const double y = x + r.uniform(-1e-3, 1e-3);
      if (x == y || std::abs(y) > 4.0) continue;
      brute = std::max(brute, std::abs(f(x) - f(y)) / std::abs(x - y));
    }
    CHECK(p.lipschitz_est <= brute * (1 + 1e-6) + 1e-9);
    CHECK(p.lipschitz_est >= brute * 0.99);
  }
}

TEST_CASE("declared metadata wins and is never exceeded by grid estimates") {
  DeclaredMetadata d;
  d.lipschitz = 1.0;
  const auto f = parse("x").with_declared(d);
  const auto p = profile(f, 10.0, 1e-3);
  CHECK(p.lipschitz() == 1.0);
  CHECK(p.lipschitz_est <= 1.0 + 1e-12);

  DeclaredMetadata z;
  z.lipschitz = 0.0;
  const auto p0 = profile(parse("3").with_declared(z), 10.0, 1e-3);
  CHECK(p0.lipschitz_est <= 0.0);

  // sgn is flat away from its jump.
  const auto s = profile(parse("sgn(x - 5)"), 3.0, 1e-3);
  CHECK(s.lipschitz_est == 0.0);
}

TEST_CASE("profile estimates are monotone under refinement and deterministic") {
  for (const char* text : {"sin(7*x)", "sgn(x)*indicator[-1,1]", "exp(-abs(x))", "abs(x)"}) {
    const auto f = parse(text);
    const auto coarse = profile(f, 5.0, 2e-3);
    const auto fine = profile(f, 5.0, 1e-3);
    CHECK(fine.sup_norm_est >= coarse.sup_norm_est);
    CHECK(fine.lipschitz_est >= coarse.lipschitz_est * (1 - 1e-12));
    const auto again = profile(f, 5.0, 1e-3);
    CHECK(again.sup_norm_est == fine.sup_norm_est);
    CHECK(again.lipschitz_est == fine.lipschitz_est);
    CHECK(again.l1_norm_est == fine.l1_norm_est);
    CHECK(again.inf_sq_est == fine.inf_sq_est);
  }
}

TEST_CASE("grid construction") {
  const std::vector<double> extra{0.12345, -0.5, 50.0};
  const auto x = make_grid({1.0, 0.25}, extra);
  CHECK(x.front() == -1.0);
  CHECK(x.back() == 1.0);
  CHECK(std::is_sorted(x.begin(), x.end()));
  CHECK(std::find(x.begin(), x.end(), 0.12345) != x.end());
  CHECK(std::find(x.begin(), x.end(), 50.0) == x.end());
  CHECK(std::adjacent_find(x.begin(), x.end()) == x.end());
  CHECK_THROWS_AS(make_grid({1.0, 0.0}), DomainError);
  CHECK(default_grid(1.0).R == 10.0);
  CHECK(default_grid(7.0).R == 16.0);
}
