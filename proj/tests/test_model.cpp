#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "synchrosde/errors.hpp"
#include "synchrosde/model.hpp"

using namespace synchrosde;

namespace {

SDEModel make(const char* alpha, const char* beta, const char* sigma, Mode mode = Mode::CompactSupport,
              const char* g = nullptr, double lambda = 1.0) {
  SDEModel::Parts p;
  p.lambda = lambda;
  p.alpha = parse(alpha);
  p.beta = parse(beta);
  p.sigma = parse(sigma);
  p.mode = mode;
  if (g) p.envelope = parse(g);
  return SDEModel(std::move(p));
}

}  // namespace

TEST_CASE("canonical model passes every hypothesis") {
  const SDEModel m = testing::canonical_model();
  const ValidationReport r = validate(m);
  CHECK(r.all_passed());
  CHECK(m.N_alpha().value() == 1.0);
  CHECK(m.c_sigma() == 1.0);
  CHECK(m.alpha_sup() == 1.0);
  CHECK(m.L_beta() == 0.0);
  CHECK(r.find("alpha_compact_support") != nullptr);
}

TEST_CASE("sin sigma fails ellipticity near the origin") {
  const ValidationReport r = validate(make("sgn(x)*indicator[-1,1]", "0", "sin(x)"));
  CHECK_FALSE(r.all_passed());
  const auto* e = r.find("sigma_uniformly_elliptic");
  REQUIRE(e);
  CHECK_FALSE(e->passed);
  REQUIRE(e->witness);
  CHECK(std::abs(*e->witness) < 1e-2);
}

TEST_CASE("constant envelope is not integrable") {
  const ValidationReport r = validate(make("sgn(x)", "0", "1", Mode::IntegrableEnvelope, "1"));
  const auto* e = r.find("envelope_integrable");
  REQUIRE(e);
  CHECK_FALSE(e->passed);
}

TEST_CASE("envelope checks") {
  CHECK(validate(testing::envelope_model()).all_passed());
  const auto r = validate(make("2*sgn(x)*exp(-abs(x))", "0", "1", Mode::IntegrableEnvelope, "exp(-abs(x))"));
  const auto* dom = r.find("envelope_dominates_alpha");
  REQUIRE(dom);
  CHECK_FALSE(dom->passed);
  const auto missing = validate(make("sgn(x)*exp(-abs(x))", "0", "1", Mode::IntegrableEnvelope));
  CHECK_FALSE(missing.find("envelope_present")->passed);
  const auto unbounded_beta =
      validate(make("sgn(x)*exp(-abs(x))", "x", "1", Mode::IntegrableEnvelope, "exp(-abs(x))"));
  CHECK_FALSE(unbounded_beta.find("beta_bounded")->passed);
}

TEST_CASE("non-compact alpha fails in compact-support mode") {
  const auto r = validate(make("exp(-abs(x))", "0", "1"));
  CHECK_FALSE(r.find("alpha_compact_support")->passed);
}

TEST_CASE("discontinuous beta is not Lipschitz") {
  const auto r = validate(make("0", "sgn(x - 0.5)", "1"));
  const auto* e = r.find("beta_lipschitz");
  REQUIRE(e);
  CHECK_FALSE(e->passed);
  REQUIRE(e->witness);
  CHECK(std::abs(*e->witness - 0.5) < 1e-2);
}

TEST_CASE("lambda must be positive") {
  CHECK_THROWS_AS(make("0", "0", "1", Mode::CompactSupport, nullptr, 0.0), ConfigError);
  CHECK_THROWS_AS(make("0", "0", "1", Mode::CompactSupport, nullptr, -1.0), ConfigError);
  CHECK_THROWS_AS(testing::canonical_model().with_lambda(0.0), ConfigError);
  CHECK(testing::canonical_model().with_lambda(3.0).lambda() == 3.0);
}

TEST_CASE("support radius rounds up to three decimals") {
  const SDEModel m = make("indicator[-1.00001,0.5]", "0", "1");
  CHECK(m.N_alpha().value() == doctest::Approx(1.001));
}

TEST_CASE("dissipativity scan") {
  CHECK(dissipativity_scan(parse("-2*x"), 10.0, 1e-3).estimate == doctest::Approx(2.0).epsilon(1e-12));
  const auto near_zero = dissipativity_scan(parse("-x + sin(x)"), 10.0, 1e-3);
  CHECK(near_zero.estimate < 1e-6);
  const double period = 2.0 * std::acos(-1.0);
  CHECK(std::abs(near_zero.witness - period * std::round(near_zero.witness / period)) < 1e-2);
  CHECK(dissipativity_scan(parse("x"), 10.0, 1e-3).estimate == doctest::Approx(-1.0));

  const DissipativeModel ok(parse("-2*x"), parse("1"));
  CHECK(ok.is_dissipative());
  CHECK(validate(ok).all_passed());
  const DissipativeModel bad(parse("-x + sin(x)"), parse("1"));
  CHECK_FALSE(bad.is_dissipative());
  CHECK_FALSE(validate(bad).all_passed());
  const DissipativeModel declared(parse("-x + sin(x)"), parse("1"), std::nullopt, 0.5);
  CHECK(declared.D_b() == 0.5);
}

TEST_CASE("linear drifts give their exact dissipativity constant") {
  testing::Rng r(17);
  for (int i = 0; i < 20; ++i) {
    const double k = r.uniform(0.1, 10.0);
    const auto est = dissipativity_scan(parse(testing::num(-k) + "*x"), 10.0, 1e-3).estimate;
    CHECK(std::abs(est - k) <= 1e-12 * std::max(1.0, k) * 1e3);
  }
}

TEST_CASE("a failure witness stays a failure on a finer grid") {
  for (const char* sigma : {"sin(x)", "x", "abs(x - 1.25)"}) {
    SDEModel::Parts p;
    p.alpha = parse("sgn(x)*indicator[-1,1]");
    p.beta = parse("0");
    p.sigma = parse(sigma);
    p.grid = GridSpec{10.0, 1e-3};
    const auto coarse = validate(SDEModel(p)).find("sigma_uniformly_elliptic");
    REQUIRE_FALSE(coarse->passed);
    p.grid = GridSpec{10.0, 5e-4};
    const auto fine = validate(SDEModel(p)).find("sigma_uniformly_elliptic");
    CHECK_FALSE(fine->passed);
    CHECK(fine->value.value() <= coarse->value.value());
  }
}
