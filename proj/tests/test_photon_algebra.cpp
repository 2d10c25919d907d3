#include <doctest.h>

#include <random>
#include <sstream>

#include "mcced/algebra_script.hpp"
#include "mcced/error.hpp"
#include "mcced/photon_algebra.hpp"

using namespace mcced::algebra;

namespace {

Polynomial random_polynomial(std::mt19937_64& rng, int N) {
  Polynomial p;
  const int terms = 1 + static_cast<int>(rng() % 3);
  for (int t = 0; t < terms; ++t) {
    Monomial m;
    const int len = static_cast<int>(rng() % 3);
    for (int i = 0; i < len; ++i)
      m.push_back({1 + static_cast<int>(rng() % N), static_cast<int>(rng() % 4), rng() % 2 == 0});
    const Rational c(static_cast<int>(rng() % 7) - 3, 1 + static_cast<int>(rng() % 4));
    p += Polynomial::monomial(m, c);
  }
  return p;
}

}  // namespace

TEST_CASE("Jacobi identity holds exactly") {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 200; ++i) {
    const int N = 2 + static_cast<int>(rng() % 2);
    const Polynomial a = random_polynomial(rng, N);
    const Polynomial b = random_polynomial(rng, N);
    const Polynomial c = random_polynomial(rng, N);
    const Polynomial j = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                         commutator(c, commutator(a, b));
    CHECK_MESSAGE(j.is_zero(), a.str() << " | " << b.str() << " | " << c.str());
  }
}

TEST_CASE("normal ordering respects the base bracket") {
  const int N = 3;
  const Polynomial a = base_operator(N, 1, 2);
  const Polynomial ad2 = base_operator(N, 2, 2, true);
  CHECK(a * ad2 == ad2 * a + Polynomial::scalar(1));
  const Polynomial ad1 = base_operator(N, 1, 2, true);
  CHECK(a * ad1 == ad1 * a);
  CHECK(commutator(base_operator(N, 1, 0), base_operator(N, 3, 0, true)) == Polynomial::scalar(-1));
}

TEST_CASE("alpha brackets") {
  for (int N = 2; N <= 6; ++N)
    for (int mu = 0; mu < 4; ++mu) {
      CHECK(commutator(build_alpha(N, mu), build_alpha(N, mu, true)) ==
            Polynomial::scalar(Rational(-metric(mu) * N, N - 1)));
      CHECK(commutator(build_alpha(N, mu), build_a_rad(N, 1, mu, true)) ==
            Polynomial::scalar(Rational(-metric(mu), N - 1)));
      CHECK(commutator(build_alpha(N, mu), build_alpha(N, (mu + 1) % 4, true)).is_zero());
      CHECK(commutator(build_alpha(N, mu), build_alpha(N, mu)).is_zero());
    }
}

TEST_CASE("H_ph is Hermitian and annihilates the vacuum") {
  for (int N = 2; N <= 4; ++N) {
    const Polynomial H = build_h_ph(N, Rational(5, 2));
    CHECK(H == H.dagger());
    CHECK(apply_to_vacuum(H).is_zero());
    const FockState one = apply_to_vacuum(build_alpha(N, 3, true));
    FockState expected = one;
    expected.poly *= Rational(5, 2);
    CHECK(apply(H, one) == expected);
  }
}

TEST_CASE("norms and parity") {
  const FockState t = apply_to_vacuum(build_alpha(3, 0, true));
  const FockState x = apply_to_vacuum(build_alpha(3, 1, true));
  CHECK(inner_product(t, t) == Rational(-3, 2));
  CHECK(inner_product(x, x) == Rational(3, 2));
  CHECK(inner_product(t, x) == 0);
  CHECK(time_parity(x) == -1);
  CHECK(time_parity(apply_to_vacuum(build_alpha(3, 1, true) * build_alpha(3, 2, true))) == 1);
  CHECK_FALSE(time_parity(apply_to_vacuum(Polynomial::scalar(1) + build_alpha(3, 1, true))).has_value());
  // The self bracket vanishes, so a single color photon has zero norm.
  const FockState c = apply_to_vacuum(base_operator(3, 2, 1, true));
  CHECK(inner_product(c, c) == 0);
}

TEST_CASE("positivity of the physical subspace") {
  const Lightlike lambda{1, 0, 0, 1};
  for (int N = 2; N <= 3; ++N) {
    const PositivityReport rep = physical_positivity(N, 3, lambda);
    CHECK(rep.positive_semidefinite);
    CHECK(rep.physical_dimension > 0);
    CHECK(rep.physical_dimension < rep.basis_size);
  }
  const PositivityReport color = physical_positivity(2, 1, lambda, PhotonBasis::color);
  CHECK_FALSE(color.positive_semidefinite);
  REQUIRE(color.negative_witness.has_value());
  CHECK(*color.witness_norm < 0);
  CHECK(inner_product(*color.negative_witness, *color.negative_witness) == *color.witness_norm);
}

TEST_CASE("printed polynomials parse back") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const Polynomial p = random_polynomial(rng, 3);
    CHECK(parse_expression(p.str(), 3) == p);
  }
  CHECK(parse_expression("(alpha(1) - 1/2) * 3", 2).str() == parse_expression("3*alpha(1) - 3/2", 2).str());
  CHECK_THROWS_AS(parse_expression("a(4,0)", 3), mcced::Error);
  CHECK_THROWS_AS(parse_expression("alpha(1", 3), mcced::Error);
}

TEST_CASE("script runner counts assertions") {
  std::istringstream in(
      "# comment\n"
      "N 2\n"
      "COMM alpha(1) ; alphad(1) => 2\n"
      "NORM alphad(0) => -2\n"
      "PARITY alphad(1) => -1\n"
      "SUBSIDIARY alphad(1) ; 1,0,0,1 => true\n"
      "APPLY H => 0\n"
      "COMM a(1,1) ; ad(1,1) => 1\n");
  std::ostringstream out;
  const ScriptResult r = run_algebra_script(in, out);
  CHECK(r.commands == 6);
  CHECK(r.assertions == 6);
  CHECK(r.failures == 1);
  CHECK(out.str().find("FAIL") != std::string::npos);
  std::istringstream bad("COMM alpha(1)\n");
  CHECK_THROWS_AS(run_algebra_script(bad, out), mcced::Error);
}
