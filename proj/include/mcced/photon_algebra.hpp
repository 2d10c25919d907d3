#pragma once

// Single-mode measurement-color photon operators on an indefinite-metric
// Fock space, in exact rational arithmetic.
//
// Generators a_μ^(k) (color k = 1..N) and their adjoints obey
//   [a_μ^(k), a_ν^(j)†] = (1 − δ^{kj}) (−η_μν),   η = diag(+1, −1, −1, −1),
// with all other brackets zero. Every Polynomial is kept normal ordered:
// daggered generators to the left, each block sorted.

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mcced::algebra {

using Rational = boost::multiprecision::cpp_rational;

struct Generator {
  int color = 1;  // 1..N
  int mu = 0;     // 0..3
  bool dagger = false;

  auto operator<=>(const Generator&) const = default;
};

using Monomial = std::vector<Generator>;

/// η_μμ.
int metric(int mu);

/// [g1, g2] as a c-number.
Rational base_commutator(const Generator& g1, const Generator& g2);

class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial scalar(const Rational& c);
  static Polynomial generator(const Generator& g);
  static Polynomial monomial(const Monomial& m, const Rational& c = 1);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of the empty monomial.
  Rational constant() const;
  /// Largest number of generators in any monomial.
  std::size_t degree() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);

  /// Adjoint: reversed monomials with dagger toggled, re-normal-ordered.
  Polynomial dagger() const;

  std::string str() const;

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

 private:
  void add_normal_ordered(const Monomial& m, const Rational& c);
  void add_raw(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a);
Polynomial operator*(const Rational& c, Polynomial a);

Polynomial commutator(const Polynomial& a, const Polynomial& b);

/// a_μ^(k) or its adjoint.
Polynomial base_operator(int N, int k, int mu, bool dagger = false);
/// α_μ = Σ_j a_μ^(j) / (N−1).
Polynomial build_alpha(int N, int mu, bool dagger = false);
/// a_rad(k)_μ = α_μ − a_μ^(k).
Polynomial build_a_rad(int N, int k, int mu, bool dagger = false);
/// H = −ω Σ_k Σ_μ η_μμ a_rad(k)_μ† a_μ^(k).
Polynomial build_h_ph(int N, const Rational& omega);

/// State P|0⟩, stored as its creation polynomial.
struct FockState {
  Polynomial poly;

  static FockState vacuum() { return {Polynomial::scalar(1)}; }
  bool is_zero() const { return poly.is_zero(); }
  std::string str() const { return poly.str(); }
  friend bool operator==(const FockState& a, const FockState& b) { return a.poly == b.poly; }
};

FockState apply_to_vacuum(const Polynomial& p);
FockState apply(const Polynomial& p, const FockState& s);

/// ⟨s1|s2⟩ (coefficients are real, so no conjugation).
Rational inner_product(const FockState& s1, const FockState& s2);

/// (−1)^n for a state with a definite photon number n; empty when mixed.
std::optional<int> time_parity(const FockState& s);

using Lightlike = std::array<Rational, 4>;

/// λ^μ a_rad(k)_μ for each color k applied to s vanishes. Entry k−1 holds
/// the result for color k.
std::vector<bool> subsidiary_check(const FockState& s, const Lightlike& lambda, int N);

/// λ^μ a_rad(k)_μ.
Polynomial subsidiary_operator(int N, int k, const Lightlike& lambda);

/// Exact test of positive semi-definiteness by symmetric elimination.
bool is_positive_semidefinite(std::vector<std::vector<Rational>> gram);

enum class PhotonBasis {
  charge_field,  // creation operators α_μ†
  color,         // creation operators a_μ^(k)†
};

struct PositivityReport {
  std::size_t basis_size = 0;       // creation monomials of degree <= max_photons
  std::size_t physical_dimension = 0;  // subsidiary-passing subspace
  bool positive_semidefinite = true;
  /// A physical state of negative norm, when one exists among the
  /// subsidiary-passing basis vectors.
  std::optional<FockState> negative_witness;
  std::optional<Rational> witness_norm;
};

/// Computes the subspace of states with at most max_photons photons passing
/// the subsidiary condition for every color and checks that the inner product
/// restricted to it is positive semi-definite.
PositivityReport physical_positivity(int N, int max_photons, const Lightlike& lambda,
                                     PhotonBasis basis = PhotonBasis::charge_field);

}  // namespace mcced::algebra
