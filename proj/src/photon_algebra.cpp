#include "mcced/photon_algebra.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "mcced/error.hpp"

namespace mcced::algebra {

int metric(int mu) { return mu == 0 ? 1 : -1; }

Rational base_commutator(const Generator& g1, const Generator& g2) {
  if (g1.dagger == g2.dagger) return 0;
  if (g1.dagger) return -base_commutator(g2, g1);
  if (g1.color == g2.color || g1.mu != g2.mu) return 0;
  return -metric(g1.mu);
}

namespace {

void canonical_blocks(Monomial& m) {
  const auto split = std::stable_partition(m.begin(), m.end(), [](const Generator& g) { return g.dagger; });
  std::sort(m.begin(), split);
  std::sort(split, m.end());
}

void check_n(int N) {
  if (N < 2) fail(ErrorCode::domain, "photon algebra requires N >= 2 colors");
}

void check_index(int N, int k, int mu) {
  check_n(N);
  if (k < 1 || k > N) fail(ErrorCode::domain, "color index out of range 1..N");
  if (mu < 0 || mu > 3) fail(ErrorCode::domain, "spacetime index out of range 0..3");
}

}  // namespace

Polynomial Polynomial::scalar(const Rational& c) {
  Polynomial p;
  p.add_raw({}, c);
  return p;
}

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
  Polynomial p;
  p.add_normal_ordered(m, c);
  return p;
}

Polynomial Polynomial::generator(const Generator& g) {
  Polynomial p;
  p.add_raw({g}, 1);
  return p;
}

Rational Polynomial::constant() const {
  const auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::size_t Polynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.size());
  return d;
}

void Polynomial::add_raw(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

// a b† = b† a + [a, b†], applied until no undaggered generator precedes a
// daggered one.
void Polynomial::add_normal_ordered(const Monomial& m0, const Rational& c0) {
  std::vector<std::pair<Monomial, Rational>> work{{m0, c0}};
  while (!work.empty()) {
    auto [m, c] = std::move(work.back());
    work.pop_back();
    std::size_t i = 0;
    while (i + 1 < m.size() && !(!m[i].dagger && m[i + 1].dagger)) ++i;
    if (i + 1 >= m.size()) {
      canonical_blocks(m);
      add_raw(m, c);
      continue;
    }
    const Rational br = base_commutator(m[i], m[i + 1]);
    if (br != 0) {
      Monomial rest;
      rest.reserve(m.size() - 2);
      for (std::size_t j = 0; j < m.size(); ++j)
        if (j != i && j != i + 1) rest.push_back(m[j]);
      work.emplace_back(std::move(rest), c * br);
    }
    std::swap(m[i], m[i + 1]);
    work.emplace_back(std::move(m), c);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_raw(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_raw(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      out.add_normal_ordered(m, ca * cb);
    }
  return out;
}

Polynomial Polynomial::dagger() const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    Monomial r(m.rbegin(), m.rend());
    for (Generator& g : r) g.dagger = !g.dagger;
    out.add_normal_ordered(r, c);
  }
  return out;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    const bool unit = mag == 1;
    if (!unit || m.empty()) os << mag.str();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i > 0 || !unit) os << '*';
      os << (m[i].dagger ? "ad(" : "a(") << m[i].color << ',' << m[i].mu << ')';
    }
  }
  return os.str();
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }

Polynomial commutator(const Polynomial& a, const Polynomial& b) { return a * b - b * a; }

Polynomial base_operator(int N, int k, int mu, bool dagger) {
  check_index(N, k, mu);
  return Polynomial::generator({k, mu, dagger});
}

Polynomial build_alpha(int N, int mu, bool dagger) {
  check_index(N, 1, mu);
  Polynomial p;
  for (int j = 1; j <= N; ++j) p += Polynomial::generator({j, mu, dagger});
  return Rational(1, N - 1) * p;
}

Polynomial build_a_rad(int N, int k, int mu, bool dagger) {
  check_index(N, k, mu);
  return build_alpha(N, mu, dagger) - Polynomial::generator({k, mu, dagger});
}

Polynomial build_h_ph(int N, const Rational& omega) {
  check_n(N);
  if (!(omega > 0)) fail(ErrorCode::domain, "H_ph requires omega > 0");
  Polynomial h;
  for (int k = 1; k <= N; ++k)
    for (int mu = 0; mu < 4; ++mu)
      h += Rational(metric(mu)) * (build_a_rad(N, k, mu, true) * base_operator(N, k, mu));
  return -omega * h;
}

FockState apply_to_vacuum(const Polynomial& p) {
  FockState s;
  for (const auto& [m, c] : p.terms())
    if (std::all_of(m.begin(), m.end(), [](const Generator& g) { return g.dagger; }))
      s.poly += Polynomial::monomial(m, c);
  return s;
}

FockState apply(const Polynomial& p, const FockState& s) { return apply_to_vacuum(p * s.poly); }

Rational inner_product(const FockState& s1, const FockState& s2) {
  return (s1.poly.dagger() * s2.poly).constant();
}

std::optional<int> time_parity(const FockState& s) {
  if (s.is_zero()) return std::nullopt;
  std::optional<std::size_t> n;
  for (const auto& [m, c] : s.poly.terms()) {
    if (n && *n != m.size()) return std::nullopt;
    n = m.size();
  }
  return (*n % 2 == 0) ? 1 : -1;
}

Polynomial subsidiary_operator(int N, int k, const Lightlike& lambda) {
  Polynomial L;
  for (int mu = 0; mu < 4; ++mu)
    if (lambda[mu] != 0) L += lambda[mu] * build_a_rad(N, k, mu);
  return L;
}

namespace {

void check_lightlike(const Lightlike& l) {
  const Rational q = l[0] * l[0] - l[1] * l[1] - l[2] * l[2] - l[3] * l[3];
  const bool nonzero = std::any_of(l.begin(), l.end(), [](const Rational& x) { return x != 0; });
  if (q != 0 || !nonzero) fail(ErrorCode::domain, "subsidiary condition requires a nonzero lightlike lambda");
}

}  // namespace

std::vector<bool> subsidiary_check(const FockState& s, const Lightlike& lambda, int N) {
  check_n(N);
  check_lightlike(lambda);
  std::vector<bool> out;
  for (int k = 1; k <= N; ++k) out.push_back(apply(subsidiary_operator(N, k, lambda), s).is_zero());
  return out;
}

bool is_positive_semidefinite(std::vector<std::vector<Rational>> g) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Rational d = g[i][i];
    if (d < 0) return false;
    if (d == 0) {
      for (std::size_t j = i + 1; j < n; ++j)
        if (g[i][j] != 0) return false;
      continue;
    }
    for (std::size_t r = i + 1; r < n; ++r) {
      if (g[r][i] == 0) continue;
      const Rational f = g[r][i] / d;
      for (std::size_t c = i; c < n; ++c) g[r][c] -= f * g[i][c];
    }
  }
  return true;
}

namespace {

void multisets(std::size_t n_items, std::size_t max_size, std::vector<std::size_t>& cur,
               std::size_t start, std::vector<std::vector<std::size_t>>& out) {
  out.push_back(cur);
  if (cur.size() == max_size) return;
  for (std::size_t i = start; i < n_items; ++i) {
    cur.push_back(i);
    multisets(n_items, max_size, cur, i, out);
    cur.pop_back();
  }
}

// Null space of a rational matrix (rows × cols) by reduced row echelon form.
std::vector<std::vector<Rational>> null_space(std::vector<std::vector<Rational>> a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
    std::size_t p = row;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const Rational inv = 1 / a[row][c];
    for (std::size_t j = c; j < cols; ++j) a[row][j] *= inv;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t j = c; j < cols; ++j) a[r][j] -= f * a[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  std::vector<std::vector<Rational>> basis;
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

PositivityReport physical_positivity(int N, int max_photons, const Lightlike& lambda,
                                     PhotonBasis basis) {
  check_n(N);
  check_lightlike(lambda);
  std::vector<Polynomial> creators;
  if (basis == PhotonBasis::charge_field) {
    for (int mu = 0; mu < 4; ++mu) creators.push_back(build_alpha(N, mu, true));
  } else {
    for (int k = 1; k <= N; ++k)
      for (int mu = 0; mu < 4; ++mu) creators.push_back(base_operator(N, k, mu, true));
  }
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> cur;
  multisets(creators.size(), static_cast<std::size_t>(std::max(0, max_photons)), cur, 0, sets);

  std::vector<FockState> states;
  for (const auto& set : sets) {
    Polynomial p = Polynomial::scalar(1);
    for (std::size_t i : set) p = p * creators[i];
    states.push_back(apply_to_vacuum(p));
  }
  const std::size_t n = states.size();

  std::vector<Polynomial> L;
  for (int k = 1; k <= N; ++k) L.push_back(subsidiary_operator(N, k, lambda));
  std::map<std::pair<int, Monomial>, std::size_t> row_of;
  std::vector<std::vector<Rational>> M;
  for (std::size_t j = 0; j < n; ++j)
    for (int k = 0; k < N; ++k) {
      const FockState out = apply(L[k], states[j]);
      for (const auto& [m, c] : out.poly.terms()) {
        auto [it, inserted] = row_of.emplace(std::make_pair(k, m), M.size());
        if (inserted) M.emplace_back(n, Rational(0));
        M[it->second][j] += c;
      }
    }
  const std::vector<std::vector<Rational>> phys = null_space(M, n);

  std::vector<std::vector<Rational>> B(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) B[i][j] = B[j][i] = inner_product(states[i], states[j]);

  const std::size_t d = phys.size();
  std::vector<std::vector<Rational>> G(d, std::vector<Rational>(d));
  std::vector<std::vector<Rational>> BV(d, std::vector<Rational>(n, Rational(0)));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t j = 0; j < n; ++j) {
      if (phys[a][j] == 0) continue;
      for (std::size_t l = 0; l < n; ++l) BV[a][l] += phys[a][j] * B[j][l];
    }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      Rational s = 0;
      for (std::size_t l = 0; l < n; ++l)
        if (phys[b][l] != 0) s += BV[a][l] * phys[b][l];
      G[a][b] = G[b][a] = s;
    }

  PositivityReport rep;
  rep.basis_size = n;
  rep.physical_dimension = d;
  rep.positive_semidefinite = is_positive_semidefinite(G);
  auto combine = [&](std::size_t a, const Rational& ca, std::size_t b, const Rational& cb) {
    FockState w;
    for (std::size_t j = 0; j < n; ++j) {
      const Rational c = ca * phys[a][j] + cb * phys[b][j];
      if (c != 0) w.poly += c * states[j].poly;
    }
    return w;
  };
  for (std::size_t a = 0; a < d && !rep.negative_witness; ++a) {
    if (G[a][a] < 0) {
      rep.negative_witness = combine(a, 1, a, 0);
      rep.witness_norm = G[a][a];
    }
  }
  // A null vector with a nonzero overlap yields a negative-norm combination.
  for (std::size_t a = 0; a < d && !rep.negative_witness; ++a) {
    if (G[a][a] != 0) continue;
    for (std::size_t b = 0; b < d; ++b) {
      if (b == a || G[a][b] == 0) continue;
      const Rational t = G[b][b] > 0 ? Rational(-G[a][b] / G[b][b]) : Rational(G[a][b] > 0 ? -1 : 1);
      rep.negative_witness = combine(a, 1, b, t);
      rep.witness_norm = 2 * t * G[a][b] + t * t * G[b][b];
      break;
    }
  }
  return rep;
}

}  // namespace mcced::algebra
