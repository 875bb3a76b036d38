#pragma once

/**
 * Polynomial functionals of a probability measure:
 *
 *   F(mu) = sum_m mu^m(g_m),   finitely many degrees m >= 0,
 *
 * stored with each tensor symmetrized (mu^m only sees the symmetrization).
 * Note that per-degree representations are NOT unique as functions on the
 * simplex: mu(X) = 1 identifies mu^m(g (x) 1) with mu^{m-1}(g). Functional
 * equality therefore elevates both sides to a common top degree, where the
 * symmetric representation is unique, and compares entrywise.
 *
 * Expectations under Di(rho) come from the moment formula
 * E zeta^m(g) = rho^[m](g) / theta^(m); T_{F,n} collects Palm expectations
 * E F(zeta_{rho + d_{x_1}+...+d_{x_n}}) as an order-n tensor.
 */

#include "dfcalc/bracket.hpp"
#include "dfcalc/measure.hpp"
#include "dfcalc/scalar.hpp"
#include "dfcalc/tensor.hpp"

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace dfcalc {

template <class S>
class PolyFunctional {
 public:
  explicit PolyFunctional(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("PolyFunctional: d >= 1");
  }

  static PolyFunctional constant(int d, S c) {
    PolyFunctional F(d);
    F.add_term(0, TensorFn<S>::constant(d, std::move(c)));
    return F;
  }

  /// F(mu) = mu^m(g).
  static PolyFunctional monomial(TensorFn<S> g) {
    PolyFunctional F(g.dims());
    F.add_term(g.order(), std::move(g));
    return F;
  }

  int dims() const { return d_; }
  const std::map<int, TensorFn<S>>& terms() const { return terms_; }
  bool has_term(int m) const { return terms_.count(m) > 0; }
  const TensorFn<S>& term(int m) const { return terms_.at(m); }

  int degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }
  bool is_constant() const { return terms_.empty() || degree() == 0; }

  S constant_part() const {
    auto it = terms_.find(0);
    return it == terms_.end() ? scalar_traits<S>::zero() : it->second.scalar();
  }

  /// Adds mu^m(g); symmetrizes and prunes exact zeros.
  void add_term(int m, TensorFn<S> g) {
    if (g.dims() != d_) throw std::invalid_argument("add_term: dims mismatch");
    if (g.order() != m) throw std::invalid_argument("add_term: order mismatch");
    TensorFn<S> sym = g.symmetrized();
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (!sym.is_zero()) terms_.emplace(m, std::move(sym));
    } else {
      it->second += sym;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  PolyFunctional& operator+=(const PolyFunctional& o) {
    require_same_space(o);
    for (const auto& [m, g] : o.terms_) add_term(m, g);
    return *this;
  }
  PolyFunctional& operator-=(const PolyFunctional& o) {
    require_same_space(o);
    for (const auto& [m, g] : o.terms_) add_term(m, g * S(-1));
    return *this;
  }
  PolyFunctional& operator*=(const S& c) {
    if (c == scalar_traits<S>::zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, g] : terms_) g *= c;
    return *this;
  }
  friend PolyFunctional operator+(PolyFunctional a, const PolyFunctional& b) { return a += b; }
  friend PolyFunctional operator-(PolyFunctional a, const PolyFunctional& b) { return a -= b; }
  friend PolyFunctional operator*(PolyFunctional a, const S& c) { return a *= c; }
  friend PolyFunctional operator*(const S& c, PolyFunctional a) { return a *= c; }

  bool is_zero() const { return terms_.empty(); }

  /// F(mu) by iterated contraction of each term against mu.
  S eval(const SimplexPoint<S>& mu) const {
    if (mu.dims() != d_) throw std::invalid_argument("eval: dims mismatch");
    S total = scalar_traits<S>::zero();
    std::span<const S> w(mu.probs());
    for (const auto& [m, g] : terms_) {
      if (m == 0) {
        total += g.scalar();
        continue;
      }
      TensorFn<S> cur = g;
      for (int k = 0; k < m; ++k) cur = cur.contract_last(w);
      total += cur.scalar();
    }
    return total;
  }

  /// Single symmetric tensor of order M >= degree representing F, using
  /// mu^m(g) = mu^M(g (x) 1^(M-m)) on probability measures.
  TensorFn<S> elevate(int M, std::size_t memory_cap = kDefaultMemoryCap) const {
    if (M < degree()) throw std::invalid_argument("elevate: M below degree");
    if (pow_sz(d_, M) > memory_cap) throw std::length_error("elevate: memory cap exceeded");
    TensorFn<S> acc(M, d_);
    for (const auto& [m, g] : terms_) {
      // pad with unit factors, then symmetrize once at top degree
      TensorFn<S> padded = g;
      for (int k = m; k < M; ++k) {
        TensorFn<S> ones(1, d_);
        for (auto& v : ones.values()) v = scalar_traits<S>::one();
        padded = padded.outer(ones);
      }
      acc += padded;
    }
    return acc.symmetrized();
  }

 private:
  void require_same_space(const PolyFunctional& o) const {
    if (d_ != o.d_) throw std::invalid_argument("PolyFunctional dims mismatch");
  }

  int d_;
  std::map<int, TensorFn<S>> terms_;
};

/// Product functional: mu^a(f) mu^b(g) = mu^{a+b}(f (x) g), re-symmetrized.
template <class S>
PolyFunctional<S> poly_mul(const PolyFunctional<S>& F, const PolyFunctional<S>& G) {
  if (F.dims() != G.dims()) throw std::invalid_argument("poly_mul: dims mismatch");
  PolyFunctional<S> R(F.dims());
  for (const auto& [a, f] : F.terms())
    for (const auto& [b, g] : G.terms()) R.add_term(a + b, f.outer(g));
  return R;
}

/// Equality as functions on the simplex (common-top-degree elevation).
template <class S>
bool poly_equal(const PolyFunctional<S>& F, const PolyFunctional<S>& G, double tol = 0.0) {
  if (F.dims() != G.dims()) return false;
  int M = std::max(F.degree(), G.degree());
  TensorFn<S> a = F.elevate(M), b = G.elevate(M);
  if constexpr (scalar_traits<S>::mode == Mode::exact)
    return a == b;
  else
    return a.approx_equal(b, tol);
}

template <class S>
bool poly_is_zero_fn(const PolyFunctional<S>& F, double tol = 0.0) {
  return poly_equal(F, PolyFunctional<S>(F.dims()), tol);
}

/// E zeta^n(f) = rho^[n](f) / theta^(n); order 0 returns the constant.
template <class S>
S expect_power(const FiniteMeasure<S>& rho, const TensorFn<S>& f) {
  if (f.order() == 0) return f.scalar();
  return bracket_integrate(rho, f) / rising_factorial(rho.theta(), f.order());
}

template <class S>
S expect_poly(const FiniteMeasure<S>& rho, const PolyFunctional<S>& F) {
  if (F.dims() != rho.dims()) throw std::invalid_argument("expect_poly: dims mismatch");
  S total = scalar_traits<S>::zero();
  for (const auto& [m, g] : F.terms()) total += expect_power(rho, g);
  return total;
}

/// T_{F,n}(x_1..x_n) = E F(zeta_{rho + d_{x_1}+...+d_{x_n}}), an order-n
/// tensor; T_{F,0} = E F.
template <class S>
TensorFn<S> tfn(const FiniteMeasure<S>& rho, const PolyFunctional<S>& F, int n) {
  if (n < 0) throw std::invalid_argument("tfn: n >= 0");
  if (F.dims() != rho.dims()) throw std::invalid_argument("tfn: dims mismatch");
  if (n == 0) return TensorFn<S>::constant(rho.dims(), expect_poly(rho, F));
  return TensorFn<S>::build(n, rho.dims(), [&](std::span<const int> idx) -> S {
    return expect_poly(rho.with_diracs(idx), F);
  });
}

/// Both sides of the Palm/moment exchange identity for separable
/// integrands f(mu, x_1..x_n) = G(mu) g(x_1..x_n):
///   lhs = E[ G(zeta) zeta^n(g) ]
///   rhs = theta^(n)^{-1} int g(x) E[G(zeta_{rho,x})] rho^[n](dx).
template <class S>
TwoSidedCheck<S> mecke_check(const FiniteMeasure<S>& rho, const PolyFunctional<S>& G,
                             const TensorFn<S>& g) {
  if (g.dims() != rho.dims() || G.dims() != rho.dims())
    throw std::invalid_argument("mecke_check: dims mismatch");
  const int n = g.order();
  S lhs = expect_poly(rho, poly_mul(G, PolyFunctional<S>::monomial(g)));
  TensorFn<S> palmG = tfn(rho, G, n);
  S rhs = bracket_integrate(rho, g.hadamard(palmG)) / rising_factorial(rho.theta(), n);
  return {lhs, rhs, scalar_traits<S>::eq(lhs, rhs)};
}

inline PolyFunctional<double> poly_to_double(const PolyFunctional<Rat>& F) {
  PolyFunctional<double> R(F.dims());
  for (const auto& [m, g] : F.terms()) R.add_term(m, tensor_to_double(g));
  return R;
}

}  // namespace dfcalc
