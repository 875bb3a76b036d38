#pragma once

/**
 * Random fields H(mu, x) = h_0(x) + sum_{n>=1} int h_n(x, y_1..y_n) mu^n(dy),
 * stored as term order n -> tensor of order n+1 with the field point x on
 * axis 0. Divergence-ready fields have every slice h_n(x, .) in H_n;
 * gradient outputs do not satisfy that and carry their own kind tag.
 *
 * CylinderFunction is the smooth class: F(mu) = phi(mu(f_1)..mu(f_k)) with
 * polynomial phi; it expands exactly into a PolyFunctional and owns the
 * pathwise gradient sum_i d_i phi(mu(f)) (f_i(x) - mu(f_i)).
 */

#include "dfcalc/chaos.hpp"
#include "dfcalc/measure.hpp"
#include "dfcalc/polyfun.hpp"
#include "dfcalc/scalar.hpp"
#include "dfcalc/tensor.hpp"

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace dfcalc {

enum class FieldKind { general, divergence_ready, gradient };

template <class S>
class RandomField {
 public:
  explicit RandomField(int d, FieldKind kind = FieldKind::general) : d_(d), kind_(kind) {
    if (d < 1) throw std::invalid_argument("RandomField: d >= 1");
  }

  int dims() const { return d_; }
  FieldKind kind() const { return kind_; }
  void set_kind(FieldKind k) { kind_ = k; }
  const std::map<int, TensorFn<S>>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_order() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  /// Adds the order-n term; tensor has order n+1 (axis 0 = x), and is
  /// symmetrized over the trailing n axes (mu^n only sees that part).
  void add_term(int n, TensorFn<S> h) {
    if (h.dims() != d_) throw std::invalid_argument("RandomField::add_term dims");
    if (h.order() != n + 1) throw std::invalid_argument("RandomField::add_term order");
    TensorFn<S> sym = symmetrize_trailing(h);
    auto it = terms_.find(n);
    if (it == terms_.end()) {
      if (!sym.is_zero()) terms_.emplace(n, std::move(sym));
    } else {
      it->second += sym;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  RandomField& operator+=(const RandomField& o) {
    if (d_ != o.d_) throw std::invalid_argument("RandomField dims mismatch");
    for (const auto& [n, h] : o.terms_) add_term(n, h);
    return *this;
  }
  RandomField& operator*=(const S& c) {
    if (c == scalar_traits<S>::zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [n, h] : terms_) h *= c;
    return *this;
  }
  friend RandomField operator+(RandomField a, const RandomField& b) { return a += b; }
  friend RandomField operator*(RandomField a, const S& c) { return a *= c; }
  friend RandomField operator*(const S& c, RandomField a) { return a *= c; }

  /// H(mu, x).
  S eval(const SimplexPoint<S>& mu, int x) const {
    if (mu.dims() != d_) throw std::invalid_argument("RandomField::eval dims");
    S total = scalar_traits<S>::zero();
    std::span<const S> w(mu.probs());
    for (const auto& [n, h] : terms_) {
      TensorFn<S> cur = h;
      for (int k = 0; k < n; ++k) cur = cur.contract_last(w);
      total += cur.values()[static_cast<std::size_t>(x)];
    }
    return total;
  }

  /// mu |-> H(mu, x) as a polynomial functional (atom x fixed).
  PolyFunctional<S> fix_point(int x) const {
    PolyFunctional<S> F(d_);
    const int pos0[1] = {0};
    const int atom[1] = {x};
    for (const auto& [n, h] : terms_)
      F.add_term(n, h.fix_positions(std::span<const int>(pos0, 1), std::span<const int>(atom, 1)));
    return F;
  }

  /// h_n(x, .) in H_n for every x and n >= 1 (order-0 terms are free).
  bool slices_conditionally_centered(const FiniteMeasure<S>& rho, double tol = 0.0) const {
    const int pos0[1] = {0};
    for (const auto& [n, h] : terms_) {
      if (n == 0) continue;
      for (int x = 0; x < d_; ++x) {
        const int atom[1] = {x};
        TensorFn<S> slice = h.fix_positions(std::span<const int>(pos0, 1), std::span<const int>(atom, 1));
        if (slice.is_zero()) continue;
        if (!is_in_Hn(rho, slice, tol)) return false;
      }
    }
    return true;
  }

 private:
  static TensorFn<S> symmetrize_trailing(const TensorFn<S>& h) {
    const int n = h.order() - 1;
    if (n <= 1) return h;
    // symmetrize axes 1..n for each fixed x
    TensorFn<S> out(h.order(), h.dims());
    const int d = h.dims();
    const int pos0[1] = {0};
    for (int x = 0; x < d; ++x) {
      const int atom[1] = {x};
      TensorFn<S> slice =
          h.fix_positions(std::span<const int>(pos0, 1), std::span<const int>(atom, 1)).symmetrized();
      // write back
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      std::vector<int> full(static_cast<std::size_t>(n + 1), 0);
      full[0] = x;
      std::size_t flat = 0;
      do {
        for (int i = 0; i < n; ++i) full[static_cast<std::size_t>(i + 1)] = idx[static_cast<std::size_t>(i)];
        out.at(std::span<const int>(full)) = slice.values()[flat++];
      } while (next_tuple(idx, d));
    }
    return out;
  }

  int d_;
  FieldKind kind_;
  std::map<int, TensorFn<S>> terms_;
};

/// (F H)(mu, x) = F(mu) H(mu, x), multiplied out into canonical field form.
template <class S>
RandomField<S> field_mul_poly(const PolyFunctional<S>& F, const RandomField<S>& H) {
  if (F.dims() != H.dims()) throw std::invalid_argument("field_mul_poly: dims mismatch");
  RandomField<S> R(H.dims(), FieldKind::general);
  for (const auto& [b, h] : H.terms())
    for (const auto& [a, g] : F.terms()) {
      // q(x, z_1..z_b, y_1..y_a) = h(x, z) g(y)
      R.add_term(a + b, h.outer(g));
    }
  return R;
}

/// int H(mu,x) mu(dx) as a polynomial functional (the x axis becomes one
/// more mu integration).
template <class S>
PolyFunctional<S> field_zeta_integral(const RandomField<S>& H) {
  PolyFunctional<S> F(H.dims());
  for (const auto& [n, h] : H.terms()) F.add_term(n + 1, h);
  return F;
}

/// int H(mu,x) K(mu,x) mu(dx) as a polynomial functional: terms
/// (x, y, z) |-> h_m(x, y) k_n(x, z) glued along the shared x axis, which
/// then joins the mu integrations.
template <class S>
PolyFunctional<S> field_product_zeta_integral(const RandomField<S>& H, const RandomField<S>& K) {
  if (H.dims() != K.dims()) throw std::invalid_argument("field_product_zeta_integral: dims");
  const int d = H.dims();
  PolyFunctional<S> F(d);
  const int pos0[1] = {0};
  for (const auto& [m, h] : H.terms())
    for (const auto& [n, k] : K.terms()) {
      TensorFn<S> glued = TensorFn<S>::build(m + n + 1, d, [&](std::span<const int> idx) -> S {
        // idx = (x, y_1..y_m, z_1..z_n)
        const int x = idx[0];
        (void)pos0;
        std::vector<int> hy(static_cast<std::size_t>(m + 1));
        hy[0] = x;
        for (int i = 0; i < m; ++i) hy[static_cast<std::size_t>(i + 1)] = idx[static_cast<std::size_t>(1 + i)];
        std::vector<int> kz(static_cast<std::size_t>(n + 1));
        kz[0] = x;
        for (int i = 0; i < n; ++i) kz[static_cast<std::size_t>(i + 1)] = idx[static_cast<std::size_t>(1 + m + i)];
        return h.at(std::span<const int>(hy)) * k.at(std::span<const int>(kz));
      });
      F.add_term(m + n + 1, glued);
    }
  return F;
}

/// Fields compared as functions of (mu, x): equal iff the fixed-x
/// functionals agree for every atom.
template <class S>
bool field_equal(const RandomField<S>& H, const RandomField<S>& K, double tol = 0.0) {
  if (H.dims() != K.dims()) return false;
  for (int x = 0; x < H.dims(); ++x)
    if (!poly_equal(H.fix_point(x), K.fix_point(x), tol)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Cylinder functions
// ---------------------------------------------------------------------------

/// phi is a polynomial in k variables: exponent vector -> coefficient.
template <class S>
struct CylinderFunction {
  std::vector<TensorFn<S>> fs;                 // k one-variable functions
  std::map<std::vector<int>, S> phi;           // exponents (size k) -> coeff

  int arity() const { return static_cast<int>(fs.size()); }
  int dims() const { return fs.empty() ? 1 : fs.front().dims(); }

  void validate() const {
    for (const auto& f : fs)
      if (f.order() != 1 || f.dims() != dims())
        throw std::invalid_argument("CylinderFunction: fs must be one-variable, equal dims");
    for (const auto& [e, c] : phi)
      if (static_cast<int>(e.size()) != arity())
        throw std::invalid_argument("CylinderFunction: exponent arity mismatch");
  }

  /// phi evaluated at v in R^k.
  S phi_eval(std::span<const S> v) const {
    S total = scalar_traits<S>::zero();
    for (const auto& [e, c] : phi) {
      S term = c;
      for (int i = 0; i < arity(); ++i)
        for (int t = 0; t < e[static_cast<std::size_t>(i)]; ++t) term *= v[static_cast<std::size_t>(i)];
      total += term;
    }
    return total;
  }

  /// d_i phi as a cylinder polynomial over the same fs.
  CylinderFunction partial(int i) const {
    CylinderFunction out;
    out.fs = fs;
    for (const auto& [e, c] : phi) {
      int ei = e[static_cast<std::size_t>(i)];
      if (ei == 0) continue;
      std::vector<int> e2 = e;
      e2[static_cast<std::size_t>(i)] -= 1;
      S c2 = c * S(ei);
      auto it = out.phi.find(e2);
      if (it == out.phi.end())
        out.phi.emplace(std::move(e2), std::move(c2));
      else
        it->second += c2;
    }
    return out;
  }

  /// F(mu) = phi(mu(f_1)..mu(f_k)).
  S eval(const SimplexPoint<S>& mu) const {
    std::vector<S> v;
    v.reserve(fs.size());
    for (const auto& f : fs) v.push_back(mu.integrate(f));
    return phi_eval(std::span<const S>(v));
  }

  /// Exact expansion into a PolyFunctional: each monomial
  /// prod_i mu(f_i)^{e_i} becomes mu^{|e|}( (x)_i f_i^(x)e_i ).
  PolyFunctional<S> to_poly() const {
    validate();
    const int d = dims();
    PolyFunctional<S> F(d);
    for (const auto& [e, c] : phi) {
      TensorFn<S> t(0, d);
      t.values()[0] = c;
      for (int i = 0; i < arity(); ++i)
        for (int rep = 0; rep < e[static_cast<std::size_t>(i)]; ++rep) t = t.outer(fs[static_cast<std::size_t>(i)]);
      F.add_term(t.order(), std::move(t));
    }
    return F;
  }
};

/// Pathwise directional derivative at (mu, x):
///   sum_i d_i phi(mu(f_1)..mu(f_k)) (f_i(x) - mu(f_i)).
template <class S>
S gradient_pathwise(const CylinderFunction<S>& cyl, const SimplexPoint<S>& mu, int x) {
  cyl.validate();
  std::vector<S> v;
  v.reserve(cyl.fs.size());
  for (const auto& f : cyl.fs) v.push_back(mu.integrate(f));
  S total = scalar_traits<S>::zero();
  for (int i = 0; i < cyl.arity(); ++i) {
    CylinderFunction<S> di = cyl.partial(i);
    S slope = di.phi_eval(std::span<const S>(v));
    total += slope * (cyl.fs[static_cast<std::size_t>(i)].values()[static_cast<std::size_t>(x)] - v[static_cast<std::size_t>(i)]);
  }
  return total;
}

}  // namespace dfcalc
