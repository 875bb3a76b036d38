#pragma once

/**
 * The differential calculus on Dirichlet--Ferguson functionals.
 *
 * Gradient (from the chaos expansion):
 *   grad_x F = sum_n n ( int f_n(x, y) zeta^{n-1}(dy) - zeta^n(f_n) ),
 * a random field with terms (n-1) and n per kernel. It is pathwise centered:
 * int grad_x F zeta(dx) = 0.
 *
 * Divergence (the adjoint under E int H_x grad_x G zeta(dx) = E delta(H) G):
 *   delta(H) = sum_n [ (theta+n) zeta^{n+1}(h_n)
 *                      - int int h_n(x, y) (rho + d_{y_1}+...+d_{y_n})(dx) zeta^n(dy) ].
 * The series form is valid for divergence-ready fields (slices in H_n) and
 * for gradients (where it collapses to -LF); other fields are rejected.
 *
 * Generator: L F = -sum_n (theta+n-1) n zeta^n(f_n); delta(grad F) = -LF;
 * L is symmetric and negative semi-definite, ELF = 0. The semigroup damps
 * kernel n by exp(-n(theta+n-1)t) and is float-only. The classical
 * second-order form L_rho on cylinder functions satisfies 2 L_rho = L.
 */

#include "dfcalc/chaos.hpp"
#include "dfcalc/field.hpp"
#include "dfcalc/measure.hpp"
#include "dfcalc/polyfun.hpp"
#include "dfcalc/scalar.hpp"

#include <cmath>
#include <stdexcept>

namespace dfcalc {

/// Chaos gradient as a random field (kind = gradient).
template <class S>
RandomField<S> gradient(const ChaosExpansion<S>& ce) {
  RandomField<S> H(ce.d, FieldKind::gradient);
  const int d = ce.d;
  for (const auto& [n, fn] : ce.kernels) {
    // + n * f_n(x, y_1..y_{n-1})  at term order n-1
    H.add_term(n - 1, fn * S(n));
    // - n * f_n(y_1..y_n), constant in x, at term order n
    TensorFn<S> ones(1, d);
    for (auto& v : ones.values()) v = scalar_traits<S>::one();
    H.add_term(n, ones.outer(fn) * S(-n));
  }
  return H;
}

/// E int H_x K_x zeta(dx), exactly (Campbell-measure inner product).
template <class S>
S campbell_inner(const FiniteMeasure<S>& rho, const RandomField<S>& H, const RandomField<S>& K) {
  if (H.dims() != rho.dims() || K.dims() != rho.dims())
    throw std::invalid_argument("campbell_inner: dims mismatch");
  return expect_poly(rho, field_product_zeta_integral(H, K));
}

/// The divergence series evaluated on an arbitrary finite field (internal;
/// does not gate on the slice property).
template <class S>
PolyFunctional<S> divergence_series(const FiniteMeasure<S>& rho, const RandomField<S>& H) {
  const int d = rho.dims();
  const S theta = rho.theta();
  PolyFunctional<S> out(d);
  for (const auto& [n, h] : H.terms()) {
    // (theta + n) zeta^{n+1}(h)
    out.add_term(n + 1, h * (theta + S(n)));
    // - zeta^n(g), g(y) = int h(x, y)(rho + d_{y_1}+...+d_{y_n})(dx)
    TensorFn<S> g = TensorFn<S>::build(n, d, [&](std::span<const int> y) -> S {
      S acc = scalar_traits<S>::zero();
      std::vector<int> arg(static_cast<std::size_t>(n + 1));
      for (int i = 0; i < n; ++i) arg[static_cast<std::size_t>(i + 1)] = y[static_cast<std::size_t>(i)];
      for (int x = 0; x < d; ++x) {
        arg[0] = x;
        S w = rho.weight(x);
        for (int yi : y)
          if (yi == x) w += scalar_traits<S>::one();
        acc += w * h.at(std::span<const int>(arg));
      }
      return acc;
    });
    out.add_term(n, g * S(-1));
  }
  return out;
}

/// Public divergence: divergence-ready fields (slices verified) and
/// gradient fields are accepted; anything else is rejected.
template <class S>
PolyFunctional<S> divergence(const FiniteMeasure<S>& rho, const RandomField<S>& H,
                             double tol = 0.0) {
  if (H.dims() != rho.dims()) throw std::invalid_argument("divergence: dims mismatch");
  if (H.kind() != FieldKind::gradient && !H.slices_conditionally_centered(rho, tol))
    throw std::invalid_argument("divergence: field slice h_n(x,.) is not conditionally centered");
  return divergence_series(rho, H);
}

/// L F = -sum_n (theta+n-1) n zeta^n(f_n), returned as a chaos expansion
/// (same kernels, scaled; EL F = 0).
template <class S>
ChaosExpansion<S> generator_L(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& ce) {
  ChaosExpansion<S> out;
  out.d = ce.d;
  out.f0 = scalar_traits<S>::zero();
  const S theta = rho.theta();
  for (const auto& [n, fn] : ce.kernels) {
    S lam = (theta + S(n - 1)) * S(n);
    out.kernels.emplace(n, fn * (-lam));
  }
  return out;
}

template <class S>
struct OperatorIdentityCheck {
  PolyFunctional<S> lhs;
  PolyFunctional<S> rhs;
  bool holds;
};

/// delta(grad F) vs -LF, compared as functions on the simplex.
template <class S>
OperatorIdentityCheck<S> delta_nabla_check(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& ce,
                                           double tol = 0.0) {
  PolyFunctional<S> lhs = divergence(rho, gradient(ce), tol);
  PolyFunctional<S> rhs = reconstruct(rho, generator_L(rho, ce), tol) * S(-1);
  return {lhs, rhs, poly_equal(lhs, rhs, tol)};
}

/// T_t: kernel n damped by exp(-n(theta+n-1)t). Float mode only (the
/// damping factors are irrational).
inline ChaosExpansion<double> semigroup(const FiniteMeasure<double>& rho,
                                        const ChaosExpansion<double>& ce, double t) {
  if (t < 0) throw std::invalid_argument("semigroup: t >= 0");
  ChaosExpansion<double> out;
  out.d = ce.d;
  out.f0 = ce.f0;
  const double theta = rho.theta();
  for (const auto& [n, fn] : ce.kernels) {
    double factor = std::exp(-static_cast<double>(n) * (theta + n - 1) * t);
    out.kernels.emplace(n, fn * factor);
  }
  return out;
}

/// Mutation operator (A f)(x) = int (f(y) - f(x)) rho(dy) = rho(f) - theta f(x).
template <class S>
TensorFn<S> mutation(const FiniteMeasure<S>& rho, const TensorFn<S>& f) {
  if (f.order() != 1 || f.dims() != rho.dims()) throw std::invalid_argument("mutation: one-variable f");
  S rf = rho.integrate(f);
  const S theta = rho.theta();
  return TensorFn<S>::build(1, rho.dims(), [&](std::span<const int> x) -> S {
    return rf - theta * f.values()[static_cast<std::size_t>(x[0])];
  });
}

/// Classical second-order generator on cylinder functions:
///   (L_rho F)(mu) = 1/2 sum_{i,j} d2_{ij} phi(mu(f)) Cov_mu(f_i, f_j)
///                 + 1/2 sum_i d_i phi(mu(f)) mu(A f_i),
/// expanded exactly into a PolyFunctional. Satisfies 2 L_rho = L.
template <class S>
PolyFunctional<S> flemingviot_generator(const FiniteMeasure<S>& rho, const CylinderFunction<S>& cyl) {
  cyl.validate();
  const int d = rho.dims();
  const int k = cyl.arity();
  PolyFunctional<S> out(d);
  const S half = scalar_traits<S>::one() / S(2);

  for (int i = 0; i < k; ++i) {
    CylinderFunction<S> di = cyl.partial(i);
    for (int j = 0; j < k; ++j) {
      CylinderFunction<S> dij = di.partial(j);
      if (dij.phi.empty()) continue;
      // Cov_mu(f_i, f_j) = mu(f_i f_j) - mu(f_i) mu(f_j)
      PolyFunctional<S> cov = PolyFunctional<S>::monomial(
          cyl.fs[static_cast<std::size_t>(i)].hadamard(cyl.fs[static_cast<std::size_t>(j)]));
      cov -= poly_mul(PolyFunctional<S>::monomial(cyl.fs[static_cast<std::size_t>(i)]),
                      PolyFunctional<S>::monomial(cyl.fs[static_cast<std::size_t>(j)]));
      out += half * poly_mul(dij.to_poly(), cov);
    }
    // 1/2 d_i phi * mu(A f_i)
    PolyFunctional<S> mu_Afi = PolyFunctional<S>::monomial(mutation(rho, cyl.fs[static_cast<std::size_t>(i)]));
    out += half * poly_mul(di.to_poly(), mu_Afi);
  }
  return out;
}

/// Dirichlet form E(F,G) = E int grad F grad G d zeta = E[(-LF) G].
template <class S>
S dirichlet_form(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& F, const ChaosExpansion<S>& G) {
  return campbell_inner(rho, gradient(F), gradient(G));
}

template <class S>
struct PoincareResult {
  S variance;
  S energy_over_theta;
  bool holds;               // variance <= energy/theta
  bool equality;            // exact equality of the two sides
  bool first_chaos_only;    // no kernels of order >= 2 (vacuous for constants)
};

/// Var F <= theta^{-1} E int (grad F)^2 d zeta, equality exactly on
/// first-chaos functionals.
template <class S>
PoincareResult<S> poincare_check(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& ce) {
  S variance = chaos_variance(rho, ce);
  S energy = dirichlet_form(rho, ce, ce);
  S eot = energy / rho.theta();
  bool first_only = true;
  for (const auto& [n, k] : ce.kernels)
    if (n >= 2 && !k.is_zero()) first_only = false;
  if constexpr (scalar_traits<S>::mode == Mode::exact) {
    return {variance, eot, variance <= eot, variance == eot, first_only};
  } else {
    double v = to_double(variance), e = to_double(eot);
    bool eq = scalar_traits<double>::eq(v, e, 1e-9);
    bool holds = v <= e + 1e-9 * std::max(1.0, std::fabs(e));
    return {variance, eot, holds, eq, first_only};
  }
}

}  // namespace dfcalc
