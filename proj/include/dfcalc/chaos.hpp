#pragma once

/**
 * Orthogonal decomposition machinery.
 *
 * H_n is the space of symmetric g in L^2(rho^[n]) that are conditionally
 * centered: int g(x_1..x_{n-1}, x) (rho + d_{x_1}+...+d_{x_{n-1}})(dx) = 0
 * at every tuple (for n=1: rho(g)=0). Every square functional decomposes as
 *
 *   F = f_0 + sum_n zeta^n(f_n),   f_n in H_n,
 *
 * with explicit kernels
 *
 *   f_n(x) = (theta+2n-1)/n! * sum_{j=0..n} (-1)^(n-j) (theta+j)^(n-1)
 *            sum_{i_1<...<i_j} T_{F,j}(x_{i_1}..x_{i_j}),
 *
 * the j=0 term being (-1)^n theta^(n-1) E F. For monomials F = zeta^m(f)
 * the same kernels come out of the Dirac-addition expansion
 * (rho + d_{x_{i_1}}+...)^[m](f) with (theta+j)^(k-1)/(theta+j)^(m) weights,
 * giving a second, independent computation route.
 *
 * Inner products of expansions: E[FG] = f_0 g_0 + sum_n n!/theta^(2n)
 * rho^[n](f_n g_n); chaoses of different order are orthogonal.
 */

#include "dfcalc/bracket.hpp"
#include "dfcalc/measure.hpp"
#include "dfcalc/polyfun.hpp"
#include "dfcalc/reindex.hpp"
#include "dfcalc/scalar.hpp"
#include "dfcalc/tensor.hpp"

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace dfcalc {

template <class S>
struct ChaosExpansion {
  int d = 1;
  S f0 = scalar_traits<S>::zero();
  std::map<int, TensorFn<S>> kernels;  // n >= 1 -> kernel in H_n

  int max_order() const { return kernels.empty() ? 0 : kernels.rbegin()->first; }
};

/// Symmetry + conditional centering at every argument tuple. With zero
/// weights present, centering is only required on supp(rho)^(n-1) tuples
/// (those carry all of the rho^[n-1] mass).
template <class S>
bool is_in_Hn(const FiniteMeasure<S>& rho, const TensorFn<S>& g, double tol = 0.0) {
  if (g.order() < 1) return false;
  if (g.dims() != rho.dims()) throw std::invalid_argument("is_in_Hn: dims mismatch");
  if constexpr (scalar_traits<S>::mode == Mode::exact) {
    if (!g.is_symmetric()) return false;
  } else {
    if (!g.symmetrized().approx_equal(g, tol)) return false;
  }
  const int n = g.order();
  const int d = g.dims();
  const bool restrict_support = rho.has_zero_weight();
  std::vector<int> fixed(static_cast<std::size_t>(n - 1), 0);
  std::vector<int> arg(static_cast<std::size_t>(n), 0);
  do {
    if (restrict_support && !rho.tuple_in_support(fixed)) continue;
    for (int i = 0; i + 1 < n; ++i) arg[static_cast<std::size_t>(i)] = fixed[static_cast<std::size_t>(i)];
    S acc = scalar_traits<S>::zero();
    for (int x = 0; x < d; ++x) {
      S w = rho.weight(x);
      for (int y : fixed)
        if (y == x) w += scalar_traits<S>::one();
      arg[static_cast<std::size_t>(n - 1)] = x;
      acc += w * g.at(std::span<const int>(arg));
    }
    if (!scalar_traits<S>::eq(acc, scalar_traits<S>::zero(), tol)) return false;
  } while (n > 1 && next_tuple(fixed, d));
  return true;
}

template <class S>
bool chaos_kernels_valid(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& ce, double tol = 0.0) {
  for (const auto& [n, k] : ce.kernels)
    if (!is_in_Hn(rho, k, tol)) return false;
  return true;
}

namespace detail {
/// Visits every strictly increasing j-subset of {0..n-1}.
template <class Fn>
void for_each_subset(int n, int j, Fn&& fn) {
  std::vector<int> sel(static_cast<std::size_t>(j));
  for (int i = 0; i < j; ++i) sel[static_cast<std::size_t>(i)] = i;
  if (j == 0) {
    fn(std::span<const int>(sel.data(), 0));
    return;
  }
  while (true) {
    fn(std::span<const int>(sel.data(), static_cast<std::size_t>(j)));
    int i = j - 1;
    while (i >= 0 && sel[static_cast<std::size_t>(i)] == n - j + i) --i;
    if (i < 0) break;
    int v = ++sel[static_cast<std::size_t>(i)];
    for (int t = i + 1; t < j; ++t) sel[static_cast<std::size_t>(t)] = ++v;
  }
}
}  // namespace detail

/// Kernels of an arbitrary finite-degree functional via alternating sums of
/// Palm expectations. Kernels above deg F vanish and are not stored.
template <class S>
ChaosExpansion<S> kernels_general(const FiniteMeasure<S>& rho, const PolyFunctional<S>& F) {
  if (F.dims() != rho.dims()) throw std::invalid_argument("kernels_general: dims mismatch");
  ChaosExpansion<S> ce;
  ce.d = rho.dims();
  ce.f0 = expect_poly(rho, F);
  const int deg = F.degree();
  const S theta = rho.theta();

  std::vector<TensorFn<S>> palm;  // palm[j] = T_{F,j}
  for (int j = 0; j <= deg; ++j) palm.push_back(tfn(rho, F, j));

  for (int n = 1; n <= deg; ++n) {
    const S lead = (theta + S(2 * n - 1)) / factorial_s<S>(n);
    TensorFn<S> kernel = TensorFn<S>::build(n, rho.dims(), [&](std::span<const int> x) -> S {
      S acc = scalar_traits<S>::zero();
      for (int j = 0; j <= n; ++j) {
        S coeff = rising_factorial(theta + S(j), n - 1);
        if ((n - j) % 2 == 1) coeff = -coeff;
        S inner = scalar_traits<S>::zero();
        std::vector<int> sub(static_cast<std::size_t>(j));
        detail::for_each_subset(n, j, [&](std::span<const int> sel) {
          for (int t = 0; t < j; ++t) sub[static_cast<std::size_t>(t)] = x[static_cast<std::size_t>(sel[static_cast<std::size_t>(t)])];
          inner += palm[static_cast<std::size_t>(j)].at(std::span<const int>(sub.data(), static_cast<std::size_t>(j)));
        });
        acc += coeff * inner;
      }
      return lead * acc;
    });
    if (!kernel.is_zero()) ce.kernels.emplace(n, std::move(kernel));
  }
  return ce;
}

/// Kernels of a monomial F = zeta^m(f) from the Dirac-addition expansion:
///   f_k(x) = (theta+2k-1)/k! sum_{j=0..k} (-1)^(k-j)
///            (theta+j)^(k-1)/(theta+j)^(m)
///            sum_{i_1<...<i_j<=k} (rho + d_{x_{i_1}}+...+d_{x_{i_j}})^[m](f),
/// the j=0 term reading (-1)^k (theta^(k-1)/theta^(m)) rho^[m](f).
template <class S>
ChaosExpansion<S> kernels_monomial(const FiniteMeasure<S>& rho, const TensorFn<S>& f) {
  const int m = f.order();
  if (m < 1) throw std::invalid_argument("kernels_monomial: m >= 1");
  if (f.dims() != rho.dims()) throw std::invalid_argument("kernels_monomial: dims mismatch");
  const S theta = rho.theta();

  ChaosExpansion<S> ce;
  ce.d = rho.dims();
  ce.f0 = bracket_integrate(rho, f) / rising_factorial(theta, m);

  for (int k = 1; k <= m; ++k) {
    const S lead = (theta + S(2 * k - 1)) / factorial_s<S>(k);
    TensorFn<S> kernel = TensorFn<S>::build(k, rho.dims(), [&](std::span<const int> x) -> S {
      S acc = scalar_traits<S>::zero();
      for (int j = 0; j <= k; ++j) {
        S coeff = rising_factorial(theta + S(j), k - 1) / rising_factorial(theta + S(j), m);
        if ((k - j) % 2 == 1) coeff = -coeff;
        S inner = scalar_traits<S>::zero();
        std::vector<int> pts(static_cast<std::size_t>(j));
        detail::for_each_subset(k, j, [&](std::span<const int> sel) {
          for (int t = 0; t < j; ++t) pts[static_cast<std::size_t>(t)] = x[static_cast<std::size_t>(sel[static_cast<std::size_t>(t)])];
          inner += add_diracs_expand(rho, f, std::span<const int>(pts.data(), static_cast<std::size_t>(j)));
        });
        acc += coeff * inner;
      }
      return lead * acc;
    });
    if (!kernel.is_zero()) ce.kernels.emplace(k, std::move(kernel));
  }
  return ce;
}

/// F = f_0 + sum_n zeta^n(f_n) as a polynomial functional. Kernels are
/// required to be valid H_n elements.
template <class S>
PolyFunctional<S> reconstruct(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& ce,
                              double tol = 0.0) {
  PolyFunctional<S> F(ce.d);
  F.add_term(0, TensorFn<S>::constant(ce.d, ce.f0));
  for (const auto& [n, k] : ce.kernels) {
    if (!is_in_Hn(rho, k, tol)) throw std::invalid_argument("reconstruct: kernel not conditionally centered");
    F.add_term(n, k);
  }
  return F;
}

/// E[FG] from two expansions: f0 g0 + sum_n n!/theta^(2n) rho^[n](f_n g_n).
template <class S>
S chaos_inner(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& F, const ChaosExpansion<S>& G) {
  if (F.d != G.d || F.d != rho.dims()) throw std::invalid_argument("chaos_inner: dims mismatch");
  const S theta = rho.theta();
  S total = F.f0 * G.f0;
  for (const auto& [n, fn] : F.kernels) {
    auto it = G.kernels.find(n);
    if (it == G.kernels.end()) continue;
    total += factorial_s<S>(n) / rising_factorial(theta, 2 * n) *
             bracket_integrate(rho, fn.hadamard(it->second));
  }
  return total;
}

template <class S>
S chaos_variance(const FiniteMeasure<S>& rho, const ChaosExpansion<S>& F) {
  return chaos_inner(rho, F, F) - F.f0 * F.f0;
}

namespace detail {
/// sum over weakly increasing (j_1<=...<=j_r) in [k] of
/// prod_l parts[l](x_{j_l}), as an order-k tensor.
template <class S>
TensorFn<S> tensor_index_sum(const std::vector<const TensorFn<S>*>& parts, int k, int d) {
  const int r = static_cast<int>(parts.size());
  TensorFn<S> acc(k, d);
  std::vector<int> j(static_cast<std::size_t>(r), 0);
  while (true) {
    acc += TensorFn<S>::build(k, d, [&](std::span<const int> x) -> S {
      S p = scalar_traits<S>::one();
      for (int l = 0; l < r; ++l)
        p *= parts[static_cast<std::size_t>(l)]->values()[static_cast<std::size_t>(x[static_cast<std::size_t>(j[static_cast<std::size_t>(l)])])];
      return p;
    });
    int pos = r - 1;
    while (pos >= 0 && j[static_cast<std::size_t>(pos)] == k - 1) --pos;
    if (pos < 0) break;
    int v = j[static_cast<std::size_t>(pos)] + 1;
    for (int t = pos; t < r; ++t) j[static_cast<std::size_t>(t)] = v;
  }
  return acc;
}
}  // namespace detail

/// Cov[zeta^k(h), zeta^m(h_1 (x) ... (x) h_m)] for h in H_k:
///   theta^(m+k)^{-1} sum_{r=1..m} sum_{distinct (i_1..i_r)}
///     rho^[m-r]((x)_{j notin i} h_j) * rho^[k]( h * h^k_{(x)i_1..i_r} ).
template <class S>
S covariance_chaos(const FiniteMeasure<S>& rho, const TensorFn<S>& h,
                   const std::vector<TensorFn<S>>& hs) {
  const int k = h.order();
  const int m = static_cast<int>(hs.size());
  if (k < 1 || m < 1) throw std::invalid_argument("covariance_chaos: k,m >= 1");
  if (!is_in_Hn(rho, h)) throw std::invalid_argument("covariance_chaos: h not in H_k");
  for (const auto& f : hs)
    if (f.order() != 1 || f.dims() != rho.dims())
      throw std::invalid_argument("covariance_chaos: h_i must be one-variable");
  const int d = rho.dims();
  S total = scalar_traits<S>::zero();
  for (int r = 1; r <= m; ++r) {
    detail::for_each_distinct_tuple(m, r, [&](std::span<const int> iv) {
      // product of the left-out factors, integrated by rho^[m-r]
      std::vector<bool> used(static_cast<std::size_t>(m), false);
      for (int i : iv) used[static_cast<std::size_t>(i)] = true;
      TensorFn<S> rest(0, d);
      rest.values()[0] = scalar_traits<S>::one();
      for (int i = 0; i < m; ++i)
        if (!used[static_cast<std::size_t>(i)]) rest = rest.outer(hs[static_cast<std::size_t>(i)]);
      S rest_int = bracket_integrate(rho, rest);
      if (rest_int == scalar_traits<S>::zero()) return;

      std::vector<const TensorFn<S>*> parts;
      for (int i : iv) parts.push_back(&hs[static_cast<std::size_t>(i)]);
      TensorFn<S> idxsum = detail::tensor_index_sum(parts, k, d);
      total += rest_int * bracket_integrate(rho, h.hadamard(idxsum));
    });
  }
  return total / rising_factorial(rho.theta(), m + k);
}

/// Cov(zeta^k(h), zeta^m(f^(x)m)) via the composition-indexed sum
/// (exponent vectors j_1..j_k >= 1 summing to r; zero-exponent compositions
/// integrate to 0 against H_k kernels and are skipped).
template <class S>
S covariance_power(const FiniteMeasure<S>& rho, const TensorFn<S>& h, const TensorFn<S>& f,
                   int m) {
  const int k = h.order();
  if (k < 1 || m < 1) throw std::invalid_argument("covariance_power: k,m >= 1");
  if (f.order() != 1) throw std::invalid_argument("covariance_power: f must be one-variable");
  if (!is_in_Hn(rho, h)) throw std::invalid_argument("covariance_power: h not in H_k");
  const int d = rho.dims();
  const S theta = rho.theta();

  // powers f^0..f^m entrywise
  std::vector<TensorFn<S>> fpow;
  fpow.push_back(TensorFn<S>::build(1, d, [&](std::span<const int>) { return scalar_traits<S>::one(); }));
  for (int p = 1; p <= m; ++p) fpow.push_back(fpow.back().hadamard(f));

  // rho^[q](f^(x)q)
  std::vector<S> fm_int;
  for (int q = 0; q <= m; ++q) {
    TensorFn<S> prod(0, d);
    prod.values()[0] = scalar_traits<S>::one();
    for (int t = 0; t < q; ++t) prod = prod.outer(f);
    fm_int.push_back(bracket_integrate(rho, prod));
  }

  S total = scalar_traits<S>::zero();
  for (int r = 1; r <= m; ++r) {
    S coef = scalar_traits<S>::one();
    for (int i = m - r + 1; i <= m; ++i) coef *= S(i);  // m!/(m-r)!
    // compositions j_1..j_k >= 1 with sum r (empty when r < k)
    S inner = scalar_traits<S>::zero();
    std::vector<int> comp(static_cast<std::size_t>(k), 1);
    if (r >= k) {
      // iterate all compositions of r into k positive parts
      std::vector<int> cuts(static_cast<std::size_t>(k - 1));
      // represent composition via stars and bars over exponents directly
      std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == k - 1) {
          comp[static_cast<std::size_t>(pos)] = remaining;
          TensorFn<S> integrand = h;
          // multiply h entrywise by prod_i f(x_i)^{j_i}
          integrand = TensorFn<S>::build(k, d, [&](std::span<const int> x) -> S {
            S v = h.at(x);
            for (int i = 0; i < k; ++i)
              v *= fpow[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])].values()[static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
            return v;
          });
          inner += bracket_integrate(rho, integrand);
          return;
        }
        for (int v = 1; v <= remaining - (k - 1 - pos); ++v) {
          comp[static_cast<std::size_t>(pos)] = v;
          rec(pos + 1, remaining - v);
        }
      };
      rec(0, r);
    }
    total += coef * fm_int[static_cast<std::size_t>(m - r)] * inner;
  }
  return total / rising_factorial(theta, m + k);
}

/// The k=2 split: diagonal rho-integral with (r-1) weight plus the interior
/// compositions over the plain product measure rho (x) rho. (The (r-1)
/// weight absorbs the boundary compositions via the centering property.)
template <class S>
S covariance_power_quadratic(const FiniteMeasure<S>& rho, const TensorFn<S>& h,
                             const TensorFn<S>& f, int m) {
  if (h.order() != 2) throw std::invalid_argument("covariance_power_quadratic: h must have order 2");
  if (m < 1) throw std::invalid_argument("covariance_power_quadratic: m >= 1");
  if (!is_in_Hn(rho, h)) throw std::invalid_argument("covariance_power_quadratic: h not in H_2");
  const int d = rho.dims();
  const S theta = rho.theta();

  std::vector<S> fm_int;  // rho^[q](f^(x)q)
  for (int q = 0; q <= m; ++q) {
    TensorFn<S> prod(0, d);
    prod.values()[0] = scalar_traits<S>::one();
    for (int t = 0; t < q; ++t) prod = prod.outer(f);
    fm_int.push_back(bracket_integrate(rho, prod));
  }

  S total = scalar_traits<S>::zero();
  for (int r = 1; r <= m; ++r) {
    S coef = scalar_traits<S>::one();
    for (int i = m - r + 1; i <= m; ++i) coef *= S(i);
    // diagonal: (r-1) * int h(x,x) f(x)^r rho(dx)
    S diag = scalar_traits<S>::zero();
    for (int x = 0; x < d; ++x) {
      S fx = scalar_traits<S>::one();
      for (int t = 0; t < r; ++t) fx *= f.values()[static_cast<std::size_t>(x)];
      diag += rho.weight(x) * h.at({x, x}) * fx;
    }
    S inner = S(r - 1) * diag;
    // off-diagonal: sum_{j=1}^{r-1} int h(x,y) f(x)^j f(y)^{r-j} rho(dx) rho(dy)
    for (int j = 1; j <= r - 1; ++j) {
      S off = scalar_traits<S>::zero();
      for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) {
          S fx = scalar_traits<S>::one(), fy = scalar_traits<S>::one();
          for (int t = 0; t < j; ++t) fx *= f.values()[static_cast<std::size_t>(x)];
          for (int t = 0; t < r - j; ++t) fy *= f.values()[static_cast<std::size_t>(y)];
          off += rho.weight(x) * rho.weight(y) * h.at({x, y}) * fx * fy;
        }
      inner += off;
    }
    total += coef * fm_int[static_cast<std::size_t>(m - r)] * inner;
  }
  return total / rising_factorial(theta, m + 2);
}

}  // namespace dfcalc
