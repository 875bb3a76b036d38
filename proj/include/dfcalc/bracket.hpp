#pragma once

/**
 * The bracket measures rho^[n] on X^n:
 *
 *   rho^[n](f) = int ... int f(x_1..x_n)
 *                (rho + d_{x_1} + ... + d_{x_{n-1}})(dx_n) ... (rho + d_{x_1})(dx_2) rho(dx_1),
 *
 * computed by direct recursion over the atom tree (each chosen atom gains
 * one unit of weight for the deeper levels). Total mass is the rising
 * factorial theta^(n); the measure is permutation symmetric.
 *
 * bracket_sum is the generic form (integrand given as a callable on index
 * tuples); bracket_integrate contracts a dense tensor; bracket_materialize
 * returns the dense weight tensor, guarded by a memory cap since d^n grows.
 */

#include "dfcalc/measure.hpp"
#include "dfcalc/scalar.hpp"
#include "dfcalc/tensor.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace dfcalc {

inline constexpr std::size_t kDefaultMemoryCap = 10'000'000;  // tensor entries

namespace detail {

template <class S, class Fn>
void bracket_rec(std::vector<S>& w, int d, int depth, int order, std::vector<int>& idx,
                 const S& acc, Fn&& f, S& out) {
  if (depth == order) {
    out += acc * f(std::span<const int>(idx.data(), static_cast<std::size_t>(order)));
    return;
  }
  for (int x = 0; x < d; ++x) {
    auto xi = static_cast<std::size_t>(x);
    if (w[xi] == scalar_traits<S>::zero()) continue;  // massless subtree
    S acc2 = acc * w[xi];
    idx[static_cast<std::size_t>(depth)] = x;
    w[xi] += scalar_traits<S>::one();
    bracket_rec(w, d, depth + 1, order, idx, acc2, f, out);
    w[xi] -= scalar_traits<S>::one();
  }
}

}  // namespace detail

/// rho^[order](f) for a callable f : span<const int> -> S.
template <class S, class Fn>
S bracket_sum(const FiniteMeasure<S>& rho, int order, Fn&& f) {
  if (order < 0) throw std::invalid_argument("bracket_sum: negative order");
  if (order == 0) {
    // Convention: an order-0 function integrates to itself.
    std::vector<int> empty;
    return f(std::span<const int>(empty.data(), 0));
  }
  std::vector<S> w = rho.weights();
  std::vector<int> idx(static_cast<std::size_t>(order), 0);
  S out = scalar_traits<S>::zero();
  detail::bracket_rec(w, rho.dims(), 0, order, idx, scalar_traits<S>::one(), f, out);
  return out;
}

/// rho^[n](f) for a dense tensor f of order n.
template <class S>
S bracket_integrate(const FiniteMeasure<S>& rho, const TensorFn<S>& f) {
  if (f.order() == 0) return f.scalar();
  if (f.dims() != rho.dims()) throw std::invalid_argument("bracket_integrate: dims mismatch");
  return bracket_sum(rho, f.order(), [&](std::span<const int> idx) -> S { return f.at(idx); });
}

/// Dense weights of rho^[n]: W(x_1..x_n) = rho^[n]({(x_1..x_n)}).
template <class S>
TensorFn<S> bracket_materialize(const FiniteMeasure<S>& rho, int n,
                                std::size_t memory_cap = kDefaultMemoryCap) {
  if (n < 0) throw std::invalid_argument("bracket_materialize: negative order");
  std::size_t total = pow_sz(rho.dims(), n);
  if (total > memory_cap) throw std::length_error("bracket_materialize: d^n exceeds memory cap");
  TensorFn<S> W(n, rho.dims());
  if (n == 0) {
    W.values()[0] = scalar_traits<S>::one();
    return W;
  }
  std::vector<S> w = rho.weights();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const int d = rho.dims();
  // same recursion, writing leaf masses
  struct Rec {
    TensorFn<S>& W;
    std::vector<S>& w;
    std::vector<int>& idx;
    int d, n;
    void go(int depth, const S& acc) {
      if (depth == n) {
        W.at(std::span<const int>(idx.data(), static_cast<std::size_t>(n))) = acc;
        return;
      }
      for (int x = 0; x < d; ++x) {
        auto xi = static_cast<std::size_t>(x);
        if (w[xi] == scalar_traits<S>::zero()) continue;
        S acc2 = acc * w[xi];
        idx[static_cast<std::size_t>(depth)] = x;
        w[xi] += scalar_traits<S>::one();
        go(depth + 1, acc2);
        w[xi] -= scalar_traits<S>::one();
      }
    }
  } rec{W, w, idx, d, n};
  rec.go(0, scalar_traits<S>::one());
  return W;
}

}  // namespace dfcalc
