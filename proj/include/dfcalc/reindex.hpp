#pragma once

/**
 * Reindexed functions and Dirac-addition expansions.
 *
 * For f on X^m and pairwise distinct slots i_1..i_r in [m]:
 *
 *   f_{i_1..i_r}(y_1..y_m) evaluates f at the point whose i_k-th coordinate
 *   is y_k (k <= r) and whose remaining coordinates are filled with
 *   y_{r+1}..y_m in slot order.
 *
 *   f^k_{i_1..i_r}(x_1..x_k, z_1..z_{m-r}) sums f_{i_1..i_r}(x_{j_1}..x_{j_r}, z)
 *   over weakly increasing j_1 <= ... <= j_r in [k].
 *
 * These drive the closed-form expansion of (rho + d_{x_1}+...+d_{x_k})^[m](f)
 * as a sum of plain rho^[m-r] integrals, which must agree with integrating f
 * against the bracket measure of the shifted parameter measure.
 */

#include "dfcalc/bracket.hpp"
#include "dfcalc/measure.hpp"
#include "dfcalc/tensor.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace dfcalc {

namespace detail {
inline void check_distinct_slots(std::span<const int> slots, int m) {
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int i : slots) {
    if (i < 0 || i >= m) throw std::out_of_range("slot index out of range");
    if (seen[static_cast<std::size_t>(i)]) throw std::invalid_argument("repeated slot index");
    seen[static_cast<std::size_t>(i)] = true;
  }
}
}  // namespace detail

/// f_{i_1..i_r} as a dense tensor of the same order m. Slots are 0-based.
template <class S>
TensorFn<S> reindex(const TensorFn<S>& f, std::span<const int> slots) {
  const int m = f.order();
  const int r = static_cast<int>(slots.size());
  if (r > m) throw std::invalid_argument("reindex: more slots than arguments");
  detail::check_distinct_slots(slots, m);

  std::vector<int> rest;  // slots not in i_1..i_r, increasing
  {
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    for (int i : slots) used[static_cast<std::size_t>(i)] = true;
    for (int i = 0; i < m; ++i)
      if (!used[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  return TensorFn<S>::build(m, f.dims(), [&](std::span<const int> y) -> S {
    std::vector<int> arg(static_cast<std::size_t>(m), 0);
    for (int k = 0; k < r; ++k) arg[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])] = y[static_cast<std::size_t>(k)];
    for (int k = r; k < m; ++k) arg[static_cast<std::size_t>(rest[static_cast<std::size_t>(k - r)])] = y[static_cast<std::size_t>(k)];
    return f.at(std::span<const int>(arg));
  });
}

/// f^k_{i_1..i_r}(x_1..x_k, .) as a tensor of order m-r in the z-arguments
/// (order 0 when r = m).
template <class S>
TensorFn<S> dirac_index_sum(const TensorFn<S>& f, std::span<const int> slots,
                            std::span<const int> points) {
  const int m = f.order();
  const int r = static_cast<int>(slots.size());
  const int k = static_cast<int>(points.size());
  if (k < 1) throw std::invalid_argument("dirac_index_sum: needs at least one point");
  if (r < 1 || r > m) throw std::invalid_argument("dirac_index_sum: bad slot count");
  detail::check_distinct_slots(slots, m);

  TensorFn<S> acc(m - r, f.dims());
  // weakly increasing j_1 <= ... <= j_r over [k] (0-based)
  std::vector<int> j(static_cast<std::size_t>(r), 0);
  std::vector<int> atoms(static_cast<std::size_t>(r), 0);
  while (true) {
    for (int t = 0; t < r; ++t) atoms[static_cast<std::size_t>(t)] = points[static_cast<std::size_t>(j[static_cast<std::size_t>(t)])];
    acc += f.fix_positions(slots, atoms);
    // next weakly increasing tuple
    int pos = r - 1;
    while (pos >= 0 && j[static_cast<std::size_t>(pos)] == k - 1) --pos;
    if (pos < 0) break;
    int v = j[static_cast<std::size_t>(pos)] + 1;
    for (int t = pos; t < r; ++t) j[static_cast<std::size_t>(t)] = v;
  }
  return acc;
}

namespace detail {
/// Visits every pairwise-distinct r-tuple (i_1..i_r) from [m].
template <class Fn>
void for_each_distinct_tuple(int m, int r, Fn&& fn) {
  std::vector<int> tup(static_cast<std::size_t>(r), 0);
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  struct Rec {
    int m, r;
    std::vector<int>& tup;
    std::vector<bool>& used;
    Fn& fn;
    void go(int depth) {
      if (depth == r) {
        fn(std::span<const int>(tup.data(), static_cast<std::size_t>(r)));
        return;
      }
      for (int i = 0; i < m; ++i) {
        auto ii = static_cast<std::size_t>(i);
        if (used[ii]) continue;
        used[ii] = true;
        tup[static_cast<std::size_t>(depth)] = i;
        go(depth + 1);
        used[ii] = false;
      }
    }
  } rec{m, r, tup, used, fn};
  rec.go(0);
}
}  // namespace detail

/// (rho + d_{x_1} + ... + d_{x_k})^[m](f) via the closed-form expansion
/// over r, distinct slot tuples and weakly-increasing point tuples.
/// k = 0 falls back to rho^[m](f).
template <class S>
S add_diracs_expand(const FiniteMeasure<S>& rho, const TensorFn<S>& f,
                    std::span<const int> points) {
  if (f.dims() != rho.dims()) throw std::invalid_argument("add_diracs_expand: dims mismatch");
  const int m = f.order();
  S total = bracket_integrate(rho, f);
  if (points.empty() || m == 0) return total;
  for (int r = 1; r <= m; ++r) {
    detail::for_each_distinct_tuple(m, r, [&](std::span<const int> slots) {
      TensorFn<S> g = dirac_index_sum(f, slots, points);
      total += bracket_integrate(rho, g);
    });
  }
  return total;
}

}  // namespace dfcalc
