#pragma once

#include <vector>

#include "tropmat/rational.hpp"

namespace tropmat {

// Girard-Newton recursions relating Chern classes and Chern characters,
// evaluated in an arbitrary commutative Q-algebra. Elem needs ring + and *,
// and scalar multiplication Rat * Elem. Sequences are 1-based internally:
// input vectors hold x_1..x_k at indices 0..k-1, missing entries are zero.

namespace detail {
template <typename Elem>
Elem seq_at(const std::vector<Elem>& x, int i, const Elem& zero) {
  return (i >= 1 && i <= static_cast<int>(x.size())) ? x[i - 1] : zero;
}
}  // namespace detail

// p_i = x_1 p_{i-1} - x_2 p_{i-2} + ... + (-1)^i x_{i-1} p_1 + (-1)^{i+1} i x_i
template <typename Elem>
std::vector<Elem> newton_p(const std::vector<Elem>& x, int top, const Elem& zero) {
  std::vector<Elem> p;  // p[i-1] = p_i
  for (int i = 1; i <= top; ++i) {
    Elem acc = zero;
    for (int j = 1; j < i; ++j) {
      Elem term = detail::seq_at(x, j, zero) * p[i - j - 1];
      acc = acc + (j % 2 == 1 ? Rat(1) : Rat(-1)) * term;
    }
    acc = acc + Rat((i % 2 == 1 ? 1 : -1) * i) * detail::seq_at(x, i, zero);
    p.push_back(acc);
  }
  return p;
}

// (-1)^{i+1} i q_i = x_i - x_{i-1} q_1 + x_{i-2} q_2 - ... + (-1)^{i-1} x_1 q_{i-1}
template <typename Elem>
std::vector<Elem> newton_q(const std::vector<Elem>& x, int top, const Elem& zero) {
  std::vector<Elem> q;  // q[i-1] = q_i
  for (int i = 1; i <= top; ++i) {
    Elem acc = detail::seq_at(x, i, zero);
    for (int j = 1; j < i; ++j) {
      Elem term = detail::seq_at(x, i - j, zero) * q[j - 1];
      acc = acc + (j % 2 == 1 ? Rat(-1) : Rat(1)) * term;
    }
    Rat lead = Rat((i % 2 == 1 ? 1 : -1)) / Rat(i);
    q.push_back(lead * acc);
  }
  return q;
}

// ch_i = p_i(c_1,..,c_i) / i! for i = 1..top; ch_0 = rank is the caller's.
template <typename Elem>
std::vector<Elem> chern_character_positive(const std::vector<Elem>& chern, int top,
                                           const Elem& zero) {
  std::vector<Elem> p = newton_p(chern, top, zero);
  Rat fact(1);
  for (int i = 1; i <= top; ++i) {
    fact *= i;
    p[i - 1] = (Rat(1) / fact) * p[i - 1];
  }
  return p;
}

// c_i = q_i(1! ch_1, 2! ch_2, ..., i! ch_i)
template <typename Elem>
std::vector<Elem> chern_from_character(const std::vector<Elem>& ch, int top,
                                       const Elem& zero) {
  std::vector<Elem> scaled;
  Rat fact(1);
  for (int i = 1; i <= static_cast<int>(ch.size()); ++i) {
    fact *= i;
    scaled.push_back(fact * ch[i - 1]);
  }
  return newton_q(scaled, top, zero);
}

// q_{bundle_rank}(1! ch_1, 2! ch_2, ...): the top Chern class of a bundle of
// the given rank with the given positive-degree Chern character.
template <typename Elem>
Elem top_chern_from_character(const std::vector<Elem>& ch, int bundle_rank,
                              const Elem& zero, const Elem& one) {
  check(bundle_rank >= 0, errc::out_of_range, "bundle rank must be nonnegative");
  if (bundle_rank == 0) return one;
  std::vector<Elem> c = chern_from_character(ch, bundle_rank, zero);
  return c[bundle_rank - 1];
}

}  // namespace tropmat
