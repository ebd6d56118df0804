#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "tropmat/errors.hpp"

namespace tropmat {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

inline Int rat_num(const Rat& q) { return numerator(q); }
inline Int rat_den(const Rat& q) { return denominator(q); }

inline int sign_of(const Rat& q) { return q.sign(); }
inline int sign_of(const Int& n) { return n.sign(); }

inline Int abs_int(const Int& n) { return n < 0 ? Int(-n) : n; }

inline Int gcd_int(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }

// gcd of absolute values; 0 for the zero vector
inline Int content(const IntVec& v) {
  Int g = 0;
  for (const auto& x : v) g = gcd_int(g, abs_int(x));
  return g;
}

inline IntVec primitive(const IntVec& v) {
  Int g = content(v);
  if (g == 0 || g == 1) return v;
  IntVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / g;
  return out;
}

inline bool is_zero(const IntVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline bool is_zero(const RatVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

// Canonical "p/q" form, denominator kept even when 1 so artifacts diff cleanly.
inline std::string rat_to_string(const Rat& q) {
  return rat_num(q).str() + "/" + rat_den(q).str();
}

inline Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    check(den != 0, errc::bad_input, "rational with zero denominator: " + s);
    return Rat(num, den);
  } catch (const error&) {
    throw;
  } catch (const std::exception&) {
    fail(errc::bad_input, "cannot parse rational: " + s);
  }
}

inline RatVec to_rat(const IntVec& v) {
  RatVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);
  return out;
}

// Clears denominators and divides by content; zero vector maps to itself.
inline IntVec to_primitive_int(const RatVec& v) {
  Int lcm = 1;
  for (const auto& q : v) lcm = lcm / gcd_int(lcm, rat_den(q)) * rat_den(q);
  IntVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = rat_num(v[i]) * (lcm / rat_den(v[i]));
  return primitive(out);
}

inline IntVec add(const IntVec& a, const IntVec& b) {
  IntVec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline IntVec scale(const Int& c, const IntVec& v) {
  IntVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

inline RatVec add(const RatVec& a, const RatVec& b) {
  RatVec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline RatVec scale(const Rat& c, const RatVec& v) {
  RatVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

}  // namespace tropmat
