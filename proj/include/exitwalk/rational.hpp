#pragma once

#include <gmpxx.h>

#include <string>

namespace exitwalk {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(unsigned long base, unsigned long exp) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
    return r;
}

/// 3^(-e) as an exact rational.
inline Rat inv_pow3(unsigned long e) {
    Rat r(1, int_pow(3, e));
    r.canonicalize();
    return r;
}

inline Rat make_rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

/// Exact conversion; every double is a dyadic rational.
inline Rat rat_from_double(double x) {
    Rat r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

inline std::string num_str(const Rat& r) { return r.get_num().get_str(); }
inline std::string den_str(const Rat& r) { return r.get_den().get_str(); }
inline std::string rat_str(const Rat& r) { return num_str(r) + "/" + den_str(r); }

/// True iff den(r) divides 3^e (ProbVector denominator invariant).
inline bool denominator_divides_pow3(const Rat& r, unsigned long e) {
    Int p = int_pow(3, e);
    return mpz_divisible_p(p.get_mpz_t(), r.get_den().get_mpz_t()) != 0;
}

}  // namespace exitwalk
