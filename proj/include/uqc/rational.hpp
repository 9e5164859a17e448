#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace uqc {

/// Exact rational scalar. All arithmetic in the engine is exact; no floating
/// point appears anywhere outside the CLI's optional decimal rendering.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline Rat rat_parse(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

/// Floor division helper for lattice arithmetic.
inline long imod(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace uqc
