#pragma once

#include <gmpxx.h>
#include <optional>
#include <stdexcept>
#include <string>

namespace tate {

using Int = mpz_class;
using Rat = mpq_class;

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// p-adic valuation of a nonzero integer
long valuation_int(const Int& a, long p);

// Sentinel for the valuation of zero.
inline constexpr long kValInfinity = LONG_MAX;

// p-adic valuation of an exact rational; kValInfinity for 0.
long valuation(const Rat& x, long p);

// x lies in O = Z_(p), i.e. its denominator is coprime to p.
bool is_p_integral(const Rat& x, long p);

// x is a unit of O = Z_(p).
bool is_p_unit(const Rat& x, long p);

Int pow_int(long base, unsigned long e);

// Element of K/O for O = Z_(p): num / p^exp + O with 0 <= num < p^exp,
// p coprime to num unless num = 0 (and then exp = 0).
struct MatlisValue {
    Int num;
    unsigned long exp = 0;

    bool is_zero() const { return num == 0; }
    bool operator==(const MatlisValue& o) const { return num == o.num && exp == o.exp; }
    bool operator!=(const MatlisValue& o) const { return !(*this == o); }
};

// Canonical representative of x + O in K/O.
MatlisValue matlis_reduce(const Rat& x, long p);

MatlisValue matlis_add(const MatlisValue& a, const MatlisValue& b, long p);

std::string matlis_to_string(const MatlisValue& v, long p);

// Parse "a/b" or "a"; result canonicalized.
Rat parse_rat(const std::string& s);

// "a/b" in lowest terms, "a" when the denominator is 1.
std::string rat_to_string(const Rat& x);

}  // namespace tate
