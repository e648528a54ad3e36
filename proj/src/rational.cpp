#include "tate/rational.hpp"

namespace tate {

long valuation_int(const Int& a, long p) {
    if (a == 0) throw error("valuation_int: zero");
    Int r = a;
    long v = 0;
    Int q, rem;
    while (true) {
        mpz_fdiv_qr_ui(q.get_mpz_t(), rem.get_mpz_t(), r.get_mpz_t(), p);
        if (rem != 0) break;
        r = q;
        ++v;
    }
    return v;
}

long valuation(const Rat& x, long p) {
    if (x == 0) return kValInfinity;
    return valuation_int(x.get_num(), p) - valuation_int(x.get_den(), p);
}

bool is_p_integral(const Rat& x, long p) {
    if (x == 0) return true;
    return mpz_divisible_ui_p(x.get_den().get_mpz_t(), p) == 0;
}

bool is_p_unit(const Rat& x, long p) { return x != 0 && valuation(x, p) == 0; }

Int pow_int(long base, unsigned long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, e);
    return r;
}

MatlisValue matlis_reduce(const Rat& x, long p) {
    if (x == 0) return {};
    const Int& den = x.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), p) == 0) return {};
    long k = valuation_int(den, p);
    Int pk = pow_int(p, static_cast<unsigned long>(k));
    Int dprime = den / pk;  // coprime to p, since x is in lowest terms
    Int dinv;
    if (mpz_invert(dinv.get_mpz_t(), dprime.get_mpz_t(), pk.get_mpz_t()) == 0)
        throw error("matlis_reduce: inversion failed");
    Int num = (x.get_num() % pk) * dinv % pk;
    if (num < 0) num += pk;
    if (num == 0) return {};
    return {num, static_cast<unsigned long>(k)};
}

MatlisValue matlis_add(const MatlisValue& a, const MatlisValue& b, long p) {
    Rat ra(a.num), rb(b.num);
    ra /= Rat(pow_int(p, a.exp));
    rb /= Rat(pow_int(p, b.exp));
    return matlis_reduce(ra + rb, p);
}

std::string matlis_to_string(const MatlisValue& v, long p) {
    if (v.is_zero()) return "0";
    return v.num.get_str() + "/" + pow_int(p, v.exp).get_str();
}

Rat parse_rat(const std::string& s) {
    Rat x;
    if (x.set_str(s, 10) != 0) throw error("parse_rat: bad rational '" + s + "'");
    if (x.get_den() == 0) throw error("parse_rat: zero denominator in '" + s + "'");
    x.canonicalize();
    return x;
}

std::string rat_to_string(const Rat& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

}  // namespace tate
