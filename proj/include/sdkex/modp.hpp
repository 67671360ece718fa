#pragma once

#include <cstddef>
#include <utility>

#include <gmpxx.h>

#include "sdkex/bigint.hpp"
#include "sdkex/core.hpp"
#include "sdkex/errors.hpp"

namespace sdkex::modp {

// G = Z_p* with phi(h) = h^k. A handle for phi^j stores the single exponent
// k^j mod (p-1); composing handles multiplies exponents. All exponent
// arithmetic is mod p-1, valid on the whole group by Fermat.
struct Params {
    mpz_class p; // prime modulus
    mpz_class g; // base element, 1 < g < p
    mpz_class k; // endomorphism exponent, k >= 2

    Params(mpz_class p_, mpz_class g_, mpz_class k_)
        : p(std::move(p_)), g(std::move(g_)), k(std::move(k_)) {
        if (!is_probable_prime(p)) throw ParamError("modp: p is not prime");
        if (g <= 1 || g >= p) throw ParamError("modp: g out of range (1, p)");
        if (k < 2) throw ParamError("modp: k must be >= 2");
    }
};

struct Endo {
    mpz_class exponent; // in [0, p-2]; acts as h -> h^exponent
};

class ModPPlatform {
public:
    using Element = mpz_class;
    using Endo = modp::Endo;

    explicit ModPPlatform(Params params)
        : params_(std::move(params)), width_(byte_length(params_.p)) {}

    const Params& params() const { return params_; }

    bool eq(const Element& a, const Element& b) const { return a == b; }

    Element mul(const Element& a, const Element& b) const {
        return mod_reduce(a * b, params_.p);
    }

    Element apply(const Endo& e, const Element& h) const {
        return powmod(h, e.exponent, params_.p);
    }

    Endo compose(const Endo& a, const Endo& b) const {
        return {mod_reduce(a.exponent * b.exponent, mpz_class(params_.p - 1))};
    }

    Endo identity_endo() const { return {mpz_class(1)}; }

    // phi itself: h -> h^k.
    Endo base_endo() const { return {mod_reduce(params_.k, mpz_class(params_.p - 1))}; }

    Bytes serialize(const Element& x) const { return to_bytes_be(x, width_); }

    Element deserialize(const Bytes& b) const {
        if (b.size() != width_) throw WireError("modp: element has wrong width");
        mpz_class v = from_bytes_be(b);
        if (v < 1 || v >= params_.p) throw WireError("modp: element out of range");
        return v;
    }

    std::size_t element_width() const { return width_; }

private:
    Params params_;
    std::size_t width_;
};

// phi is an automorphism of Z_p* exactly when gcd(k, p-1) = 1.
inline bool is_automorphism(const Params& params) {
    mpz_class g;
    mpz_class pm1 = params.p - 1;
    mpz_gcd(g.get_mpz_t(), params.k.get_mpz_t(), pm1.get_mpz_t());
    return g == 1;
}

// 1 + k + ... + k^{m-1} mod `mod`, by doubling: S(2t) = S(t)*(1 + k^t),
// S(2t+1) = S(2t) + k^{2t}. Never divides by k-1.
inline mpz_class geometric_sum(const mpz_class& k, const mpz_class& m, const mpz_class& mod) {
    mpz_class s = 0;  // S(t)
    mpz_class kp = 1; // k^t
    const std::size_t bits = (m == 0) ? 0 : mpz_sizeinbase(m.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        s = mod_reduce(s * (1 + kp), mod);
        kp = mod_reduce(kp * kp, mod);
        if (mpz_tstbit(m.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
            s = mod_reduce(s + kp, mod);
            kp = mod_reduce(kp * k, mod);
        }
    }
    return s;
}

// The transmission in closed form: g^{1 + k + ... + k^{m-1}} mod p.
inline mpz_class closed_form(const Params& params, const mpz_class& m) {
    if (m < 1) throw ParamError("modp: closed form requires m >= 1");
    mpz_class s = geometric_sum(params.k, m, mpz_class(params.p - 1));
    return powmod(params.g, s, params.p);
}

// This platform degenerates to the classic Diffie-Hellman structure: the
// derived key must equal the closed form at exponent m+n.
inline bool dh_equivalence_check(const Params& params, const mpz_class& m, const mpz_class& n) {
    if (m < 1 || n < 1) throw ParamError("modp: exponents must be >= 1");
    ModPPlatform pf(params);
    mpz_class b = transmission(pf, params.g, pf.base_endo(), n);
    mpz_class key = derive_shared_key(pf, b, m, params.g, pf.base_endo());
    return key == closed_form(params, mpz_class(m + n));
}

} // namespace sdkex::modp
