#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "sdkex/errors.hpp"

namespace sdkex {

using Bytes = std::vector<std::uint8_t>;

// Deterministic randomness source. Every sampler in the library takes one of
// these explicitly so runs are reproducible from a seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(eng_);
    }

    // Uniform mpz in [0, bound), bound >= 1.
    mpz_class below(const mpz_class& bound) {
        const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        while (true) {
            mpz_class x = 0;
            for (std::size_t got = 0; got < bits; got += 64) {
                x <<= 64;
                x += mpz_class(static_cast<unsigned long>(eng_() >> 32)) << 32 |
                     static_cast<unsigned long>(eng_() & 0xffffffffu);
            }
            x >>= (64 * ((bits + 63) / 64) - bits);
            if (x < bound) return x;
        }
    }

    // Uniform in [lo, hi], lo <= hi.
    mpz_class between(const mpz_class& lo, const mpz_class& hi) {
        return lo + below(mpz_class(hi - lo + 1));
    }

private:
    std::mt19937_64 eng_;
};

inline mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

// Canonical residue in [0, mod).
inline mpz_class mod_reduce(const mpz_class& x, const mpz_class& mod) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return r;
}

// Miller-Rabin with 40 rounds; error probability below 2^-80.
inline bool is_probable_prime(const mpz_class& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

inline std::size_t byte_length(const mpz_class& n) {
    if (n == 0) return 1;
    return (mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8;
}

// Big-endian encoding, left-padded with zeros to `width` bytes.
inline Bytes to_bytes_be(const mpz_class& n, std::size_t width) {
    if (byte_length(n) > width || n < 0)
        throw ParamError("integer does not fit the requested width");
    Bytes out(width, 0);
    std::size_t count = 0;
    mpz_export(out.data() + (width - byte_length(n)), &count, 1, 1, 1, 0, n.get_mpz_t());
    return out;
}

inline mpz_class from_bytes_be(const std::uint8_t* data, std::size_t len) {
    mpz_class n;
    mpz_import(n.get_mpz_t(), len, 1, 1, 1, 0, data);
    return n;
}

inline mpz_class from_bytes_be(const Bytes& b) { return from_bytes_be(b.data(), b.size()); }

} // namespace sdkex
