#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

#include <gmpxx.h>

#include "sdkex/core.hpp"
#include "sdkex/groupring.hpp"

namespace sdkex::attack {

struct AttackResult {
    std::optional<mpz_class> recovered;
    std::uint64_t trials = 0;
    std::int64_t elapsed_ms = 0;
};

// Linear scan for the private exponent: walks transmissions incrementally,
// one semidirect multiply per candidate, and returns the first m' whose
// transmission equals the intercepted element. Any exponent with an equal
// transmission is accepted.
template <Platform P>
AttackResult exponent_bruteforce(const P& platform, const typename P::Element& g,
                                 const typename P::Endo& phi,
                                 const typename P::Element& intercepted, std::uint64_t bound) {
    if (bound < 1) throw ParamError("attack: bound must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    AttackResult result;
    SemidirectPair<P> base{g, phi, 1};
    SemidirectPair<P> cur = base;
    for (std::uint64_t m = 1; m <= bound; ++m) {
        ++result.trials;
        if (platform.eq(cur.elem, intercepted)) {
            result.recovered = mpz_class(static_cast<unsigned long>(m));
            break;
        }
        if (m < bound) cur = sd_multiply(platform, cur, base);
    }
    result.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return result;
}

struct QuadrupleAttackResult {
    std::optional<groupring::Matrix> key_guess;
    AttackResult exponent_search;
    bool commuting_shortcut = false;
};

// Tries to recover K = H^{-(m+n)} (HM)^{m+n} from (H, M, A, B). When H and
// HM commute, K is just A * B and no search is needed; otherwise m is
// brute-forced from A and combined with B the way Alice combines hers.
inline QuadrupleAttackResult key_from_quadruple(const groupring::MatrixPlatform& platform,
                                                const groupring::Matrix& m,
                                                const groupring::Matrix& a,
                                                const groupring::Matrix& b, std::uint64_t bound) {
    QuadrupleAttackResult out;
    if (groupring::commute_check(platform.h(), m)) {
        out.commuting_shortcut = true;
        out.key_guess = mat_multiply(a, b);
        return out;
    }
    out.exponent_search = exponent_bruteforce(platform, m, platform.base_endo(), a, bound);
    if (out.exponent_search.recovered)
        out.key_guess = derive_shared_key(platform, b, *out.exponent_search.recovered, m,
                                          platform.base_endo());
    return out;
}

} // namespace sdkex::attack
