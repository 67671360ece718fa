#pragma once

#include <concepts>
#include <cstdint>
#include <utility>

#include <gmpxx.h>

#include "sdkex/bigint.hpp"
#include "sdkex/errors.hpp"

namespace sdkex {

// Instrumentation for the O(log n) cost checks. Counts are cumulative over
// one instrumented call.
struct MultCounter {
    std::uint64_t group_mults = 0;
    std::uint64_t endo_applies = 0;
    std::uint64_t endo_composes = 0;
};

// Platform contract. A platform owns a (semi)group G and a family of
// composable endomorphism handles. Handles must compose in O(1) group work,
// not by repeated application, otherwise powering a pair cannot be O(log n).
//
// Required semantics, checked by the shared platform test suite:
//   - mul is associative;
//   - apply(e, mul(u, v)) == mul(apply(e, u), apply(e, v));
//   - compose(a, b) applied to u equals apply(a, apply(b, u)) -- with a
//     single base endomorphism and its powers the two orders coincide;
//   - deserialize(serialize(x)) == x and serialization is canonical.
template <typename P>
concept Platform = requires(const P& p, const typename P::Element& x,
                            const typename P::Endo& e, const Bytes& b) {
    { p.eq(x, x) } -> std::convertible_to<bool>;
    { p.mul(x, x) } -> std::same_as<typename P::Element>;
    { p.apply(e, x) } -> std::same_as<typename P::Element>;
    { p.compose(e, e) } -> std::same_as<typename P::Endo>;
    { p.identity_endo() } -> std::same_as<typename P::Endo>;
    { p.serialize(x) } -> std::same_as<Bytes>;
    { p.deserialize(b) } -> std::same_as<typename P::Element>;
    { p.element_width() } -> std::convertible_to<std::size_t>;
};

// A pair (g, phi^r). The handle is the r-th compositional power of the
// session's base endomorphism; `index` tracks r alongside it.
template <typename P>
struct SemidirectPair {
    typename P::Element elem;
    typename P::Endo endo;
    mpz_class index;
};

// (g, phi^r) * (h, phi^s) = (phi^s(g) * h, phi^{r+s}).
template <Platform P>
SemidirectPair<P> sd_multiply(const P& platform, const SemidirectPair<P>& x,
                              const SemidirectPair<P>& y, MultCounter* counter = nullptr) {
    typename P::Element moved = platform.apply(y.endo, x.elem);
    if (counter) ++counter->endo_applies;
    typename P::Element prod = platform.mul(moved, y.elem);
    if (counter) ++counter->group_mults;
    typename P::Endo composed = platform.compose(x.endo, y.endo);
    if (counter) ++counter->endo_composes;
    return {std::move(prod), std::move(composed), mpz_class(x.index + y.index)};
}

// (g, phi)^n by left-to-right square-and-multiply. Uses at most
// 2*floor(log2 n) + 2 group multiplications. n = 0 is rejected: semigroup
// platforms have no guaranteed identity to return.
template <Platform P>
SemidirectPair<P> sd_power(const P& platform, const typename P::Element& g,
                           const typename P::Endo& phi, const mpz_class& n,
                           MultCounter* counter = nullptr) {
    if (n < 1) throw ParamError("sd_power requires n >= 1");
    SemidirectPair<P> base{g, phi, 1};
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    SemidirectPair<P> acc = base;
    for (std::size_t i = bits - 1; i-- > 0;) {
        acc = sd_multiply(platform, acc, acc, counter);
        if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i)))
            acc = sd_multiply(platform, acc, base, counter);
    }
    return acc;
}

// The first component of (g, phi)^n -- the only datum a party transmits.
template <Platform P>
typename P::Element transmission(const P& platform, const typename P::Element& g,
                                 const typename P::Endo& phi, const mpz_class& n,
                                 MultCounter* counter = nullptr) {
    return sd_power(platform, g, phi, n, counter).elem;
}

// K = phi^own_n(received) * transmission(g, phi, own_n). When `received` is
// the peer's transmission, both sides obtain the first component of
// (g, phi)^{m+n}.
template <Platform P>
typename P::Element derive_shared_key(const P& platform, const typename P::Element& received,
                                      const mpz_class& own_n, const typename P::Element& g,
                                      const typename P::Endo& phi) {
    SemidirectPair<P> own = sd_power(platform, g, phi, own_n);
    return platform.mul(platform.apply(own.endo, received), own.elem);
}

} // namespace sdkex
