// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each, nonzero exit if anything fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "sdkex/sdkex.hpp"

using namespace sdkex;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, double seconds) {
    std::printf("%s  criterion %d: %-42s (%.2fs)\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                seconds);
    if (!ok) ++failures;
}

void run(int number, const std::string& name, const std::function<bool()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body();
    } catch (const std::exception& e) {
        std::printf("  exception: %s\n", e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(number, name, ok, secs);
}

bool session_keys_agree(const std::shared_ptr<const session::ParamSet>& ps, std::uint64_t seed) {
    Rng ra(seed), rb(seed ^ 0x9e3779b97f4a7c15ull);
    session::SessionState alice(ps, wire::Role::Initiator, ra);
    session::SessionState bob(ps, wire::Role::Responder, rb);
    bob.consume_message(alice.produce_message());
    alice.consume_message(bob.produce_message());
    return alice.derived_key() && bob.derived_key() && *alice.derived_key() == *bob.derived_key();
}

// --- criterion 1: key agreement, 100 seeded sessions per platform ---------

bool criterion_key_agreement() {
    // modp, p < 2^31
    {
        auto ps = std::make_shared<const session::ParamSet>(
            session::ModPConfig{modp::Params(2147483647, 16807, 65539), 30});
        for (std::uint64_t s = 0; s < 100; ++s)
            if (!session_keys_agree(ps, 1000 + s)) return false;
    }
    // matrix, 3x3 over Z_7[A_5], m, n <= 1000 (t = 10 keeps exponents in [512, 1023])
    {
        auto ctx = groupring::RingContext::make(GroupTable::alternating(5), 7);
        Rng rng(2);
        auto [h, hinv] = groupring::sample_invertible(ctx, 3, rng);
        auto m = groupring::random_element_matrix(ctx, 3, rng);
        while (groupring::commute_check(h, m)) m = groupring::random_element_matrix(ctx, 3, rng);
        auto ps = std::make_shared<const session::ParamSet>(
            session::MatrixConfig{ctx, 3, m, h, hinv, 10});
        for (std::uint64_t s = 0; s < 100; ++s)
            if (!session_keys_agree(ps, 2000 + s)) return false;
    }
    // nilpotent, p = 7, r = 3, m, n <= 10^6 (t = 19)
    {
        auto params = nilpotent::Params::make(7, 3);
        Rng rng(3);
        auto phi = nilpotent::sample_large_order_automorphism(params, rng, 16);
        nilpotent::NormalForm g(params);
        for (std::size_t i = 0; i < params->r; ++i) g.set_alpha(i, rng.below(params->psq));
        auto ps = std::make_shared<const session::ParamSet>(
            session::NilpotentConfig{params, std::move(g), std::move(phi), 19});
        for (std::uint64_t s = 0; s < 100; ++s)
            if (!session_keys_agree(ps, 3000 + s)) return false;
    }
    return true;
}

// --- criterion 2: modp closed form, 1000 random tuples --------------------

bool criterion_modp_closed_form() {
    Rng rng(20);
    for (int it = 0; it < 1000; ++it) {
        mpz_class p;
        mpz_nextprime(p.get_mpz_t(),
                      mpz_class(rng.below((std::uint64_t(1) << 31) - 64) + 5).get_mpz_t());
        modp::Params params(p, rng.between(2, p - 1), rng.between(2, (1 << 16) - 1));
        modp::ModPPlatform pf(params);
        auto phi = pf.base_endo();
        mpz_class m((unsigned long)(1 + rng.below(std::uint64_t(1) << 20)));
        mpz_class n((unsigned long)(1 + rng.below(std::uint64_t(1) << 20)));
        if (transmission(pf, params.g, phi, m) != modp::closed_form(params, m)) return false;
        mpz_class b = transmission(pf, params.g, phi, n);
        if (derive_shared_key(pf, b, m, params.g, phi) != modp::closed_form(params, mpz_class(m + n)))
            return false;
    }
    return true;
}

// --- criterion 3: matrix closed form, 50 random sessions ------------------

bool criterion_matrix_closed_form() {
    auto ctx = groupring::RingContext::make(GroupTable::alternating(5), 7);
    Rng rng(30);
    for (int it = 0; it < 50; ++it) {
        auto [h, hinv] = groupring::sample_invertible(ctx, 3, rng);
        auto m = groupring::random_element_matrix(ctx, 3, rng);
        groupring::MatrixPlatform pf(ctx, 3, h, hinv);
        auto phi = pf.base_endo();
        mpz_class me((unsigned long)(1 + rng.below(std::uint64_t(200))));
        mpz_class ne((unsigned long)(1 + rng.below(std::uint64_t(200))));
        auto a = transmission(pf, m, phi, me);
        if (!(a == groupring::matrix_closed_form(h, hinv, m, me))) return false;
        auto b = transmission(pf, m, phi, ne);
        auto key = derive_shared_key(pf, b, me, m, phi);
        if (!(key == groupring::matrix_closed_form(h, hinv, m, mpz_class(me + ne)))) return false;
    }
    return true;
}

// --- criterion 4: nilpotent faithfulness via unitriangular matrices -------

bool criterion_nilpotent_faithfulness() {
    auto params = nilpotent::Params::make(3, 2);
    const mpz_class mod = params->psq;
    Rng rng(40);
    for (int it = 0; it < 1000; ++it) {
        nilpotent::NormalForm u(params), v(params);
        u.set_alpha(0, rng.below(params->psq));
        u.set_alpha(1, rng.below(params->psq));
        u.set_beta(0, 1, rng.below(params->psq));
        v.set_alpha(0, rng.below(params->psq));
        v.set_alpha(1, rng.below(params->psq));
        v.set_beta(0, 1, rng.below(params->psq));
        if (!(oracles::uni3_image(nf_multiply(u, v), mod) ==
              oracles::uni3_mul(oracles::uni3_image(u, mod), oracles::uni3_image(v, mod), mod)))
            return false;
    }
    std::set<std::tuple<long, long, long>> images;
    for (unsigned a1 = 0; a1 < 9; ++a1)
        for (unsigned a2 = 0; a2 < 9; ++a2)
            for (unsigned b = 0; b < 9; ++b) {
                nilpotent::NormalForm u(params);
                u.set_alpha(0, a1);
                u.set_alpha(1, a2);
                u.set_beta(0, 1, b);
                auto img = oracles::uni3_image(u, mod);
                images.insert({img.a.get_si(), img.b.get_si(), img.c.get_si()});
            }
    return images.size() == 729; // p^{r^2+r} at p=3, r=2, with equality
}

// --- criterion 5: class-2 identity suite -----------------------------------

bool criterion_class2_identities() {
    for (unsigned long pv : {5ul, 7ul}) {
        auto params = nilpotent::Params::make(pv, 3);
        Rng rng(50 + pv);
        auto random_nf = [&] {
            nilpotent::NormalForm u(params);
            for (std::size_t i = 0; i < params->r; ++i) u.set_alpha(i, rng.below(params->psq));
            for (std::size_t i = 0; i < params->r; ++i)
                for (std::size_t j = i + 1; j < params->r; ++j)
                    u.set_beta(i, j, rng.below(params->psq));
            return u;
        };
        for (int it = 0; it < 1000; ++it) {
            // (1) centrality
            nilpotent::NormalForm u = random_nf();
            nilpotent::NormalForm c = random_nf();
            for (std::size_t i = 0; i < params->r; ++i) c.set_alpha(i, 0);
            if (!(nf_multiply(c, u) == nf_multiply(u, c))) return false;
            // (2) bilinearity
            nilpotent::NormalForm v = random_nf();
            nilpotent::NormalForm w = random_nf();
            if (!(nf_commutator(nf_multiply(u, v), w) ==
                  nf_multiply(nf_commutator(u, w), nf_commutator(v, w))))
                return false;
            if (!(nf_commutator(u, nf_multiply(v, w)) ==
                  nf_multiply(nf_commutator(u, v), nf_commutator(u, w))))
                return false;
            // (3) the (ab)^n law, n <= 50
            mpz_class n((unsigned long)(1 + rng.below(std::uint64_t(50))));
            if (!(nf_power(nf_multiply(u, v), n) ==
                  nf_multiply(nf_multiply(nf_power(u, n), nf_power(v, n)),
                              nf_power(nf_commutator(v, u), mpz_class(n * (n - 1) / 2)))))
                return false;
        }
    }
    return true;
}

// --- criterion 6: O(log n) cost bound on every platform --------------------

bool criterion_cost_bound() {
    auto check = [](auto& pf, const auto& g, const auto& phi) {
        for (unsigned t = 8; t <= 256; t *= 2) {
            MultCounter counter;
            sd_power(pf, g, phi, mpz_class(mpz_class(1) << t), &counter);
            if (counter.group_mults > 2 * t + 2) return false;
        }
        return true;
    };
    {
        modp::ModPPlatform pf(modp::Params(2147483647, 16807, 65539));
        if (!check(pf, mpz_class(16807), pf.base_endo())) return false;
    }
    {
        auto ctx = groupring::RingContext::make(GroupTable::alternating(5), 7);
        Rng rng(60);
        auto [h, hinv] = groupring::sample_invertible(ctx, 3, rng);
        auto m = groupring::random_element_matrix(ctx, 3, rng);
        groupring::MatrixPlatform pf(ctx, 3, h, hinv);
        auto phi = pf.base_endo();
        if (!check(pf, m, phi)) return false;
    }
    {
        auto params = nilpotent::Params::make(7, 3);
        Rng rng(61);
        auto phi = nilpotent::sample_large_order_automorphism(params, rng, 16);
        nilpotent::NormalForm g(params);
        for (std::size_t i = 0; i < params->r; ++i) g.set_alpha(i, rng.below(params->psq));
        nilpotent::NilpotentPlatform pf(params);
        if (!check(pf, g, phi)) return false;
    }
    return true;
}

// --- criterion 7: attack-oracle sanity --------------------------------------

bool criterion_attack_oracles() {
    // planted exponent m <= 10^4 on toy matrix parameters
    auto ctx = groupring::RingContext::make(GroupTable::cyclic(2), 3);
    Rng rng(70);
    auto [h, hinv] = groupring::sample_invertible(ctx, 2, rng);
    auto m = groupring::random_element_matrix(ctx, 2, rng);
    while (groupring::commute_check(h, m)) m = groupring::random_element_matrix(ctx, 2, rng);
    groupring::MatrixPlatform pf(ctx, 2, h, hinv);
    auto phi = pf.base_endo();
    const mpz_class planted = 9973;
    auto intercepted = transmission(pf, m, phi, planted);
    auto r = attack::exponent_bruteforce(pf, m, phi, intercepted, 10000);
    if (!r.recovered) return false;
    if (!(transmission(pf, m, phi, *r.recovered) == intercepted)) return false;
    if (r.elapsed_ms > 30000) return false;

    // modp variant of the same interception
    modp::ModPPlatform mp(modp::Params(1000003, 2, 5));
    auto mintercepted = transmission(mp, mpz_class(2), mp.base_endo(), planted);
    auto mr = attack::exponent_bruteforce(mp, mpz_class(2), mp.base_endo(), mintercepted, 10000);
    if (!mr.recovered || transmission(mp, mpz_class(2), mp.base_endo(), *mr.recovered) != mintercepted)
        return false;

    // commuting degeneracy reproduces the key with zero search
    auto id = groupring::Matrix::identity(ctx, 2);
    groupring::MatrixPlatform commuting(ctx, 2, id, id);
    auto cphi = commuting.base_endo();
    auto a = transmission(commuting, m, cphi, mpz_class(3));
    auto b = transmission(commuting, m, cphi, mpz_class(4));
    auto honest = derive_shared_key(commuting, b, mpz_class(3), m, cphi);
    auto qr = attack::key_from_quadruple(commuting, m, a, b, 50);
    return qr.commuting_shortcut && qr.exponent_search.trials == 0 && qr.key_guess &&
           *qr.key_guess == honest;
}

// --- criterion 8: wire conformance ------------------------------------------

bool criterion_wire_conformance() {
    // golden vectors, captured once and frozen
    struct Golden {
        const char* name;
        std::function<wire::Message()> build;
        const char* digest_hex; // SHA-256 of the encoded message
        const char* prefix_hex; // first bytes of the encoding
    };

    auto modp_msg = [] {
        session::ModPConfig cfg{modp::Params(11, 2, 3), 2};
        auto ps = std::make_shared<const session::ParamSet>(cfg);
        return wire::Message{wire::PlatformId::ModP, wire::Role::Initiator,
                             ps->transmission_bytes(2)};
    };
    auto matrix_msg = [] {
        auto ctx = groupring::RingContext::make(GroupTable::alternating(5), 7);
        Rng rng(80);
        auto [h, hinv] = groupring::sample_invertible(ctx, 3, rng);
        auto m = groupring::random_element_matrix(ctx, 3, rng);
        groupring::MatrixPlatform pf(ctx, 3, h, hinv);
        return wire::Message{wire::PlatformId::MatrixGroupRing, wire::Role::Responder,
                             pf.serialize(transmission(pf, m, pf.base_endo(), 5))};
    };
    auto nilpotent_msg = [] {
        auto params = nilpotent::Params::make(7, 3);
        Rng rng(81);
        auto phi = nilpotent::sample_large_order_automorphism(params, rng, 16);
        nilpotent::NormalForm g(params);
        for (std::size_t i = 0; i < params->r; ++i) g.set_alpha(i, 1 + i);
        nilpotent::NilpotentPlatform pf(params);
        return wire::Message{wire::PlatformId::Nilpotent, wire::Role::Initiator,
                             pf.serialize(transmission(pf, g, phi, 12345))};
    };

    const std::vector<Golden> goldens = {
        {"modp", modp_msg,
         "9a2b0ff391c1754c5cdbd9c6786258c75c79bde513ebe23e8c4e2dcd707f743d",
         "53444b580101000000000105"},
        {"matrix", matrix_msg,
         "0a2f29d79e5f68d81dfcaa914e4a091d41f98abc36ecec909c89d8371ca3af5e",
         "53444b580102010000021c0505010506"},
        {"nilpotent", nilpotent_msg,
         "6b1f4458415ba28c3204a38f9c1d635d7871bf73b343e2621a7bbe2ca82fc9c0",
         "53444b58010300000000080003140a19"},
    };

    for (const auto& g : goldens) {
        wire::Message msg = g.build();
        Bytes encoded = wire::encode(msg);
        if (!(wire::decode(encoded) == msg)) return false;
        if (wire::encode(wire::decode(encoded)) != encoded) return false;
        Key256 digest;
        unsigned int len = 0;
        EVP_Digest(encoded.data(), encoded.size(), digest.data(), &len, EVP_sha256(), nullptr);
        if (hex(digest) != g.digest_hex) {
            std::printf("  %s golden digest mismatch: %s\n", g.name, hex(digest).c_str());
            return false;
        }
        const std::size_t prefix_len = std::string(g.prefix_hex).size() / 2;
        if (hex(encoded.data(), prefix_len) != g.prefix_hex) {
            std::printf("  %s golden prefix mismatch: %s\n", g.name,
                        hex(encoded.data(), prefix_len).c_str());
            return false;
        }
    }

    // malformed-header corpus
    Bytes good = wire::encode(modp_msg());
    auto rejected = [](Bytes b) {
        try {
            wire::decode(b);
            return false;
        } catch (const WireError&) {
            return true;
        }
    };
    Bytes trunc(good.begin(), good.begin() + 6);
    Bytes bad_magic = good;
    bad_magic[1] = 'x';
    Bytes bad_version = good;
    bad_version[4] = 99;
    Bytes bad_length = good;
    bad_length[10] = static_cast<std::uint8_t>(bad_length[10] + 1);
    return rejected(trunc) && rejected(bad_magic) && rejected(bad_version) && rejected(bad_length);
}

} // namespace

int main() {
    run(1, "key agreement, 100 sessions per platform", criterion_key_agreement);
    run(2, "modp closed-form oracle, 1000 tuples", criterion_modp_closed_form);
    run(3, "matrix closed-form oracle, 50 sessions", criterion_matrix_closed_form);
    run(4, "nilpotent faithfulness (729 distinct images)", criterion_nilpotent_faithfulness);
    run(5, "class-2 identity suite, p in {5,7}", criterion_class2_identities);
    run(6, "cost bound 2*log2(n)+2, n up to 2^256", criterion_cost_bound);
    run(7, "attack-oracle sanity", criterion_attack_oracles);
    run(8, "wire conformance and golden vectors", criterion_wire_conformance);
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
