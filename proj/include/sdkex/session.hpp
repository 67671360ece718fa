#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <utility>
#include <variant>

#include <gmpxx.h>

#include "sdkex/attack.hpp"
#include "sdkex/bigint.hpp"
#include "sdkex/core.hpp"
#include "sdkex/errors.hpp"
#include "sdkex/groupring.hpp"
#include "sdkex/kdf.hpp"
#include "sdkex/modp.hpp"
#include "sdkex/nilpotent.hpp"
#include "sdkex/wire.hpp"

namespace sdkex::session {

struct ModPConfig {
    modp::Params params;
    unsigned exponent_bits;
};

struct MatrixConfig {
    std::shared_ptr<const groupring::RingContext> ctx;
    std::size_t dim;
    groupring::Matrix m;
    groupring::Matrix h;
    groupring::Matrix hinv;
    unsigned exponent_bits;
};

struct NilpotentConfig {
    std::shared_ptr<const nilpotent::Params> params;
    nilpotent::NormalForm g;
    nilpotent::GenMap phi;
    unsigned exponent_bits;
};

// Public session parameters: the platform, the base element g, the public
// endomorphism, and the bit length of private exponents. Validated on
// construction; in particular a matrix parameter set where H and HM commute
// is rejected, since the key would then be the product of the two
// transmissions.
class ParamSet {
public:
    explicit ParamSet(ModPConfig cfg) : cfg_(std::move(cfg)) {
        check_bits(std::get<ModPConfig>(cfg_).exponent_bits);
    }

    explicit ParamSet(MatrixConfig cfg) : cfg_(std::move(cfg)) {
        const auto& c = std::get<MatrixConfig>(cfg_);
        check_bits(c.exponent_bits);
        if (!groupring::verify_invertible(c.h, c.hinv))
            throw ParamError("param set: H * Hinv != I");
        if (groupring::commute_check(c.h, c.m))
            throw ParamError("param set: H and HM commute; insecure parameters rejected");
    }

    explicit ParamSet(NilpotentConfig cfg) : cfg_(std::move(cfg)) {
        const auto& c = std::get<NilpotentConfig>(cfg_);
        check_bits(c.exponent_bits);
        if (c.phi.images.size() != c.params->r)
            throw ParamError("param set: generator map arity mismatch");
    }

    wire::PlatformId platform_id() const {
        if (std::holds_alternative<ModPConfig>(cfg_)) return wire::PlatformId::ModP;
        if (std::holds_alternative<MatrixConfig>(cfg_)) return wire::PlatformId::MatrixGroupRing;
        return wire::PlatformId::Nilpotent;
    }

    unsigned exponent_bits() const {
        return std::visit([](const auto& c) { return c.exponent_bits; }, cfg_);
    }

    std::size_t element_width() const {
        if (const auto* c = std::get_if<ModPConfig>(&cfg_))
            return modp::ModPPlatform(c->params).element_width();
        if (const auto* c = std::get_if<MatrixConfig>(&cfg_))
            return c->dim * c->dim * c->ctx->table.order;
        return nilpotent::NilpotentPlatform(std::get<NilpotentConfig>(cfg_).params).element_width();
    }

    Bytes transmission_bytes(const mpz_class& exponent) const {
        return std::visit(
            [&](const auto& c) {
                auto [pf, g, phi] = instantiate(c);
                return pf.serialize(transmission(pf, g, phi, exponent));
            },
            cfg_);
    }

    Bytes shared_key_bytes(const Bytes& received, const mpz_class& exponent) const {
        return std::visit(
            [&](const auto& c) {
                auto [pf, g, phi] = instantiate(c);
                auto peer = pf.deserialize(received);
                return pf.serialize(derive_shared_key(pf, peer, exponent, g, phi));
            },
            cfg_);
    }

    // transmission_bytes with cost instrumentation, for the bench command.
    Bytes transmission_with_counter(const mpz_class& exponent, MultCounter* counter) const {
        return std::visit(
            [&](const auto& c) {
                auto [pf, g, phi] = instantiate(c);
                return pf.serialize(transmission(pf, g, phi, exponent, counter));
            },
            cfg_);
    }

    // Brute-force the private exponent behind an intercepted transmission.
    attack::AttackResult attack_exponent(const Bytes& intercepted, std::uint64_t bound) const {
        return std::visit(
            [&](const auto& c) {
                auto [pf, g, phi] = instantiate(c);
                return attack::exponent_bruteforce(pf, g, phi, pf.deserialize(intercepted), bound);
            },
            cfg_);
    }

    const ModPConfig& modp_config() const { return std::get<ModPConfig>(cfg_); }
    const MatrixConfig& matrix_config() const { return std::get<MatrixConfig>(cfg_); }
    const NilpotentConfig& nilpotent_config() const { return std::get<NilpotentConfig>(cfg_); }

private:
    static void check_bits(unsigned t) {
        if (t < 2 || t > 4096) throw ParamError("param set: exponent bit length out of range");
    }

    static std::tuple<modp::ModPPlatform, mpz_class, modp::Endo> instantiate(const ModPConfig& c) {
        modp::ModPPlatform pf(c.params);
        return {pf, c.params.g, pf.base_endo()};
    }
    static std::tuple<groupring::MatrixPlatform, groupring::Matrix, groupring::InnerAutoHandle>
    instantiate(const MatrixConfig& c) {
        groupring::MatrixPlatform pf(c.ctx, c.dim, c.h, c.hinv);
        return {pf, c.m, pf.base_endo()};
    }
    static std::tuple<nilpotent::NilpotentPlatform, nilpotent::NormalForm, nilpotent::GenMap>
    instantiate(const NilpotentConfig& c) {
        nilpotent::NilpotentPlatform pf(c.params);
        return {pf, c.g, c.phi};
    }

    std::variant<ModPConfig, MatrixConfig, NilpotentConfig> cfg_;
};

enum class Phase { Created, Sent, Received, Completed, Failed };

// One endpoint of the exchange. Phase transitions: initiator
// Created -> Sent -> Completed; responder Created -> Received -> Sent ->
// Completed. Anything else fails the session.
class SessionState {
public:
    SessionState(std::shared_ptr<const ParamSet> params, wire::Role role, Rng& rng)
        : params_(std::move(params)), role_(role) {
        const unsigned t = params_->exponent_bits();
        mpz_class lo = mpz_class(1) << (t - 1);
        mpz_class hi = (mpz_class(1) << t) - 1;
        exponent_ = rng.between(lo, hi);
        phase_ = Phase::Created;
    }

    wire::Role role() const { return role_; }
    Phase phase() const { return phase_; }
    const mpz_class& exponent() const { return exponent_; }
    const std::shared_ptr<const ParamSet>& params() const { return params_; }

    // Set iff the session completed.
    const std::optional<Key256>& derived_key() const { return key_; }

    // True when the peer echoed our own transmission back; the keys still
    // "agree" but the transcript is degenerate.
    bool reflection_detected() const { return reflected_; }

    wire::Message produce_message() {
        const bool ok = (role_ == wire::Role::Initiator && phase_ == Phase::Created) ||
                        (role_ == wire::Role::Responder && phase_ == Phase::Received);
        if (!ok) {
            phase_ = Phase::Failed;
            throw PhaseError("produce_message: wrong phase");
        }
        sent_payload_ = params_->transmission_bytes(exponent_);
        wire::Message msg{params_->platform_id(), role_, sent_payload_};
        phase_ = Phase::Sent;
        if (role_ == wire::Role::Responder) complete();
        return msg;
    }

    void consume_message(const wire::Message& msg) {
        const bool ok = (role_ == wire::Role::Initiator && phase_ == Phase::Sent) ||
                        (role_ == wire::Role::Responder && phase_ == Phase::Created);
        if (!ok) {
            phase_ = Phase::Failed;
            throw PhaseError("consume_message: wrong phase");
        }
        try {
            if (msg.platform != params_->platform_id())
                throw WireError("consume_message: platform id mismatch");
            if (msg.payload.size() != params_->element_width())
                throw WireError("consume_message: payload has wrong width");
            peer_payload_ = msg.payload;
            if (!sent_payload_.empty() && peer_payload_ == sent_payload_) reflected_ = true;
            if (role_ == wire::Role::Initiator) {
                complete();
            } else {
                phase_ = Phase::Received;
            }
        } catch (...) {
            phase_ = Phase::Failed;
            throw;
        }
    }

private:
    void complete() {
        Bytes key_elem = params_->shared_key_bytes(peer_payload_, exponent_);
        key_ = kdf(params_->platform_id(), key_elem);
        phase_ = Phase::Completed;
    }

    std::shared_ptr<const ParamSet> params_;
    wire::Role role_;
    mpz_class exponent_;
    Phase phase_ = Phase::Created;
    Bytes sent_payload_;
    Bytes peer_payload_;
    std::optional<Key256> key_;
    bool reflected_ = false;
};

// Byte-stream transport abstraction for run_handshake. recv_exact must
// either return exactly n bytes or throw TransportError.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(const Bytes& data) = 0;
    virtual Bytes recv_exact(std::size_t n) = 0;
};

inline wire::Message recv_message(Transport& t) {
    Bytes header = t.recv_exact(wire::kHeaderSize);
    const std::uint32_t len = (std::uint32_t(header[7]) << 24) | (std::uint32_t(header[8]) << 16) |
                              (std::uint32_t(header[9]) << 8) | std::uint32_t(header[10]);
    Bytes payload = t.recv_exact(len);
    header.insert(header.end(), payload.begin(), payload.end());
    return wire::decode(header);
}

// One round trip, initiator sends first. Returns the 32-byte derived key.
inline Key256 run_handshake(Transport& transport, SessionState& state) {
    if (state.role() == wire::Role::Initiator) {
        transport.send(wire::encode(state.produce_message()));
        state.consume_message(recv_message(transport));
    } else {
        state.consume_message(recv_message(transport));
        transport.send(wire::encode(state.produce_message()));
    }
    return *state.derived_key();
}

// In-memory blocking loopback pair for tests and the selftest command. Each
// endpoint runs on its own thread; recv blocks until the peer has sent
// enough bytes or the timeout expires.
class LoopbackTransport final : public Transport {
public:
    static std::pair<std::shared_ptr<LoopbackTransport>, std::shared_ptr<LoopbackTransport>>
    make_linked_pair(std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
        auto a = std::shared_ptr<LoopbackTransport>(new LoopbackTransport(timeout));
        auto b = std::shared_ptr<LoopbackTransport>(new LoopbackTransport(timeout));
        a->peer_ = b;
        b->peer_ = a;
        return {a, b};
    }

    void send(const Bytes& data) override {
        auto p = peer_.lock();
        if (!p) throw TransportError("loopback: peer gone");
        {
            std::lock_guard lock(p->mu_);
            p->inbox_.insert(p->inbox_.end(), data.begin(), data.end());
        }
        p->cv_.notify_all();
    }

    Bytes recv_exact(std::size_t n) override {
        std::unique_lock lock(mu_);
        if (!cv_.wait_for(lock, timeout_, [&] { return inbox_.size() >= n; }))
            throw TransportError("loopback: receive timeout");
        Bytes out(inbox_.begin(), inbox_.begin() + n);
        inbox_.erase(inbox_.begin(), inbox_.begin() + n);
        return out;
    }

private:
    explicit LoopbackTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

    std::weak_ptr<LoopbackTransport> peer_;
    std::mutex mu_;
    std::condition_variable cv_;
    Bytes inbox_;
    std::chrono::milliseconds timeout_;
};

} // namespace sdkex::session
