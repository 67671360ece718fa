// sdkex command line: selftest, params, exchange, bench, attack.
// Exit codes: 0 success, 1 assertion/attack failure, 2 usage/config error.

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sdkex/sdkex.hpp"

using namespace sdkex;

namespace {

// ---------------------------------------------------------------- transport

class TcpTransport final : public session::Transport {
public:
    explicit TcpTransport(int fd, int timeout_ms) : fd_(fd) {
        timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
        setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    }
    ~TcpTransport() override {
        if (fd_ >= 0) ::close(fd_);
    }
    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    void send(const Bytes& data) override {
        std::size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::send(fd_, data.data() + off, data.size() - off, 0);
            if (n <= 0) throw TransportError("send failed");
            off += static_cast<std::size_t>(n);
        }
    }

    Bytes recv_exact(std::size_t n) override {
        Bytes out(n);
        std::size_t off = 0;
        while (off < n) {
            ssize_t got = ::recv(fd_, out.data() + off, n - off, 0);
            if (got == 0) throw TransportError("peer closed the connection");
            if (got < 0) throw TransportError("receive failed or timed out");
            off += static_cast<std::size_t>(got);
        }
        return out;
    }

private:
    int fd_;
};

std::pair<std::string, std::string> split_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw ParamError("address must be host:port");
    return {addr.substr(0, colon), addr.substr(colon + 1)};
}

int tcp_listen_accept(const std::string& addr, int timeout_ms) {
    auto [host, port] = split_addr(addr);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &res) != 0)
        throw TransportError("cannot resolve listen address");
    int lfd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    int one = 1;
    setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (lfd < 0 || ::bind(lfd, res->ai_addr, res->ai_addrlen) != 0 || ::listen(lfd, 1) != 0) {
        freeaddrinfo(res);
        throw TransportError("cannot bind/listen on " + addr);
    }
    freeaddrinfo(res);
    timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
    setsockopt(lfd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    int fd = ::accept(lfd, nullptr, nullptr);
    ::close(lfd);
    if (fd < 0) throw TransportError("accept timed out");
    return fd;
}

int tcp_connect(const std::string& addr) {
    auto [host, port] = split_addr(addr);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0)
        throw TransportError("cannot resolve " + addr);
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    if (fd < 0) throw TransportError("cannot connect to " + addr);
    return fd;
}

// ------------------------------------------------------------------ helpers

session::ParamSet load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return config::load(buf.str());
}

std::shared_ptr<const session::ParamSet> generate_params(const std::string& platform,
                                                         std::uint64_t seed, unsigned t) {
    Rng rng(seed);
    if (platform == "modp") {
        // test-scale default; production configs would carry a 2048-bit prime
        mpz_class p;
        mpz_nextprime(p.get_mpz_t(),
                      mpz_class(rng.below((std::uint64_t(1) << 31) - 64) + (1 << 20)).get_mpz_t());
        mpz_class g = rng.between(2, p - 1);
        mpz_class k = rng.between(2, (1 << 16) - 1);
        return std::make_shared<const session::ParamSet>(
            session::ModPConfig{modp::Params(p, g, k), t ? t : 30});
    }
    if (platform == "matrix") {
        auto ctx = groupring::RingContext::make(GroupTable::alternating(5), 7);
        auto [h, hinv] = groupring::sample_invertible(ctx, 3, rng);
        auto m = groupring::random_element_matrix(ctx, 3, rng);
        while (groupring::commute_check(h, m)) m = groupring::random_element_matrix(ctx, 3, rng);
        return std::make_shared<const session::ParamSet>(
            session::MatrixConfig{ctx, 3, m, h, hinv, t ? t : 10});
    }
    if (platform == "nilpotent") {
        auto params = nilpotent::Params::make(7, 3);
        auto phi = nilpotent::sample_large_order_automorphism(params, rng, 16);
        nilpotent::NormalForm g(params);
        for (std::size_t i = 0; i < params->r; ++i) g.set_alpha(i, rng.below(params->psq));
        return std::make_shared<const session::ParamSet>(
            session::NilpotentConfig{params, std::move(g), std::move(phi), t ? t : 19});
    }
    throw ParamError("unknown platform '" + platform + "'");
}

// ----------------------------------------------------------------- selftest

struct Suite {
    std::string name;
    bool (*body)();
};

bool selftest_core() {
    modp::ModPPlatform pf(modp::Params(11, 2, 3));
    auto phi = pf.base_endo();
    if (transmission(pf, mpz_class(2), phi, 2) != 5) return false;
    if (derive_shared_key(pf, mpz_class(8), 2, mpz_class(2), phi) != 2) return false;
    MultCounter counter;
    sd_power(pf, mpz_class(2), phi, mpz_class(mpz_class(1) << 64), &counter);
    return counter.group_mults <= 130;
}

bool selftest_modp() {
    Rng rng(1);
    for (int it = 0; it < 50; ++it) {
        mpz_class p;
        mpz_nextprime(p.get_mpz_t(), mpz_class(rng.below(std::uint64_t(1) << 24) + 5).get_mpz_t());
        modp::Params params(p, rng.between(2, p - 1), rng.between(2, 999));
        modp::ModPPlatform pf(params);
        mpz_class m((unsigned long)(1 + rng.below(std::uint64_t(5000))));
        if (transmission(pf, params.g, pf.base_endo(), m) != modp::closed_form(params, m))
            return false;
        if (!modp::dh_equivalence_check(params, m, mpz_class(1 + rng.below(std::uint64_t(5000)))))
            return false;
    }
    return true;
}

bool selftest_matrix() {
    auto ctx = groupring::RingContext::make(GroupTable::alternating(5), 7);
    Rng rng(2);
    auto [h, hinv] = groupring::sample_invertible(ctx, 3, rng);
    if (!groupring::verify_invertible(h, hinv)) return false;
    auto m = groupring::random_element_matrix(ctx, 3, rng);
    groupring::MatrixPlatform pf(ctx, 3, h, hinv);
    auto phi = pf.base_endo();
    mpz_class me = 17, ne = 23;
    auto a = transmission(pf, m, phi, me);
    auto b = transmission(pf, m, phi, ne);
    if (!(a == groupring::matrix_closed_form(h, hinv, m, me))) return false;
    auto ka = derive_shared_key(pf, b, me, m, phi);
    auto kb = derive_shared_key(pf, a, ne, m, phi);
    return ka == kb && ka == groupring::matrix_closed_form(h, hinv, m, mpz_class(me + ne));
}

bool selftest_nilpotent() {
    auto params = nilpotent::Params::make(7, 3);
    Rng rng(3);
    auto phi = nilpotent::sample_large_order_automorphism(params, rng, 16);
    nilpotent::NilpotentPlatform pf(params);
    nilpotent::NormalForm g(params);
    for (std::size_t i = 0; i < params->r; ++i) g.set_alpha(i, rng.below(params->psq));
    for (int it = 0; it < 50; ++it) {
        nilpotent::NormalForm u(params), v(params);
        for (std::size_t i = 0; i < params->r; ++i) {
            u.set_alpha(i, rng.below(params->psq));
            v.set_alpha(i, rng.below(params->psq));
        }
        if (!(endo_apply(phi, nf_multiply(u, v)) ==
              nf_multiply(endo_apply(phi, u), endo_apply(phi, v))))
            return false;
        if (!nf_multiply(u, nf_inverse(u)).is_identity()) return false;
    }
    mpz_class m = 1234, n = 4321;
    auto a = transmission(pf, g, phi, m);
    auto b = transmission(pf, g, phi, n);
    return derive_shared_key(pf, b, m, g, phi) == derive_shared_key(pf, a, n, g, phi);
}

bool selftest_protocol() {
    auto ps = std::make_shared<const session::ParamSet>(
        session::ModPConfig{modp::Params(1000003, 2, 3), 16});
    Rng ra(10), rb(11);
    session::SessionState alice(ps, wire::Role::Initiator, ra);
    session::SessionState bob(ps, wire::Role::Responder, rb);
    bob.consume_message(alice.produce_message());
    alice.consume_message(bob.produce_message());
    if (!(alice.derived_key() && bob.derived_key() && *alice.derived_key() == *bob.derived_key()))
        return false;
    wire::Message msg{wire::PlatformId::ModP, wire::Role::Initiator, {1, 2, 3}};
    if (!(wire::decode(wire::encode(msg)) == msg)) return false;
    try {
        Bytes bad = wire::encode(msg);
        bad[0] = 'x';
        wire::decode(bad);
        return false;
    } catch (const WireError&) {
    }
    return true;
}

int cmd_selftest(const std::string& platform_filter) {
    const Suite suites[] = {
        {"core", selftest_core},           {"modp", selftest_modp},
        {"matrix", selftest_matrix},       {"nilpotent", selftest_nilpotent},
        {"protocol", selftest_protocol},
    };
    int failed = 0;
    for (const auto& s : suites) {
        if (!platform_filter.empty() && s.name != platform_filter) continue;
        bool ok = false;
        try {
            ok = s.body();
        } catch (const std::exception& e) {
            std::printf("       %s: %s\n", s.name.c_str(), e.what());
        }
        std::printf("%s  %s\n", ok ? "PASS" : "FAIL", s.name.c_str());
        if (!ok) ++failed;
    }
    return failed ? 1 : 0;
}

// -------------------------------------------------------------------- bench

int cmd_bench(const std::string& platform, unsigned max_bits, bool csv) {
    auto ps = generate_params(platform, 1, 0);
    if (csv)
        std::printf("t,group_mults,endo_applies,endo_composes,wall_ms\n");
    else
        std::printf("%6s %12s %13s %14s %10s\n", "t", "group-mults", "endo-applies",
                    "endo-composes", "wall-ms");
    bool ok = true;
    for (unsigned t = 8; t <= max_bits; t *= 2) {
        MultCounter counter;
        mpz_class n = mpz_class(1) << t;
        const auto start = std::chrono::steady_clock::now();
        ps->transmission_with_counter(n, &counter);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        if (csv)
            std::printf("%u,%llu,%llu,%llu,%.3f\n", t,
                        (unsigned long long)counter.group_mults,
                        (unsigned long long)counter.endo_applies,
                        (unsigned long long)counter.endo_composes, ms);
        else
            std::printf("%6u %12llu %13llu %14llu %10.3f\n", t,
                        (unsigned long long)counter.group_mults,
                        (unsigned long long)counter.endo_applies,
                        (unsigned long long)counter.endo_composes, ms);
        if (counter.group_mults > 2 * t + 2) {
            std::fprintf(stderr, "cost bound exceeded at t=%u\n", t);
            ok = false;
        }
    }
    return ok ? 0 : 1;
}

// ------------------------------------------------------------------- attack

int cmd_attack(const std::string& config_path, std::uint64_t plant, std::uint64_t bound,
               bool quadruple, std::uint64_t peer_n, bool csv) {
    auto ps = std::make_shared<const session::ParamSet>(load_config_file(config_path));
    mpz_class planted((unsigned long)plant);

    if (quadruple) {
        if (ps->platform_id() != wire::PlatformId::MatrixGroupRing)
            throw ParamError("--quadruple requires a matrix config");
        const auto& c = ps->matrix_config();
        groupring::MatrixPlatform pf(c.ctx, c.dim, c.h, c.hinv);
        auto phi = pf.base_endo();
        auto a = transmission(pf, c.m, phi, planted);
        auto b = transmission(pf, c.m, phi, mpz_class((unsigned long)peer_n));
        auto honest = derive_shared_key(pf, b, planted, c.m, phi);
        auto r = attack::key_from_quadruple(pf, c.m, a, b, bound);
        const bool ok = r.key_guess && *r.key_guess == honest;
        if (csv)
            std::printf("recovered,trials,elapsed_ms,shortcut,key_matches\n%s,%llu,%lld,%d,%d\n",
                        r.exponent_search.recovered ? r.exponent_search.recovered->get_str().c_str()
                                                    : "",
                        (unsigned long long)r.exponent_search.trials,
                        (long long)r.exponent_search.elapsed_ms, r.commuting_shortcut ? 1 : 0,
                        ok ? 1 : 0);
        else
            std::printf("quadruple attack: %s (trials %llu, %lld ms%s)\n",
                        ok ? "key recovered" : "key not recovered",
                        (unsigned long long)r.exponent_search.trials,
                        (long long)r.exponent_search.elapsed_ms,
                        r.commuting_shortcut ? ", commuting shortcut" : "");
        return ok ? 0 : 1;
    }

    Bytes intercepted = ps->transmission_bytes(planted);
    auto r = ps->attack_exponent(intercepted, bound);
    if (csv)
        std::printf("recovered,trials,elapsed_ms\n%s,%llu,%lld\n",
                    r.recovered ? r.recovered->get_str().c_str() : "",
                    (unsigned long long)r.trials, (long long)r.elapsed_ms);
    else if (r.recovered)
        std::printf("recovered exponent %s in %llu trials (%lld ms)\n",
                    r.recovered->get_str().c_str(), (unsigned long long)r.trials,
                    (long long)r.elapsed_ms);
    else
        std::printf("no exponent found within bound %llu (%lld ms)\n",
                    (unsigned long long)bound, (long long)r.elapsed_ms);
    if (r.recovered && ps->transmission_bytes(*r.recovered) != intercepted) {
        std::fprintf(stderr, "attack verification failed: recovered exponent does not reproduce\n");
        return 1;
    }
    return r.recovered ? 0 : 1;
}

// ----------------------------------------------------------------- exchange

int cmd_exchange(const std::string& listen_addr, const std::string& connect_addr,
                 const std::string& config_path, std::uint64_t seed, int timeout_ms) {
    auto ps = std::make_shared<const session::ParamSet>(load_config_file(config_path));
    Rng rng(seed);
    const bool listening = !listen_addr.empty();
    session::SessionState state(ps, listening ? wire::Role::Responder : wire::Role::Initiator, rng);
    int fd = listening ? tcp_listen_accept(listen_addr, timeout_ms) : tcp_connect(connect_addr);
    TcpTransport transport(fd, timeout_ms);
    Key256 key = session::run_handshake(transport, state);
    std::printf("key fingerprint: %s\n", hex(key).c_str());
    if (state.reflection_detected())
        std::fprintf(stderr, "warning: peer echoed our own transmission (degenerate transcript)\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semidirect-product key exchange toolkit"};
    app.require_subcommand(1);

    auto* selftest = app.add_subcommand("selftest", "run the invariant suites at test scale");
    std::string st_platform;
    selftest->add_option("--platform", st_platform, "restrict to one suite");

    auto* params_cmd = app.add_subcommand("params", "generate a parameter config file");
    std::string gp_platform = "modp", gp_out;
    std::uint64_t gp_seed = 1;
    unsigned gp_t = 0;
    params_cmd->add_option("--platform", gp_platform, "modp | matrix | nilpotent")->required();
    params_cmd->add_option("--out", gp_out, "output file (default stdout)");
    params_cmd->add_option("--seed", gp_seed, "sampler seed");
    params_cmd->add_option("--t", gp_t, "private exponent bit length");

    auto* exchange = app.add_subcommand("exchange", "run one key exchange over TCP");
    std::string ex_listen, ex_connect, ex_config;
    std::uint64_t ex_seed = 0;
    int ex_timeout = 10000;
    exchange->add_option("--listen", ex_listen, "listen address host:port");
    exchange->add_option("--connect", ex_connect, "peer address host:port");
    exchange->add_option("--config", ex_config, "parameter config file")->required();
    exchange->add_option("--seed", ex_seed, "exponent sampling seed (0 = from entropy)");
    exchange->add_option("--timeout", ex_timeout, "socket timeout in ms");

    auto* bench = app.add_subcommand("bench", "measure sd_power cost against the O(log n) bound");
    std::string bn_platform = "modp";
    unsigned bn_bits = 256;
    bool bn_csv = false;
    bench->add_option("--platform", bn_platform, "modp | matrix | nilpotent");
    bench->add_option("--max-exp-bits", bn_bits, "largest t; n runs over 2^8 ... 2^t");
    bench->add_flag("--csv", bn_csv, "CSV output");

    auto* attack_cmd = app.add_subcommand("attack", "toy-scale attack oracles");
    std::string at_config;
    std::uint64_t at_plant = 100, at_bound = 10000, at_peer = 7;
    bool at_quadruple = false, at_csv = false;
    attack_cmd->add_option("--config", at_config, "parameter config file")->required();
    attack_cmd->add_option("--plant", at_plant, "exponent to plant and recover");
    attack_cmd->add_option("--bound", at_bound, "search bound");
    attack_cmd->add_flag("--quadruple", at_quadruple, "matrix quadruple key-recovery demo");
    attack_cmd->add_option("--peer-n", at_peer, "peer exponent for the quadruple demo");
    attack_cmd->add_flag("--csv", at_csv, "CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*selftest) return cmd_selftest(st_platform);
        if (*params_cmd) {
            auto ps = generate_params(gp_platform, gp_seed, gp_t);
            std::string text = config::dump(*ps);
            text += "# generated with seed " + std::to_string(gp_seed) + "\n";
            if (gp_out.empty()) {
                std::fputs(text.c_str(), stdout);
            } else {
                std::ofstream out(gp_out);
                if (!out) throw ParamError("cannot write " + gp_out);
                out << text;
            }
            return 0;
        }
        if (*exchange) {
            if (ex_listen.empty() == ex_connect.empty())
                throw ParamError("exactly one of --listen/--connect is required");
            if (ex_seed == 0) ex_seed = std::random_device{}();
            return cmd_exchange(ex_listen, ex_connect, ex_config, ex_seed, ex_timeout);
        }
        if (*bench) return cmd_bench(bn_platform, bn_bits, bn_csv);
        if (*attack_cmd) return cmd_attack(at_config, at_plant, at_bound, at_quadruple, at_peer, at_csv);
    } catch (const ParamError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const WireError& e) {
        std::fprintf(stderr, "protocol error: %s\n", e.what());
        return 1;
    } catch (const TransportError& e) {
        std::fprintf(stderr, "transport error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
