#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "sdkex/errors.hpp"
#include "sdkex/kdf.hpp"
#include "sdkex/session.hpp"

namespace sdkex::config {

// Line-based `key = value` files. '#' starts a comment; blank lines are
// ignored.
inline std::map<std::string, std::string> parse(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        const auto a = s.find_first_not_of(ws);
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(ws);
        return s.substr(a, b - a + 1);
    };
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParamError("config: line " + std::to_string(lineno) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParamError("config: empty key on line " + std::to_string(lineno));
        out[key] = value;
    }
    return out;
}

namespace detail {

inline std::string need(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParamError("config: missing key '" + key + "'");
    return it->second;
}

inline std::string get_or(const std::map<std::string, std::string>& kv, const std::string& key,
                          const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

inline mpz_class parse_mpz(const std::string& s) {
    try {
        return mpz_class(s);
    } catch (const std::invalid_argument&) {
        throw ParamError("config: bad integer '" + s + "'");
    }
}

inline unsigned parse_uint(const std::string& s) {
    mpz_class v = parse_mpz(s);
    if (v < 0 || v > 1'000'000'000) throw ParamError("config: unsigned value out of range");
    return static_cast<unsigned>(v.get_ui());
}

inline GroupTable make_table(std::string name) {
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (name.size() > 1 && name[0] == 'a')
        return GroupTable::alternating(parse_uint(name.substr(1)));
    if (name.size() > 1 && name[0] == 'c')
        return GroupTable::cyclic(parse_uint(name.substr(1)));
    throw ParamError("config: unknown group '" + name + "'");
}

} // namespace detail

inline session::ParamSet load(const std::map<std::string, std::string>& kv) {
    using namespace detail;
    const std::string platform = need(kv, "platform");
    const unsigned t = parse_uint(get_or(kv, "t", "128"));
    if (platform == "modp") {
        modp::Params params(parse_mpz(need(kv, "p")), parse_mpz(need(kv, "g")),
                            parse_mpz(need(kv, "k")));
        return session::ParamSet(
            session::ModPConfig{std::move(params), parse_uint(get_or(kv, "t", "256"))});
    }
    if (platform == "matrix") {
        const unsigned q = parse_uint(get_or(kv, "q", "7"));
        const std::size_t dim = parse_uint(get_or(kv, "dim", "3"));
        auto ctx = groupring::RingContext::make(make_table(get_or(kv, "group", "a5")), q);
        groupring::MatrixPlatform pf(ctx, dim, groupring::Matrix::identity(ctx, dim),
                                     groupring::Matrix::identity(ctx, dim));
        auto mat = [&](const std::string& key) { return pf.deserialize(from_hex(need(kv, key))); };
        return session::ParamSet(
            session::MatrixConfig{ctx, dim, mat("m"), mat("h"), mat("hinv"), t});
    }
    if (platform == "nilpotent") {
        auto params =
            nilpotent::Params::make(parse_mpz(need(kv, "p")), parse_uint(need(kv, "r")));
        nilpotent::NilpotentPlatform pf(params);
        auto g = pf.deserialize(from_hex(need(kv, "g")));
        const std::string phi_hex = need(kv, "phi");
        const std::size_t elem_hex = pf.element_width() * 2;
        if (phi_hex.size() != elem_hex * params->r)
            throw ParamError("config: phi must encode exactly r generator images");
        nilpotent::GenMap phi;
        for (std::size_t i = 0; i < params->r; ++i)
            phi.images.push_back(pf.deserialize(from_hex(phi_hex.substr(i * elem_hex, elem_hex))));
        return session::ParamSet(session::NilpotentConfig{params, std::move(g), std::move(phi), t});
    }
    throw ParamError("config: unknown platform '" + platform + "'");
}

inline session::ParamSet load(const std::string& text) { return load(parse(text)); }

// Renders a ParamSet back into config text (used by the `params`
// subcommand).
inline std::string dump(const session::ParamSet& ps) {
    std::ostringstream out;
    switch (ps.platform_id()) {
    case wire::PlatformId::ModP: {
        const auto& c = ps.modp_config();
        out << "platform = modp\n"
            << "p = " << c.params.p << "\n"
            << "g = " << c.params.g << "\n"
            << "k = " << c.params.k << "\n";
        break;
    }
    case wire::PlatformId::MatrixGroupRing: {
        const auto& c = ps.matrix_config();
        groupring::MatrixPlatform pf(c.ctx, c.dim, c.h, c.hinv);
        out << "platform = matrix\n"
            << "group = " << c.ctx->table.name << "\n"
            << "q = " << c.ctx->modulus << "\n"
            << "dim = " << c.dim << "\n"
            << "m = " << hex(pf.serialize(c.m)) << "\n"
            << "h = " << hex(pf.serialize(c.h)) << "\n"
            << "hinv = " << hex(pf.serialize(c.hinv)) << "\n";
        break;
    }
    case wire::PlatformId::Nilpotent: {
        const auto& c = ps.nilpotent_config();
        nilpotent::NilpotentPlatform pf(c.params);
        out << "platform = nilpotent\n"
            << "p = " << c.params->p << "\n"
            << "r = " << c.params->r << "\n"
            << "g = " << hex(pf.serialize(c.g)) << "\n";
        std::string phi;
        for (const auto& img : c.phi.images) phi += hex(pf.serialize(img));
        out << "phi = " << phi << "\n";
        break;
    }
    }
    out << "t = " << ps.exponent_bits() << "\n";
    return out.str();
}

} // namespace sdkex::config
