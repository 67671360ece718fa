#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "sdkex/bigint.hpp"
#include "sdkex/core.hpp"
#include "sdkex/errors.hpp"

namespace sdkex::nilpotent {

// G = F_r / (F_r^{p^2} * gamma_3(F_r)): the free nilpotent p-group of class
// 2 on r generators. Elements are exponent vectors of the normal form
// x_1^{a_1} ... x_r^{a_r} [x_1,x_2]^{b_12} ... [x_{r-1},x_r]^{b_{r-1,r}}
// with all exponents reduced mod p^2. Commutator convention:
// [a, b] = a^{-1} b^{-1} a b, so ab = ba [a, b].
struct Params {
    mpz_class p;
    std::size_t r;
    mpz_class psq; // p^2, the exponent modulus

    Params(mpz_class p_, std::size_t r_) : p(std::move(p_)), r(r_), psq(p * p) {
        if (!is_probable_prime(p) || p == 2) throw ParamError("nilpotent: p must be an odd prime");
        if (r < 2) throw ParamError("nilpotent: r must be >= 2");
    }

    static std::shared_ptr<const Params> make(mpz_class p, std::size_t r) {
        return std::make_shared<const Params>(std::move(p), r);
    }

    std::size_t beta_count() const { return r * (r - 1) / 2; }

    // Index of the (i, j) commutator exponent, 0 <= i < j < r, pairs in
    // lexicographic order.
    std::size_t beta_index(std::size_t i, std::size_t j) const {
        return i * r - i * (i + 1) / 2 + (j - i - 1);
    }
};

class NormalForm {
public:
    NormalForm() = default;

    explicit NormalForm(std::shared_ptr<const Params> params)
        : params_(std::move(params)),
          alpha_(params_->r, 0),
          beta_(params_->beta_count(), 0) {}

    static NormalForm identity(std::shared_ptr<const Params> params) {
        return NormalForm(std::move(params));
    }

    // x_i^e, 0-based generator index.
    static NormalForm generator(std::shared_ptr<const Params> params, std::size_t i,
                                const mpz_class& e = 1) {
        NormalForm nf(std::move(params));
        if (i >= nf.params_->r) throw ParamError("nilpotent: generator index out of range");
        nf.alpha_[i] = mod_reduce(e, nf.params_->psq);
        return nf;
    }

    const std::shared_ptr<const Params>& params() const { return params_; }
    const std::vector<mpz_class>& alpha() const { return alpha_; }
    const std::vector<mpz_class>& beta() const { return beta_; }

    void set_alpha(std::size_t i, const mpz_class& v) { alpha_[i] = mod_reduce(v, params_->psq); }
    void set_beta(std::size_t i, std::size_t j, const mpz_class& v) {
        beta_[params_->beta_index(i, j)] = mod_reduce(v, params_->psq);
    }
    const mpz_class& beta_at(std::size_t i, std::size_t j) const {
        return beta_[params_->beta_index(i, j)];
    }

    bool is_identity() const {
        for (const auto& a : alpha_)
            if (a != 0) return false;
        for (const auto& b : beta_)
            if (b != 0) return false;
        return true;
    }

    bool is_central() const {
        for (const auto& a : alpha_)
            if (a != 0) return false;
        return true;
    }

    bool operator==(const NormalForm& o) const { return alpha_ == o.alpha_ && beta_ == o.beta_; }

    static void require_same_params(const NormalForm& a, const NormalForm& b) {
        if (a.params_.get() != b.params_.get()) throw ParamError("nilpotent: params mismatch");
    }

private:
    std::shared_ptr<const Params> params_;
    std::vector<mpz_class> alpha_;
    std::vector<mpz_class> beta_;
};

// Collection rule for class 2: moving x_i^{a'_i} of the right factor past
// x_j^{a_j} (j > i) of the left factor emits [x_i, x_j]^{-a_j a'_i}.
inline NormalForm nf_multiply(const NormalForm& u, const NormalForm& v) {
    NormalForm::require_same_params(u, v);
    const Params& pp = *u.params();
    NormalForm w(u.params());
    for (std::size_t i = 0; i < pp.r; ++i) w.set_alpha(i, u.alpha()[i] + v.alpha()[i]);
    for (std::size_t i = 0; i < pp.r; ++i)
        for (std::size_t j = i + 1; j < pp.r; ++j)
            w.set_beta(i, j,
                       u.beta_at(i, j) + v.beta_at(i, j) - u.alpha()[j] * v.alpha()[i]);
    return w;
}

inline NormalForm nf_inverse(const NormalForm& u) {
    const Params& pp = *u.params();
    NormalForm w(u.params());
    for (std::size_t i = 0; i < pp.r; ++i) w.set_alpha(i, -u.alpha()[i]);
    for (std::size_t i = 0; i < pp.r; ++i)
        for (std::size_t j = i + 1; j < pp.r; ++j)
            w.set_beta(i, j, -u.beta_at(i, j) - u.alpha()[i] * u.alpha()[j]);
    return w;
}

// [u, v]. Central, so only the alpha parts of u and v contribute.
inline NormalForm nf_commutator(const NormalForm& u, const NormalForm& v) {
    NormalForm::require_same_params(u, v);
    const Params& pp = *u.params();
    NormalForm w(u.params());
    for (std::size_t i = 0; i < pp.r; ++i)
        for (std::size_t j = i + 1; j < pp.r; ++j)
            w.set_beta(i, j, u.alpha()[i] * v.alpha()[j] - u.alpha()[j] * v.alpha()[i]);
    return w;
}

// u^n for n >= 0, square-and-multiply. Central elements take the scalar
// shortcut.
inline NormalForm nf_power(const NormalForm& u, const mpz_class& n) {
    if (n < 0) throw ParamError("nilpotent: nf_power requires n >= 0");
    if (n == 0 || u.is_identity()) return NormalForm::identity(u.params());
    const Params& pp = *u.params();
    if (u.is_central()) {
        NormalForm w(u.params());
        for (std::size_t i = 0; i < pp.r; ++i)
            for (std::size_t j = i + 1; j < pp.r; ++j)
                w.set_beta(i, j, u.beta_at(i, j) * n);
        return w;
    }
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    NormalForm acc = u;
    for (std::size_t i = bits - 1; i-- > 0;) {
        acc = nf_multiply(acc, acc);
        if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = nf_multiply(acc, u);
    }
    return acc;
}

// A reduced word over the generators: (1-based generator index, nonzero
// exponent) pairs, no two adjacent letters on the same generator.
struct Word {
    std::vector<std::pair<std::size_t, mpz_class>> letters;
};

inline NormalForm word_normalize(std::shared_ptr<const Params> params, const Word& w) {
    NormalForm acc = NormalForm::identity(params);
    std::size_t prev = 0;
    for (const auto& [idx, exp] : w.letters) {
        if (idx < 1 || idx > params->r) throw ParamError("nilpotent: generator index out of range");
        if (exp == 0) throw ParamError("nilpotent: word letter with zero exponent");
        if (idx == prev) throw ParamError("nilpotent: word is not reduced");
        prev = idx;
        acc = nf_multiply(acc, NormalForm::generator(params, idx - 1, exp));
    }
    return acc;
}

// An endomorphism given by the images of the generators. Any generator map
// extends to an endomorphism of G, so no map is rejected.
struct GenMap {
    std::vector<NormalForm> images;

    static GenMap identity(const std::shared_ptr<const Params>& params) {
        GenMap m;
        for (std::size_t i = 0; i < params->r; ++i)
            m.images.push_back(NormalForm::generator(params, i));
        return m;
    }
};

// phi(u) = prod_i phi(x_i)^{a_i} * prod_{i<j} [phi(x_i), phi(x_j)]^{b_ij}.
inline NormalForm endo_apply(const GenMap& phi, const NormalForm& u) {
    const Params& pp = *u.params();
    if (phi.images.size() != pp.r) throw ParamError("nilpotent: generator map has wrong arity");
    NormalForm acc = NormalForm::identity(u.params());
    for (std::size_t i = 0; i < pp.r; ++i)
        acc = nf_multiply(acc, nf_power(phi.images[i], u.alpha()[i]));
    for (std::size_t i = 0; i < pp.r; ++i)
        for (std::size_t j = i + 1; j < pp.r; ++j)
            acc = nf_multiply(acc,
                              nf_power(nf_commutator(phi.images[i], phi.images[j]), u.beta_at(i, j)));
    return acc;
}

// psi after phi: (psi . phi)(x_i) = psi(phi(x_i)).
inline GenMap endo_compose(const GenMap& psi, const GenMap& phi) {
    GenMap out;
    out.images.reserve(phi.images.size());
    for (const auto& img : phi.images) out.images.push_back(endo_apply(psi, img));
    return out;
}

// Column i is the alpha vector of phi(x_i), entries mod p^2. phi is an
// automorphism iff the determinant is a unit mod p^2, i.e. nonzero mod p.
inline std::vector<std::vector<mpz_class>> abelianization_matrix(
    const std::shared_ptr<const Params>& params, const GenMap& phi) {
    const std::size_t r = params->r;
    if (phi.images.size() != r) throw ParamError("nilpotent: generator map has wrong arity");
    std::vector<std::vector<mpz_class>> t(r, std::vector<mpz_class>(r));
    for (std::size_t col = 0; col < r; ++col)
        for (std::size_t row = 0; row < r; ++row)
            t[row][col] = phi.images[col].alpha()[row];
    return t;
}

// Determinant mod a prime, Gaussian elimination.
inline mpz_class det_mod_p(std::vector<std::vector<mpz_class>> a, const mpz_class& p) {
    const std::size_t n = a.size();
    for (auto& row : a)
        for (auto& x : row) x = mod_reduce(x, p);
    mpz_class det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = p - det;
        }
        det = mod_reduce(det * a[col][col], p);
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), a[col][col].get_mpz_t(), p.get_mpz_t());
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a[row][col] == 0) continue;
            mpz_class f = mod_reduce(a[row][col] * inv, p);
            for (std::size_t c2 = col; c2 < n; ++c2)
                a[row][c2] = mod_reduce(a[row][c2] - f * a[col][c2], p);
        }
    }
    return det;
}

inline bool is_automorphism(const std::shared_ptr<const Params>& params, const GenMap& phi) {
    return det_mod_p(abelianization_matrix(params, phi), params->p) != 0;
}

inline GenMap random_genmap(const std::shared_ptr<const Params>& params, Rng& rng) {
    GenMap m;
    for (std::size_t i = 0; i < params->r; ++i) {
        NormalForm nf(params);
        for (std::size_t a = 0; a < params->r; ++a) nf.set_alpha(a, rng.below(params->psq));
        for (std::size_t a = 0; a < params->r; ++a)
            for (std::size_t b = a + 1; b < params->r; ++b)
                nf.set_beta(a, b, rng.below(params->psq));
        m.images.push_back(std::move(nf));
    }
    return m;
}

// Samples an automorphism whose abelianization has order exceeding
// `min_order` mod p, certified by bounded iteration: T^d != I for every
// d <= min(min_order, step limit). Order mod p divides order mod p^2, so
// this lower-bounds the order of phi itself.
inline GenMap sample_large_order_automorphism(const std::shared_ptr<const Params>& params,
                                              Rng& rng, std::uint64_t min_order,
                                              unsigned max_retries = 64) {
    if (min_order < 2) throw ParamError("nilpotent: min_order must be >= 2");
    constexpr std::uint64_t kStepLimit = 1'000'000;
    const std::uint64_t steps = std::min(min_order, kStepLimit);
    const std::size_t r = params->r;
    auto mat_mul_mod = [&](const auto& x, const auto& y) {
        std::vector<std::vector<mpz_class>> z(r, std::vector<mpz_class>(r, 0));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = 0; k < r; ++k) {
                if (x[i][k] == 0) continue;
                for (std::size_t j = 0; j < r; ++j)
                    z[i][j] = mod_reduce(z[i][j] + x[i][k] * y[k][j], params->p);
            }
        return z;
    };
    auto is_id = [&](const auto& x) {
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                if (x[i][j] != ((i == j) ? 1 : 0)) return false;
        return true;
    };
    for (unsigned attempt = 0; attempt < max_retries; ++attempt) {
        GenMap phi = random_genmap(params, rng);
        auto t = abelianization_matrix(params, phi);
        if (det_mod_p(t, params->p) == 0) continue;
        for (auto& row : t)
            for (auto& x : row) x = mod_reduce(x, params->p);
        auto acc = t;
        bool short_order = is_id(acc);
        for (std::uint64_t d = 2; !short_order && d <= steps; ++d) {
            acc = mat_mul_mod(acc, t);
            if (is_id(acc)) short_order = true;
        }
        if (!short_order) return phi;
    }
    throw SamplingError("nilpotent: could not sample a large-order automorphism");
}

// Scans phi^0(g), phi^1(g), ..., phi^bound(g) for a repeat; returns the
// first colliding pair of indices, or nothing.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> cycle_check(
    const GenMap& phi, const NormalForm& g, std::uint64_t bound) {
    if (bound < 1) throw ParamError("nilpotent: cycle_check bound must be >= 1");
    std::map<std::pair<std::vector<mpz_class>, std::vector<mpz_class>>, std::uint64_t> seen;
    NormalForm cur = g;
    for (std::uint64_t j = 0; j <= bound; ++j) {
        auto key = std::make_pair(cur.alpha(), cur.beta());
        auto [it, fresh] = seen.emplace(std::move(key), j);
        if (!fresh) return std::make_pair(it->second, j);
        if (j < bound) cur = endo_apply(phi, cur);
    }
    return std::nullopt;
}

class NilpotentPlatform {
public:
    using Element = NormalForm;
    using Endo = GenMap;

    explicit NilpotentPlatform(std::shared_ptr<const Params> params)
        : params_(std::move(params)), width_(byte_length(params_->psq)) {}

    const std::shared_ptr<const Params>& params() const { return params_; }

    bool eq(const Element& a, const Element& b) const { return a == b; }
    Element mul(const Element& a, const Element& b) const { return nf_multiply(a, b); }
    Element apply(const Endo& e, const Element& u) const { return endo_apply(e, u); }
    Endo compose(const Endo& a, const Endo& b) const { return endo_compose(a, b); }
    Endo identity_endo() const { return GenMap::identity(params_); }

    // r as 2-byte big-endian, then alphas, then betas in (i<j) lexicographic
    // order, each fixed-width big-endian, width = byte length of p^2.
    Bytes serialize(const Element& u) const {
        Bytes out;
        out.reserve(element_width());
        out.push_back(static_cast<std::uint8_t>(params_->r >> 8));
        out.push_back(static_cast<std::uint8_t>(params_->r & 0xff));
        for (const auto& a : u.alpha()) {
            Bytes b = to_bytes_be(a, width_);
            out.insert(out.end(), b.begin(), b.end());
        }
        for (const auto& b : u.beta()) {
            Bytes bb = to_bytes_be(b, width_);
            out.insert(out.end(), bb.begin(), bb.end());
        }
        return out;
    }

    Element deserialize(const Bytes& b) const {
        if (b.size() != element_width()) throw WireError("nilpotent: element has wrong width");
        const std::size_t r = (std::size_t(b[0]) << 8) | b[1];
        if (r != params_->r) throw WireError("nilpotent: rank mismatch");
        NormalForm u(params_);
        std::size_t pos = 2;
        for (std::size_t i = 0; i < params_->r; ++i, pos += width_) {
            mpz_class v = from_bytes_be(b.data() + pos, width_);
            if (v >= params_->psq) throw WireError("nilpotent: exponent out of range");
            u.set_alpha(i, v);
        }
        for (std::size_t i = 0; i < params_->r; ++i)
            for (std::size_t j = i + 1; j < params_->r; ++j, pos += width_) {
                mpz_class v = from_bytes_be(b.data() + pos, width_);
                if (v >= params_->psq) throw WireError("nilpotent: exponent out of range");
                u.set_beta(i, j, v);
            }
        return u;
    }

    std::size_t element_width() const {
        return 2 + (params_->r + params_->beta_count()) * width_;
    }

private:
    std::shared_ptr<const Params> params_;
    std::size_t width_;
};

} // namespace sdkex::nilpotent
