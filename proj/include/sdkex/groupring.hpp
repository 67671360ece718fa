#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "sdkex/bigint.hpp"
#include "sdkex/core.hpp"
#include "sdkex/errors.hpp"
#include "sdkex/permgroup.hpp"

namespace sdkex::groupring {

// The coefficient ring Z_q over a fixed finite group S. Shared by every
// element and matrix of one platform instance; immutable once built.
struct RingContext {
    GroupTable table;
    unsigned modulus; // odd prime

    RingContext(GroupTable t, unsigned q) : table(std::move(t)), modulus(q) {
        if (q < 2) throw ParamError("group ring: modulus must be >= 2");
    }

    static std::shared_ptr<const RingContext> make(GroupTable t, unsigned q) {
        return std::make_shared<const RingContext>(std::move(t), q);
    }
};

// A formal sum over the group with Z_q coefficients, stored dense in the
// canonical element order.
class Element {
public:
    Element() = default;

    explicit Element(std::shared_ptr<const RingContext> ctx)
        : ctx_(std::move(ctx)), coeffs_(ctx_->table.order, 0) {}

    static Element zero(std::shared_ptr<const RingContext> ctx) { return Element(std::move(ctx)); }

    static Element one(std::shared_ptr<const RingContext> ctx) {
        Element e(std::move(ctx));
        e.coeffs_[e.ctx_->table.identity] = 1;
        return e;
    }

    // coeff * g as a single-support sum.
    static Element basis(std::shared_ptr<const RingContext> ctx, std::size_t g, unsigned coeff) {
        Element e(std::move(ctx));
        e.coeffs_[g] = static_cast<std::uint8_t>(coeff % e.ctx_->modulus);
        return e;
    }

    const std::shared_ptr<const RingContext>& ctx() const { return ctx_; }
    const std::vector<std::uint8_t>& coeffs() const { return coeffs_; }

    std::uint8_t operator[](std::size_t i) const { return coeffs_[i]; }
    void set(std::size_t i, unsigned v) { coeffs_[i] = static_cast<std::uint8_t>(v % ctx_->modulus); }

    bool operator==(const Element& o) const { return coeffs_ == o.coeffs_; }

    friend Element gr_add(const Element& a, const Element& b) {
        require_same_ctx(a, b);
        Element c(a.ctx_);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            c.coeffs_[i] = static_cast<std::uint8_t>((a.coeffs_[i] + b.coeffs_[i]) % a.ctx_->modulus);
        return c;
    }

    friend Element gr_negate(const Element& a) {
        Element c(a.ctx_);
        const unsigned q = a.ctx_->modulus;
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            c.coeffs_[i] = static_cast<std::uint8_t>((q - a.coeffs_[i]) % q);
        return c;
    }

    // Convolution over the Cayley table: c[uv] += a[u] * b[v].
    friend Element gr_multiply(const Element& a, const Element& b) {
        require_same_ctx(a, b);
        Element c(a.ctx_);
        std::vector<std::uint32_t> acc(a.coeffs_.size(), 0);
        a.multiply_into(b, acc);
        for (std::size_t i = 0; i < acc.size(); ++i)
            c.coeffs_[i] = static_cast<std::uint8_t>(acc[i] % a.ctx_->modulus);
        return c;
    }

    // Accumulate a*b into `acc` without reducing; used by the matrix product
    // to reduce once per output entry.
    void multiply_into(const Element& b, std::vector<std::uint32_t>& acc) const {
        const GroupTable& t = ctx_->table;
        const std::size_t n = t.order;
        for (std::size_t u = 0; u < n; ++u) {
            const std::uint32_t au = coeffs_[u];
            if (au == 0) continue;
            const std::uint16_t* row = t.mul_table.data() + u * n;
            const std::uint8_t* bv = b.coeffs_.data();
            for (std::size_t v = 0; v < n; ++v)
                acc[row[v]] += au * bv[v];
        }
    }

    static void require_same_ctx(const Element& a, const Element& b) {
        if (a.ctx_.get() != b.ctx_.get()) throw ParamError("group ring: context mismatch");
    }

private:
    std::shared_ptr<const RingContext> ctx_;
    std::vector<std::uint8_t> coeffs_;
};

// Square matrix over the group ring.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::shared_ptr<const RingContext> ctx, std::size_t dim)
        : ctx_(std::move(ctx)), dim_(dim), entries_(dim * dim, Element::zero(ctx_)) {}

    static Matrix identity(std::shared_ptr<const RingContext> ctx, std::size_t dim) {
        Matrix m(std::move(ctx), dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = Element::one(m.ctx_);
        return m;
    }

    Element& at(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
    const Element& at(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

    std::size_t dim() const { return dim_; }
    const std::shared_ptr<const RingContext>& ctx() const { return ctx_; }

    bool operator==(const Matrix& o) const { return dim_ == o.dim_ && entries_ == o.entries_; }

    friend Matrix mat_multiply(const Matrix& x, const Matrix& y) {
        if (x.ctx_.get() != y.ctx_.get() || x.dim_ != y.dim_)
            throw ParamError("group ring: matrix shape/context mismatch");
        Matrix z(x.ctx_, x.dim_);
        const unsigned q = x.ctx_->modulus;
        std::vector<std::uint32_t> acc(x.ctx_->table.order);
        for (std::size_t i = 0; i < x.dim_; ++i) {
            for (std::size_t j = 0; j < x.dim_; ++j) {
                std::fill(acc.begin(), acc.end(), 0);
                for (std::size_t k = 0; k < x.dim_; ++k)
                    x.at(i, k).multiply_into(y.at(k, j), acc);
                Element& e = z.at(i, j);
                for (std::size_t s = 0; s < acc.size(); ++s)
                    e.set(s, acc[s] % q);
            }
        }
        return z;
    }

private:
    std::shared_ptr<const RingContext> ctx_;
    std::size_t dim_ = 0;
    std::vector<Element> entries_;
};

inline bool verify_invertible(const Matrix& h, const Matrix& hinv) {
    Matrix id = Matrix::identity(h.ctx(), h.dim());
    return mat_multiply(h, hinv) == id && mat_multiply(hinv, h) == id;
}

// Handle for the inner automorphism power phi_H^j : M -> H^{-j} M H^j.
struct InnerAutoHandle {
    Matrix hpow;     // H^j
    Matrix hpow_inv; // H^{-j}
};

inline Matrix inner_apply(const InnerAutoHandle& e, const Matrix& m) {
    return mat_multiply(mat_multiply(e.hpow_inv, m), e.hpow);
}

// H and HM must not commute, or the shared key is just the product of the
// two transmissions.
inline bool commute_check(const Matrix& h, const Matrix& m) {
    Matrix hm = mat_multiply(h, m);
    return mat_multiply(h, hm) == mat_multiply(hm, h);
}

inline Matrix random_element_matrix(std::shared_ptr<const RingContext> ctx, std::size_t dim,
                                    Rng& rng) {
    Matrix m(ctx, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            Element e(ctx);
            for (std::size_t s = 0; s < ctx->table.order; ++s)
                e.set(s, static_cast<unsigned>(rng.below(std::uint64_t(ctx->modulus))));
            m.at(i, j) = e;
        }
    return m;
}

// Samples an invertible H as a product of random elementary matrices
// (identity plus one group-ring entry off the diagonal) and diagonal
// matrices with trivial-unit entries (+-1 * g). The inverse is accumulated
// by reversing the factor sequence, so the pair is invertible by
// construction; verify_invertible still checks it.
inline std::pair<Matrix, Matrix> sample_invertible(std::shared_ptr<const RingContext> ctx,
                                                   std::size_t dim, Rng& rng) {
    Matrix h = Matrix::identity(ctx, dim);
    Matrix hinv = Matrix::identity(ctx, dim);
    const std::size_t factors = 20 + rng.below(std::uint64_t(21));
    for (std::size_t f = 0; f < factors; ++f) {
        Matrix fac = Matrix::identity(ctx, dim);
        Matrix fac_inv = Matrix::identity(ctx, dim);
        if (rng.below(std::uint64_t(2)) == 0 && dim >= 2) {
            // elementary: I + a*E_ij, inverse I - a*E_ij
            std::size_t i = rng.below(std::uint64_t(dim));
            std::size_t j = rng.below(std::uint64_t(dim - 1));
            if (j >= i) ++j;
            Element a(ctx);
            for (std::size_t s = 0; s < ctx->table.order; ++s)
                a.set(s, static_cast<unsigned>(rng.below(std::uint64_t(ctx->modulus))));
            fac.at(i, j) = a;
            fac_inv.at(i, j) = gr_negate(a);
        } else {
            // diagonal of trivial units +-1 * g
            for (std::size_t i = 0; i < dim; ++i) {
                std::size_t g = rng.below(std::uint64_t(ctx->table.order));
                bool neg = rng.below(std::uint64_t(2)) == 1;
                unsigned c = neg ? ctx->modulus - 1 : 1;
                fac.at(i, i) = Element::basis(ctx, g, c);
                fac_inv.at(i, i) = Element::basis(ctx, ctx->table.inv(g), c);
            }
        }
        h = mat_multiply(h, fac);
        hinv = mat_multiply(fac_inv, hinv);
    }
    if (!verify_invertible(h, hinv)) throw SamplingError("group ring: sampled H failed inversion check");
    return {h, hinv};
}

// Platform over the matrix semigroup extended by conjugation. Applying the
// handle costs two matrix products; composing handles multiplies the stored
// powers of H, so powering a pair stays O(log n).
class MatrixPlatform {
public:
    using Element = groupring::Matrix;
    using Endo = InnerAutoHandle;

    MatrixPlatform(std::shared_ptr<const RingContext> ctx, std::size_t dim, Matrix h, Matrix hinv)
        : ctx_(std::move(ctx)), dim_(dim), h_(std::move(h)), hinv_(std::move(hinv)) {
        if (!verify_invertible(h_, hinv_)) throw ParamError("matrix platform: H * Hinv != I");
    }

    const std::shared_ptr<const RingContext>& ctx() const { return ctx_; }
    std::size_t dim() const { return dim_; }
    const Matrix& h() const { return h_; }
    const Matrix& hinv() const { return hinv_; }

    bool eq(const Element& a, const Element& b) const { return a == b; }
    Element mul(const Element& a, const Element& b) const { return mat_multiply(a, b); }
    Element apply(const Endo& e, const Element& m) const { return inner_apply(e, m); }

    Endo compose(const Endo& a, const Endo& b) const {
        return {mat_multiply(a.hpow, b.hpow), mat_multiply(b.hpow_inv, a.hpow_inv)};
    }

    Endo identity_endo() const {
        Matrix id = Matrix::identity(ctx_, dim_);
        return {id, id};
    }

    Endo base_endo() const { return {h_, hinv_}; }

    // Row-major entries; each entry is `order` bytes of coefficients in
    // canonical index order.
    Bytes serialize(const Element& m) const {
        Bytes out;
        out.reserve(element_width());
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) {
                const auto& c = m.at(i, j).coeffs();
                out.insert(out.end(), c.begin(), c.end());
            }
        return out;
    }

    Element deserialize(const Bytes& b) const {
        if (b.size() != element_width()) throw WireError("matrix: element has wrong width");
        Matrix m(ctx_, dim_);
        std::size_t pos = 0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) {
                groupring::Element e(ctx_);
                for (std::size_t s = 0; s < ctx_->table.order; ++s, ++pos) {
                    if (b[pos] >= ctx_->modulus) throw WireError("matrix: coefficient out of range");
                    e.set(s, b[pos]);
                }
                m.at(i, j) = e;
            }
        return m;
    }

    std::size_t element_width() const { return dim_ * dim_ * ctx_->table.order; }

private:
    std::shared_ptr<const RingContext> ctx_;
    std::size_t dim_;
    Matrix h_;
    Matrix hinv_;
};

// H^{-m} (HM)^m, square-and-multiply on each factor. Equals
// transmission(M, phi_H, m).
inline Matrix matrix_closed_form(const Matrix& h, const Matrix& hinv, const Matrix& m,
                                 const mpz_class& power) {
    if (power < 1) throw ParamError("matrix closed form requires m >= 1");
    auto mat_pow = [](const Matrix& base, const mpz_class& n) {
        const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
        Matrix acc = base;
        for (std::size_t i = bits - 1; i-- > 0;) {
            acc = mat_multiply(acc, acc);
            if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = mat_multiply(acc, base);
        }
        return acc;
    };
    Matrix hm_pow = mat_pow(mat_multiply(h, m), power);
    Matrix hinv_pow = mat_pow(hinv, power);
    return mat_multiply(hinv_pow, hm_pow);
}

} // namespace sdkex::groupring
