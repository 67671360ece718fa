#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sdkex/errors.hpp"

namespace sdkex {

// Multiplication table of a finite group with a fixed canonical element
// ordering. Elements are referred to by index.
struct GroupTable {
    std::size_t order = 0;
    std::size_t identity = 0;
    std::vector<std::uint16_t> mul_table; // order x order, row-major
    std::vector<std::uint16_t> inv_table;
    std::string name;

    std::uint16_t mul(std::size_t a, std::size_t b) const {
        return mul_table[a * order + b];
    }
    std::uint16_t inv(std::size_t a) const { return inv_table[a]; }

    // Alternating group on n letters. Elements are the even permutations of
    // {0, ..., n-1} sorted lexicographically by one-line notation; the
    // product ab acts as (ab)(x) = a(b(x)).
    static GroupTable alternating(unsigned n) {
        std::vector<std::vector<std::uint8_t>> elems;
        std::vector<std::uint8_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            unsigned inversions = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (perm[i] > perm[j]) ++inversions;
            if (inversions % 2 == 0) elems.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        // next_permutation enumerates lexicographically, so elems is sorted.

        std::map<std::vector<std::uint8_t>, std::uint16_t> index;
        for (std::size_t i = 0; i < elems.size(); ++i)
            index[elems[i]] = static_cast<std::uint16_t>(i);

        GroupTable t;
        t.order = elems.size();
        t.identity = 0; // identity permutation is lexicographically first
        t.name = "A" + std::to_string(n);
        t.mul_table.resize(t.order * t.order);
        t.inv_table.resize(t.order);
        std::vector<std::uint8_t> prod(n), invp(n);
        for (std::size_t a = 0; a < t.order; ++a) {
            for (std::size_t b = 0; b < t.order; ++b) {
                for (std::size_t x = 0; x < n; ++x) prod[x] = elems[a][elems[b][x]];
                t.mul_table[a * t.order + b] = index.at(prod);
            }
            for (std::size_t x = 0; x < n; ++x) invp[elems[a][x]] = static_cast<std::uint8_t>(x);
            t.inv_table[a] = index.at(invp);
        }
        return t;
    }

    // Cyclic group of order n (for shrunken test platforms).
    static GroupTable cyclic(unsigned n) {
        GroupTable t;
        t.order = n;
        t.identity = 0;
        t.name = "C" + std::to_string(n);
        t.mul_table.resize(static_cast<std::size_t>(n) * n);
        t.inv_table.resize(n);
        for (unsigned a = 0; a < n; ++a) {
            for (unsigned b = 0; b < n; ++b)
                t.mul_table[static_cast<std::size_t>(a) * n + b] =
                    static_cast<std::uint16_t>((a + b) % n);
            t.inv_table[a] = static_cast<std::uint16_t>((n - a) % n);
        }
        return t;
    }
};

} // namespace sdkex
