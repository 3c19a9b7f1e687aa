#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cadmine/error.hpp"

namespace cadmine {

// Fixed-length bit vector over 64-bit words. Serves both as a matrix column
// (one bit per record) and as a matrix row (one bit per feature).
// Invariant: bits past size() in the last word are always zero, so equality,
// popcounts and hashes can work word-wise.
class BitVector {
public:
    BitVector() = default;

    explicit BitVector(std::size_t nbits, bool value = false)
        : nbits_(nbits), words_((nbits + 63) / 64, value ? ~uint64_t{0} : 0) {
        trim_tail();
    }

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool v = true) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

    void clear() {
        for (auto& w : words_) w = 0;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }

    bool any() const {
        for (uint64_t w : words_)
            if (w) return true;
        return false;
    }

    BitVector& operator&=(const BitVector& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }

    BitVector& operator|=(const BitVector& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }

    BitVector& operator^=(const BitVector& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
        return *this;
    }

    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
    friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    BitVector operator~() const {
        BitVector r = *this;
        for (auto& w : r.words_) w = ~w;
        r.trim_tail();
        return r;
    }

    bool operator==(const BitVector& o) const = default;

    // popcount(a & b) without materializing the AND
    static std::size_t and_count(const BitVector& a, const BitVector& b) {
        a.check_same_size(b);
        std::size_t c = 0;
        for (std::size_t i = 0; i < a.words_.size(); ++i)
            c += std::popcount(a.words_[i] & b.words_[i]);
        return c;
    }

    // popcount(a & b & m): masked dot product of two 0/1 rows
    static std::size_t and_count(const BitVector& a, const BitVector& b, const BitVector& m) {
        a.check_same_size(b);
        a.check_same_size(m);
        std::size_t c = 0;
        for (std::size_t i = 0; i < a.words_.size(); ++i)
            c += std::popcount(a.words_[i] & b.words_[i] & m.words_[i]);
        return c;
    }

    // popcount((a ^ b) & m): masked Hamming distance / squared distance of 0/1 rows
    static std::size_t xor_and_count(const BitVector& a, const BitVector& b, const BitVector& m) {
        a.check_same_size(b);
        a.check_same_size(m);
        std::size_t c = 0;
        for (std::size_t i = 0; i < a.words_.size(); ++i)
            c += std::popcount((a.words_[i] ^ b.words_[i]) & m.words_[i]);
        return c;
    }

    uint64_t hash() const {
        // FNV-1a over words; good enough for fitness-cache keys
        uint64_t h = 1469598103934665603ull;
        for (uint64_t w : words_) {
            h ^= w;
            h *= 1099511628211ull;
        }
        h ^= nbits_;
        h *= 1099511628211ull;
        return h;
    }

    const std::vector<uint64_t>& words() const { return words_; }

private:
    std::size_t nbits_ = 0;
    std::vector<uint64_t> words_;

    void trim_tail() {
        if (nbits_ & 63) words_.back() &= (~uint64_t{0}) >> (64 - (nbits_ & 63));
    }

    void check_same_size(const BitVector& o) const {
        if (nbits_ != o.nbits_)
            throw Error(cat("bit vector size mismatch: ", nbits_, " vs ", o.nbits_));
    }
};

} // namespace cadmine
