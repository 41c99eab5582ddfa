#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace typecsp {

/// Dynamically sized bitset used for value domains and relation membership.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int size, bool ones = false)
        : size_(size), words_((size + 63) / 64, ones ? ~std::uint64_t{0} : 0) {
        if (ones) trim();
    }

    int size() const { return size_; }

    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void clear() { for (auto& w : words_) w = 0; }

    int count() const {
        int n = 0;
        for (auto w : words_) n += std::popcount(w);
        return n;
    }

    bool empty() const {
        for (auto w : words_) if (w) return false;
        return true;
    }

    bool intersects(const Bitset& o) const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & o.words_[k]) return true;
        return false;
    }

    Bitset& operator&=(const Bitset& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }

    Bitset& operator|=(const Bitset& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }

    bool operator==(const Bitset& o) const = default;

    /// Index of the lowest set bit, or -1 when empty.
    int first() const { return next(-1); }

    /// Lowest set bit strictly above `i`, or -1.
    int next(int i) const {
        for (int k = (i + 1) >> 6; k < (int)words_.size(); ++k) {
            std::uint64_t w = words_[k];
            if (k == (i + 1) >> 6) w &= ~std::uint64_t{0} << ((i + 1) & 63);
            if (w) return k * 64 + std::countr_zero(w);
        }
        return -1;
    }

private:
    void trim() {
        if (size_ & 63) words_.back() &= (~std::uint64_t{0}) >> (64 - (size_ & 63));
    }

    int size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Row-major bit matrix; rows and columns index value pairs of a binary relation.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows, Bitset(cols)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool at(int r, int c) const { return data_[r].test(c); }
    void set(int r, int c) { data_[r].set(c); }
    const Bitset& row(int r) const { return data_[r]; }
    Bitset& row(int r) { return data_[r]; }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Bitset> data_;
};

} // namespace typecsp
