#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qforge/rng.hpp"

namespace qforge {

// Bit-packed vector over GF(2). Bit j lives in word j/64, bit position j%64.
class BinaryVector {
  public:
    BinaryVector() = default;
    explicit BinaryVector(size_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BinaryVector from_indices(size_t len, const std::vector<uint32_t>& ones);

    size_t size() const { return len_; }
    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(size_t i) { words_[i >> 6] ^= uint64_t(1) << (i & 63); }

    void clear();
    size_t weight() const;
    bool is_zero() const;
    void xor_in(const BinaryVector& other);
    // Parity of the AND of two vectors, i.e. the GF(2) inner product.
    bool dot(const BinaryVector& other) const;

    std::vector<uint32_t> ones() const;

    bool operator==(const BinaryVector& other) const { return len_ == other.len_ && words_ == other.words_; }
    bool operator!=(const BinaryVector& other) const { return !(*this == other); }

    const std::vector<uint64_t>& words() const { return words_; }
    std::vector<uint64_t>& words() { return words_; }

  private:
    size_t len_ = 0;
    std::vector<uint64_t> words_;
};

struct RowReduceResult;

// Dense bit-packed matrix over GF(2), row-major. Values are treated as
// immutable once shared across threads; elimination routines copy.
class BinaryMatrix {
  public:
    BinaryMatrix() = default;
    BinaryMatrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + 63) / 64), words_(rows * stride_, 0) {}

    static BinaryMatrix identity(size_t n);
    static BinaryMatrix from_ones(size_t rows, size_t cols, const std::vector<std::pair<uint32_t, uint32_t>>& ones);
    static BinaryMatrix from_dense(const std::vector<std::vector<int>>& rows);
    static BinaryMatrix random(size_t rows, size_t cols, Rng& rng);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    bool get(size_t r, size_t c) const { return (word(r, c >> 6) >> (c & 63)) & 1; }
    void set(size_t r, size_t c, bool v) {
        uint64_t mask = uint64_t(1) << (c & 63);
        if (v)
            word(r, c >> 6) |= mask;
        else
            word(r, c >> 6) &= ~mask;
    }
    void flip(size_t r, size_t c) { word(r, c >> 6) ^= uint64_t(1) << (c & 63); }

    const uint64_t* row_words(size_t r) const { return words_.data() + r * stride_; }
    uint64_t* row_words(size_t r) { return words_.data() + r * stride_; }
    size_t stride() const { return stride_; }

    void xor_rows(size_t dst, size_t src);
    void swap_rows(size_t a, size_t b);
    size_t row_weight(size_t r) const;
    bool row_is_zero(size_t r) const;
    BinaryVector row(size_t r) const;
    void set_row(size_t r, const BinaryVector& v);

    BinaryMatrix transpose() const;
    BinaryMatrix operator*(const BinaryMatrix& other) const;
    BinaryVector operator*(const BinaryVector& v) const;
    BinaryMatrix operator+(const BinaryMatrix& other) const;
    bool operator==(const BinaryMatrix& other) const;
    bool operator!=(const BinaryMatrix& other) const { return !(*this == other); }
    bool is_zero() const;

    size_t rank() const;
    RowReduceResult row_reduce() const;
    // Rows span ker(A): A * k^T = 0 for every returned row k.
    BinaryMatrix kernel_basis() const;
    // Some x with A*x = b, or nullopt when the system is inconsistent.
    std::optional<BinaryVector> solve(const BinaryVector& b) const;

    BinaryMatrix hstack(const BinaryMatrix& right) const;
    BinaryMatrix vstack(const BinaryMatrix& below) const;
    BinaryMatrix kron(const BinaryMatrix& other) const;
    BinaryMatrix select_columns(const std::vector<uint32_t>& cols) const;
    BinaryMatrix select_rows(const std::vector<uint32_t>& rows) const;

    std::vector<std::pair<uint32_t, uint32_t>> ones() const;
    std::string str() const;

  private:
    uint64_t& word(size_t r, size_t w) { return words_[r * stride_ + w]; }
    const uint64_t& word(size_t r, size_t w) const { return words_[r * stride_ + w]; }
    void mask_tail();

    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t stride_ = 0;
    std::vector<uint64_t> words_;
};

struct RowReduceResult {
    BinaryMatrix reduced;             // reduced row-echelon form
    std::vector<uint32_t> pivot_cols; // strictly increasing
    BinaryMatrix transform;           // invertible, transform * A = reduced
};

}  // namespace qforge
