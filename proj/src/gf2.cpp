#include "qforge/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace qforge {

BinaryVector BinaryVector::from_indices(size_t len, const std::vector<uint32_t>& ones) {
    BinaryVector v(len);
    for (uint32_t i : ones) {
        if (i >= len) throw std::invalid_argument("BinaryVector index out of range");
        v.flip(i);
    }
    return v;
}

void BinaryVector::clear() {
    for (auto& w : words_) w = 0;
}

size_t BinaryVector::weight() const {
    size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
}

bool BinaryVector::is_zero() const {
    for (uint64_t w : words_)
        if (w) return false;
    return true;
}

void BinaryVector::xor_in(const BinaryVector& other) {
    if (other.len_ != len_) throw std::invalid_argument("BinaryVector length mismatch");
    for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
}

bool BinaryVector::dot(const BinaryVector& other) const {
    if (other.len_ != len_) throw std::invalid_argument("BinaryVector length mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
    return std::popcount(acc) & 1;
}

std::vector<uint32_t> BinaryVector::ones() const {
    std::vector<uint32_t> out;
    for (size_t w = 0; w < words_.size(); ++w) {
        uint64_t bits = words_[w];
        while (bits) {
            out.push_back(static_cast<uint32_t>(w * 64 + std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

BinaryMatrix BinaryMatrix::identity(size_t n) {
    BinaryMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BinaryMatrix BinaryMatrix::from_ones(size_t rows, size_t cols,
                                     const std::vector<std::pair<uint32_t, uint32_t>>& ones) {
    BinaryMatrix m(rows, cols);
    for (auto [r, c] : ones) {
        if (r >= rows || c >= cols) throw std::invalid_argument("matrix entry out of range");
        m.set(r, c, true);
    }
    return m;
}

BinaryMatrix BinaryMatrix::from_dense(const std::vector<std::vector<int>>& rows) {
    if (rows.empty()) return {};
    BinaryMatrix m(rows.size(), rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) throw std::invalid_argument("ragged dense matrix");
        for (size_t c = 0; c < rows[r].size(); ++c)
            if (rows[r][c] & 1) m.set(r, c, true);
    }
    return m;
}

BinaryMatrix BinaryMatrix::random(size_t rows, size_t cols, Rng& rng) {
    BinaryMatrix m(rows, cols);
    for (auto& w : m.words_) w = rng.next();
    m.mask_tail();
    return m;
}

void BinaryMatrix::mask_tail() {
    size_t rem = cols_ & 63;
    if (rem == 0 || stride_ == 0) return;
    uint64_t mask = (uint64_t(1) << rem) - 1;
    for (size_t r = 0; r < rows_; ++r) word(r, stride_ - 1) &= mask;
}

void BinaryMatrix::xor_rows(size_t dst, size_t src) {
    uint64_t* d = row_words(dst);
    const uint64_t* s = row_words(src);
    for (size_t w = 0; w < stride_; ++w) d[w] ^= s[w];
}

void BinaryMatrix::swap_rows(size_t a, size_t b) {
    if (a == b) return;
    uint64_t* pa = row_words(a);
    uint64_t* pb = row_words(b);
    for (size_t w = 0; w < stride_; ++w) std::swap(pa[w], pb[w]);
}

size_t BinaryMatrix::row_weight(size_t r) const {
    size_t n = 0;
    const uint64_t* p = row_words(r);
    for (size_t w = 0; w < stride_; ++w) n += std::popcount(p[w]);
    return n;
}

bool BinaryMatrix::row_is_zero(size_t r) const {
    const uint64_t* p = row_words(r);
    for (size_t w = 0; w < stride_; ++w)
        if (p[w]) return false;
    return true;
}

BinaryVector BinaryMatrix::row(size_t r) const {
    BinaryVector v(cols_);
    const uint64_t* p = row_words(r);
    for (size_t w = 0; w < v.words().size(); ++w) v.words()[w] = p[w];
    return v;
}

void BinaryMatrix::set_row(size_t r, const BinaryVector& v) {
    if (v.size() != cols_) throw std::invalid_argument("row length mismatch");
    uint64_t* p = row_words(r);
    for (size_t w = 0; w < stride_; ++w) p[w] = v.words()[w];
}

BinaryMatrix BinaryMatrix::transpose() const {
    BinaryMatrix t(cols_, rows_);
    for (size_t r = 0; r < rows_; ++r) {
        const uint64_t* p = row_words(r);
        for (size_t w = 0; w < stride_; ++w) {
            uint64_t bits = p[w];
            while (bits) {
                size_t c = w * 64 + std::countr_zero(bits);
                t.set(c, r, true);
                bits &= bits - 1;
            }
        }
    }
    return t;
}

BinaryMatrix BinaryMatrix::operator*(const BinaryMatrix& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("matmul dimension mismatch");
    BinaryMatrix out(rows_, other.cols_);
    for (size_t r = 0; r < rows_; ++r) {
        const uint64_t* p = row_words(r);
        uint64_t* o = out.row_words(r);
        for (size_t w = 0; w < stride_; ++w) {
            uint64_t bits = p[w];
            while (bits) {
                size_t k = w * 64 + std::countr_zero(bits);
                const uint64_t* b = other.row_words(k);
                for (size_t v = 0; v < other.stride_; ++v) o[v] ^= b[v];
                bits &= bits - 1;
            }
        }
    }
    return out;
}

BinaryVector BinaryMatrix::operator*(const BinaryVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matvec dimension mismatch");
    BinaryVector out(rows_);
    for (size_t r = 0; r < rows_; ++r) {
        uint64_t acc = 0;
        const uint64_t* p = row_words(r);
        for (size_t w = 0; w < stride_; ++w) acc ^= p[w] & v.words()[w];
        if (std::popcount(acc) & 1) out.set(r, true);
    }
    return out;
}

BinaryMatrix BinaryMatrix::operator+(const BinaryMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix add dimension mismatch");
    BinaryMatrix out = *this;
    for (size_t i = 0; i < words_.size(); ++i) out.words_[i] ^= other.words_[i];
    return out;
}

bool BinaryMatrix::operator==(const BinaryMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && words_ == other.words_;
}

bool BinaryMatrix::is_zero() const {
    for (uint64_t w : words_)
        if (w) return false;
    return true;
}

size_t BinaryMatrix::rank() const {
    BinaryMatrix work = *this;
    size_t rank = 0;
    for (size_t c = 0; c < cols_ && rank < rows_; ++c) {
        size_t w = c >> 6;
        uint64_t mask = uint64_t(1) << (c & 63);
        size_t pivot = rank;
        while (pivot < rows_ && !(work.word(pivot, w) & mask)) ++pivot;
        if (pivot == rows_) continue;
        work.swap_rows(rank, pivot);
        for (size_t r = pivot + 1; r < rows_; ++r)
            if (work.word(r, w) & mask) work.xor_rows(r, rank);
        ++rank;
    }
    return rank;
}

RowReduceResult BinaryMatrix::row_reduce() const {
    RowReduceResult res;
    res.reduced = *this;
    res.transform = identity(rows_);
    BinaryMatrix& a = res.reduced;
    BinaryMatrix& t = res.transform;
    size_t rank = 0;
    for (size_t c = 0; c < cols_ && rank < rows_; ++c) {
        size_t w = c >> 6;
        uint64_t mask = uint64_t(1) << (c & 63);
        size_t pivot = rank;
        while (pivot < rows_ && !(a.word(pivot, w) & mask)) ++pivot;
        if (pivot == rows_) continue;
        a.swap_rows(rank, pivot);
        t.swap_rows(rank, pivot);
        for (size_t r = 0; r < rows_; ++r) {
            if (r != rank && (a.word(r, w) & mask)) {
                a.xor_rows(r, rank);
                t.xor_rows(r, rank);
            }
        }
        res.pivot_cols.push_back(static_cast<uint32_t>(c));
        ++rank;
    }
    return res;
}

BinaryMatrix BinaryMatrix::kernel_basis() const {
    RowReduceResult rr = row_reduce();
    std::vector<bool> is_pivot(cols_, false);
    for (uint32_t c : rr.pivot_cols) is_pivot[c] = true;
    std::vector<uint32_t> free_cols;
    for (size_t c = 0; c < cols_; ++c)
        if (!is_pivot[c]) free_cols.push_back(static_cast<uint32_t>(c));

    BinaryMatrix basis(free_cols.size(), cols_);
    for (size_t i = 0; i < free_cols.size(); ++i) {
        uint32_t f = free_cols[i];
        basis.set(i, f, true);
        for (size_t p = 0; p < rr.pivot_cols.size(); ++p)
            if (rr.reduced.get(p, f)) basis.set(i, rr.pivot_cols[p], true);
    }
    return basis;
}

std::optional<BinaryVector> BinaryMatrix::solve(const BinaryVector& b) const {
    if (b.size() != rows_) throw std::invalid_argument("solve dimension mismatch");
    RowReduceResult rr = row_reduce();
    BinaryVector tb = rr.transform * b;
    size_t rank = rr.pivot_cols.size();
    for (size_t r = rank; r < rows_; ++r)
        if (tb.get(r)) return std::nullopt;
    BinaryVector x(cols_);
    for (size_t p = 0; p < rank; ++p)
        if (tb.get(p)) x.set(rr.pivot_cols[p], true);
    return x;
}

BinaryMatrix BinaryMatrix::hstack(const BinaryMatrix& right) const {
    if (rows_ != right.rows_) throw std::invalid_argument("hstack row mismatch");
    BinaryMatrix out(rows_, cols_ + right.cols_);
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < cols_; ++c)
            if (get(r, c)) out.set(r, c, true);
        for (size_t c = 0; c < right.cols_; ++c)
            if (right.get(r, c)) out.set(r, cols_ + c, true);
    }
    return out;
}

BinaryMatrix BinaryMatrix::vstack(const BinaryMatrix& below) const {
    if (cols_ != below.cols_ && rows_ != 0 && below.rows_ != 0)
        throw std::invalid_argument("vstack col mismatch");
    size_t cols = rows_ ? cols_ : below.cols_;
    BinaryMatrix out(rows_ + below.rows_, cols);
    for (size_t r = 0; r < rows_; ++r)
        for (size_t w = 0; w < stride_; ++w) out.word(r, w) = word(r, w);
    for (size_t r = 0; r < below.rows_; ++r)
        for (size_t w = 0; w < below.stride_; ++w) out.word(rows_ + r, w) = below.word(r, w);
    return out;
}

BinaryMatrix BinaryMatrix::kron(const BinaryMatrix& other) const {
    BinaryMatrix out(rows_ * other.rows_, cols_ * other.cols_);
    for (auto [r1, c1] : ones())
        for (auto [r2, c2] : other.ones())
            out.set(size_t(r1) * other.rows_ + r2, size_t(c1) * other.cols_ + c2, true);
    return out;
}

BinaryMatrix BinaryMatrix::select_columns(const std::vector<uint32_t>& cols) const {
    BinaryMatrix out(rows_, cols.size());
    for (size_t r = 0; r < rows_; ++r)
        for (size_t i = 0; i < cols.size(); ++i)
            if (get(r, cols[i])) out.set(r, i, true);
    return out;
}

BinaryMatrix BinaryMatrix::select_rows(const std::vector<uint32_t>& rows) const {
    BinaryMatrix out(rows.size(), cols_);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t w = 0; w < stride_; ++w) out.word(i, w) = word(rows[i], w);
    return out;
}

std::vector<std::pair<uint32_t, uint32_t>> BinaryMatrix::ones() const {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (size_t r = 0; r < rows_; ++r) {
        const uint64_t* p = row_words(r);
        for (size_t w = 0; w < stride_; ++w) {
            uint64_t bits = p[w];
            while (bits) {
                out.emplace_back(static_cast<uint32_t>(r), static_cast<uint32_t>(w * 64 + std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
    }
    return out;
}

std::string BinaryMatrix::str() const {
    std::string s;
    s.reserve(rows_ * (cols_ + 1));
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < cols_; ++c) s += get(r, c) ? '1' : '0';
        s += '\n';
    }
    return s;
}

}  // namespace qforge
