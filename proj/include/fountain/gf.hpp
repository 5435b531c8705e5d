#pragma once

#include "fountain/common.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fountain {

using Elem = std::uint16_t;

// GF(2^m), 1 <= m <= 16. Elements are bit patterns; addition is xor.
class Field {
public:
    static std::uint32_t default_poly(int m);

    Field(int m, std::uint32_t poly);

    int m() const { return m_; }
    std::uint32_t q() const { return q_; }
    std::uint32_t poly() const { return poly_; }
    bool binary() const { return m_ == 1; }

    Elem add(Elem a, Elem b) const { return a ^ b; }
    Elem mul(Elem a, Elem b) const
    {
        if (a == 0 || b == 0)
            return 0;
        return exp_[log_[a] + log_[b]];
    }
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, unsigned e) const;

    // log/exp with respect to the generator found at construction.
    std::uint32_t log(Elem a) const { return log_[a]; }
    Elem exp(std::uint32_t i) const { return exp_[i % (q_ - 1)]; }

private:
    int m_;
    std::uint32_t q_;
    std::uint32_t poly_;
    std::vector<Elem> exp_;
    std::vector<std::uint32_t> log_;
};

using FieldPtr = std::shared_ptr<const Field>;

// Cached field with the default polynomial for m.
FieldPtr gf(int m);
// Field of order q (power of two).
FieldPtr gf_order(std::uint32_t q);

bool poly_irreducible(std::uint32_t poly, int m);

class FieldMatrix {
public:
    FieldMatrix() = default;
    FieldMatrix(FieldPtr f, std::size_t rows, std::size_t cols);

    static FieldMatrix identity(FieldPtr f, std::size_t n);
    static FieldMatrix random(FieldPtr f, std::size_t rows, std::size_t cols, Rng& rng);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const FieldPtr& field() const { return f_; }
    std::uint32_t q() const { return f_->q(); }
    bool binary() const { return f_->binary(); }

    Elem get(std::size_t r, std::size_t c) const
    {
        if (binary())
            return static_cast<Elem>((bits_[r * words_ + (c >> 6)] >> (c & 63)) & 1u);
        return data_[r * cols_ + c];
    }
    void set(std::size_t r, std::size_t c, Elem v);

    // row dst += coef * row src
    void add_row(std::size_t dst, std::size_t src, Elem coef = 1);
    // row dst += coef * other.row(src); other must have the same width
    void add_row_from(std::size_t dst, const FieldMatrix& other, std::size_t src, Elem coef = 1);
    void scale_row(std::size_t r, Elem coef);
    void swap_rows(std::size_t a, std::size_t b);
    bool row_is_zero(std::size_t r) const;
    std::size_t row_weight(std::size_t r) const;

    std::size_t words() const { return words_; }
    std::uint64_t* row_words(std::size_t r) { return bits_.data() + r * words_; }
    const std::uint64_t* row_words(std::size_t r) const { return bits_.data() + r * words_; }

    FieldMatrix transpose() const;
    FieldMatrix select_rows(const std::vector<std::size_t>& idx) const;
    FieldMatrix select_cols(const std::vector<std::size_t>& idx) const;
    FieldMatrix vstack(const FieldMatrix& below) const;
    FieldMatrix hstack(const FieldMatrix& right) const;

    bool operator==(const FieldMatrix& o) const;
    bool is_zero() const;

    // "rows cols q" then one row per line
    std::string dump() const;
    static FieldMatrix parse(const std::string& text);

private:
    FieldPtr f_;
    std::size_t rows_ = 0, cols_ = 0, words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<Elem> data_;
};

FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b);

struct EliminationReport {
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
    std::optional<FieldMatrix> solution; // cols x rhs-width, present iff consistent and rank == cols
    bool consistent = true;
};

std::size_t rank(const FieldMatrix& a);
// Solves A x = B for x.
EliminationReport gaussian_solve(const FieldMatrix& a, const FieldMatrix& b);
std::optional<FieldMatrix> inverse(const FieldMatrix& a);
// Rows form a basis of { x : a x^T = 0 }.
FieldMatrix nullspace(const FieldMatrix& a);

} // namespace fountain
