#include "fountain/gf.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <mutex>
#include <sstream>

namespace fountain {

namespace {

int degree(std::uint32_t p) { return p ? 31 - std::countl_zero(p) : -1; }

std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b)
{
    int db = degree(b);
    for (int da = degree(a); da >= db; da = degree(a))
        a ^= b << (da - db);
    return a;
}

std::uint32_t mulmod(std::uint32_t a, std::uint32_t b, std::uint32_t poly, int m)
{
    std::uint32_t r = 0;
    while (b) {
        if (b & 1u)
            r ^= a;
        b >>= 1;
        a <<= 1;
        if (a >> m & 1u)
            a ^= poly;
    }
    return r;
}

} // namespace

std::uint32_t Field::default_poly(int m)
{
    static constexpr std::array<std::uint32_t, 17> polys = {
        0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,   0x11D,
        0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
    };
    require(m >= 1 && m <= 16, "field degree m must be in [1,16]");
    return polys[static_cast<std::size_t>(m)];
}

bool poly_irreducible(std::uint32_t poly, int m)
{
    if (degree(poly) != m)
        return false;
    if (m == 1)
        return true;
    for (std::uint32_t f = 2; degree(f) <= m / 2; ++f)
        if (poly_mod(poly, f) == 0)
            return false;
    return true;
}

Field::Field(int m, std::uint32_t poly) : m_(m), q_(1u << m), poly_(poly)
{
    require(m >= 1 && m <= 16, "field degree m must be in [1,16]");
    require(poly_irreducible(poly, m), "reduction polynomial is not irreducible of degree m");
    const std::uint32_t n = q_ - 1;
    exp_.assign(2 * static_cast<std::size_t>(n), 0);
    log_.assign(q_, 0);
    if (q_ == 2) {
        exp_ = {1, 1};
        return;
    }
    for (std::uint32_t g = 2; g < q_; ++g) {
        std::uint32_t x = 1;
        std::uint32_t order = 0;
        do {
            x = mulmod(x, g, poly_, m_);
            ++order;
        } while (x != 1 && order <= n);
        if (order != n)
            continue;
        x = 1;
        for (std::uint32_t i = 0; i < n; ++i) {
            exp_[i] = exp_[i + n] = static_cast<Elem>(x);
            log_[x] = i;
            x = mulmod(x, g, poly_, m_);
        }
        return;
    }
    fail(Errc::construction_failed, "no generator found");
}

Elem Field::inv(Elem a) const
{
    if (a == 0)
        fail(Errc::domain_error, "inverse of zero");
    if (q_ == 2)
        return 1;
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

Elem Field::pow(Elem a, unsigned e) const
{
    if (e == 0)
        return 1;
    if (a == 0)
        return 0;
    return exp_[static_cast<std::uint64_t>(log_[a]) * e % (q_ - 1)];
}

FieldPtr gf(int m)
{
    static std::mutex mu;
    static std::array<FieldPtr, 17> cache;
    require(m >= 1 && m <= 16, "field degree m must be in [1,16]");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[static_cast<std::size_t>(m)];
    if (!slot)
        slot = std::make_shared<const Field>(m, Field::default_poly(m));
    return slot;
}

FieldPtr gf_order(std::uint32_t q)
{
    require(q >= 2 && std::has_single_bit(q) && q <= 65536, "field order must be a power of two in [2, 65536]");
    return gf(std::countr_zero(q));
}

FieldMatrix::FieldMatrix(FieldPtr f, std::size_t rows, std::size_t cols)
    : f_(std::move(f)), rows_(rows), cols_(cols)
{
    require(f_ != nullptr, "matrix needs a field");
    if (f_->binary()) {
        words_ = (cols + 63) / 64;
        bits_.assign(rows * words_, 0);
    } else {
        data_.assign(rows * cols, 0);
    }
}

FieldMatrix FieldMatrix::identity(FieldPtr f, std::size_t n)
{
    FieldMatrix m(std::move(f), n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, 1);
    return m;
}

FieldMatrix FieldMatrix::random(FieldPtr f, std::size_t rows, std::size_t cols, Rng& rng)
{
    FieldMatrix m(std::move(f), rows, cols);
    const std::uint32_t q = m.q();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m.set(r, c, static_cast<Elem>(rng.below(q)));
    return m;
}

void FieldMatrix::set(std::size_t r, std::size_t c, Elem v)
{
    if (v >= q())
        fail(Errc::invalid_argument, "matrix entry out of field range");
    if (binary()) {
        std::uint64_t& w = bits_[r * words_ + (c >> 6)];
        std::uint64_t bit = 1ull << (c & 63);
        w = v ? (w | bit) : (w & ~bit);
    } else {
        data_[r * cols_ + c] = v;
    }
}

void FieldMatrix::add_row(std::size_t dst, std::size_t src, Elem coef) { add_row_from(dst, *this, src, coef); }

void FieldMatrix::add_row_from(std::size_t dst, const FieldMatrix& other, std::size_t src, Elem coef)
{
    if (coef == 0)
        return;
    if (binary()) {
        std::uint64_t* d = row_words(dst);
        const std::uint64_t* s = other.row_words(src);
        for (std::size_t w = 0; w < words_; ++w)
            d[w] ^= s[w];
        return;
    }
    Elem* d = data_.data() + dst * cols_;
    const Elem* s = other.data_.data() + src * cols_;
    if (coef == 1) {
        for (std::size_t c = 0; c < cols_; ++c)
            d[c] ^= s[c];
        return;
    }
    const Field& f = *f_;
    for (std::size_t c = 0; c < cols_; ++c)
        if (s[c])
            d[c] ^= f.mul(coef, s[c]);
}

void FieldMatrix::scale_row(std::size_t r, Elem coef)
{
    if (coef == 1)
        return;
    if (binary()) {
        if (coef == 0)
            std::fill_n(row_words(r), words_, 0);
        return;
    }
    Elem* d = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c)
        d[c] = f_->mul(coef, d[c]);
}

void FieldMatrix::swap_rows(std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    if (binary())
        std::swap_ranges(row_words(a), row_words(a) + words_, row_words(b));
    else
        std::swap_ranges(data_.begin() + a * cols_, data_.begin() + (a + 1) * cols_, data_.begin() + b * cols_);
}

bool FieldMatrix::row_is_zero(std::size_t r) const
{
    if (binary()) {
        const std::uint64_t* w = row_words(r);
        return std::all_of(w, w + words_, [](std::uint64_t x) { return x == 0; });
    }
    auto it = data_.begin() + r * cols_;
    return std::all_of(it, it + cols_, [](Elem x) { return x == 0; });
}

std::size_t FieldMatrix::row_weight(std::size_t r) const
{
    std::size_t n = 0;
    if (binary()) {
        const std::uint64_t* w = row_words(r);
        for (std::size_t i = 0; i < words_; ++i)
            n += static_cast<std::size_t>(std::popcount(w[i]));
        return n;
    }
    for (std::size_t c = 0; c < cols_; ++c)
        n += data_[r * cols_ + c] != 0;
    return n;
}

FieldMatrix FieldMatrix::transpose() const
{
    FieldMatrix t(f_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (Elem v = get(r, c))
                t.set(c, r, v);
    return t;
}

FieldMatrix FieldMatrix::select_rows(const std::vector<std::size_t>& idx) const
{
    FieldMatrix out(f_, idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        require(idx[i] < rows_, "row index out of range");
        if (binary())
            std::copy_n(row_words(idx[i]), words_, out.row_words(i));
        else
            std::copy_n(data_.begin() + idx[i] * cols_, cols_, out.data_.begin() + i * cols_);
    }
    return out;
}

FieldMatrix FieldMatrix::select_cols(const std::vector<std::size_t>& idx) const
{
    FieldMatrix out(f_, rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        require(idx[j] < cols_, "column index out of range");
        for (std::size_t r = 0; r < rows_; ++r)
            if (Elem v = get(r, idx[j]))
                out.set(r, j, v);
    }
    return out;
}

FieldMatrix FieldMatrix::vstack(const FieldMatrix& below) const
{
    require(below.cols_ == cols_ && below.q() == q(), "vstack shape mismatch");
    FieldMatrix out(f_, rows_ + below.rows_, cols_);
    if (binary()) {
        std::copy(bits_.begin(), bits_.end(), out.bits_.begin());
        std::copy(below.bits_.begin(), below.bits_.end(), out.bits_.begin() + static_cast<long>(bits_.size()));
    } else {
        std::copy(data_.begin(), data_.end(), out.data_.begin());
        std::copy(below.data_.begin(), below.data_.end(), out.data_.begin() + static_cast<long>(data_.size()));
    }
    return out;
}

FieldMatrix FieldMatrix::hstack(const FieldMatrix& right) const
{
    require(right.rows_ == rows_ && right.q() == q(), "hstack shape mismatch");
    FieldMatrix out(f_, rows_, cols_ + right.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c)
            if (Elem v = get(r, c))
                out.set(r, c, v);
        for (std::size_t c = 0; c < right.cols_; ++c)
            if (Elem v = right.get(r, c))
                out.set(r, cols_ + c, v);
    }
    return out;
}

bool FieldMatrix::operator==(const FieldMatrix& o) const
{
    return rows_ == o.rows_ && cols_ == o.cols_ && q() == o.q() && bits_ == o.bits_ && data_ == o.data_;
}

bool FieldMatrix::is_zero() const
{
    for (std::size_t r = 0; r < rows_; ++r)
        if (!row_is_zero(r))
            return false;
    return true;
}

std::string FieldMatrix::dump() const
{
    std::ostringstream os;
    os << rows_ << ' ' << cols_ << ' ' << q() << '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c)
            os << (c ? " " : "") << get(r, c);
        os << '\n';
    }
    return os.str();
}

FieldMatrix FieldMatrix::parse(const std::string& text)
{
    std::istringstream is(text);
    std::size_t rows = 0, cols = 0;
    std::uint32_t q = 0;
    if (!(is >> rows >> cols >> q))
        fail(Errc::parse_error, "matrix header must be 'rows cols q'");
    FieldMatrix m(gf_order(q), rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            unsigned v = 0;
            if (!(is >> v))
                fail(Errc::parse_error, "matrix body truncated");
            if (v >= q)
                fail(Errc::parse_error, "matrix entry out of field range");
            m.set(r, c, static_cast<Elem>(v));
        }
    return m;
}

FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b)
{
    require(a.cols() == b.rows() && a.q() == b.q(), "matrix product shape mismatch");
    FieldMatrix out(a.field(), a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k)
            if (Elem v = a.get(r, k))
                out.add_row_from(r, b, k, v);
    return out;
}

FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b)
{
    require(a.rows() == b.rows() && a.cols() == b.cols() && a.q() == b.q(), "matrix sum shape mismatch");
    FieldMatrix out = a;
    for (std::size_t r = 0; r < a.rows(); ++r)
        out.add_row_from(r, b, r, 1);
    return out;
}

namespace {

// Reduced row echelon form over the first ncols columns; returns pivot columns.
std::vector<std::size_t> rref(FieldMatrix& m, std::size_t ncols)
{
    std::vector<std::size_t> pivots;
    const Field& f = *m.field();
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m.get(p, c) == 0)
            ++p;
        if (p == m.rows())
            continue;
        m.swap_rows(r, p);
        m.scale_row(r, f.inv(m.get(r, c)));
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (i != r)
                if (Elem v = m.get(i, c))
                    m.add_row(i, r, v);
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

std::size_t rank(const FieldMatrix& a)
{
    if (a.rows() == 0 || a.cols() == 0)
        return 0;
    FieldMatrix m = a;
    return rref(m, a.cols()).size();
}

EliminationReport gaussian_solve(const FieldMatrix& a, const FieldMatrix& b)
{
    require(a.rows() == b.rows(), "right-hand side row count must match");
    require(a.q() == b.q(), "field mismatch");
    EliminationReport rep;
    FieldMatrix aug = a.hstack(b);
    rep.pivots = rref(aug, a.cols());
    rep.rank = rep.pivots.size();
    for (std::size_t r = rep.rank; r < aug.rows() && rep.consistent; ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
            if (aug.get(r, a.cols() + c) != 0) {
                rep.consistent = false;
                break;
            }
    if (rep.consistent && rep.rank == a.cols()) {
        FieldMatrix x(a.field(), a.cols(), b.cols());
        for (std::size_t i = 0; i < rep.rank; ++i)
            for (std::size_t c = 0; c < b.cols(); ++c)
                if (Elem v = aug.get(i, a.cols() + c))
                    x.set(rep.pivots[i], c, v);
        rep.solution = std::move(x);
    }
    return rep;
}

std::optional<FieldMatrix> inverse(const FieldMatrix& a)
{
    require(a.rows() == a.cols(), "inverse needs a square matrix");
    auto rep = gaussian_solve(a, FieldMatrix::identity(a.field(), a.rows()));
    return rep.solution;
}

} // namespace fountain

namespace fountain {

FieldMatrix nullspace(const FieldMatrix& a)
{
    FieldMatrix m = a;
    auto pivots = m.rows() ? rref(m, a.cols()) : std::vector<std::size_t>{};
    std::vector<char> is_pivot(a.cols(), 0);
    for (auto p : pivots)
        is_pivot[p] = 1;
    FieldMatrix out(a.field(), a.cols() - pivots.size(), a.cols());
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        if (is_pivot[c])
            continue;
        out.set(r, c, 1);
        for (std::size_t i = 0; i < pivots.size(); ++i)
            if (Elem v = m.get(i, c))
                out.set(r, pivots[i], v);
        ++r;
    }
    return out;
}

} // namespace fountain
