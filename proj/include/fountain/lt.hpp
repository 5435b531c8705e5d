#pragma once

#include "fountain/degree.hpp"
#include "fountain/gf.hpp"
#include "fountain/inactivation.hpp"

#include <optional>
#include <vector>

namespace fountain {

// One generator column: the inputs an output symbol combines.
using Column = Equation;

struct Encoded {
    FieldMatrix symbols; // n x payload width
    std::vector<Column> columns;
};

// k inputs, m received columns with their values.
struct ReceivedSet {
    std::size_t k = 0;
    std::vector<Column> columns;
    FieldMatrix values; // m x width

    std::size_t m() const { return columns.size(); }
    long overhead() const { return static_cast<long>(m()) - static_cast<long>(k); }
    SparseSystem system() const;
    FieldMatrix dense() const; // m x k, the transposed received generator
};

// d distinct inputs out of k, sorted.
std::vector<std::uint32_t> choose_distinct(std::size_t k, std::size_t d, Rng& rng);

Column lt_column(const DegreeDistribution& dist, std::size_t k, Rng& rng);
// Uniform over F_q^k, zero coefficients allowed (and then not stored).
Column lrfc_column(const Field& f, std::size_t k, Rng& rng);

FieldMatrix apply_columns(const FieldMatrix& src, const std::vector<Column>& cols);

Encoded lt_encode(const FieldMatrix& src, const DegreeDistribution& dist, std::size_t n, Rng& rng);
Encoded lrfc_encode(const FieldMatrix& src, std::size_t n, Rng& rng);

struct PeelingTrace {
    std::vector<std::uint32_t> resolved;
    std::vector<std::size_t> ripple;
    bool success = false;
};

struct PeelResult {
    std::optional<FieldMatrix> recovered;
    PeelingTrace trace;
};

PeelResult peel_decode(const ReceivedSet& rx, Rng& rng);
std::optional<FieldMatrix> ml_decode(const ReceivedSet& rx);

ReceivedSet receive(const Encoded& enc, std::size_t k, const std::vector<std::size_t>& indices);

// Systematic LT: the first k outputs are the source. Output i uses a column
// drawn from its own stream, so any index can be regenerated.
class SystematicLt {
public:
    static SystematicLt make(const DegreeDistribution& dist, std::size_t k, FieldPtr f, std::uint64_t seed,
                             int budget = 32);

    std::size_t k() const { return k_; }
    int attempts() const { return attempts_; }
    Column column(std::size_t i) const; // over the k intermediate symbols w

    FieldMatrix intermediate(const FieldMatrix& src) const; // w with v = w G1
    FieldMatrix encode(const FieldMatrix& src, std::size_t n) const;
    std::optional<FieldMatrix> decode(const std::vector<std::size_t>& indices, const FieldMatrix& values) const;

private:
    DegreeDistribution dist_;
    std::size_t k_ = 0;
    FieldPtr f_;
    std::uint64_t seed_ = 0;
    int attempts_ = 0;
    std::vector<Column> g1_;
    FieldMatrix g1t_inv_;
};

} // namespace fountain
