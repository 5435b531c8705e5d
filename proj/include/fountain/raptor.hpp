#pragma once

#include "fountain/degree.hpp"
#include "fountain/gf.hpp"
#include "fountain/inactivation.hpp"
#include "fountain/lt.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fountain {

enum class PrecodeKind { linear_random, hamming, spc, grs, r10_style, explicit_matrix };

const char* precode_kind_name(PrecodeKind k);
PrecodeKind parse_precode_kind(const std::string& s);

struct PrecodeParams {
    PrecodeKind kind = PrecodeKind::linear_random;
    std::size_t k = 0;
    std::size_t n = 0; // h, or n_c; ignored where implied by k
    int m = 1;         // GF(2^m)
};

// An (h, k) linear block code. G is k x h, H is (h-k) x h.
struct Precode {
    PrecodeKind kind = PrecodeKind::explicit_matrix;
    std::size_t k = 0, h = 0;
    FieldMatrix G, H;
    std::vector<Equation> h_rows;        // sparse copy of H
    std::map<std::size_t, double> theta; // row weight -> fraction of rows of H
    std::size_t s = 0, hp = 0;           // LDPC / HDPC row counts, r10-style only

    FieldPtr field() const { return G.field(); }
    double rate() const { return h ? static_cast<double>(k) / static_cast<double>(h) : 0.0; }

    FieldMatrix encode(const FieldMatrix& u) const; // h x width
    bool is_codeword(const FieldMatrix& v) const;
    std::optional<FieldMatrix> unencode(const FieldMatrix& v) const; // u from v = u G
    Column generator_column(std::size_t i) const;                    // column i of G, over k

    std::string dump() const;
    static Precode parse(const std::string& text);

    // info_ lists k columns of G forming an invertible block
    std::vector<std::size_t> info_;
    FieldMatrix info_inv_; // (G_S^T)^-1, empty when G_S = I
    void finish();
};

Precode build_precode(const PrecodeParams& p, Rng& rng);
Precode linear_random_precode(std::size_t k, std::size_t h, FieldPtr f, Rng& rng);
Precode hamming_precode(int t);
Precode spc_precode(std::size_t k);
Precode grs_precode(std::size_t k, std::size_t n_c, FieldPtr f);
Precode r10_precode(std::size_t k);
Precode explicit_precode(const FieldMatrix& g);

struct R10Sizes {
    std::size_t s = 0, hp = 0;
};
R10Sizes r10_sizes(std::size_t k);

// Systematic generator [I | (P^-1 A)^T] for H = [A | P], or a nullspace basis when P is singular.
FieldMatrix generator_from_parity(const FieldMatrix& h, std::size_t k);

struct RaptorEncoded {
    FieldMatrix intermediate; // h x width
    Encoded out;              // columns over the h intermediates
};

RaptorEncoded raptor_encode(const FieldMatrix& src, const Precode& pre, const DegreeDistribution& dist, std::size_t n,
                            Rng& rng);

// First h-k equations are the rows of H with zero right-hand side, then one per received column.
SparseSystem constraint_system(const Precode& pre, const std::vector<Column>& cols, const FieldMatrix& values);

struct RaptorDecodeResult {
    std::optional<FieldMatrix> intermediate;
    std::optional<FieldMatrix> source;
    std::size_t inactivations = 0;
    bool success = false;
};

// No strategy: dense elimination. Otherwise inactivation decoding.
RaptorDecodeResult raptor_decode(const Precode& pre, const std::vector<Column>& cols, const FieldMatrix& values,
                                 std::optional<Strategy> strategy, Rng& rng);

// Output i uses a column from its own stream; the first k outputs are the source.
class SystematicRaptor {
public:
    static SystematicRaptor make(const Precode& pre, const DegreeDistribution& dist, std::uint64_t seed,
                                 int budget = 32);

    const Precode& precode() const { return pre_; }
    std::size_t k() const { return pre_.k; }
    int attempts() const { return attempts_; }
    Column column(std::size_t i) const; // over the h intermediates

    FieldMatrix intermediate(const FieldMatrix& src) const;
    FieldMatrix encode(const FieldMatrix& src, std::size_t n) const;
    RaptorDecodeResult decode(const std::vector<std::size_t>& indices, const FieldMatrix& values,
                              std::optional<Strategy> strategy, Rng& rng) const;

private:
    Precode pre_;
    DegreeDistribution dist_;
    std::uint64_t seed_ = 0;
    int attempts_ = 0;
    std::vector<Column> g1_;
    FieldMatrix ft_inv_; // (F^T)^-1, F = G_p G_LT,1
};

// Block code prefix followed by LRFC columns over the k source symbols.
class ConcatScheme {
public:
    ConcatScheme(Precode pre, std::uint64_t seed);

    const Precode& precode() const { return pre_; }
    std::size_t k() const { return pre_.k; }
    std::size_t n_c() const { return pre_.h; }
    Column column(std::size_t i) const;

    FieldMatrix encode(const FieldMatrix& src, std::size_t l) const;
    std::optional<FieldMatrix> decode(const std::vector<std::size_t>& indices, const FieldMatrix& values) const;
    // Structure only: does the received set have rank k.
    bool decodable(const std::vector<std::size_t>& indices) const;

private:
    Precode pre_;
    std::uint64_t seed_;
    std::vector<Column> prefix_;
};

} // namespace fountain
