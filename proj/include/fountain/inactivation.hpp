#pragma once

#include "fountain/common.hpp"
#include "fountain/gf.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fountain {

struct Equation {
    std::vector<std::uint32_t> idx; // sorted, distinct
    std::vector<Elem> coef;         // empty means all ones
    Elem coef_at(std::size_t i) const { return coef.empty() ? Elem{1} : coef[i]; }
};

// Linear system over GF(q); rhs may have zero width for structure-only work.
struct SparseSystem {
    FieldPtr field;
    std::size_t nvars = 0;
    std::vector<Equation> eqs;
    FieldMatrix rhs; // eqs.size() x payload width

    SparseSystem() = default;
    SparseSystem(FieldPtr f, std::size_t n, std::size_t width = 0);

    void add(Equation e);
    void add(Equation e, const FieldMatrix& value, std::size_t row);
    void validate() const;
    FieldMatrix dense() const; // eqs x nvars
    std::size_t width() const { return rhs.cols(); }
};

enum class Strategy { random, max_reduced_degree, max_accumulated, max_component };

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& s);

struct TraceStep {
    std::size_t u = 0; // active variables before the step
    bool inactivation = false;
    std::uint32_t var = 0;
    std::size_t ripple = 0;
    std::size_t cloud = 0;
};

struct Triangulation {
    // (equation, variable) pairs in resolution order
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pivots;
    std::vector<std::uint32_t> inactive;
    std::vector<TraceStep> trace;
    bool complete = true; // false when stopped at an empty ripple
};

// One variable leaves the reduced graph per step. With stop_on_empty the
// procedure ends at the first empty ripple (plain peeling).
Triangulation triangulate(const SparseSystem& sys, Strategy strategy, Rng& rng, bool stop_on_empty = false);

struct InactivationResult {
    std::optional<FieldMatrix> solution; // nvars x width
    std::size_t inactivations = 0;
    std::vector<TraceStep> trace;
    bool success = false;
};

InactivationResult inactivation_decode(const SparseSystem& sys, Strategy strategy, Rng& rng);

// Solves given a finished triangulation.
InactivationResult solve_triangulated(const SparseSystem& sys, const Triangulation& tri);

std::string trace_tsv(const std::vector<TraceStep>& trace);

} // namespace fountain
