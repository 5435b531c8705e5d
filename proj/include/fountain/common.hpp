#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fountain {

enum class Errc : int {
    ok = 0,
    invalid_argument = 1,
    domain_error = 2,
    construction_failed = 3,
    parse_error = 4,
    infeasible = 5,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        fail(Errc::invalid_argument, what);
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// p scaled to 2^64, saturating at both ends. Draws below the threshold succeed.
inline std::uint64_t prob_threshold(double p)
{
    if (!(p > 0.0))
        return 0;
    if (p >= 1.0)
        return UINT64_MAX;
    long double t = static_cast<long double>(p) * 18446744073709551616.0L;
    if (t >= 18446744073709551615.0L)
        return UINT64_MAX;
    return static_cast<std::uint64_t>(t);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : eng_(seed) {}

    // Independent stream for one trial; statistics never depend on scheduling.
    static Rng stream(std::uint64_t master, std::uint64_t index)
    {
        return Rng(splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
    }

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, n), unbiased (Lemire).
    std::uint64_t below(std::uint64_t n)
    {
        if (n <= 1)
            return 0;
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool hit(std::uint64_t threshold)
    {
        if (threshold == UINT64_MAX)
            return true;
        return next() < threshold;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace fountain
