#ifndef RISOAM_COMMON_HPP
#define RISOAM_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace risoam {

using cxd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when a solver run cannot continue (non-finite objective, degenerate
/// scenario detected mid-run). Configuration problems use std::invalid_argument.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string &what) : std::runtime_error(what) {}
};

/// SplitMix64 step, used to derive independent per-stream seeds from a master
/// seed (sweep rows, Monte-Carlo chunks).
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x51ed2701ULL));
}

inline double relative_change(double current, double previous)
{
    double denom = std::max(std::abs(previous), 1e-300);
    return std::abs(current - previous) / denom;
}

} // namespace risoam

#endif
