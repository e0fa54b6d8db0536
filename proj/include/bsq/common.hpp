// Shared constants, error types and small I/O helpers.

#pragma once

#include <complex>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bsq {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using cplx = std::complex<double>;

// A numerical certificate or tolerance contract was not met.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that cannot be read or parsed (files, flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Round-trippable, locale-independent decimal rendering (17 significant digits).
std::string format_double(double x);

// Writes `contents` to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Worker cap from BS_SPECTRA_THREADS (falls back to hardware concurrency, min 1).
unsigned worker_count();

}  // namespace bsq
