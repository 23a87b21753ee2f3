#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace synchrosde {

/// Philox4x32-10 counter-based generator: a pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Uniform in (0, 1) from two 32-bit words (52 random bits, centred in the cell).
double uniform_open(std::uint32_t hi, std::uint32_t lo);

/// Inverse standard normal CDF (Wichura AS241, about 1e-16 relative accuracy).
/// Throws DomainError outside (0, 1).
double normal_quantile(double p);

/// Standard normal variate number `index` of stream (seed, path).
/// Consecutive even/odd indices share one Philox block.
double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t index);

/// out[i] = standard_normal(seed, path, i).
void fill_standard_normals(std::uint64_t seed, std::uint64_t path, std::span<double> out);

}  // namespace synchrosde
