#pragma once

#include <optional>
#include <string>

#include "holo/bem.hpp"

namespace holo {

// Cache layout, all little-endian:
//   char[4] "HBEM", u32 version (1), u64 mesh hash, u64 array hash,
//   f64 frequency, f64 wavenumber, u64 rows (M), u64 cols (T),
//   then M*T (f64 re, f64 im) pairs in row-major order.
inline constexpr std::uint32_t kBemCacheVersion = 1;

void write_bem_cache(const std::string& path, const BemOperator& op, const MediumConfig& medium);

/// Returns nullopt when the file is absent or keyed to a different mesh, array,
/// or frequency. Throws ParseError when the file is present but corrupt.
std::optional<BemOperator> read_bem_cache(const std::string& path, const SurfaceMesh& mesh,
                                          const TransducerArray& array, const MediumConfig& medium);

/// Reads the cache when it matches, otherwise builds and writes it.
BemOperator bem_build_cached(const std::string& path, const SurfaceMesh& mesh, const TransducerArray& array,
                             const MediumConfig& medium, const BemOptions& options = {});

}  // namespace holo
