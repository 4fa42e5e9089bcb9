#pragma once

#include <cstdint>
#include <string_view>

namespace rankstab {

/// 64-bit seed from a SHA-256 digest of the canonical trial coordinates.
/// Stable across runs, platforms, and execution order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view dataset_id,
                          std::size_t p_index, std::size_t replicate, std::string_view tag);

}  // namespace rankstab
