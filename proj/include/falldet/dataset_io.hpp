#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

// Dataset dump, little-endian:
//   "FDD1" | u16 version | u64 count
//   per window: u8 label | u8 axis | f64 t_start | i32 event_id (-1 = none)
//               | i32 setting_id (-1 = none) | u64 source_index (all ones = none)
//               | u64 n | f64[n] samples
std::vector<std::uint8_t> write_dataset(const LabeledDataset& data);
LabeledDataset parse_dataset(std::span<const std::uint8_t> bytes);

}  // namespace falldet
