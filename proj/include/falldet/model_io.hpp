#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "falldet/cnn.hpp"
#include "falldet/logreg.hpp"

namespace falldet {

// Model container, little-endian:
//   "FDM1" | u16 version (1) | u8 kind (1 logistic, 2 CNN)
//   logistic: u32 p | u8 log_features | f64 beta[p + 1] | f64 feature_mean[p] | f64 feature_scale[p]
//   CNN:      u32 in_h, in_w, filters, kernel_h, kernel_w, pool_h, pool_w
//             | f64 input_mean | f64 input_scale | f64 threshold
//             | f64 conv_weights[] | f64 conv_bias[] | f64 dense_weights[] | f64 dense_bias
enum class ModelKind : std::uint8_t { LogReg = 1, Cnn = 2 };

ModelKind peek_model_kind(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> write_model(const LogRegModel& model);
std::vector<std::uint8_t> write_model(const CnnModel& model);

LogRegModel parse_logreg_model(std::span<const std::uint8_t> bytes);
CnnModel parse_cnn_model(std::span<const std::uint8_t> bytes);

}  // namespace falldet
