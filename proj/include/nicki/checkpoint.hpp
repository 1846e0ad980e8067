#pragma once

#include "nicki/models.hpp"

#include <filesystem>

namespace nicki {

/// Checkpoint layout
///
///   <stem>.bin   every tensor's values back to back, row-major, as
///                little-endian IEEE-754 binary64, no padding or header
///   <stem>.json  {"format": "nicki-checkpoint", "version": 1,
///                 "tensors": [{"name", "rows", "cols", "offset"}, ...]}
///
/// `offset` is the byte position of the tensor's first value in the .bin file.
void save_checkpoint(const NamedTensors& tensors, const std::filesystem::path& stem);

// Returns fresh trainable tensors in file order.
NamedTensors load_checkpoint(const std::filesystem::path& stem);

// Copies values from `source` into same-named tensors of `target`; every
// target name must be present with a matching shape.
void assign_tensors(const NamedTensors& target, const NamedTensors& source);

} // namespace nicki
