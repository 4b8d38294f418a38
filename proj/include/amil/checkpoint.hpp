#pragma once

#include <filesystem>
#include <optional>

#include "amil/model.hpp"

namespace amil::io {

// Model checkpoint. Layout, all little-endian:
//   "AMCK" | version u32 | head tag u32 | input_dim u32 | hidden_width u32 |
//   n_hidden u32 | n_classes u32 | dropout f64 | l2 f64 | bn_eps f64 |
//   bn_momentum f64 | schedule_hash u64 | n_norm u64 | n_params u64 |
//   n_running u64 | payload (norm mean, norm std, params, running, as f64) |
//   fnv1a-64 of the payload bytes
// A load reproduces eval outputs bit-exactly.
void save_checkpoint(const net::BagModel& model, const std::filesystem::path& path,
                     std::uint64_t schedule_hash = 0);

net::BagModel load_checkpoint(const std::filesystem::path& path);

// Loading into a pipeline with a fixed head; mismatches are rejected.
net::BagModel load_checkpoint(const std::filesystem::path& path, net::HeadKind expected_head);

std::uint64_t fnv1a64(const void* data, std::size_t n_bytes);

} // namespace amil::io
