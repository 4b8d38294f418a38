#pragma once

#include <filesystem>

#include "amil/families.hpp"

namespace amil::data {

// Columnar binary event file. Layout, all little-endian:
//   "AMIL" | version u32 | family tag u32 | theta f64 | n u64 | dim u32
// followed by n*dim row-major f64 features.
void write_events(const EventSet& set, const std::filesystem::path& path);
EventSet read_events(const std::filesystem::path& path);

// CSV projection with a header row (f0,f1,...).
void write_events_csv(const EventSet& set, const std::filesystem::path& path);

} // namespace amil::data
