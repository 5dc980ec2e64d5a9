#pragma once

#include <filesystem>
#include <string>

#include "fent/finite_size.hpp"

namespace fent {

// SVG of normalized trace values against the inverse effective scale, with a
// dashed line per target 𝓑. Same report, same bytes.
std::string render_plot(const ScalingReport& report);
void emit_plot(const ScalingReport& report, const std::filesystem::path& path);

}  // namespace fent
