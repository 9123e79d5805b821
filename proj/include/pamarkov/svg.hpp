#pragma once

#include <string>

#include "pamarkov/partition.hpp"

namespace pam {

/// SVG 1.1 rendering of a partition on the square-tiled layout: one group
/// per rectangle (cells filled in a per-rectangle color), stable boundary
/// arcs solid, unstable arcs dashed, singularities as circles sized by
/// prong count.
std::string render_partition_svg(const PAMap& map, const MarkovPartition& mp);

}  // namespace pam
