#pragma once

#include <string_view>

#include "sfiles/graph.hpp"

namespace sfiles {

/// Parses an SFILES string into a flowsheet graph. Instance numbers follow
/// first appearance per category; recycle digits and heat labels are
/// normalized away from whatever the input used. Throws ParseError.
FlowsheetGraph parse(std::string_view sfiles);

}  // namespace sfiles
