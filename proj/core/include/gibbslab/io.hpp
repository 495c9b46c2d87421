#pragma once

#include <string>
#include <vector>

#include "gibbslab/simplex.hpp"

namespace gibbslab {

/// JSON array of numbers at 17 significant digits, e.g. "[0.5,0.25,0.25]".
std::string to_json_array(std::span<const double> values);
std::string to_json_array(std::span<const std::int64_t> values);

std::string to_json_array(const SimplexPoint& z);
std::string to_json_array(const LatticePoint& point);

/// Parses a JSON array of numbers. Rejects anything but a flat array.
std::vector<double> parse_json_number_array(const std::string& text);

SimplexPoint simplex_from_json(const std::string& text);
LatticePoint lattice_from_json(const std::string& text);

}  // namespace gibbslab
