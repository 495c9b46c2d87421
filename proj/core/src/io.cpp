#include "gibbslab/io.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "gibbslab/numeric.hpp"

namespace gibbslab {

std::string to_json_array(std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_g17(values[i]);
  }
  out += ']';
  return out;
}

std::string to_json_array(std::span<const std::int64_t> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  out += ']';
  return out;
}

std::string to_json_array(const SimplexPoint& z) { return to_json_array(z.span()); }

std::string to_json_array(const LatticePoint& point) {
  return to_json_array(std::span<const std::int64_t>(point.counts()));
}

std::vector<double> parse_json_number_array(const std::string& text) {
  const char* p = text.c_str();
  const auto skip_ws = [&] {
    while (*p == ' ' || *p == '\t' || *p == '\n' || *p == '\r') ++p;
  };
  skip_ws();
  if (*p != '[') throw std::invalid_argument("expected a JSON array");
  ++p;
  std::vector<double> values;
  skip_ws();
  if (*p == ']') return values;
  for (;;) {
    skip_ws();
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p || !std::isfinite(v))
      throw std::invalid_argument("expected a finite number in JSON array");
    values.push_back(v);
    p = end;
    skip_ws();
    if (*p == ',') {
      ++p;
      continue;
    }
    if (*p == ']') {
      ++p;
      break;
    }
    throw std::invalid_argument("malformed JSON array");
  }
  skip_ws();
  if (*p != '\0') throw std::invalid_argument("trailing content after JSON array");
  return values;
}

SimplexPoint simplex_from_json(const std::string& text) {
  return SimplexPoint(parse_json_number_array(text));
}

LatticePoint lattice_from_json(const std::string& text) {
  const std::vector<double> values = parse_json_number_array(text);
  std::vector<std::int64_t> counts(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v < 0.0 || v != std::floor(v))
      throw std::invalid_argument("lattice_from_json: counts must be nonnegative integers");
    counts[i] = static_cast<std::int64_t>(v);
  }
  return LatticePoint::from_counts(std::move(counts));
}

}  // namespace gibbslab
