#pragma once

// Report serialization: JSON with 17 significant digits, CSV tables, SVG figure.
// Files are written to a temporary name and renamed into place.

#include <string>
#include <vector>

#include <json.hpp>

#include "typek/attractor.hpp"
#include "typek/fixed_points.hpp"
#include "typek/hypothesis.hpp"
#include "typek/orbit.hpp"

namespace typek::io {

using Json = nlohmann::ordered_json;

/// Pretty JSON; floating-point numbers printed with %.17g, non-finite as null.
std::string dump(const Json& j);

/// %.17g
std::string fmt_real(double v);

void write_file_atomic(const std::string& path, const std::string& content);

Json to_json(const Vec& v);
Json map_info(const KolmogorovMap& map);
Json to_json(const HypothesisReport& r);
Json to_json(const FixedPointRecord& r);
Json fixed_points_json(const KolmogorovMap& map, const std::vector<FixedPointRecord>& fps);
std::string fixed_points_csv(const std::vector<FixedPointRecord>& fps);
Json to_json(const KolmogorovMap& map, const AttractorDecomposition& d);
std::string attractor_svg(const KolmogorovMap& map, const AttractorDecomposition& d);
std::string orbit_csv(const OrbitTrace& t);
Json orbit_summary(const OrbitTrace& t, std::size_t window = 10);
Json to_json(const RetrotoneResult& r, bool weak, std::uint64_t seed);

}  // namespace typek::io
