#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mhmp/hankel.hpp"
#include "mhmp/linalg.hpp"
#include "mhmp/solve.hpp"

namespace mhmp::io {

using json = nlohmann::json;

/// Nested rows of [re, im] pairs.
[[nodiscard]] json matrix_to_json(const CMatrix& a);
/// Throws ParseError on malformed input.
[[nodiscard]] CMatrix matrix_from_json(const json& j);

[[nodiscard]] json problem_to_json(const MomentProblem& p);
/// Throws ParseError on malformed or non-Hermitian input.
[[nodiscard]] MomentProblem problem_from_json(const json& j);

[[nodiscard]] json measure_to_json(const AtomicMeasure& mu);
/// m is needed for the empty measure.
[[nodiscard]] AtomicMeasure measure_from_json(const json& j, std::size_t m);

[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes) noexcept;
[[nodiscard]] std::string hex_digest(std::string_view bytes);

/// Whole file contents; throws ParseError if unreadable.
[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
/// Parses text as JSON; throws ParseError.
[[nodiscard]] json parse_json(const std::string& text);

}  // namespace mhmp::io
