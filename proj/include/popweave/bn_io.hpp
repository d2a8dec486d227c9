#pragma once

#include "popweave/bayes_net.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace popweave {

inline constexpr int kFormatVersion = 1;

/// Parses a `.bn.json` network document:
///
///     {"format_version": 1,
///      "variables": [{"name": "A", "domain": ["0", "1"], "parents": [],
///                     "cpt": [[0.6, 0.4]]}, ...]}
///
/// Variables may appear in any order. Rows within `kRowSumTolerance` of 1
/// are renormalized. Throws `ParseError` (with a JSON-path context) for
/// malformed input, unknown fields, shape mismatches, duplicate names, and
/// any `validate_network` problem.
BayesianNetwork parse_bn(std::string_view text);

/// Structural parse only: rows are renormalized when within tolerance, but
/// dangling parents, cycles, and bad row sums are left for
/// `validate_network` to report.
BayesianNetwork parse_bn_unchecked(std::string_view text);

/// Emits the document `parse_bn` reads. Probabilities are written with
/// round-trip precision and are not renormalized.
std::string serialize_bn(const BayesianNetwork& bn);

std::string read_text_file(const std::filesystem::path& path);
BayesianNetwork load_bn(const std::filesystem::path& path);

}  // namespace popweave
