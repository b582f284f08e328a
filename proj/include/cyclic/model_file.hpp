#pragma once

// Plain-text null model files.
//
//   # comment                     blank lines and '#' comments ignored
//   model = markov                or: model = ar1
//   name = sticky5                optional, defaults to the model kind
//   states = -1.31 -0.47 0.03     markov: r distinct reals
//   transition = 0.6 0.2 0.2      markov: r lines, row v holds p(. | v)
//   mean = 0                      ar1
//   sd = 1                        ar1
//   phi = 0.9                     ar1
//
// Keys are case-sensitive; unknown keys and keys that do not belong to the
// declared model are errors.

#include <filesystem>
#include <istream>
#include <string>

#include "cyclic/null_models.hpp"

namespace cyclic {

/// Throws InputError (with line numbers) for malformed files, DomainError or
/// ConditionError for parameter sets that violate the model invariants.
NullModel parse_null_model(std::istream& in);
NullModel load_null_model(const std::filesystem::path& path);

/// Inverse of parse_null_model (values printed with round-trip precision).
std::string format_null_model(const NullModel& model);

}  // namespace cyclic
