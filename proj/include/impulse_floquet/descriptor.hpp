#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "impulse_floquet/system.hpp"

namespace impulse_floquet {

/// System from a JSON descriptor
///   {"period": T, "coefficients": {"a": [{"end": e, "poly": [c0, c1, ...]}, ...], "b": ..., "c": ...},
///    "impulses": [{"tau": t, "alpha": a, "beta": b}, ...]}
/// Segments partition [0, T] in order; polynomial coefficients are in absolute time.
/// The result passes validate_system; every problem throws DescriptorError naming the field.
ImpulsiveSystem system_from_json(const nlohmann::json& descriptor);

/// Parses descriptor text; syntax errors report the line and column.
ImpulsiveSystem parse_descriptor(const std::string& text);

/// Reads a descriptor from a file path, or parses the argument itself when it starts with '{'.
ImpulsiveSystem load_descriptor(const std::string& path_or_inline);

/// Descriptor of a piecewise-polynomial system; throws DomainError for callable segments.
nlohmann::json system_to_json(const ImpulsiveSystem& system);

}  // namespace impulse_floquet
