#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fockprop/symbol.hpp"

namespace fockprop {

/// Symbol literal: a JSON array of {"kstar": [...], "k": [...], "re": x, "im": y}
/// in canonical term order. Doubles are written in shortest round-trip form,
/// so reading a written literal reproduces every coefficient bit for bit.
nlohmann::json symbol_to_json(const PolySymbol& s);

/// Parses a symbol literal. The mode count is taken from the terms; it must
/// agree with `modes` when given, and `modes` is required for an empty array.
PolySymbol symbol_from_json(const nlohmann::json& literal,
                            std::optional<std::size_t> modes = std::nullopt);

/// 64-bit FNV-1a of the compact canonical literal (plus the mode count).
std::uint64_t symbol_hash(const PolySymbol& s);
std::string symbol_hash_hex(const PolySymbol& s);

}  // namespace fockprop
