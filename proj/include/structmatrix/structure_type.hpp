#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace structmatrix {

// The structure vocabulary. Enumerator order is the canonical segment order
// of the matrix.
enum class StructureType : std::uint8_t { fs, st, ch, nc, fc, nb, fb, undefined };

inline constexpr std::size_t kVocabularySize = 7;

inline constexpr std::array<StructureType, kVocabularySize> kVocabulary = {
    StructureType::fs, StructureType::st, StructureType::ch, StructureType::nc,
    StructureType::fc, StructureType::nb, StructureType::fb};

constexpr std::size_t index_of(StructureType t) { return static_cast<std::size_t>(t); }

constexpr std::string_view to_string(StructureType t) {
  switch (t) {
    case StructureType::fs: return "fs";
    case StructureType::st: return "st";
    case StructureType::ch: return "ch";
    case StructureType::nc: return "nc";
    case StructureType::fc: return "fc";
    case StructureType::nb: return "nb";
    case StructureType::fb: return "fb";
    case StructureType::undefined: return "undefined";
  }
  return "undefined";
}

inline std::optional<StructureType> parse_structure_type(std::string_view s) {
  for (StructureType t : kVocabulary) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

enum class ChainMode : std::uint8_t { strict_path, tree_literal };

constexpr std::string_view to_string(ChainMode m) {
  return m == ChainMode::strict_path ? "strict_path" : "tree_literal";
}

inline ChainMode parse_chain_mode(std::string_view s) {
  if (s == "strict_path" || s == "strict-path" || s == "path") return ChainMode::strict_path;
  if (s == "tree_literal" || s == "tree-literal" || s == "tree") return ChainMode::tree_literal;
  throw std::invalid_argument("unknown chain mode '" + std::string(s) + "'");
}

}  // namespace structmatrix
