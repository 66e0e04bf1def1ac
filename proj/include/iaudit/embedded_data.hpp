#pragma once

// Build-time copies of the data/ files (see cmake/embed_data.cmake). The
// binaries stay usable without an installed data directory; the files remain
// the source of truth and --lexicon/--signatures/--tables override them.
#include "embedded_lexicon.hpp"
#include "embedded_linker_tables.hpp"
#include "embedded_signatures.hpp"

namespace iaudit::embedded {

inline constexpr std::string_view kLexiconJson = lexicon_json;
inline constexpr std::string_view kSignaturesJson = signatures_json;
inline constexpr std::string_view kLinkerTablesJson = linker_tables_json;

}  // namespace iaudit::embedded
