#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnsvec/ontology.hpp"
#include "dnsvec/situation.hpp"

namespace dnsvec {

/// Ontology DSL (".sandra"):
///
///     file      := stmt*
///     stmt      := role_decl | desc_decl
///     role_decl := "role" NAME ("<" NAME ("," NAME)*)?
///     desc_decl := "description" NAME ("<" NAME ("," NAME)*)? "{" NAME ("," NAME)* "}"
///
/// `<` lists subsumption parents, `#` starts a line comment. The first error
/// throws SyntaxError ("expected X, found Y") with the offending token's span.
std::vector<Declaration> parse_ontology_text(std::string_view src);
std::string serialize_ontology_text(std::span<const Declaration> decls);

/// Structured ontology document:
///     {"roles": [{"name", "parents"?}], "descriptions": [{"name", "parents"?, "components"}]}
/// Malformed JSON throws SyntaxError with a span; shape errors throw
/// SchemaError whose path() names the offending node (e.g.
/// "$.descriptions[1].components").
std::vector<Declaration> parse_ontology_structured(std::string_view src);
std::string serialize_ontology_structured(std::span<const Declaration> decls);

/// Situation document: {"id", "entities": [{"id", "roles": [...]}], "situations": [...]}.
/// "entities" and "situations" default to empty. Entity and situation ids must
/// be unique across the file (DuplicateEntityId).
Situation parse_situation(std::string_view src);
std::string serialize_situation(const Situation& s);

enum class OntologyFormat { Dsl, Structured };

/// ".json" selects the structured format; anything else is DSL. For stdin
/// ("-") the content decides: a leading '{' means structured.
OntologyFormat detect_format(const std::filesystem::path& path, std::string_view content);
std::vector<Declaration> parse_ontology(std::string_view src, OntologyFormat format);

/// Reads a whole file, or standard input when `path` is "-".
std::string read_source(const std::filesystem::path& path);

Ontology load_ontology(const std::filesystem::path& path);
Situation load_situation(const std::filesystem::path& path);

}  // namespace dnsvec
