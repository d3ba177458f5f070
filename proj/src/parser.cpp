#include "dnsvec/parser.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dnsvec {

using json = nlohmann::ordered_json;

std::size_t total_entities(const Situation& s) {
  std::size_t n = s.entities.size();
  for (const auto& nested : s.situations) n += total_entities(nested);
  return n;
}

std::size_t nesting_depth(const Situation& s) {
  std::size_t depth = 0;
  for (const auto& nested : s.situations) depth = std::max(depth, 1 + nesting_depth(nested));
  return depth;
}

namespace {

// ---------------------------------------------------------------------------
// DSL

enum class Tok { Name, Less, Comma, LBrace, RBrace, End };

struct Token {
  Tok kind;
  std::string_view text;
  SourceSpan span;
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_trivia();
    const SourceSpan start{line_, column_, 1};
    if (pos_ >= src_.size()) return {Tok::End, {}, start};

    const char c = src_[pos_];
    auto single = [&](Tok kind) {
      advance();
      return Token{kind, src_.substr(pos_ - 1, 1), start};
    };
    switch (c) {
      case '<': return single(Tok::Less);
      case ',': return single(Tok::Comma);
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      default: break;
    }
    if (is_name_start(c)) {
      const std::size_t begin = pos_;
      while (pos_ < src_.size() && is_name_char(src_[pos_])) advance();
      Token t{Tok::Name, src_.substr(begin, pos_ - begin), start};
      t.span.length = static_cast<int>(t.text.size());
      return t;
    }
    std::string shown(1, c);
    throw Error(ErrorKind::SyntaxError, "unexpected character '" + shown + "'", start);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    default: return "'" + std::string(t.text) + "'";
  }
}

class DslParser {
 public:
  explicit DslParser(std::string_view src) : lexer_(src) { current_ = lexer_.next(); }

  std::vector<Declaration> parse() {
    std::vector<Declaration> out;
    while (current_.kind != Tok::End) out.push_back(statement());
    return out;
  }

 private:
  [[noreturn]] void fail(std::string_view expected) const {
    throw Error(ErrorKind::SyntaxError,
                "expected " + std::string(expected) + ", found " + describe(current_), current_.span);
  }

  Token expect(Tok kind, std::string_view what) {
    if (current_.kind != kind) fail(what);
    Token t = current_;
    current_ = lexer_.next();
    return t;
  }

  std::vector<std::string> name_list(std::string_view what) {
    std::vector<std::string> names{std::string(expect(Tok::Name, what).text)};
    while (current_.kind == Tok::Comma) {
      current_ = lexer_.next();
      names.emplace_back(expect(Tok::Name, what).text);
    }
    return names;
  }

  Declaration statement() {
    if (current_.kind != Tok::Name ||
        (current_.text != "role" && current_.text != "description")) {
      fail("'role' or 'description'");
    }
    Declaration d;
    d.kind = current_.text == "role" ? ElementKind::Role : ElementKind::Description;
    current_ = lexer_.next();
    const Token name = expect(Tok::Name, "a name");
    d.name = std::string(name.text);
    d.span = name.span;
    const bool has_parents = current_.kind == Tok::Less;
    if (has_parents) {
      current_ = lexer_.next();
      d.parents = name_list("a parent name");
    }
    if (d.kind == ElementKind::Description) {
      expect(Tok::LBrace, has_parents ? "'{' or ','" : "'{' or '<'");
      d.components = name_list("a component name");
      expect(Tok::RBrace, "'}' or ','");
    }
    return d;
  }

  Lexer lexer_;
  Token current_{Tok::End, {}, {}};
};

// ---------------------------------------------------------------------------
// JSON helpers

SourceSpan span_at_byte(std::string_view src, std::size_t byte) {
  SourceSpan span;
  byte = std::min(byte, src.size());
  for (std::size_t i = 0; i < byte; ++i) {
    if (src[i] == '\n') {
      ++span.line;
      span.column = 1;
    } else {
      ++span.column;
    }
  }
  return span;
}

json parse_json(std::string_view src) {
  try {
    return json::parse(src.begin(), src.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string message = e.what();
    if (auto pos = message.find("syntax error"); pos != std::string::npos) {
      message = message.substr(pos);
    }
    throw Error(ErrorKind::SyntaxError, message, span_at_byte(src, byte));
  }
}

// Input iterator that remembers how far the JSON lexer has read.
class CountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator(const char* p, std::size_t* furthest) : p_(p), furthest_(furthest) {}

  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    ++p_;
    ++*furthest_;
    return *this;
  }
  CountingIterator operator++(int) {
    auto copy = *this;
    ++*this;
    return copy;
  }
  friend bool operator==(const CountingIterator& a, const CountingIterator& b) { return a.p_ == b.p_; }

 private:
  const char* p_;
  std::size_t* furthest_;
};

// Records the byte offset where every value and key of a JSON document
// starts, keyed by the same "$.a[0].b" paths the schema checks use.
class PositionRecorder {
 public:
  explicit PositionRecorder(std::string_view src) : src_(src) {}

  std::map<std::string, std::size_t> run() {
    json::sax_parse(CountingIterator(src_.data(), &read_), CountingIterator(src_.data() + src_.size(), &read_),
                    this);
    return std::move(offsets_);
  }

  bool null() { return value(); }
  bool boolean(bool) { return value(); }
  bool number_integer(json::number_integer_t) { return value(); }
  bool number_unsigned(json::number_unsigned_t) { return value(); }
  bool number_float(json::number_float_t, const json::string_t&) { return value(); }
  bool string(json::string_t&) { return value(); }
  bool binary(json::binary_t&) { return value(); }
  bool start_object(std::size_t) {
    const std::string path = enter();
    frames_.push_back({path, false, 0, {}});
    return true;
  }
  bool key(json::string_t& k) {
    auto& frame = frames_.back();
    frame.key = k;
    offsets_.emplace(frame.path + "." + k, token_start());
    mark();
    return true;
  }
  bool end_object() { return leave(); }
  bool start_array(std::size_t) {
    const std::string path = enter();
    frames_.push_back({path, true, 0, {}});
    return true;
  }
  bool end_array() { return leave(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) { return false; }

 private:
  struct Frame {
    std::string path;
    bool array;
    std::size_t index;
    std::string key;
  };

  std::string child_path() {
    if (frames_.empty()) return "$";
    auto& frame = frames_.back();
    if (frame.array) return frame.path + "[" + std::to_string(frame.index++) + "]";
    return frame.path + "." + frame.key;
  }

  // The current token begins at the first character after the previous
  // event that is not whitespace or a separator.
  std::size_t token_start() const {
    std::size_t i = last_;
    while (i < src_.size() && (std::isspace(static_cast<unsigned char>(src_[i])) || src_[i] == ',' || src_[i] == ':')) {
      ++i;
    }
    return i;
  }

  void mark() { last_ = read_; }

  std::string enter() {
    std::string path = child_path();
    offsets_.emplace(path, token_start());
    mark();
    return path;
  }

  bool value() {
    enter();
    return true;
  }

  bool leave() {
    frames_.pop_back();
    mark();
    return true;
  }

  std::string_view src_;
  std::size_t read_ = 0;
  std::size_t last_ = 0;
  std::vector<Frame> frames_;
  std::map<std::string, std::size_t> offsets_;
};

// Attaches a source position to a path-only error from a JSON document: the
// node itself if present, otherwise its nearest existing ancestor.
template <typename F>
auto with_json_positions(std::string_view src, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.span() || e.path().empty()) throw;
    const auto offsets = PositionRecorder(src).run();
    std::string path = e.path();
    while (!path.empty()) {
      if (auto it = offsets.find(path); it != offsets.end()) {
        throw Error(e.kind(), e.what(), span_at_byte(src, it->second), e.path());
      }
      const auto cut = path.find_last_of(".[");
      if (cut == std::string::npos) break;
      path.resize(cut);
    }
    throw;
  }
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::SchemaError, path + ": " + what, std::nullopt, path);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) schema_error(path + "." + it.key(), "unexpected key");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  return j;
}

std::string require_string(const json& obj, std::string_view key, const std::string& path) {
  const std::string p = path + "." + std::string(key);
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(p, "missing required key");
  if (!it->is_string()) schema_error(p, "expected a string");
  std::string value = it->get<std::string>();
  if (value.empty()) schema_error(p, "must not be empty");
  return value;
}

std::vector<std::string> string_list(const json& obj, std::string_view key, const std::string& path,
                                     bool required) {
  const std::string p = path + "." + std::string(key);
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) schema_error(p, "missing required key");
    return {};
  }
  if (!it->is_array()) schema_error(p, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& item = (*it)[i];
    const std::string ip = p + "[" + std::to_string(i) + "]";
    if (!item.is_string()) schema_error(ip, "expected a string");
    out.push_back(item.get<std::string>());
    if (out.back().empty()) schema_error(ip, "must not be empty");
  }
  return out;
}

const json* optional_array(const json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return nullptr;
  if (!it->is_array()) schema_error(path + "." + std::string(key), "expected an array");
  return &*it;
}

Situation situation_from_json(const json& j, const std::string& path, std::set<std::string>& ids) {
  require_object(j, path);
  check_keys(j, path, {"id", "entities", "situations"});
  Situation s;
  s.id = require_string(j, "id", path);
  if (!ids.insert(s.id).second) {
    throw Error(ErrorKind::DuplicateEntityId, path + ".id: duplicate id '" + s.id + "'",
                std::nullopt, path + ".id");
  }
  if (const json* entities = optional_array(j, "entities", path)) {
    for (std::size_t i = 0; i < entities->size(); ++i) {
      const std::string ep = path + ".entities[" + std::to_string(i) + "]";
      const json& e = require_object((*entities)[i], ep);
      check_keys(e, ep, {"id", "roles"});
      Entity entity;
      entity.id = require_string(e, "id", ep);
      if (!ids.insert(entity.id).second) {
        throw Error(ErrorKind::DuplicateEntityId, ep + ".id: duplicate id '" + entity.id + "'",
                    std::nullopt, ep + ".id");
      }
      entity.roles = string_list(e, "roles", ep, true);
      if (entity.roles.empty()) schema_error(ep + ".roles", "an entity needs at least one role");
      s.entities.push_back(std::move(entity));
    }
  }
  if (const json* nested = optional_array(j, "situations", path)) {
    for (std::size_t i = 0; i < nested->size(); ++i) {
      s.situations.push_back(
          situation_from_json((*nested)[i], path + ".situations[" + std::to_string(i) + "]", ids));
    }
  }
  return s;
}

json situation_to_json(const Situation& s) {
  json entities = json::array();
  for (const auto& e : s.entities) entities.push_back({{"id", e.id}, {"roles", e.roles}});
  json nested = json::array();
  for (const auto& child : s.situations) nested.push_back(situation_to_json(child));
  return {{"id", s.id}, {"entities", std::move(entities)}, {"situations", std::move(nested)}};
}

bool is_dsl_name(std::string_view name) {
  if (name.empty() || !is_name_start(name.front())) return false;
  for (char c : name) {
    if (!is_name_char(c)) return false;
  }
  return true;
}

}  // namespace

std::vector<Declaration> parse_ontology_text(std::string_view src) { return DslParser(src).parse(); }

std::string serialize_ontology_text(std::span<const Declaration> decls) {
  std::ostringstream out;
  auto join = [&](const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!is_dsl_name(names[i])) {
        throw Error(ErrorKind::SchemaError, "'" + names[i] + "' cannot be written as a DSL name");
      }
      out << (i ? ", " : "") << names[i];
    }
  };
  for (const auto& d : decls) {
    out << to_string(d.kind) << ' ';
    join({d.name});
    if (!d.parents.empty()) {
      out << " < ";
      join(d.parents);
    }
    if (d.kind == ElementKind::Description) {
      out << " { ";
      join(d.components);
      out << " }";
    }
    out << '\n';
  }
  return out.str();
}

namespace {
std::vector<Declaration> declarations_from_json(const json& doc);
}  // namespace

std::vector<Declaration> parse_ontology_structured(std::string_view src) {
  const json doc = parse_json(src);
  auto decls = with_json_positions(src, [&] { return declarations_from_json(doc); });

  // Give each declaration the position of its name, as the DSL does.
  const auto offsets = PositionRecorder(src).run();
  std::size_t roles = 0, descriptions = 0;
  for (auto& d : decls) {
    const std::string path = d.kind == ElementKind::Role
                                 ? "$.roles[" + std::to_string(roles++) + "].name"
                                 : "$.descriptions[" + std::to_string(descriptions++) + "].name";
    if (auto it = offsets.find(path); it != offsets.end()) {
      SourceSpan span = span_at_byte(src, it->second);
      span.length = static_cast<int>(d.name.size()) + 2;
      d.span = span;
    }
  }
  return decls;
}

namespace {

std::vector<Declaration> declarations_from_json(const json& doc) {
  require_object(doc, "$");
  check_keys(doc, "$", {"roles", "descriptions"});
  std::vector<Declaration> out;
  auto section = [&](std::string_view key, ElementKind kind) {
    const json* items = optional_array(doc, key, "$");
    if (!items) schema_error("$." + std::string(key), "missing required key");
    for (std::size_t i = 0; i < items->size(); ++i) {
      const std::string p = "$." + std::string(key) + "[" + std::to_string(i) + "]";
      const json& item = require_object((*items)[i], p);
      Declaration d;
      d.kind = kind;
      if (kind == ElementKind::Role) {
        check_keys(item, p, {"name", "parents"});
      } else {
        check_keys(item, p, {"name", "parents", "components"});
      }
      d.name = require_string(item, "name", p);
      d.parents = string_list(item, "parents", p, false);
      if (kind == ElementKind::Description) {
        d.components = string_list(item, "components", p, true);
      }
      out.push_back(std::move(d));
    }
  };
  section("roles", ElementKind::Role);
  section("descriptions", ElementKind::Description);
  return out;
}

}  // namespace

std::string serialize_ontology_structured(std::span<const Declaration> decls) {
  json roles = json::array();
  json descriptions = json::array();
  for (const auto& d : decls) {
    json item = {{"name", d.name}};
    if (!d.parents.empty()) item["parents"] = d.parents;
    if (d.kind == ElementKind::Role) {
      roles.push_back(std::move(item));
    } else {
      item["components"] = d.components;
      descriptions.push_back(std::move(item));
    }
  }
  json doc = {{"roles", std::move(roles)}, {"descriptions", std::move(descriptions)}};
  return doc.dump(2) + "\n";
}

Situation parse_situation(std::string_view src) {
  const json doc = parse_json(src);
  std::set<std::string> ids;
  return with_json_positions(src, [&] { return situation_from_json(doc, "$", ids); });
}

std::string serialize_situation(const Situation& s) { return situation_to_json(s).dump(2) + "\n"; }

OntologyFormat detect_format(const std::filesystem::path& path, std::string_view content) {
  if (path == "-") {
    for (char c : content) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      return c == '{' ? OntologyFormat::Structured : OntologyFormat::Dsl;
    }
    return OntologyFormat::Dsl;
  }
  return path.extension() == ".json" ? OntologyFormat::Structured : OntologyFormat::Dsl;
}

std::vector<Declaration> parse_ontology(std::string_view src, OntologyFormat format) {
  return format == OntologyFormat::Structured ? parse_ontology_structured(src)
                                              : parse_ontology_text(src);
}

std::string read_source(const std::filesystem::path& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Ontology load_ontology(const std::filesystem::path& path) {
  const std::string src = read_source(path);
  const auto decls = parse_ontology(src, detect_format(path, src));
  return Ontology::build(decls);
}

Situation load_situation(const std::filesystem::path& path) { return parse_situation(read_source(path)); }

}  // namespace dnsvec
