#include "ctxner/corpus_store.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <unordered_set>
#include <utility>

#include "ctxner/error.hpp"
#include "ctxner/tsv.hpp"
#include "ctxner/utf8.hpp"

namespace ctxner {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kManifestHeader = {"id", "source", "uri",
                                                  "kind", "file"};

constexpr std::array<std::string_view, 7> kTextExtensions = {
    ".txt", ".text", ".html", ".htm", ".xhtml", ".xml", ".md"};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool iequals_prefix(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != prefix[i]) return false;
  }
  return true;
}

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() &&
         iequals_prefix(s, s.size() - suffix.size(), suffix);
}

[[noreturn]] void bad_locator(std::string_view uri, std::string_view why) {
  throw Error(ErrorKind::Input,
              "cannot derive a source from '" + std::string(uri) + "': " +
                  std::string(why));
}

SourceId path_stem(std::string_view uri, std::string_view path) {
  auto slash = path.find_last_of("/\\");
  std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (auto ext : kTextExtensions) {
      if (ends_with_ci(name, ext)) {
        name.remove_suffix(ext.size());
        stripped = true;
      }
    }
  }
  if (name.empty()) bad_locator(uri, "empty file name");
  return SourceId{std::string(name)};
}

// Tags that separate words when removed; everything else (inline tags such
// as <b> or <a>) vanishes without a trace.
bool is_inline_tag(std::string_view name) {
  static const std::unordered_set<std::string_view> inline_tags = {
      "a",    "abbr", "b",    "big",  "cite", "code", "em",  "font", "i",
      "kbd",  "mark", "q",    "s",    "samp", "small", "span", "strong",
      "sub",  "sup",  "time", "tt",   "u",    "var"};
  return inline_tags.contains(name);
}

std::optional<char32_t> named_entity(std::string_view name) {
  static const std::array<std::pair<std::string_view, char32_t>, 30> table = {{
      {"amp", U'&'},      {"lt", U'<'},       {"gt", U'>'},
      {"quot", U'"'},     {"apos", U'\''},    {"nbsp", 0xA0},
      {"ndash", 0x2013},  {"mdash", 0x2014},  {"lsquo", 0x2018},
      {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D},
      {"hellip", 0x2026}, {"laquo", 0xAB},    {"raquo", 0xBB},
      {"copy", 0xA9},     {"reg", 0xAE},      {"eacute", 0xE9},
      {"egrave", 0xE8},   {"ecirc", 0xEA},    {"agrave", 0xE0},
      {"acirc", 0xE2},    {"ccedil", 0xE7},   {"ocirc", 0xF4},
      {"uuml", 0xFC},     {"ouml", 0xF6},     {"auml", 0xE4},
      {"szlig", 0xDF},    {"iuml", 0xEF},     {"Eacute", 0xC9},
  }};
  for (const auto& [key, cp] : table) {
    if (key == name) return cp;
  }
  return std::nullopt;
}

// Decodes the entity starting at text[pos] == '&'. Returns the code point
// and the number of bytes consumed, or nothing if this '&' is literal.
std::optional<std::pair<char32_t, std::size_t>> decode_entity(std::string_view text,
                                                              std::size_t pos) {
  auto semi = text.find(';', pos + 1);
  if (semi == std::string_view::npos || semi - pos > 12 || semi == pos + 1) {
    return std::nullopt;
  }
  auto body = text.substr(pos + 1, semi - pos - 1);
  const std::size_t consumed = semi - pos + 1;
  if (body[0] == '#') {
    auto digits = body.substr(1);
    int base = 10;
    if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
      base = 16;
      digits.remove_prefix(1);
    }
    if (digits.empty()) return std::nullopt;
    char32_t cp = 0;
    for (char c : digits) {
      int v = -1;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (base == 16 && c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (base == 16 && c >= 'A' && c <= 'F') v = c - 'A' + 10;
      if (v < 0) return std::nullopt;
      cp = cp * base + v;
      if (cp > 0x10FFFF) return std::nullopt;
    }
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    return std::pair{cp, consumed};
  }
  if (auto cp = named_entity(body)) return std::pair{*cp, consumed};
  return std::nullopt;
}

std::string strip_markup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '<') {
      if (text.compare(pos, 4, "<!--") == 0) {
        auto end = text.find("-->", pos + 4);
        pos = end == std::string_view::npos ? text.size() : end + 3;
        out.push_back(' ');
        continue;
      }
      const bool script = iequals_prefix(text, pos, "<script");
      const bool style = iequals_prefix(text, pos, "<style");
      if (script || style) {
        const std::string_view close = script ? "</script" : "</style";
        std::size_t end = pos + 1;
        while (end < text.size() && !iequals_prefix(text, end, close)) ++end;
        end = text.find('>', end);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        out.push_back(' ');
        continue;
      }
      const std::size_t next = pos + 1;
      if (next < text.size() &&
          (std::isalpha(static_cast<unsigned char>(text[next])) ||
           text[next] == '/' || text[next] == '!' || text[next] == '?')) {
        auto end = text.find('>', next);
        std::size_t name_begin = text[next] == '/' ? next + 1 : next;
        std::size_t name_end = name_begin;
        while (name_end < text.size() &&
               std::isalnum(static_cast<unsigned char>(text[name_end]))) {
          ++name_end;
        }
        const auto name = ascii_lower(text.substr(name_begin, name_end - name_begin));
        if (!is_inline_tag(name)) out.push_back(' ');
        pos = end == std::string_view::npos ? text.size() : end + 1;
        continue;
      }
    }
    if (c == '&') {
      if (auto entity = decode_entity(text, pos)) {
        utf8::append(out, entity->first);
        pos += entity->second;
        continue;
      }
    }
    out.push_back(c);
    ++pos;
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto d = utf8::decode(text, pos);
    const std::size_t len = d ? d->length : 1;
    if (d && utf8::is_space(d->code_point)) {
      pending_space = true;
    } else {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.append(text.substr(pos, len));
    }
    pos += len;
  }
  return out;
}

}  // namespace

std::string_view to_string(DocKind kind) {
  return kind == DocKind::Markup ? "markup" : "plain";
}

DocKind parse_doc_kind(std::string_view text) {
  if (text == "plain") return DocKind::Plain;
  if (text == "markup") return DocKind::Markup;
  throw Error(ErrorKind::Malformed,
              "unknown document kind '" + std::string(text) + "'");
}

std::set<SourceId> CorpusManifest::sources() const {
  std::set<SourceId> out;
  for (const auto& doc : documents) out.insert(doc.source);
  return out;
}

bool CorpusManifest::contains_uri(std::string_view uri) const {
  return std::any_of(documents.begin(), documents.end(),
                     [&](const Document& d) { return d.uri == uri; });
}

SourceId normalize_source(std::string_view uri) {
  if (uri.empty()) bad_locator(uri, "empty locator");
  for (char c : uri) {
    if (static_cast<unsigned char>(c) < 0x20 || c == 0x7F) {
      bad_locator(uri, "control character");
    }
  }

  auto scheme_end = uri.find("://");
  if (scheme_end == std::string_view::npos) return path_stem(uri, uri);

  auto scheme = uri.substr(0, scheme_end);
  if (scheme.empty() || !std::isalpha(static_cast<unsigned char>(scheme[0])) ||
      !std::all_of(scheme.begin(), scheme.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' ||
               c == '-' || c == '.';
      })) {
    bad_locator(uri, "invalid scheme");
  }
  auto rest = uri.substr(scheme_end + 3);
  if (ascii_lower(scheme) == "file") {
    auto slash = rest.find('/');
    if (slash == std::string_view::npos) bad_locator(uri, "file locator without path");
    return path_stem(uri, rest.substr(slash));
  }

  auto host = rest.substr(0, rest.find_first_of("/?#"));
  if (auto at = host.rfind('@'); at != std::string_view::npos) host.remove_prefix(at + 1);
  if (!host.empty() && host.front() == '[') {
    auto close = host.find(']');
    if (close == std::string_view::npos) bad_locator(uri, "unterminated IPv6 host");
    host = host.substr(0, close + 1);
  } else if (auto colon = host.find(':'); colon != std::string_view::npos) {
    host = host.substr(0, colon);
  }
  if (host.empty()) bad_locator(uri, "empty host");
  if (host.find_first_of(" \t") != std::string_view::npos) bad_locator(uri, "space in host");
  return SourceId{ascii_lower(host)};
}

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

std::string clean_text(std::string_view raw, DocKind kind) {
  if (auto bad = utf8::first_invalid(raw)) {
    throw Error(ErrorKind::Input,
                "invalid UTF-8 at byte offset " + std::to_string(*bad));
  }
  auto text = normalize_newlines(raw);
  if (kind == DocKind::Plain) return text;
  return collapse_whitespace(strip_markup(text));
}

Document make_document(std::string id, std::string uri, std::string raw,
                       DocKind kind) {
  Document doc;
  doc.id = std::move(id);
  doc.source = normalize_source(uri);
  doc.uri = std::move(uri);
  doc.clean = clean_text(raw, kind);
  doc.raw = std::move(raw);
  doc.kind = kind;
  return doc;
}

void validate(CorpusManifest& corpus) {
  auto& docs = corpus.documents;
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  std::unordered_set<std::string_view> uris;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].id.empty()) throw Error(ErrorKind::Input, "document with empty id");
    if (i > 0 && docs[i].id == docs[i - 1].id) {
      throw Error(ErrorKind::Input, "duplicate document id '" + docs[i].id + "'");
    }
    if (docs[i].source.value.empty()) {
      throw Error(ErrorKind::Input, "document '" + docs[i].id + "' has no source");
    }
    if (!uris.insert(docs[i].uri).second) {
      throw Error(ErrorKind::Input, "duplicate uri '" + docs[i].uri + "'");
    }
  }
}

CorpusManifest load_corpus(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.tsv";
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorKind::Input, "missing manifest: " + manifest_path.string());
  }

  CorpusManifest corpus;
  if (fs::exists(dir / "class.txt")) {
    auto label = tsv::read_file(dir / "class.txt");
    while (!label.empty() && (label.back() == '\n' || label.back() == '\r')) label.pop_back();
    corpus.class_label = label;
  }
  if (fs::file_size(manifest_path) == 0) return corpus;

  for (const auto& row : tsv::read(manifest_path, kManifestHeader)) {
    const auto& f = row.fields;
    Document doc;
    doc.id = f[0];
    doc.source = SourceId{f[1]};
    doc.uri = f[2];
    try {
      doc.kind = parse_doc_kind(f[3]);
    } catch (const Error& e) {
      throw Error(ErrorKind::Malformed,
                  manifest_path.string() + ":" + std::to_string(row.line) + ": " + e.what());
    }
    const auto doc_path = dir / "docs" / f[4];
    if (!fs::exists(doc_path)) {
      throw Error(ErrorKind::Input, "missing document file: " + doc_path.string());
    }
    auto text = tsv::read_file(doc_path);
    if (auto bad = utf8::first_invalid(text)) {
      throw Error(ErrorKind::Input, doc_path.string() +
                                        ": invalid UTF-8 at byte offset " +
                                        std::to_string(*bad));
    }
    doc.clean = normalize_newlines(text);
    const auto raw_path = dir / "raw" / f[4];
    doc.raw = fs::exists(raw_path) ? tsv::read_file(raw_path) : doc.clean;
    corpus.documents.push_back(std::move(doc));
  }
  validate(corpus);
  return corpus;
}

void save_corpus(const CorpusManifest& corpus, const fs::path& dir) {
  CorpusManifest sorted = corpus;
  validate(sorted);

  fs::create_directories(dir / "docs");
  std::string manifest = tsv::join(kManifestHeader) + "\n";
  for (const auto& doc : sorted.documents) {
    const std::string file = doc.id + ".txt";
    if (file.find_first_of("/\\") != std::string::npos) {
      throw Error(ErrorKind::Input, "document id not usable as a file name: '" + doc.id + "'");
    }
    manifest += tsv::join({tsv::field(doc.id), tsv::field(doc.source.value),
                           tsv::field(doc.uri), std::string(to_string(doc.kind)), file}) +
                "\n";
    tsv::write_file(dir / "docs" / file, doc.clean);
    if (doc.raw != doc.clean) {
      fs::create_directories(dir / "raw");
      tsv::write_file(dir / "raw" / file, doc.raw);
    }
  }
  tsv::write_file(dir / "manifest.tsv", manifest);
  if (!sorted.class_label.empty()) {
    tsv::write_file(dir / "class.txt", tsv::field(sorted.class_label) + "\n");
  }
}

}  // namespace ctxner
