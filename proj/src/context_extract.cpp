#include "ctxner/context_extract.hpp"

#include <algorithm>
#include <array>

#include "ctxner/error.hpp"
#include "ctxner/parallel.hpp"
#include "ctxner/tsv.hpp"
#include "ctxner/utf8.hpp"

namespace ctxner {

namespace {

constexpr std::array<std::string_view, 20> kTitleAbbreviations = {
    "Mr", "Mrs", "Ms", "Dr", "Prof", "St", "Jr", "Sr", "Gen", "Gov",
    "Sen", "Rep", "Lt", "Col", "Capt", "Sgt", "Rev", "Hon", "Mt", "vs"};

constexpr char kWordSeparator = '\x1f';

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    return !((cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
             (cp >= 'A' && cp <= 'Z'));
  }
  return (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF01 && cp <= 0xFF0F);
}

bool is_word(char32_t cp) { return !utf8::is_space(cp) && !is_punctuation(cp); }

bool is_joiner(char32_t cp) {
  return cp == '\'' || cp == '.' || cp == '-' || cp == 0x2019;
}

bool is_letter(char32_t cp) {
  return is_word(cp) && !(cp >= '0' && cp <= '9');
}

// "W", "Mr", or a dotted acronym such as "U.S".
bool keeps_trailing_period(std::string_view token) {
  auto first = utf8::decode(token, 0);
  if (!first) return false;
  if (first->length == token.size()) return is_letter(first->code_point);
  if (std::find(kTitleAbbreviations.begin(), kTitleAbbreviations.end(), token) !=
      kTitleAbbreviations.end()) {
    return true;
  }
  // letter ( '.' letter )+
  std::size_t pos = 0;
  bool expect_letter = true;
  while (pos < token.size()) {
    auto d = utf8::decode(token, pos);
    if (!d) return false;
    if (expect_letter != is_letter(d->code_point)) return false;
    if (!expect_letter && d->code_point != '.') return false;
    expect_letter = !expect_letter;
    pos += d->length;
  }
  return !expect_letter && token.find('.') != std::string_view::npos;
}

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Invalid bytes decode as U+FFFD of length one, which counts as a word char.
CodePoint at(std::string_view text, std::size_t pos) {
  if (auto d = utf8::decode(text, pos)) return {d->code_point, d->length};
  return {0xFFFD, 1};
}

std::string join_key(Side side, std::span<const Token> window) {
  std::string key(1, side == Side::Left ? 'L' : 'R');
  for (const auto& t : window) {
    key.push_back(kWordSeparator);
    key += t.text;
  }
  return key;
}

std::string join_key(const ContextKey& context) {
  std::string key(1, context.side == Side::Left ? 'L' : 'R');
  for (const auto& w : context.words) {
    key.push_back(kWordSeparator);
    key += w;
  }
  return key;
}

bool any_boundary(std::span<const Token> tokens, std::size_t first, std::size_t last) {
  for (std::size_t i = first; i <= last; ++i) {
    if (tokens[i].ends_sentence) return true;
  }
  return false;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto cp = at(text, pos);
    if (!is_word(cp.value)) {
      pos += cp.length;
      continue;
    }
    const std::size_t start = pos;
    pos += cp.length;
    while (pos < text.size()) {
      auto next = at(text, pos);
      if (is_word(next.value)) {
        pos += next.length;
        continue;
      }
      if (is_joiner(next.value) && pos + next.length < text.size() &&
          is_word(at(text, pos + next.length).value)) {
        pos += next.length;
        continue;
      }
      break;
    }
    std::size_t end = pos;
    if (end < text.size() && text[end] == '.' &&
        keeps_trailing_period(text.substr(start, end - start))) {
      ++end;
      pos = end;
    }
    tokens.push_back(Token{std::string(text.substr(start, end - start)), start, end, false});
  }

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t gap_end = i + 1 < tokens.size() ? tokens[i + 1].start : text.size();
    const auto gap = text.substr(tokens[i].end, gap_end - tokens[i].end);
    const auto terminal = gap.find_first_of(".!?");
    if (terminal == std::string_view::npos) continue;
    if (i + 1 == tokens.size()) {
      tokens[i].ends_sentence = true;
      continue;
    }
    bool spaced = false;
    for (std::size_t p = terminal; p < gap.size();) {
      auto cp = at(gap, p);
      if (utf8::is_space(cp.value)) spaced = true;
      p += cp.length;
    }
    if (spaced && !utf8::is_lowercase(at(text, tokens[i + 1].start).value)) {
      tokens[i].ends_sentence = true;
    }
  }
  return tokens;
}

std::string_view to_string(Side side) { return side == Side::Left ? "left" : "right"; }

Side parse_side(std::string_view text) {
  if (text == "left") return Side::Left;
  if (text == "right") return Side::Right;
  throw Error(ErrorKind::Input, "side must be 'left' or 'right', got '" + std::string(text) + "'");
}

std::string ContextKey::text() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::size_t ContextKeyHash::operator()(const ContextKey& key) const noexcept {
  std::size_t h = key.side == Side::Left ? 0x9e3779b97f4a7c15ULL : 0x7f4a7c159e3779b9ULL;
  for (const auto& w : key.words) {
    h ^= std::hash<std::string>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

InstanceMatcher::InstanceMatcher(std::span<const LearningExample> examples) {
  std::set<std::vector<std::string>> seen;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto words = examples[i].words();
    if (words.empty() || !seen.insert(words).second) continue;
    by_first_word_[words.front()].push_back(Pattern{std::move(words), i});
  }
  for (auto& [first, patterns] : by_first_word_) {
    std::stable_sort(patterns.begin(), patterns.end(), [](const Pattern& a, const Pattern& b) {
      return a.words.size() > b.words.size();
    });
  }
}

std::vector<InstanceOccurrence> InstanceMatcher::find(std::span<const Token> tokens,
                                                      const std::string& doc) const {
  std::vector<InstanceOccurrence> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto it = by_first_word_.find(tokens[i].text);
    bool matched = false;
    if (it != by_first_word_.end()) {
      for (const auto& pattern : it->second) {
        const std::size_t n = pattern.words.size();
        if (i + n > tokens.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < n && ok; ++k) {
          ok = tokens[i + k].text == pattern.words[k] &&
               (k + 1 == n || !tokens[i + k].ends_sentence);
        }
        if (!ok) continue;
        out.push_back(InstanceOccurrence{doc, pattern.example, i, i + n - 1});
        i += n;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return out;
}

std::vector<InstanceOccurrence> find_instances(std::span<const Token> tokens,
                                               std::span<const LearningExample> examples) {
  if (examples.empty()) throw Error(ErrorKind::Input, "no learning examples");
  return InstanceMatcher(examples).find(tokens);
}

std::optional<ContextKey> extract_context(const InstanceOccurrence& occurrence,
                                          std::span<const Token> tokens,
                                          std::size_t length, Side side) {
  if (length == 0) throw Error(ErrorKind::Domain, "context length must be at least 1");
  std::size_t first = 0;
  if (side == Side::Left) {
    if (occurrence.first < length) return std::nullopt;
    first = occurrence.first - length;
    // The last context token must not end a sentence either: that boundary
    // would fall between the context and the instance.
    if (any_boundary(tokens, first, occurrence.first - 1)) return std::nullopt;
  } else {
    if (occurrence.last + length >= tokens.size()) return std::nullopt;
    first = occurrence.last + 1;
    if (any_boundary(tokens, occurrence.last, occurrence.last + length - 1)) {
      return std::nullopt;
    }
  }
  ContextKey key;
  key.side = side;
  for (std::size_t i = first; i < first + length; ++i) key.words.push_back(tokens[i].text);
  return key;
}

ContextIndex::ContextIndex(const std::set<ContextKey>& contexts) {
  for (const auto& c : contexts) add(c);
}

std::size_t ContextIndex::add(const ContextKey& key) {
  if (key.words.empty()) throw Error(ErrorKind::Domain, "empty context");
  auto [it, inserted] = ids_.emplace(join_key(key), keys_.size());
  if (inserted) {
    keys_.push_back(key);
    (key.side == Side::Left ? left_lengths_ : right_lengths_).insert(key.length());
  }
  return it->second;
}

std::optional<std::size_t> ContextIndex::find(Side side, std::span<const Token> window) const {
  auto it = ids_.find(join_key(side, window));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

AnalyzedDocument analyze(const Document& doc, const InstanceMatcher& matcher) {
  AnalyzedDocument out;
  out.document = &doc;
  out.tokens = tokenize(doc.clean);
  out.instances = matcher.find(out.tokens, doc.id);
  return out;
}

void visit_context_windows(
    const AnalyzedDocument& doc, const ContextIndex& index,
    const std::function<void(std::size_t, std::size_t, std::optional<std::size_t>)>& visit) {
  const auto& tokens = doc.tokens;
  const std::size_t n = tokens.size();
  if (n < 2 || index.size() == 0) return;

  std::vector<std::optional<std::size_t>> starts(n), ends(n);
  std::vector<std::size_t> start_of_ending(n);
  for (const auto& inst : doc.instances) {
    starts[inst.first] = inst.example;
    ends[inst.last] = inst.example;
    start_of_ending[inst.last] = inst.first;
  }

  std::span<const Token> all(tokens);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t len : index.lengths(Side::Left)) {
      // window [p, p+len-1], adjacent phrase starts at p+len
      if (p + len >= n) break;
      if (any_boundary(all, p, p + len - 1)) break;
      if (auto id = index.find(Side::Left, all.subspan(p, len))) {
        visit(*id, p + len, starts[p + len]);
      }
    }
    if (p == 0) continue;
    for (std::size_t len : index.lengths(Side::Right)) {
      // window [p, p+len-1], adjacent phrase ends at p-1
      if (p + len > n) break;
      if (any_boundary(all, p - 1, p + len - 2)) break;
      if (auto id = index.find(Side::Right, all.subspan(p, len))) {
        auto example = ends[p - 1];
        visit(*id, example ? start_of_ending[p - 1] : p - 1, example);
      }
    }
  }
}

std::set<ContextKey> collect_contexts(const CorpusManifest& corpus,
                                      std::span<const LearningExample> examples,
                                      std::size_t length, Side side) {
  InstanceMatcher matcher(examples);
  std::vector<std::set<ContextKey>> per_doc(corpus.documents.size());
  parallel_for(corpus.documents.size(), 0, [&](std::size_t d) {
    auto doc = analyze(corpus.documents[d], matcher);
    for (const auto& inst : doc.instances) {
      if (auto key = extract_context(inst, doc.tokens, length, side)) {
        per_doc[d].insert(std::move(*key));
      }
    }
  });
  std::set<ContextKey> out;
  for (auto& s : per_doc) out.merge(s);
  return out;
}

std::vector<ContextOccurrence> scan_context_occurrences(
    const CorpusManifest& corpus, const std::set<ContextKey>& contexts,
    std::span<const LearningExample> examples) {
  InstanceMatcher matcher(examples);
  ContextIndex index(contexts);
  std::vector<std::vector<ContextOccurrence>> per_doc(corpus.documents.size());
  parallel_for(corpus.documents.size(), 0, [&](std::size_t d) {
    auto doc = analyze(corpus.documents[d], matcher);
    visit_context_windows(doc, index, [&](std::size_t id, std::size_t anchor,
                                          std::optional<std::size_t> example) {
      per_doc[d].push_back(ContextOccurrence{index.keys()[id], doc.document->id, anchor,
                                             example.has_value(), example});
    });
  });
  std::vector<ContextOccurrence> out;
  for (auto& v : per_doc) {
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

std::string occurrences_to_tsv(std::span<const ContextOccurrence> occurrences,
                               std::span<const LearningExample> examples) {
  std::string out = "doc\tcontext_words\tside\twith_example\texample_surface\n";
  for (const auto& occ : occurrences) {
    std::string surface;
    if (occ.example) surface = examples[*occ.example].surface();
    out += tsv::join({tsv::field(occ.doc), occ.context.text(),
                      std::string(to_string(occ.context.side)),
                      occ.with_example ? "1" : "0", tsv::field(surface)}) +
           "\n";
  }
  return out;
}

}  // namespace ctxner
