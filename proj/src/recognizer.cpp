#include "ctxner/recognizer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ctxner/error.hpp"
#include "ctxner/parallel.hpp"
#include "ctxner/tsv.hpp"
#include "ctxner/utf8.hpp"

namespace ctxner {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kModelHeader = {"class", "table_file", "threshold", "margin"};
const std::vector<std::string> kTableHeader = {"context", "cf", "df", "lef", "icf", "w"};
const std::vector<std::string> kAnnotationHeader = {"doc",   "start_token", "end_token", "surface",
                                                    "class", "score",       "runner_up"};

bool starts_lowercase(const Token& token) {
  auto d = utf8::decode(token.text, 0);
  return d && utf8::is_lowercase(d->code_point);
}

std::string table_file_name(const std::string& class_label) {
  std::string name;
  for (char c : class_label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_';
    name.push_back(keep ? c : '_');
  }
  return name + ".tsv";
}

std::string exact(double v) { return tsv::format_significant(v, 17); }

[[noreturn]] void malformed(const fs::path& file, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::Malformed, file.string() + ":" + std::to_string(line) + ": " + what);
}

ContextKey parse_context(const std::string& text, Side side) {
  ContextKey key;
  key.side = side;
  std::istringstream in(text);
  std::string w;
  while (in >> w) key.words.push_back(w);
  return key;
}

std::string surface_of(std::span<const Token> tokens, const Span& span) {
  std::string out;
  for (std::size_t i = span.first; i <= span.last; ++i) {
    if (i > span.first) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

}  // namespace

void ClassTable::add(const ContextKey& context, double w) {
  if (!(w > 0)) throw Error(ErrorKind::Domain, "context weight must be positive: " + context.text());
  if (context.words.empty()) throw Error(ErrorKind::Domain, "empty context");
  weights_[context] = w;
}

const double* ClassTable::find(const ContextKey& context) const {
  auto it = weights_.find(context);
  return it == weights_.end() ? nullptr : &it->second;
}

ClassTable to_class_table(const WeightTable& table) {
  ClassTable out;
  for (const auto& row : table.rows) {
    if (row.w > 0) out.add(row.stats.context, row.w);
  }
  return out;
}

ContextIndex RecognitionModel::context_index() const {
  std::set<ContextKey> all;
  for (const auto& [label, table] : tables) {
    for (const auto& [key, w] : table.weights()) all.insert(key);
  }
  return ContextIndex(all);
}

void vote(VoteState& state, const std::string& class_label, double w, const ContextKey& context) {
  if (!(w > 0)) throw Error(ErrorKind::Domain, "vote weight must be positive");
  state.votes[class_label] += w;
  state.contributing[class_label].push_back(VoteContribution{context, w});
}

Decision classify(const VoteState& state, double threshold, double margin) {
  Decision d;
  d.class_label = std::string(kUnknownClass);
  const std::string* best = nullptr;
  bool tied = false;
  for (const auto& [label, v] : state.votes) {
    if (!best || v > d.score) {
      if (best) d.runner_up = d.score;
      best = &label;
      d.score = v;
      tied = false;
    } else if (v == d.score) {
      tied = true;
      d.runner_up = v;
    } else if (v > d.runner_up) {
      d.runner_up = v;
    }
  }
  if (!best || tied) return d;
  if (d.score >= threshold && d.score - d.runner_up >= margin) d.class_label = *best;
  return d;
}

std::vector<Span> detect_candidates(std::span<const Token> tokens, const RecognitionModel& model) {
  if (model.max_entity_tokens == 0) throw Error(ErrorKind::Input, "max_entity_tokens must be positive");
  const auto index = model.context_index();
  const auto& lengths = index.lengths(model.side);
  const std::size_t n = tokens.size();
  std::set<Span> spans;

  auto blocked = [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i <= last; ++i) {
      if (tokens[i].ends_sentence) return true;
    }
    return false;
  };

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t len : lengths) {
      if (model.side == Side::Left) {
        if (p + len >= n || blocked(p, p + len - 1)) break;
        if (!index.find(Side::Left, tokens.subspan(p, len))) continue;
        const std::size_t first = p + len;
        std::size_t last = first;
        while (last + 1 < n && last + 1 - first < model.max_entity_tokens &&
               !tokens[last].ends_sentence && !starts_lowercase(tokens[last + 1])) {
          ++last;
        }
        spans.insert(Span{first, last});
      } else {
        if (p == 0 || p + len > n || blocked(p - 1, p + len - 2)) break;
        if (!index.find(Side::Right, tokens.subspan(p, len))) continue;
        const std::size_t last = p - 1;
        std::size_t first = last;
        while (first > 0 && last - first + 1 < model.max_entity_tokens &&
               !tokens[first - 1].ends_sentence && !starts_lowercase(tokens[first - 1])) {
          --first;
        }
        spans.insert(Span{first, last});
      }
    }
  }
  return {spans.begin(), spans.end()};
}

std::vector<Annotation> recognize_document(const Document& doc, const RecognitionModel& model) {
  std::vector<Annotation> out;
  if (model.tables.empty()) return out;

  const auto tokens = tokenize(doc.clean);
  const auto index = model.context_index();
  const auto& lengths = index.lengths(model.side);
  for (const auto& span : detect_candidates(tokens, model)) {
    VoteState state;
    const InstanceOccurrence phrase{doc.id, 0, span.first, span.last};
    for (std::size_t len : lengths) {
      auto context = extract_context(phrase, tokens, len, model.side);
      if (!context) continue;
      for (const auto& [label, table] : model.tables) {
        if (const double* w = table.find(*context)) vote(state, label, *w, *context);
      }
    }
    if (state.votes.empty()) continue;
    auto decision = classify(state, model.threshold, model.margin);
    out.push_back(Annotation{doc.id, span, surface_of(tokens, span), decision.class_label,
                             decision.score, decision.runner_up});
  }
  return out;
}

std::vector<Annotation> recognize(std::span<const Document> docs, const RecognitionModel& model,
                                  std::size_t threads) {
  std::vector<std::vector<Annotation>> per_doc(docs.size());
  parallel_for(docs.size(), threads,
               [&](std::size_t d) { per_doc[d] = recognize_document(docs[d], model); });
  std::vector<Annotation> out;
  for (auto& v : per_doc) {
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

std::string annotations_to_tsv(std::span<const Annotation> annotations) {
  std::string out = tsv::join(kAnnotationHeader) + "\n";
  for (const auto& a : annotations) {
    out += tsv::join({tsv::field(a.doc), std::to_string(a.span.first),
                      std::to_string(a.span.last), tsv::field(a.surface),
                      tsv::field(a.class_label), tsv::format_significant(a.score, 10),
                      tsv::format_significant(a.runner_up, 10)}) +
           "\n";
  }
  return out;
}

std::vector<Annotation> load_annotations(const fs::path& path) {
  std::vector<Annotation> out;
  for (const auto& row : tsv::read(path, kAnnotationHeader)) {
    const auto& f = row.fields;
    Annotation a;
    a.doc = f[0];
    a.span = Span{tsv::parse_count(f[1], path, row.line), tsv::parse_count(f[2], path, row.line)};
    if (a.span.last < a.span.first) malformed(path, row.line, "end_token before start_token");
    a.surface = f[3];
    a.class_label = f[4];
    a.score = tsv::parse_double(f[5], path, row.line);
    a.runner_up = tsv::parse_double(f[6], path, row.line);
    out.push_back(std::move(a));
  }
  return out;
}

void save_model_table(const fs::path& dir, const WeightTable& table, double threshold,
                      double margin) {
  if (threshold < 0 || margin < 0) throw Error(ErrorKind::Input, "threshold and margin must be >= 0");
  fs::create_directories(dir);
  const auto model_path = dir / "model.tsv";
  std::map<std::string, std::string> files;
  if (fs::exists(model_path)) {
    for (const auto& row : tsv::read(model_path, kModelHeader)) files[row.fields[0]] = row.fields[1];
  }
  const auto& label = tsv::field(table.global.class_label);
  if (label.empty()) throw Error(ErrorKind::Input, "weight table has no class label");
  files[label] = table_file_name(label);
  tsv::write_file(dir / files[label], weight_table_to_tsv(table));

  std::string model = tsv::join(kModelHeader) + "\n";
  for (const auto& [cls, file] : files) {
    model += tsv::join({cls, file, exact(threshold), exact(margin)}) + "\n";
  }
  tsv::write_file(model_path, model);
}

RecognitionModel load_model(const fs::path& dir, Side side) {
  const auto model_path = dir / "model.tsv";
  if (!fs::exists(model_path)) throw Error(ErrorKind::Input, "missing model file " + model_path.string());

  RecognitionModel model;
  model.side = side;
  bool first = true;
  for (const auto& row : tsv::read(model_path, kModelHeader)) {
    const auto& f = row.fields;
    if (f[0].empty()) malformed(model_path, row.line, "empty class label");
    if (f[0] == kUnknownClass) malformed(model_path, row.line, "'unknown' is reserved");
    if (model.tables.contains(f[0])) malformed(model_path, row.line, "duplicate class '" + f[0] + "'");
    const double threshold = tsv::parse_double(f[2], model_path, row.line);
    const double margin = tsv::parse_double(f[3], model_path, row.line);
    if (threshold < 0 || margin < 0) malformed(model_path, row.line, "negative threshold or margin");
    if (first) {
      model.threshold = threshold;
      model.margin = margin;
      first = false;
    } else if (threshold != model.threshold || margin != model.margin) {
      malformed(model_path, row.line, "threshold/margin differ from earlier rows");
    }

    const auto table_path = dir / f[1];
    if (!fs::exists(table_path)) malformed(model_path, row.line, "missing table file " + f[1]);
    ClassTable table;
    for (const auto& trow : tsv::read(table_path, kTableHeader)) {
      auto key = parse_context(trow.fields[0], side);
      if (key.words.empty()) malformed(table_path, trow.line, "empty context");
      const double w = tsv::parse_double(trow.fields[5], table_path, trow.line);
      if (!(w > 0)) malformed(table_path, trow.line, "weight must be positive");
      if (table.find(key)) malformed(table_path, trow.line, "duplicate context '" + key.text() + "'");
      table.add(key, w);
    }
    model.tables.emplace(f[0], std::move(table));
  }
  return model;
}

}  // namespace ctxner
