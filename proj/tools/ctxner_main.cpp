// ctxner: learn class-indicative contexts from a seed-built corpus and
// recognize entities with them.
//
//   ctxner acquire   --examples FILE --client DIR --corpus DIR
//   ctxner weigh     --corpus DIR --examples FILE [--model DIR] [--output PATH]
//   ctxner recognize --model DIR [INPUT...] [--output PATH]
//   ctxner evaluate  --annotations FILE --gold FILE [--output PATH]
//   ctxner growth    --corpus DIR --examples FILE --steps N,N,... [--output PATH]
//
// Exit status: 0 success, 2 usage or input error, 3 empty result,
// 4 malformed model or data file.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxner/corpus_store.hpp"
#include "ctxner/error.hpp"
#include "ctxner/evaluation.hpp"
#include "ctxner/learning_example.hpp"
#include "ctxner/recognizer.hpp"
#include "ctxner/search_acquire.hpp"
#include "ctxner/tsv.hpp"
#include "ctxner/weighting.hpp"

namespace fs = std::filesystem;
using namespace ctxner;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kEmpty = 3, kMalformed = 4 };

struct RunConfig {
  std::size_t context_len = 2;
  std::string side = "left";
  std::size_t min_count = 1;
  std::optional<double> threshold;
  std::optional<double> margin;
  std::optional<std::size_t> max_entity_tokens;
  std::string output;
};

void emit(const std::string& output, const std::string& content) {
  if (output.empty() || output == "-") {
    std::cout << content;
  } else {
    if (auto parent = fs::path(output).parent_path(); !parent.empty()) fs::create_directories(parent);
    tsv::write_file(output, content);
  }
}

WeightConfig weight_config(const RunConfig& rc) {
  WeightConfig wc;
  wc.context_length = rc.context_len;
  wc.side = parse_side(rc.side);
  wc.min_count = rc.min_count;
  return wc;
}

std::vector<LearningExample> select_class(const std::vector<LearningExample>& all,
                                          const std::string& class_label) {
  if (class_label.empty()) return all;
  auto out = examples_of_class(all, class_label);
  if (out.empty()) throw Error(ErrorKind::Input, "no learning examples of class '" + class_label + "'");
  return out;
}

int run_acquire(const std::string& examples_file, const std::string& client_dir,
                const std::string& corpus_dir, std::size_t max_results, std::size_t concurrency,
                const std::string& hint) {
  const auto examples = load_examples(examples_file);
  if (examples.empty()) throw Error(ErrorKind::Input, "no learning examples in " + examples_file);
  MockSearchClient client(client_dir);

  CorpusManifest existing;
  if (fs::exists(fs::path(corpus_dir) / "manifest.tsv")) existing = load_corpus(corpus_dir);
  if (existing.class_label.empty()) {
    for (const auto& label : class_labels(examples)) {
      if (!existing.class_label.empty()) existing.class_label += ",";
      existing.class_label += label;
    }
  }

  const auto queries = build_queries(examples, max_results, hint);
  auto report = acquire(client, queries, existing, AcquireOptions{concurrency});
  save_corpus(report.corpus, corpus_dir);
  for (const auto& f : report.failures) std::cerr << "skipped " << f.uri << ": " << f.reason << "\n";
  std::cout << report.added << " new documents (" << report.corpus.documents.size()
            << " documents in corpus)\n";
  return kOk;
}

int run_weigh(const std::string& corpus_dir, const std::string& examples_file,
              const std::string& class_label, const std::string& model_dir,
              const std::string& stats_file, const RunConfig& rc) {
  const auto corpus = load_corpus(corpus_dir);
  const auto all = select_class(load_examples(examples_file), class_label);
  const auto labels = class_labels(all);
  if (labels.empty()) throw Error(ErrorKind::Input, "no learning examples in " + examples_file);
  if (labels.size() > 1 && (!rc.output.empty() || !stats_file.empty() || model_dir.empty())) {
    throw Error(ErrorKind::Input,
                "examples span several classes; pass --class, or --model alone to weigh them all");
  }

  auto& summary = rc.output.empty() && model_dir.empty() ? std::cerr : std::cout;
  for (const auto& label : labels) {
    const auto examples = examples_of_class(all, label);
    const auto table = build_weight_table(corpus, examples, weight_config(rc));
    if (!rc.output.empty() || model_dir.empty()) emit(rc.output, weight_table_to_tsv(table));
    if (!stats_file.empty()) emit(stats_file, context_stats_to_tsv(table));
    if (!model_dir.empty()) {
      save_model_table(model_dir, table, rc.threshold.value_or(0), rc.margin.value_or(0));
    }
    summary << label << ": " << table.rows.size() << " contexts, " << table.global.sum_nc
            << " occurrences\n";
  }
  return kOk;
}

std::vector<Document> load_inputs(const std::vector<std::string>& inputs) {
  std::vector<Document> docs;
  for (const auto& input : inputs) {
    const fs::path path(input);
    if (fs::is_directory(path)) {
      auto corpus = load_corpus(path);
      docs.insert(docs.end(), corpus.documents.begin(), corpus.documents.end());
    } else {
      if (!fs::exists(path)) throw Error(ErrorKind::Input, "no such input: " + input);
      const auto ext = path.extension().string();
      const auto kind = ext == ".html" || ext == ".htm" ? DocKind::Markup : DocKind::Plain;
      docs.push_back(make_document(path.stem().string(), input, tsv::read_file(path), kind));
    }
  }
  return docs;
}

int run_recognize(const std::string& model_dir, const std::vector<std::string>& inputs,
                  const RunConfig& rc) {
  auto model = load_model(model_dir, parse_side(rc.side));
  if (rc.threshold) model.threshold = *rc.threshold;
  if (rc.margin) model.margin = *rc.margin;
  if (rc.max_entity_tokens) model.max_entity_tokens = *rc.max_entity_tokens;
  const auto docs = load_inputs(inputs);
  const auto annotations = recognize(docs, model);
  emit(rc.output, annotations_to_tsv(annotations));
  return kOk;
}

int run_evaluate(const std::string& annotations_file, const std::string& gold_file,
                 const RunConfig& rc) {
  const auto system = load_annotations(annotations_file);
  const auto gold = load_gold(gold_file);
  const auto report = evaluate(system, gold);
  std::cout << report_text(report);
  if (!rc.output.empty()) emit(rc.output, report_tsv(report));
  return kOk;
}

int run_growth(const std::string& corpus_dir, const std::string& examples_file,
               const std::string& class_label, const std::vector<std::size_t>& steps,
               const RunConfig& rc) {
  const auto corpus = load_corpus(corpus_dir);
  const auto examples = select_class(load_examples(examples_file), class_label);
  if (class_labels(examples).size() > 1) {
    throw Error(ErrorKind::Input, "examples span several classes; pass --class");
  }
  const auto points = growth_curve(corpus, examples, steps, weight_config(rc));
  emit(rc.output, growth_to_tsv(points));
  return kOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input: return kUsage;
    case ErrorKind::EmptyResult: return kEmpty;
    case ErrorKind::Domain: return kEmpty;
    case ErrorKind::Malformed: return kMalformed;
  }
  return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-weighted named entity recognition"};
  app.require_subcommand(1);
  RunConfig rc;

  auto add_extraction = [&](CLI::App* cmd) {
    cmd->add_option("--context-len", rc.context_len, "Words per context")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--side", rc.side, "Context side")
        ->check(CLI::IsMember({"left", "right"}))
        ->capture_default_str();
  };
  auto add_decision = [&](CLI::App* cmd) {
    cmd->add_option("--threshold", rc.threshold, "Minimum winning vote")->check(CLI::NonNegativeNumber);
    cmd->add_option("--margin", rc.margin, "Minimum lead over the runner-up")->check(CLI::NonNegativeNumber);
  };

  std::string examples_file, client_dir, corpus_dir, model_dir, class_label, stats_file;
  std::string annotations_file, gold_file, hint;
  std::size_t max_results = 10, concurrency = 4;
  std::vector<std::string> inputs;
  std::vector<std::size_t> steps;

  auto* acquire_cmd = app.add_subcommand("acquire", "Build a corpus from search results");
  acquire_cmd->add_option("--examples", examples_file, "surface<TAB>class file")->required();
  acquire_cmd->add_option("--client", client_dir, "Mock client fixture directory")->required();
  acquire_cmd->add_option("--corpus", corpus_dir, "Corpus directory (created or extended)")->required();
  acquire_cmd->add_option("--max-results", max_results, "Links per query")->capture_default_str();
  acquire_cmd->add_option("--concurrency", concurrency, "Parallel fetches")->capture_default_str();
  acquire_cmd->add_option("--query-hint", hint, "Words appended to every query");

  auto* weigh_cmd = app.add_subcommand("weigh", "Rank contexts of one or more classes");
  weigh_cmd->add_option("--corpus", corpus_dir)->required();
  weigh_cmd->add_option("--examples", examples_file)->required();
  weigh_cmd->add_option("--class", class_label, "Only this class");
  weigh_cmd->add_option("--model", model_dir, "Also add the table(s) to this model directory");
  weigh_cmd->add_option("--stats", stats_file, "Write raw counts here");
  weigh_cmd->add_option("--min-count", rc.min_count)->check(CLI::PositiveNumber)->capture_default_str();
  weigh_cmd->add_option("--output", rc.output, "Weight table TSV");
  add_extraction(weigh_cmd);
  add_decision(weigh_cmd);

  auto* recognize_cmd = app.add_subcommand("recognize", "Annotate documents");
  recognize_cmd->add_option("--model", model_dir)->required();
  recognize_cmd->add_option("inputs", inputs, "Text files or corpus directories");
  recognize_cmd->add_option("--max-entity-tokens", rc.max_entity_tokens)->check(CLI::PositiveNumber);
  recognize_cmd->add_option("--output", rc.output, "Annotation TSV");
  recognize_cmd->add_option("--side", rc.side)->check(CLI::IsMember({"left", "right"}))->capture_default_str();
  add_decision(recognize_cmd);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Precision and recall against gold");
  evaluate_cmd->add_option("--annotations", annotations_file)->required();
  evaluate_cmd->add_option("--gold", gold_file)->required();
  evaluate_cmd->add_option("--output", rc.output, "Machine-readable report TSV");

  auto* growth_cmd = app.add_subcommand("growth", "Context counts over growing corpus prefixes");
  growth_cmd->add_option("--corpus", corpus_dir)->required();
  growth_cmd->add_option("--examples", examples_file)->required();
  growth_cmd->add_option("--class", class_label, "Only this class");
  growth_cmd->add_option("--steps", steps, "Prefix sizes, e.g. 80,110,160")->required()->delimiter(',');
  growth_cmd->add_option("--output", rc.output, "Growth TSV");
  add_extraction(growth_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*acquire_cmd) return run_acquire(examples_file, client_dir, corpus_dir, max_results, concurrency, hint);
    if (*weigh_cmd) return run_weigh(corpus_dir, examples_file, class_label, model_dir, stats_file, rc);
    if (*recognize_cmd) return run_recognize(model_dir, inputs, rc);
    if (*evaluate_cmd) return run_evaluate(annotations_file, gold_file, rc);
    if (*growth_cmd) return run_growth(corpus_dir, examples_file, class_label, steps, rc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
