#include "ctxner/recognizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ctxner/error.hpp"
#include "ctxner/tsv.hpp"

namespace fs = std::filesystem;
using namespace ctxner;

namespace {

fs::path fixture(const std::string& name) { return fs::path(CTXNER_FIXTURES) / name; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ctxner_recognizer_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ContextKey key(std::initializer_list<const char*> words, Side side = Side::Left) {
  ContextKey k;
  k.side = side;
  for (auto w : words) k.words.emplace_back(w);
  return k;
}

Document doc(const std::string& id, const std::string& text) {
  Document d;
  d.id = id;
  d.uri = id;
  d.source = SourceId{id};
  d.raw = d.clean = text;
  return d;
}

std::vector<std::string> surfaces(const std::string& text, const RecognitionModel& model) {
  const auto tokens = tokenize(text);
  std::vector<std::string> out;
  for (const auto& s : detect_candidates(tokens, model)) {
    std::string joined;
    for (std::size_t i = s.first; i <= s.last; ++i) joined += (i > s.first ? " " : "") + tokens[i].text;
    out.push_back(joined);
  }
  return out;
}

RecognitionModel single(const std::string& label, const ContextKey& context, double w) {
  RecognitionModel m;
  m.tables[label].add(context, w);
  return m;
}

}  // namespace

TEST(DetectCandidates, StopsAtLowercase) {
  const auto m = single("capital", key({"Hotels", "in"}), 0.008110106);
  EXPECT_EQ(surfaces("Hotels in Paris are", m), (std::vector<std::string>{"Paris"}));
}

TEST(DetectCandidates, MultiWordName) {
  const auto m = single("president", key({"president"}), 0.1);
  EXPECT_EQ(surfaces("president Nicolas Sarkozy with", m), (std::vector<std::string>{"Nicolas Sarkozy"}));
}

TEST(DetectCandidates, NoMatchNoCandidates) {
  const auto m = single("capital", key({"Hotels", "in"}), 0.1);
  EXPECT_TRUE(surfaces("Nothing to see here", m).empty());
  EXPECT_TRUE(surfaces("", m).empty());
  EXPECT_TRUE(surfaces("Hotels in", m).empty());
}

TEST(DetectCandidates, LimitsAndBoundaries) {
  auto m = single("capital", key({"in"}), 0.1);
  m.max_entity_tokens = 2;
  EXPECT_EQ(surfaces("in Aaa Bbb Ccc Ddd", m), (std::vector<std::string>{"Aaa Bbb"}));
  EXPECT_EQ(surfaces("in Aaa. Bbb Ccc", m), (std::vector<std::string>{"Aaa"}));
  EXPECT_TRUE(surfaces("in. Aaa", m).empty());  // context ends a sentence
  m.max_entity_tokens = 0;
  EXPECT_THROW(detect_candidates(tokenize("in Aaa"), m), Error);
}

TEST(DetectCandidates, RightSide) {
  RecognitionModel m;
  m.side = Side::Right;
  m.tables["capital"].add(key({"hotels", "are"}, Side::Right), 0.1);
  EXPECT_EQ(surfaces("the New York hotels are big", m), (std::vector<std::string>{"New York"}));
}

TEST(DetectCandidates, DeduplicatesSpans) {
  RecognitionModel m;
  m.tables["capital"].add(key({"in"}), 0.1);
  m.tables["capital"].add(key({"Hotels", "in"}), 0.2);
  m.tables["president"].add(key({"in"}), 0.3);
  EXPECT_EQ(surfaces("Hotels in Paris", m), (std::vector<std::string>{"Paris"}));
}

TEST(Vote, Accumulates) {
  VoteState s;
  vote(s, "capital", 0.5);
  vote(s, "capital", 0.25);
  EXPECT_EQ(s.votes["capital"], 0.75);
  EXPECT_EQ(s.contributing["capital"].size(), 2u);

  VoteState t;
  vote(t, "capital", 0.008110106, key({"Hotels", "in"}));
  EXPECT_EQ(t.votes["capital"], 0.008110106);
  EXPECT_EQ(t.contributing["capital"][0].context, key({"Hotels", "in"}));

  VoteState u;
  vote(u, "capital", 0.5);
  vote(u, "president", 0.1);
  vote(u, "capital", 0.5);
  EXPECT_EQ(u.votes["capital"], 1.0);
  EXPECT_EQ(u.votes["president"], 0.1);
  EXPECT_THROW(vote(u, "capital", 0.0), Error);
  EXPECT_THROW(vote(u, "capital", -1.0), Error);
}

TEST(Vote, TotalsEqualContributions) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(1e-6, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    VoteState s;
    for (int i = 0; i < 30; ++i) vote(s, i % 3 ? "a" : "b", w(rng));
    for (const auto& [label, total] : s.votes) {
      double sum = 0;
      for (const auto& c : s.contributing[label]) sum += c.w;
      EXPECT_EQ(sum, total);
    }
  }
}

TEST(Classify, Examples) {
  VoteState s;
  vote(s, "capital", 0.9);
  vote(s, "president", 0.1);
  auto d = classify(s, 0.5, 0.2);
  EXPECT_EQ(d.class_label, "capital");
  EXPECT_EQ(d.score, 0.9);
  EXPECT_EQ(d.runner_up, 0.1);

  VoteState low;
  vote(low, "capital", 0.4);
  EXPECT_EQ(classify(low, 0.5, 0).class_label, kUnknownClass);

  VoteState tie;
  vote(tie, "a", 0.6);
  vote(tie, "b", 0.6);
  EXPECT_EQ(classify(tie, 0.5, 0).class_label, kUnknownClass);

  EXPECT_EQ(classify(VoteState{}, 0, 0).class_label, kUnknownClass);
}

TEST(Classify, TieBelowTheTopDoesNotMatter) {
  VoteState s;
  vote(s, "a", 0.2);
  vote(s, "b", 0.2);
  vote(s, "c", 0.7);
  const auto d = classify(s, 0, 0.4);
  EXPECT_EQ(d.class_label, "c");
  EXPECT_EQ(d.runner_up, 0.2);
}

TEST(Classify, ScalingInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  std::uniform_int_distribution<int> classes(1, 4), exponent(-20, 20);
  for (int trial = 0; trial < 2000; ++trial) {
    VoteState s;
    const int n = classes(rng);
    for (int c = 0; c < n; ++c) {
      // coarse values make exact ties common
      vote(s, "c" + std::to_string(c), std::round(w(rng) * 8 + 1) / 8);
    }
    const double theta = std::round(w(rng) * 16) / 8;
    const double delta = std::round(w(rng) * 8) / 8;
    const double k = std::ldexp(1.0, exponent(rng));
    VoteState scaled;
    for (const auto& [label, v] : s.votes) vote(scaled, label, v * k);
    EXPECT_EQ(classify(s, theta, delta).class_label, classify(scaled, theta * k, delta * k).class_label);
  }
}

TEST(RecognizeDocument, ThresholdDecides) {
  const auto m = single("capital", key({"Hotels", "in"}), 0.008110106);
  auto low = m;
  low.threshold = 0.001;
  auto a = recognize_document(doc("d", "Hotels in Paris"), low);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].surface, "Paris");
  EXPECT_EQ(a[0].class_label, "capital");
  EXPECT_EQ(a[0].score, 0.008110106);

  auto high = m;
  high.threshold = 0.05;
  a = recognize_document(doc("d", "Hotels in Paris"), high);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].class_label, kUnknownClass);
}

TEST(RecognizeDocument, SharedContextVotesPerClass) {
  RecognitionModel m;
  m.tables["capital"].add(key({"Mr."}), 0.002);
  m.tables["capital"].add(key({"visit", "to"}), 0.001);
  m.tables["president"].add(key({"Mr."}), 0.01);
  m.tables["president"].add(key({"said", "Mr."}), 0.02);
  auto a = recognize_document(doc("d", "He said Mr. Zidane won. Later Mr. Obama spoke."), m);
  ASSERT_EQ(a.size(), 2u);
  // Zidane: president 0.01 + 0.02, capital 0.002
  EXPECT_EQ(a[0].surface, "Zidane");
  EXPECT_EQ(a[0].class_label, "president");
  EXPECT_DOUBLE_EQ(a[0].score, 0.03);
  EXPECT_EQ(a[0].runner_up, 0.002);
  // Obama: only "Mr." matches
  EXPECT_EQ(a[1].surface, "Obama");
  EXPECT_EQ(a[1].score, 0.01);
  EXPECT_EQ(a[1].runner_up, 0.002);

  m.margin = 0.01;
  a = recognize_document(doc("d", "He said Mr. Zidane won. Later Mr. Obama spoke."), m);
  EXPECT_EQ(a[0].class_label, "president");
  EXPECT_EQ(a[1].class_label, kUnknownClass);
}

TEST(RecognizeDocument, EmptyModel) {
  EXPECT_TRUE(recognize_document(doc("d", "Hotels in Paris"), RecognitionModel{}).empty());
}

TEST(RecognizeDocument, DecisionsRespectThresholdAndMargin) {
  std::mt19937_64 rng(12);
  const std::vector<std::string> words = {"in", "of", "Mr.", "Paris", "Bush", "the", "Hotels", "visit", "to"};
  for (int trial = 0; trial < 200; ++trial) {
    RecognitionModel m;
    std::uniform_real_distribution<double> w(0.001, 1.0);
    for (const auto& label : {"a", "b"}) {
      for (int i = 0; i < 4; ++i) {
        m.tables[label].add(key({words[rng() % words.size()].c_str()}), w(rng));
      }
    }
    m.threshold = w(rng) / 2;
    m.margin = w(rng) / 4;
    std::string text;
    for (int i = 0; i < 40; ++i) text += words[rng() % words.size()] + " ";
    for (const auto& a : recognize_document(doc("d", text), m)) {
      if (a.class_label == kUnknownClass) continue;
      EXPECT_GE(a.score, m.threshold);
      EXPECT_GE(a.score - a.runner_up, m.margin);
    }
  }
}

TEST(Model, LoadsFixture) {
  const auto m = load_model(fixture("model"));
  ASSERT_EQ(m.tables.size(), 2u);
  EXPECT_EQ(m.threshold, 0.0);
  EXPECT_EQ(*m.tables.at("capital").find(key({"Hotels", "in"})), 0.008110106);
  EXPECT_EQ(*m.tables.at("president").find(key({"Mr."})), 0.01);
}

TEST(Model, RecognizesFixtureInput) {
  const auto m = load_model(fixture("model"));
  auto d = doc("recognize_input", tsv::read_file(fixture("recognize_input.txt")));
  const auto a = recognize_document(d, m);
  EXPECT_EQ(annotations_to_tsv(a),
            "doc\tstart_token\tend_token\tsurface\tclass\tscore\trunner_up\n"
            "recognize_input\t2\t3\tNicolas Sarkozy\tpresident\t0.1\t0\n"
            "recognize_input\t6\t6\tZidane\tpresident\t0.01\t0.002\n"
            "recognize_input\t11\t11\tTunis\tcapital\t0.008110106\t0\n"
            "recognize_input\t16\t16\tObama\tpresident\t0.01\t0.002\n");
}

TEST(Model, MalformedWeightReportsLine) {
  try {
    load_model(fixture("model_bad"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Malformed);
    EXPECT_NE(std::string(e.what()).find("capital.tsv:3"), std::string::npos) << e.what();
  }
}

TEST(Model, RejectsBadFiles) {
  auto dir = scratch("bad");
  tsv::write_file(dir / "model.tsv", "class\ttable_file\tthreshold\tmargin\nunknown\tu.tsv\t0\t0\n");
  tsv::write_file(dir / "u.tsv", "context\tcf\tdf\tlef\ticf\tw\nin\t1\t1\t1\t1\t1\n");
  EXPECT_THROW(load_model(dir), Error);

  tsv::write_file(dir / "model.tsv", "class\ttable_file\tthreshold\tmargin\na\tu.tsv\t0\t0\nb\tu.tsv\t1\t0\n");
  EXPECT_THROW(load_model(dir), Error);

  tsv::write_file(dir / "model.tsv", "class\ttable_file\tthreshold\tmargin\na\tu.tsv\t0\t0\n");
  tsv::write_file(dir / "u.tsv", "context\tcf\tdf\tlef\ticf\tw\nin\t1\t1\t1\t1\t0\n");
  EXPECT_THROW(load_model(dir), Error);
  tsv::write_file(dir / "u.tsv", "context\tcf\tdf\tlef\ticf\tw\nin\t1\t1\t1\t1\t1\nin\t1\t1\t1\t1\t2\n");
  EXPECT_THROW(load_model(dir), Error);
  fs::remove(dir / "model.tsv");
  EXPECT_THROW(load_model(dir), Error);
}

TEST(Model, SaveThenLoad) {
  auto dir = scratch("save");
  WeightTable capital;
  capital.global = GlobalStats{4264, 13, "capital"};
  capital.rows.push_back(weigh(ContextStats{key({"Hotels", "in"}), 17, 2, 7, 4, 9}, capital.global));
  WeightTable president;
  president.global = GlobalStats{10, 2, "president"};
  president.rows.push_back(weigh(ContextStats{key({"Mr."}), 5, 5, 2, 1, 1}, president.global));
  save_model_table(dir, capital, 0.001, 0.0005);
  save_model_table(dir, president, 0.001, 0.0005);
  const auto m = load_model(dir);
  ASSERT_EQ(m.tables.size(), 2u);
  EXPECT_EQ(m.threshold, 0.001);
  EXPECT_EQ(m.margin, 0.0005);
  EXPECT_EQ(*m.tables.at("capital").find(key({"Hotels", "in"})), 0.008110037);
  EXPECT_EQ(*m.tables.at("president").find(key({"Mr."})), 0.5);
}

TEST(Annotations, RoundTrip) {
  const auto m = load_model(fixture("model"));
  const auto a = recognize_document(doc("x", tsv::read_file(fixture("recognize_input.txt"))), m);
  auto dir = scratch("ann");
  tsv::write_file(dir / "a.tsv", annotations_to_tsv(a));
  const auto back = load_annotations(dir / "a.tsv");
  ASSERT_EQ(back.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(back[i].span, a[i].span);
    EXPECT_EQ(back[i].surface, a[i].surface);
    EXPECT_EQ(back[i].class_label, a[i].class_label);
  }
}
