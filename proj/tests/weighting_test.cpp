#include "ctxner/weighting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "ctxner/error.hpp"
#include "support/corpus_gen.hpp"
#include "support/oracle.hpp"

using namespace ctxner;

namespace {

std::string oracle_key(const ContextKey& k) {
  return std::string(to_string(k.side)) + "|" + k.text();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Input;
}

Document doc(const std::string& id, const std::string& text, const std::string& source) {
  Document d;
  d.id = id;
  d.uri = "http://" + source + "/" + id;
  d.source = SourceId{source};
  d.raw = d.clean = text;
  return d;
}

std::vector<LearningExample> of(std::initializer_list<const char*> surfaces) {
  std::vector<LearningExample> out;
  for (auto s : surfaces) out.emplace_back(s, "capital");
  return out;
}

}  // namespace

TEST(ContextFrequency, Examples) {
  EXPECT_NEAR(context_frequency(17, 4264), 0.0039869, 1e-6);
  EXPECT_NEAR(context_frequency(12, 4264), 0.0028143, 1e-6);
  EXPECT_EQ(context_frequency(0, 4264), 0.0);
  EXPECT_EQ(kind_of([] { context_frequency(0, 0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([] { context_frequency(5, 4); }), ErrorKind::Domain);
}

TEST(LearningExampleFrequency, Examples) {
  EXPECT_NEAR(learning_example_frequency(7, 13), 0.5384616, 1e-6);
  EXPECT_NEAR(learning_example_frequency(8, 13), 0.6153847, 1e-6);
  EXPECT_EQ(learning_example_frequency(13, 13), 1.0);
  EXPECT_EQ(kind_of([] { learning_example_frequency(0, 0); }), ErrorKind::Domain);
}

TEST(DocumentFrequency, Examples) {
  EXPECT_NEAR(document_frequency(4, 9), 0.4444445, 1e-6);
  EXPECT_EQ(document_frequency(3, 5), 0.6);
  EXPECT_EQ(document_frequency(1, 1), 1.0);
  EXPECT_EQ(kind_of([] { document_frequency(1, 0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([] { document_frequency(0, 3); }), ErrorKind::Domain);
}

TEST(InverseContextFrequency, Examples) {
  EXPECT_EQ(inverse_context_frequency(17, 2), 8.5);
  EXPECT_EQ(inverse_context_frequency(5, 5), 1.0);
  EXPECT_EQ(inverse_context_frequency(5, 0), 5.0);
  EXPECT_EQ(kind_of([] { inverse_context_frequency(0, 3); }), ErrorKind::Domain);
}

TEST(ContextWeight, Examples) {
  EXPECT_NEAR(context_weight(0.0039869, 0.5384616, 0.4444445, 8.5), 0.008110106, 1e-8);
  EXPECT_NEAR(context_weight(0.0028143, 0.5384616, 0.6, 6), 0.005455413, 1e-8);
  EXPECT_EQ(context_weight(0, 0.5, 0.5, 2), 0.0);
  EXPECT_EQ(context_weight(0.5, 0.5, 0, 2), 0.0);
}

TEST(TfIdf, Examples) {
  EXPECT_EQ(tf(3, 10), 0.3);
  EXPECT_EQ(tf(0, 10), 0.0);
  EXPECT_EQ(tf(10, 10), 1.0);
  EXPECT_EQ(kind_of([] { tf(1, 0); }), ErrorKind::Domain);
  EXPECT_EQ(idf(100, 100), 0.0);
  EXPECT_EQ(idf(1000, 1), 3.0);
  EXPECT_NEAR(idf(10, 2), 0.69897, 1e-5);
  EXPECT_EQ(kind_of([] { idf(10, 0); }), ErrorKind::Domain);
  EXPECT_EQ(tfidf(0.3, 1), 0.3);
  EXPECT_EQ(tfidf(0, 4.2), 0.0);
  EXPECT_EQ(tfidf(0.5, 2), 1.0);
  EXPECT_NEAR(tfidf(TfIdfStats{3, 10, 10, 2}), 0.3 * std::log10(5.0), 1e-15);
}

TEST(TfIdf, UbiquitousTermHasZeroIdf) {
  for (std::size_t n = 1; n < 2000; n += 7) EXPECT_EQ(idf(n, n), 0.0) << n;
}

TEST(Weigh, HotelsInRow) {
  ContextStats s{ContextKey{{"Hotels", "in"}, Side::Left}, 17, 2, 7, 4, 9};
  const auto row = weigh(s, GlobalStats{4264, 13, "capital"});
  EXPECT_NEAR(row.cf, 0.0039869, 1e-6);
  EXPECT_NEAR(row.df, 0.4444445, 1e-6);
  EXPECT_NEAR(row.lef, 0.5384616, 1e-6);
  EXPECT_EQ(row.icf, 8.5);
  EXPECT_NEAR(row.w, 0.008110106, 1e-6);
  EXPECT_EQ(row.w, row.cf * row.lef * row.df * row.icf);
}

TEST(BuildWeightTable, SingleContextSingleExample) {
  CorpusManifest corpus;
  corpus.documents.push_back(doc("a", "Hotels in Paris", "s"));
  const auto table = build_weight_table(corpus, of({"Paris"}));
  ASSERT_EQ(table.rows.size(), 1u);
  const auto& r = table.rows[0];
  EXPECT_EQ(r.stats.context.text(), "Hotels in");
  EXPECT_EQ(r.cf, 1.0);
  EXPECT_EQ(r.lef, 1.0);
  EXPECT_EQ(r.df, 1.0);
  EXPECT_EQ(r.icf, 1.0);  // nc = 1, C = 0 floored to 1
  EXPECT_EQ(table.global.sum_nc, 1u);
  EXPECT_EQ(table.global.total_examples, 1u);
  EXPECT_EQ(table.global.class_label, "capital");
}

TEST(BuildWeightTable, ToyFixtureCounts) {
  CorpusManifest corpus;
  corpus.documents.push_back(doc("t1", "Hotels in Paris are expensive. Map of Paris and hotels in Tunis.", "h"));
  corpus.documents.push_back(doc("t2", "We list Hotels in Tunis and Hotels in the old town. Travel to Cairo today.", "h"));
  corpus.documents.push_back(doc("t3", "A short Guide to Cairo. Map of Tunis. Hotels in Cairo, Hotels in Paris.", "t"));
  const auto table = build_weight_table(corpus, of({"Paris", "Tunis", "Cairo"}));
  ASSERT_EQ(table.rows.size(), 5u);
  EXPECT_EQ(table.global.sum_nc, 9u);
  const auto& top = table.rows[0];
  EXPECT_EQ(top.stats, (ContextStats{ContextKey{{"Hotels", "in"}, Side::Left}, 4, 1, 3, 2, 3}));
  EXPECT_EQ(table.rows[1].stats.context.text(), "Map of");
  EXPECT_EQ(table.rows[1].stats.nle, 2u);
}

TEST(BuildWeightTable, Errors) {
  CorpusManifest corpus;
  corpus.documents.push_back(doc("a", "Hotels in Paris", "s"));
  EXPECT_EQ(kind_of([&] { build_weight_table(corpus, {}); }), ErrorKind::Input);
  std::vector<LearningExample> mixed = {LearningExample("Paris", "capital"),
                                        LearningExample("Bush", "president")};
  EXPECT_EQ(kind_of([&] { build_weight_table(corpus, mixed); }), ErrorKind::Input);
  EXPECT_EQ(kind_of([&] { build_weight_table(corpus, of({"Oslo"})); }), ErrorKind::EmptyResult);
  EXPECT_EQ(kind_of([&] { build_weight_table(CorpusManifest{}, of({"Paris"})); }), ErrorKind::EmptyResult);
  WeightConfig twice;
  twice.min_count = 2;
  EXPECT_EQ(kind_of([&] { build_weight_table(corpus, of({"Paris"}), twice); }), ErrorKind::EmptyResult);
  WeightConfig zero;
  zero.context_length = 0;
  EXPECT_EQ(kind_of([&] { build_weight_table(corpus, of({"Paris"}), zero); }), ErrorKind::Input);
}

TEST(BuildWeightTable, MinCountDropsRowsAndRenormalizes) {
  CorpusManifest corpus;
  corpus.documents.push_back(doc("a", "Hotels in Paris. Hotels in Tunis. Map of Cairo.", "s"));
  WeightConfig cfg;
  cfg.min_count = 2;
  const auto table = build_weight_table(corpus, of({"Paris", "Tunis", "Cairo"}), cfg);
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.global.sum_nc, 2u);
  EXPECT_EQ(table.rows[0].cf, 1.0);
}

TEST(BuildWeightTable, MatchesOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto gen = test_support::random_corpus(rng);
    for (std::size_t len : {1, 2, 3}) {
      for (Side side : {Side::Left, Side::Right}) {
        const auto expected = test_support::oracle_counts(gen.corpus, gen.examples, len, side == Side::Left);
        WeightConfig cfg;
        cfg.context_length = len;
        cfg.side = side;
        if (expected.rows.empty()) {
          EXPECT_THROW(build_weight_table(gen.corpus, gen.examples, cfg), Error);
          continue;
        }
        const auto table = build_weight_table(gen.corpus, gen.examples, cfg);
        ASSERT_EQ(table.rows.size(), expected.rows.size());
        EXPECT_EQ(table.global.sum_nc, expected.sum_nc);
        EXPECT_EQ(table.global.total_examples, expected.total_examples);
        for (const auto& r : table.rows) {
          const auto it = expected.rows.find(oracle_key(r.stats.context));
          ASSERT_NE(it, expected.rows.end()) << oracle_key(r.stats.context);
          const auto& o = it->second;
          EXPECT_EQ((test_support::OracleRow{r.stats.nc, r.stats.C, r.stats.nle, r.stats.nd, r.stats.D}), o)
              << oracle_key(r.stats.context);
          EXPECT_LE(test_support::ulp_distance(r.w, test_support::oracle_weight(o, expected.sum_nc,
                                                                      expected.total_examples)),
                    4u);
        }
      }
    }
  }
}

TEST(BuildWeightTable, RowsAreRankedAndConsistent) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto gen = test_support::random_corpus(rng);
    WeightTable table;
    try {
      table = build_weight_table(gen.corpus, gen.examples);
    } catch (const Error&) {
      continue;
    }
    double sum_cf = 0;
    std::size_t sum_nc = 0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      sum_cf += r.cf;
      sum_nc += r.stats.nc;
      EXPECT_LE(r.stats.nd, r.stats.D);
      EXPECT_LE(r.stats.nle, table.global.total_examples);
      EXPECT_GE(r.stats.nc, 1u);
      EXPECT_EQ(r.cf, context_frequency(r.stats.nc, table.global.sum_nc));
      EXPECT_EQ(r.w, r.cf * r.lef * r.df * r.icf);
      if (i) {
        const auto& p = table.rows[i - 1];
        EXPECT_TRUE(p.w > r.w || (p.w == r.w && (p.stats.nc > r.stats.nc ||
                                                 (p.stats.nc == r.stats.nc && p.stats.context < r.stats.context))));
      }
    }
    EXPECT_NEAR(sum_cf, 1.0, 1e-9);
    EXPECT_EQ(sum_nc, table.global.sum_nc);
  }
}

TEST(BuildWeightTable, DocumentOrderDoesNotMatter) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto gen = test_support::random_corpus(rng);
    auto shuffled = gen.corpus;
    std::shuffle(shuffled.documents.begin(), shuffled.documents.end(), rng);
    WeightConfig one_thread;
    one_thread.threads = 1;
    try {
      const auto a = build_weight_table(gen.corpus, gen.examples, one_thread);
      const auto b = build_weight_table(shuffled, gen.examples);
      EXPECT_EQ(weight_table_to_tsv(a), weight_table_to_tsv(b));
      EXPECT_EQ(context_stats_to_tsv(a), context_stats_to_tsv(b));
    } catch (const Error&) {
    }
  }
}

TEST(BuildWeightTable, CopyOnNewSourcesKeepsRatios) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto gen = test_support::random_corpus(rng);
    auto doubled = gen.corpus;
    for (const auto& d : gen.corpus.documents) {
      auto copy = d;
      copy.id = "copy_" + d.id;
      copy.uri = "http://copy." + d.source.value + "/" + d.id;
      copy.source = SourceId{"copy." + d.source.value};
      doubled.documents.push_back(copy);
    }
    WeightTable base;
    try {
      base = build_weight_table(gen.corpus, gen.examples);
    } catch (const Error&) {
      continue;
    }
    const auto twice = build_weight_table(doubled, gen.examples);
    ASSERT_EQ(base.rows.size(), twice.rows.size());
    EXPECT_EQ(twice.global.sum_nc, 2 * base.global.sum_nc);
    std::map<ContextKey, const WeightedContext*> by_key;
    for (const auto& r : twice.rows) by_key[r.stats.context] = &r;
    for (const auto& a : base.rows) {
      ASSERT_TRUE(by_key.contains(a.stats.context));
      const auto& b = *by_key[a.stats.context];
      EXPECT_EQ(b.stats.nc, 2 * a.stats.nc);
      EXPECT_EQ(b.stats.C, 2 * a.stats.C);
      EXPECT_EQ(b.stats.D, 2 * a.stats.D);
      EXPECT_EQ(b.stats.nd, 2 * a.stats.nd);
      EXPECT_EQ(b.cf, a.cf);
      EXPECT_EQ(b.lef, a.lef);
      EXPECT_EQ(b.df, a.df);
      if (a.stats.C > 0) EXPECT_EQ(b.icf, a.icf);
    }
  }
}

TEST(WeightTableTsv, Format) {
  WeightTable table;
  table.global = GlobalStats{4264, 13, "capital"};
  table.rows.push_back(weigh(ContextStats{ContextKey{{"Hotels", "in"}, Side::Left}, 17, 2, 7, 4, 9}, table.global));
  table.rows.push_back(weigh(ContextStats{ContextKey{{"Map", "of"}, Side::Left}, 12, 2, 7, 3, 5}, table.global));
  EXPECT_EQ(weight_table_to_tsv(table),
            "context\tcf\tdf\tlef\ticf\tw\n"
            "Hotels in\t0.003986867\t0.4444444\t0.5384615\t8.5\t0.008110037\n"
            "Map of\t0.002814259\t0.6\t0.5384615\t6\t0.005455333\n");
  EXPECT_EQ(context_stats_to_tsv(table),
            "context\tside\tnc\tC\tnle\tnd\tD\n"
            "Hotels in\tleft\t17\t2\t7\t4\t9\n"
            "Map of\tleft\t12\t2\t7\t3\t5\n");
}
