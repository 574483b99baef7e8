#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "autojournal/error.hpp"
#include "autojournal/evaluator.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace autojournal;
using namespace autojournal::eval;
using journal::StreamTag;

namespace {

std::shared_ptr<EmbeddingProvider> stub() { return std::make_shared<HashedBagOfWordsEmbedder>(256); }

void expect_matches_oracle(const journal::Journal& t, const journal::Journal& p, const EvalScores& s, double tol) {
  const auto o = ajtest::oracle::evaluate(t, p);
  EXPECT_NEAR(s.event_t, o.event_t, tol);
  EXPECT_NEAR(s.event_p, o.event_p, tol);
  EXPECT_NEAR(s.feeling_t, o.feeling_t, tol);
  EXPECT_NEAR(s.feeling_p, o.feeling_p, tol);
  EXPECT_NEAR(s.event_overall, o.event_overall, tol);
  EXPECT_NEAR(s.feeling_overall, o.feeling_overall, tol);
  EXPECT_EQ(s.event_warning, o.event_warning);
  EXPECT_EQ(s.feeling_warning, o.feeling_warning);
}

// Provider returning arbitrary non-unit vectors, to show normalization and
// identity do not depend on the stub.
class RandomProvider : public EmbeddingProvider {
 public:
  std::string id() const override { return "random"; }
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> out;
    for (const auto& t : texts) {
      std::mt19937_64 rng(std::hash<std::string>{}(t));
      std::normal_distribution<double> nd(0, 5);
      std::vector<double> v(64);
      for (auto& x : v) x = nd(rng);
      out.push_back(v);
    }
    return out;
  }
};

}  // namespace

TEST(EventScores, Examples) {
  auto s = event_scores(SimilarityMatrix(1, 1, {1.0}));
  EXPECT_EQ(s.score_t, 1.0);
  EXPECT_EQ(s.score_p, 1.0);
  EXPECT_EQ(s.assignment.j_star, std::vector<std::size_t>{0});
  EXPECT_EQ(s.assignment.i_star, std::vector<std::size_t>{0});

  s = event_scores(SimilarityMatrix(2, 2, {0.9, 0.2, 0.1, 0.8}));
  EXPECT_DOUBLE_EQ(s.score_t, 0.85);
  EXPECT_DOUBLE_EQ(s.score_p, 0.85);
  const auto o = ajtest::oracle::from_matrix({{0.9, 0.2}, {0.1, 0.8}});
  EXPECT_EQ(s.score_t, o.score_t);
  EXPECT_EQ(s.score_p, o.score_p);

  s = event_scores(SimilarityMatrix(1, 2, {0.5, 0.5}));
  EXPECT_EQ(s.assignment.j_star[0], 0u);
  EXPECT_EQ(s.assignment.i_star, (std::vector<std::size_t>{0, 0}));
}

TEST(EventScores, TransposeSwapsSides) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 6;
    std::vector<double> cells(n * m);
    for (auto& c : cells) c = u(rng);
    const SimilarityMatrix mat(n, m, cells);
    const auto a = event_scores(mat), b = event_scores(mat.transposed());
    EXPECT_EQ(a.score_t, b.score_p);
    EXPECT_EQ(a.score_p, b.score_t);
    EXPECT_EQ(a.assignment.j_star, b.assignment.i_star);
  }
}

TEST(SimilarityMatrixTest, RejectsOutOfRangeCells) {
  EXPECT_THROW(SimilarityMatrix(1, 1, {1.5}), Error);
  EXPECT_THROW(SimilarityMatrix(1, 2, {0.5}), Error);
  EXPECT_EQ(SimilarityMatrix(1, 1, {1.0 + 1e-12}).at(0, 0), 1.0);
}

TEST(OverallScore, Examples) {
  EXPECT_EQ(overall_score(1.0, 1.0).value, 1.0);
  EXPECT_NEAR(overall_score(0.9, 0.8).value, 0.8470588235294118, 1e-12);
  EXPECT_NEAR(overall_score(0.9, 0.8).value, 2 * 0.72 / 1.7, 1e-15);
  const auto z = overall_score(0.0, 0.9);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_TRUE(z.warning);
  EXPECT_TRUE(overall_score(-0.2, 0.9).warning);
  EXPECT_FALSE(overall_score(0.3, 0.9).warning);
}

TEST(OverallScore, BetweenMinAndMax) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1e-6, 1);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    const double h = overall_score(a, b).value;
    EXPECT_LE(h, std::max(a, b) + 1e-15);
    EXPECT_GE(h, std::min(a, b) - 1e-15);
  }
}

TEST(Embedder, StubExamples) {
  Embedder e(stub());
  const auto a = e.embed_one("family call");
  EXPECT_NEAR(cosine(a, e.embed_one("Family, CALL!")), 1.0, 1e-12);
  EXPECT_NEAR(ajtest::oracle::cosine("family call", "family call"), 1.0, 1e-12);
  // token-disjoint pair whose two tokens land in different buckets than each other
  const auto b = e.embed_one("email work");
  EXPECT_EQ(cosine(a, b), ajtest::oracle::cosine("family call", "email work"));
  EXPECT_EQ(cosine(a, b), 0.0);
  double norm = 0;
  for (double x : a.values) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  // hand count: "call call video" puts 2 in one bucket and 1 in another
  EXPECT_NEAR(cosine(e.embed_one("call call video"), e.embed_one("call")), 2 / std::sqrt(5.0), 1e-12);
}

TEST(Embedder, DeterministicCachedAndNormalizing) {
  auto provider = std::make_shared<RandomProvider>();
  Embedder e(provider);
  const auto v1 = e.embed({"a", "b", "a"});
  EXPECT_EQ(v1[0].values, v1[2].values);
  EXPECT_EQ(e.cache_size(), 2u);
  const auto v2 = e.embed({"a"});
  EXPECT_EQ(v2[0].values, v1[0].values);
  EXPECT_EQ(e.provider_calls(), 1u);
  for (const auto& v : v1) {
    double n = 0;
    for (double x : v.values) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
  EXPECT_THROW(e.embed({}), Error);
}

TEST(Embedder, DimensionFixedPerSession) {
  class Growing : public EmbeddingProvider {
   public:
    std::string id() const override { return "growing"; }
    std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override {
      ++dim;
      return std::vector<std::vector<double>>(texts.size(), std::vector<double>(dim, 1.0));
    }
    std::size_t dim = 3;
  };
  Embedder e(std::make_shared<Growing>());
  e.embed_one("x");
  try {
    e.embed_one("y");
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Embedder, ConcurrentUseReturnsRequestedKeys) {
  Embedder e(stub());
  std::vector<std::string> words;
  for (int i = 0; i < 200; ++i) words.push_back("word" + std::to_string(i) + " extra" + std::to_string(i % 7));
  std::vector<std::jthread> threads;
  std::atomic<int> bad{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int k = 0; k < 200; ++k) {
        const auto& w = words[(k * 7 + t * 13) % words.size()];
        const auto got = e.embed_one(w);
        std::vector<double> want = ajtest::oracle::stub_vector(w);
        for (std::size_t d = 0; d < want.size(); ++d) {
          if (std::abs(got.values[d] - want[d]) > 1e-12) {
            ++bad;
            break;
          }
        }
      }
    });
  }
  threads.clear();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_EQ(e.cache_size(), words.size());
}

TEST(EvaluatePair, IdentityUnderAnyUnitProvider) {
  std::mt19937_64 rng(3);
  for (auto provider : {stub(), std::shared_ptr<EmbeddingProvider>(std::make_shared<RandomProvider>())}) {
    Embedder e(provider);
    for (int t = 0; t < 50; ++t) {
      const auto j = ajtest::random_distinct_journal(rng, 1 + rng() % 8, StreamTag::Text);
      const auto s = evaluate_pair(j, j, e);
      for (double v : {s.event_t, s.event_p, s.feeling_t, s.feeling_p, s.event_overall, s.feeling_overall}) {
        EXPECT_NEAR(v, 1.0, 1e-6);
      }
    }
  }
}

// Two events with the same bag of words tie; the lower index wins, so the
// second entry is paired with the first one's feelings.
TEST(EvaluatePair, SelfMatchWithTiedEventsFollowsLowestIndex) {
  Embedder e(stub());
  const auto j = ajtest::make_journal({{"family call", "happy"}, {"call family", "tired"}});
  const auto s = evaluate_pair(j, j, e);
  EXPECT_NEAR(s.event_t, 1.0, 1e-12);
  EXPECT_NEAR(s.event_p, 1.0, 1e-12);
  const double cross = ajtest::oracle::cosine("happy", "tired");
  EXPECT_NEAR(s.feeling_t, (1.0 + cross) / 2, 1e-12);
  EXPECT_NEAR(s.feeling_p, (1.0 + cross) / 2, 1e-12);
}

TEST(EvaluatePair, DisjointEventsScoreZeroWithWarning) {
  Embedder e(stub());
  const auto t = ajtest::make_journal({{"family call", "happy"}}, StreamTag::GroundTruth);
  const auto p = ajtest::make_journal({{"email work", "happy"}});
  const auto s = evaluate_pair(t, p, e);
  EXPECT_EQ(s.event_t, 0.0);
  EXPECT_EQ(s.event_overall, 0.0);
  EXPECT_TRUE(s.event_warning);
  EXPECT_NEAR(s.feeling_overall, 1.0, 1e-12);
}

TEST(EvaluatePair, FamilyCallFixtureMatchesOracle) {
  Embedder e(stub());
  const auto t = ajtest::make_journal({{"Family call", "Belonging, tired, warm"}}, StreamTag::GroundTruth);
  const auto p = ajtest::make_journal({{"video call with their family", "Happy, connected"},
                                       {"Browsing news", "Curious"}});
  const auto s = evaluate_pair(t, p, e);
  expect_matches_oracle(t, p, s, 1e-12);
  EXPECT_GT(s.event_t, 0.5);  // "family" and "call" are shared
}

TEST(EvaluatePair, TwoByThreeMatrixMatchesHandCosines) {
  Embedder e(stub());
  const auto t = ajtest::make_journal({{"lunch with friend", "happy"}, {"bus to work", "tired"}},
                                      StreamTag::GroundTruth);
  const auto p = ajtest::make_journal({{"lunch", "calm"}, {"work email", "bored"}, {"friend chat lunch", "happy"}});
  const auto m = similarity_matrix(t, p, e);
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 3u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(m.at(i, j), ajtest::oracle::cosine(t.entries[i].event, p.entries[j].event), 1e-12);
    }
  }
  expect_matches_oracle(t, p, evaluate_pair(t, p, e), 1e-12);
}

TEST(EvaluatePair, EmptyAndMismatched) {
  Embedder e(stub());
  journal::Journal empty;
  const auto j = ajtest::make_journal({{"a", "b"}});
  try {
    similarity_matrix(empty, j, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::EmptyJournal);
  }
  MatchAssignment bad{{0, 0}, {0}};
  try {
    feeling_scores(j, j, bad, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::AssignmentMismatch);
  }
}

TEST(EvaluatePair, RandomPairsMatchOracle) {
  std::mt19937_64 rng(2024);
  Embedder e(stub());
  for (int t = 0; t < 300; ++t) {
    const auto truth = ajtest::random_journal(rng, 1 + rng() % 6, StreamTag::GroundTruth);
    const auto pred = ajtest::random_journal(rng, 1 + rng() % 6, StreamTag::Text);
    expect_matches_oracle(truth, pred, evaluate_pair(truth, pred, e), 1e-9);
  }
}

TEST(EvaluatePair, PermutingPredictionsKeepsAggregates) {
  std::mt19937_64 rng(77);
  Embedder e(stub());
  for (int t = 0; t < 50; ++t) {
    const auto truth = ajtest::random_journal(rng, 1 + rng() % 6, StreamTag::GroundTruth);
    auto pred = ajtest::random_journal(rng, 2 + rng() % 5, StreamTag::Text);
    const auto base = evaluate_pair(truth, pred, e);
    std::shuffle(pred.entries.begin(), pred.entries.end(), rng);
    const auto s = evaluate_pair(truth, pred, e);
    EXPECT_NEAR(s.event_t, base.event_t, 1e-12);
    EXPECT_NEAR(s.event_p, base.event_p, 1e-12);
    EXPECT_NEAR(s.event_overall, base.event_overall, 1e-12);
  }
}

TEST(EvaluatePair, DuplicatePredictionKeepsScoreT) {
  std::mt19937_64 rng(78);
  Embedder e(stub());
  for (int t = 0; t < 50; ++t) {
    const auto truth = ajtest::random_journal(rng, 1 + rng() % 6, StreamTag::GroundTruth);
    auto pred = ajtest::random_journal(rng, 1 + rng() % 5, StreamTag::Text);
    const auto base = evaluate_pair(truth, pred, e);
    pred.entries.push_back(pred.entries[rng() % pred.entries.size()]);
    const auto s = evaluate_pair(truth, pred, e);
    EXPECT_EQ(s.event_t, base.event_t);
  }
}

TEST(HttpEmbedding, TalksToLocalService) {
  httplib::Server server;
  std::atomic<int> embed_calls{0};
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status": "ok", "model_id": "mock-encoder", "dim": 256})", "application/json");
  });
  server.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
    ++embed_calls;
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& t : body["texts"]) {
      // unnormalized: scale the stub vector by 3
      auto v = ajtest::oracle::stub_vector(t.get<std::string>());
      for (auto& x : v) x *= 3;
      vectors.push_back(v);
    }
    res.set_content(nlohmann::json({{"vectors", vectors}, {"model_id", "mock-encoder"}, {"dim", 256}}).dump(),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto provider = std::make_shared<HttpEmbeddingProvider>("http://127.0.0.1:" + std::to_string(port), 2);
  const auto health = provider->health();
  EXPECT_EQ(health.status, "ok");
  EXPECT_EQ(health.dim, 256u);
  Embedder e(provider);
  const auto vs = e.embed({"one", "two", "three", "four", "five"});
  EXPECT_EQ(embed_calls.load(), 3);  // batches of 2
  EXPECT_EQ(vs[0].dim(), health.dim);
  const auto j = ajtest::make_journal({{"family call", "warm"}, {"news", "calm"}});
  const auto s = evaluate_pair(j, j, e);
  EXPECT_NEAR(s.event_overall, 1.0, 1e-6);
  EXPECT_NEAR(s.feeling_overall, 1.0, 1e-6);
  Embedder stub_e(stub());
  const auto t = ajtest::make_journal({{"lunch with friend", "happy"}}, StreamTag::GroundTruth);
  const auto a = evaluate_pair(t, j, e), b = evaluate_pair(t, j, stub_e);
  EXPECT_NEAR(a.event_overall, b.event_overall, 1e-12);

  server.stop();
  th.join();
}

TEST(HttpEmbedding, ServiceErrorsSurfaceAsProviderError) {
  httplib::Server server;
  server.Post("/embed", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("loading", "text/plain");
  });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  HttpEmbeddingProvider provider("http://127.0.0.1:" + std::to_string(port));
  try {
    provider.embed_raw({"x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderError);
  }
  EXPECT_THROW(provider.health(), Error);
  server.stop();
  th.join();
}
