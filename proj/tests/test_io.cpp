#include <gtest/gtest.h>

#include <cstdlib>
#include <limits>

#include "markov_uq/io.hpp"
#include "test_util.hpp"

using namespace markov_uq;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_json(text, "in.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidModel);
    return e.what();
  }
  ADD_FAILURE() << "parsed";
  return {};
}

}  // namespace

TEST(Json, SyntaxErrorCarriesLineAndColumn) {
  EXPECT_NE(message_of("{\n  \"a\": [1, 2,\n  ]\n}").find("in.json:3:"), std::string::npos);
  EXPECT_NE(message_of("{\"a\": tru}").find("in.json:1:"), std::string::npos);
}

TEST(Json, ModelRoundTrip) {
  RandomStream rng(81, 0);
  FiniteModel m;
  m.ctmc = markov_uq::testing::random_generator(rng, 4);
  const Json j = model_to_json(m);
  const FiniteModel back = model_from_json(parse_json(j.dump(), "x"), "x");
  ASSERT_TRUE(back.is_ctmc());
  EXPECT_EQ(back.ctmc->rates(), m.ctmc->rates());
  EXPECT_EQ(back.states(), m.states());

  FiniteModel d;
  d.dtmc.emplace(Matrix{{0.5, 0.5}, {0.25, 0.75}}, std::vector<std::string>{"a", "b"});
  const FiniteModel dback = model_from_json(model_to_json(d), "y");
  EXPECT_FALSE(dback.is_ctmc());
  EXPECT_EQ(dback.states()[1], "b");
}

TEST(Json, SchemaErrors) {
  auto kind = [](const char* text) {
    try {
      model_from_json(parse_json(text, "m"), "m");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::OutOfRange;
  };
  EXPECT_EQ(kind(R"({"matrix": [[-1, 1], [1, -1]]})"), ErrorKind::InvalidModel);
  EXPECT_EQ(kind(R"({"kind": "sde", "matrix": [[-1, 1], [1, -1]]})"), ErrorKind::InvalidModel);
  EXPECT_EQ(kind(R"({"kind": "ctmc", "matrix": [[-1, 1], [1]]})"), ErrorKind::InvalidModel);
  EXPECT_EQ(kind(R"({"kind": "ctmc", "matrix": [[-1, "x"], [1, -1]]})"), ErrorKind::InvalidModel);
  EXPECT_EQ(kind(R"({"kind": "ctmc", "matrix": [[-1, 2], [1, -1]]})"), ErrorKind::InvalidModel);
  EXPECT_EQ(kind(R"({"kind": "dtmc", "matrix": [[0.5, 0.6], [1, 0]]})"), ErrorKind::InvalidModel);
  EXPECT_EQ(kind(R"({"kind": "ctmc", "states": ["a"], "matrix": [[-1, 1], [1, -1]]})"),
            ErrorKind::InvalidModel);
}

TEST(Json, ObservableAndGraph) {
  EXPECT_EQ(observable_from_json(parse_json(R"({"values": [1, 2.5]})", "o"), "o"),
            (Vector{{1.0, 2.5}}));
  EXPECT_EQ(observable_from_json(parse_json("[3]", "o"), "o"), (Vector{{3.0}}));
  EXPECT_THROW(observable_from_json(parse_json(R"({"values": []})", "o"), "o"), Error);
  const Graph g = graph_from_json(parse_json(R"({"n": 3, "edges": [[0, 1], [1, 2]]})", "g"), "g");
  EXPECT_EQ(g.n, 3u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_THROW(graph_from_json(parse_json(R"({"n": 3, "edges": [[0, 5]]})", "g"), "g"), Error);
}

TEST(Json, ReportFields) {
  UqBoundReport b;
  b.method = "poincare";
  b.eta = 0.1;
  b.alpha = 2.0;
  const Json j = to_json(b);
  for (const char* key : {"method", "eta", "eta_source", "T", "entropy", "xi_plus", "xi_minus",
                          "lambda_params", "mean", "variance"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["T"].is_null());
  EXPECT_EQ(j["lambda_params"]["alpha"], 2.0);
  EXPECT_TRUE(j["lambda_params"]["beta"].is_null());

  ValidationReport v;
  v.verdict = Verdict::Fail;
  EXPECT_EQ(to_json(v)["verdict"], "fail");
}

TEST(Format, SeventeenDigitsRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  RandomStream rng(82, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.uniform() * 200) - 100);
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
}
