#include "oracles.hpp"

#include "proofflow/error.hpp"
#include "proofflow/providers.hpp"
#include "proofflow/scoring.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace proofflow;

namespace {

std::vector<ComponentVerdict> verdicts(std::initializer_list<Rating> ratings) {
    std::vector<ComponentVerdict> out;
    for (Rating r : ratings) out.push_back({"nl", "lean", r});
    return out;
}

constexpr Rating P = Rating::PerfectMatch;
constexpr Rating Mi = Rating::MinorInconsistency;
constexpr Rating Ma = Rating::MajorInconsistency;

// Counts judge calls so the syntax gate can be observed.
class CountingJudge final : public Provider {
public:
    explicit CountingJudge(std::string reply) : reply_(std::move(reply)) {}
    std::string id() const override { return "counting"; }
    ChatExchange complete(const ChatRequest& request) override {
        ++calls;
        ChatExchange e;
        e.request = request;
        e.response_text = reply_;
        e.provider_id = id();
        return e;
    }
    int calls = 0;

private:
    std::string reply_;
};

}  // namespace

TEST(Sugeno, WorkedExample) {
    EXPECT_DOUBLE_EQ(aggregate_faithfulness(verdicts({P, Mi, P})), 2.0 / 3.0);
}

TEST(Sugeno, AllPerfectIsOne) {
    for (int m = 1; m <= 8; ++m) {
        std::vector<ComponentVerdict> v(m, {"nl", "lean", P});
        EXPECT_EQ(aggregate_faithfulness(v), 1.0);
    }
}

TEST(Sugeno, AnyMajorForcesZero) {
    EXPECT_EQ(aggregate_faithfulness(verdicts({P, Ma, P})), 0.0);
    EXPECT_EQ(aggregate_faithfulness(verdicts({Ma})), 0.0);
}

TEST(Sugeno, ExhaustiveAgainstSubsetDefinition) {
    static constexpr Rating alphabet[] = {P, Mi, Ma};
    int cases = 0;
    for (int m = 1; m <= 6; ++m) {
        int total = 1;
        for (int i = 0; i < m; ++i) total *= 3;
        for (int code = 0; code < total; ++code) {
            std::vector<ComponentVerdict> v;
            std::vector<double> s;
            for (int i = 0, c = code; i < m; ++i, c /= 3) {
                v.push_back({"nl", "lean", alphabet[c % 3]});
                s.push_back(rating_score(alphabet[c % 3]));
            }
            ASSERT_EQ(aggregate_faithfulness(v), oracle::sugeno_by_subsets(s)) << "m=" << m << " code=" << code;
            ++cases;
        }
    }
    EXPECT_EQ(cases, 1092);
}

TEST(Sugeno, PermutationInvariant) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> s(std::uniform_int_distribution<int>(1, 7)(rng));
        for (auto& x : s) x = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        const double base = sugeno_integral(s);
        std::shuffle(s.begin(), s.end(), rng);
        EXPECT_EQ(sugeno_integral(s), base);
    }
}

TEST(Sugeno, RejectsBadInput) {
    EXPECT_THROW(sugeno_integral({}), ContractViolation);
    EXPECT_THROW(sugeno_integral({1.2}), ContractViolation);
    EXPECT_THROW(sugeno_integral({-0.1, 1.0}), ContractViolation);
}

TEST(RatingScore, Weights) {
    EXPECT_EQ(rating_score(P), 1.0);
    EXPECT_EQ(rating_score(Mi), 0.5);
    EXPECT_EQ(rating_score(Mi, 0.25), 0.25);
    EXPECT_EQ(rating_score(Ma), 0.0);
    for (Rating r : {P, Mi, Ma}) EXPECT_EQ(rating_from_string(to_string(r)), r);
}

TEST(ProofScore, MatchesFormula) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 30)(rng);
        std::map<std::string, double> f;
        std::map<std::string, bool> c, s;
        std::vector<oracle::NodeTriple> triples;
        for (int i = 0; i < n; ++i) {
            oracle::NodeTriple t{u(rng), u(rng) < 0.6, u(rng) < 0.6};
            const std::string id = "n" + std::to_string(i);
            f[id] = t.f;
            c[id] = t.c;
            s[id] = t.structural;
            triples.push_back(t);
        }
        ASSERT_NEAR(proof_score(f, c, s), oracle::proof_score_formula(triples), 1e-12);
    }
}

TEST(ProofScore, Examples) {
    EXPECT_DOUBLE_EQ(proof_score({{"a", 1.0}, {"b", 0.5}}, {{"a", true}, {"b", true}}, {{"a", true}, {"b", true}}), 0.75);
    EXPECT_DOUBLE_EQ(proof_score({{"a", 1.0}, {"b", 1.0}}, {{"a", true}, {"b", false}}, {{"a", true}, {"b", true}}), 0.5);
    EXPECT_DOUBLE_EQ(proof_score({{"a", 1.0}}, {{"a", true}}, {{"a", false}}), 0.0);
}

TEST(ProofScore, KeySetsMustAgree) {
    EXPECT_THROW(proof_score({}, {}, {}), ContractViolation);
    EXPECT_THROW(proof_score({{"a", 1.0}}, {{"b", true}}, {{"a", true}}), ContractViolation);
}

TEST(JudgeResponse, ParsesComponentsInsideProse) {
    const auto v = parse_judge_response(
        "Here you go:\n```json\n{\"components\": [{\"nl\": \"n odd\", \"lean\": \"Odd n\", \"rating\": "
        "\"minor_inconsistency\"}]}\n```");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rating, Mi);
    EXPECT_EQ(v[0].component_text, "n odd");
}

TEST(JudgeResponse, RejectsUnknownRatingAndFields) {
    EXPECT_THROW(parse_judge_response(R"({"components":[{"nl":"a","lean":"b","rating":"great"}]})"), ParseError);
    EXPECT_THROW(parse_judge_response(R"({"components":[]})"), ParseError);
    EXPECT_THROW(parse_judge_response(R"({"components":[{"nl":"a","lean":"b","rating":"perfect_match","x":1}]})"),
                 ParseError);
    EXPECT_THROW(parse_judge_response("no json here"), ParseError);
}

TEST(Faithfulness, SyntaxGateSkipsJudge) {
    CountingJudge judge(R"({"components":[{"nl":"a","lean":"b","rating":"perfect_match"}]})");
    const auto r = score_faithfulness("L1", "nl", "lean", false, judge, PromptLibrary::builtin(), RetryPolicy{});
    EXPECT_EQ(r.f, 0.0);
    EXPECT_FALSE(r.judged);
    EXPECT_EQ(judge.calls, 0);
}

TEST(Faithfulness, OneMajorAmongThreeGivesZero) {
    CountingJudge judge(R"({"components":[{"nl":"a","lean":"a","rating":"perfect_match"},
        {"nl":"b","lean":"b","rating":"major_inconsistency"},{"nl":"c","lean":"c","rating":"perfect_match"}]})");
    const auto r = score_faithfulness("L1", "nl", "lean", true, judge, PromptLibrary::builtin(), RetryPolicy{});
    EXPECT_TRUE(r.judged);
    EXPECT_EQ(r.verdicts.size(), 3u);
    EXPECT_EQ(r.f, 0.0);
}

TEST(Faithfulness, UnparseableJudgeIsFlagged) {
    CountingJudge judge("I refuse");
    RetryPolicy policy;
    policy.max_attempts = 3;
    const auto r = score_faithfulness("L1", "nl", "lean", true, judge, PromptLibrary::builtin(), policy);
    EXPECT_TRUE(r.judge_failure);
    EXPECT_EQ(r.f, 0.0);
    EXPECT_EQ(judge.calls, 3);
    EXPECT_EQ(r.attempts.size(), 3u);
}

TEST(ScoreReportJson, RoundTrip) {
    ScoreReport r;
    r.problem = "p";
    r.mode = "DagStrict";
    r.n = 2;
    r.proofscore = 0.5;
    r.nodes = {{"L1", 1.0, true, true, "None"}, {"TS", 0.0, false, true, "Formalizer"}};
    EXPECT_EQ(score_report_from_json(score_report_to_json(r)), r);
}
