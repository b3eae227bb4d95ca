#include "test_support.hpp"

#include "proofflow/error.hpp"
#include "proofflow/lean_verifier.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

using namespace proofflow;
namespace t = proofflow::testing;

namespace {

std::string golden(const std::string& name) {
    std::string s = t::read_file(t::golden_dir() / name);
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

CodeUnit golden_unit(const Json& c) { return make_unit(c.at("unit_id"), c.at("body"), c.at("header")); }

// Local checking service whose handler the test controls.
class FakeService {
public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;
    explicit FakeService(Handler handler) {
        server_.Post("/verify", [this, handler](const httplib::Request& req, httplib::Response& res) {
            {
                std::lock_guard lock(mutex_);
                bodies_.push_back(req.body);
            }
            handler(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeService() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    std::vector<std::string> bodies() {
        std::lock_guard lock(mutex_);
        return bodies_;
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex mutex_;
    std::vector<std::string> bodies_;
};

}  // namespace

TEST(CodeUnit, SourceIsHeaderBlankLineBody) {
    const CodeUnit u = make_unit("u", "theorem a : True := trivial");
    EXPECT_EQ(u.source, "import Mathlib\n\ntheorem a : True := trivial");
    EXPECT_EQ(u.imports_header, "import Mathlib");
    EXPECT_EQ(make_unit("u", "x", "").source, "x");
    EXPECT_EQ(unit_from_json(unit_to_json(u)), u);
}

TEST(VerifierReport, OkIffNoErrors) {
    VerifierReport r = finalize_report({"u", false, {{Severity::Warning, 3, 2, "declaration uses 'sorry'"}}, false, 5});
    EXPECT_TRUE(r.ok);
    EXPECT_TRUE(r.contains_sorry_warning);
    r = finalize_report({"u", true, {{Severity::Error, 9, 0, "b"}, {Severity::Error, 2, 4, "a"}}, false, 5});
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.diagnostics.front().message, "a");
    EXPECT_EQ(first_error_summary(r), "L2:4: a");
    EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(VerifierWire, FromWireRejectsInconsistentOk) {
    Json wire = Json::parse(golden("unknown_identifier.response.json"));
    wire["ok"] = true;
    EXPECT_THROW(report_from_wire(wire), MalformedPayloadError);
    EXPECT_THROW(report_from_wire(Json{{"unit_id", "u"}}), MalformedPayloadError);
}

TEST(VerifierWire, RequestBodiesMatchGoldens) {
    const Json cases = Json::parse(t::read_file(t::golden_dir() / "verifier_cases.json"));
    HttpVerifier verifier("http://127.0.0.1:1");
    for (const auto& c : cases)
        EXPECT_EQ(verifier.request_body(golden_unit(c)), golden(c.at("name").get<std::string>() + ".request.json"))
            << c.at("name");
}

TEST(VerifierWire, ResponsesRoundTripBitExact) {
    const Json cases = Json::parse(t::read_file(t::golden_dir() / "verifier_cases.json"));
    for (const auto& c : cases) {
        const std::string bytes = golden(c.at("name").get<std::string>() + ".response.json");
        EXPECT_EQ(report_to_wire(report_from_wire(Json::parse(bytes))).dump(), bytes) << c.at("name");
    }
}

TEST(HttpVerifier, PostsToVerifyAndParsesReport) {
    const std::string response = golden("sorry_warning.response.json");
    FakeService service([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(response, "application/json");
    });
    HttpVerifier verifier(service.url() + "/");
    const Json c = Json::parse(t::read_file(t::golden_dir() / "verifier_cases.json"))[0];
    const VerifierReport r = verifier.check(golden_unit(c));
    EXPECT_TRUE(r.ok);
    EXPECT_TRUE(r.contains_sorry_warning);
    EXPECT_EQ(r.elapsed_ms, 1840);
    ASSERT_EQ(service.bodies().size(), 1u);
    EXPECT_EQ(service.bodies()[0], golden("sorry_warning.request.json"));
}

TEST(HttpVerifier, StatusAndPayloadErrors) {
    FakeService status([](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
        res.set_content("busy", "text/plain");
    });
    EXPECT_THROW(HttpVerifier(status.url()).check(make_unit("u", "x")), HttpStatusError);

    FakeService garbage([](const httplib::Request&, httplib::Response& res) { res.set_content("<html>", "text/html"); });
    EXPECT_THROW(HttpVerifier(garbage.url()).check(make_unit("u", "x")), MalformedPayloadError);
}

TEST(HttpVerifier, UnreachableIsTransportError) {
    EXPECT_THROW(HttpVerifier("http://127.0.0.1:1", 5).check(make_unit("u", "x")), TransportError);
    EXPECT_THROW(HttpVerifier("not a url"), ConfigError);
}

TEST(HttpVerifier, ConcurrentChecksAllAnswered) {
    FakeService service([](const httplib::Request& req, httplib::Response& res) {
        const std::string id = Json::parse(req.body).at("unit_id");
        res.set_content(Json{{"unit_id", id}, {"ok", true}, {"diagnostics", Json::array()}, {"elapsed_ms", 1}}.dump(),
                        "application/json");
    });
    HttpVerifier verifier(service.url(), 30, 3);
    std::vector<std::thread> threads;
    std::vector<std::string> ids(8);
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&, i] { ids[i] = verifier.check(make_unit("u" + std::to_string(i), "x")).unit_id; });
    for (auto& th : threads) th.join();
    for (int i = 0; i < 8; ++i) EXPECT_EQ(ids[i], "u" + std::to_string(i));
}

TEST(MockVerifier, TableReplaysExactly) {
    const Json c = Json::parse(t::read_file(t::golden_dir() / "verifier_cases.json"))[1];
    const CodeUnit unit = golden_unit(c);
    const Json report = Json::parse(golden("unknown_identifier.response.json"));
    MockVerifier mock = MockVerifier::from_json({{"table", {{{"source", unit.source}, {"report", report}}}}});
    for (int i = 0; i < 100; ++i) ASSERT_EQ(report_to_wire(mock.check(unit)).dump(), report.dump());
}

TEST(MockVerifier, RulesAndPlaceholderWarnings) {
    MockVerifier mock({}, {{"bad_lemma", Severity::Error, "unknown identifier 'bad_lemma'"}});
    VerifierReport r = mock.check(make_unit("a", "theorem a (n : ℕ) : n = n := by\n  exact bad_lemma n"));
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(first_error_summary(r), "L4:8: unknown identifier 'bad_lemma'");

    r = mock.check(make_unit("b", "theorem b (n : ℕ) : n = n := by\n  sorry"));
    EXPECT_TRUE(r.ok);
    EXPECT_TRUE(r.contains_sorry_warning);

    r = mock.check(make_unit("c", "theorem c (n : ℕ) : n = n := by\n  rfl"));
    EXPECT_TRUE(r.ok);
    EXPECT_FALSE(r.contains_sorry_warning);
}

TEST(MockVerifier, SyntaxProblems) {
    MockVerifier mock;
    EXPECT_FALSE(mock.check(make_unit("a", "just some prose")).ok);
    EXPECT_FALSE(mock.check(make_unit("b", "theorem b (n : ℕ : n = n := rfl")).ok);
    EXPECT_FALSE(mock.check(make_unit("c", "theorem c (n : ℕ) : n = n :=")).ok);
    EXPECT_FALSE(mock.check(make_unit("d", "theorem d (n : ℕ) : n = n")).ok);
    EXPECT_TRUE(mock.check(make_unit("e", "def two : ℕ := 2\n\nexample : two = 2 := rfl")).ok);
}
