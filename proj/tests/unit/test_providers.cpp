#include <doctest.h>

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "recapit/error.hpp"
#include "recapit/providers.hpp"
#include "recapit/text.hpp"

using namespace recapit;

namespace {

double norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

class EchoTitles : public TitleProvider {
public:
    std::string answer;
    std::string title(const std::string&) override { return answer; }
};

class BrokenTitles : public TitleProvider {
public:
    std::string title(const std::string&) override { throw ProviderError("timeout"); }
};

// Local stand-in for a remote provider.
class StubServer {
public:
    StubServer() {
        server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
            last_auth = req.get_header_value("Authorization");
            const auto body = nlohmann::json::parse(req.body);
            const auto text = body.at("text").get<std::string>();
            res.set_content(nlohmann::json{{"embedding", {static_cast<double>(text.size()), 1.0}}}.dump(),
                            "application/json");
        });
        server_.Post("/title", [](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            res.set_content(nlohmann::json{{"title", "About " + body.at("text").get<std::string>()}}.dump(),
                            "application/json");
        });
        server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

    std::string last_auth;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

TEST_CASE("hashed bag of words") {
    const auto a = hashed_bag_of_words("Board layout and colors");
    const auto b = hashed_bag_of_words("board LAYOUT and colors");
    CHECK(a == b);
    CHECK(oracle::cosine(a, b) == doctest::Approx(1.0));
    CHECK(a.size() == 256);
    CHECK(hashed_bag_of_words("", 16) == std::vector<double>(16, 0.0));
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("disjoint vocabularies are orthogonal when their buckets differ") {
    const std::vector<std::string> left{"alpha", "bravo", "charlie"}, right{"delta", "echo", "foxtrot"};
    std::set<std::uint64_t> buckets;
    for (const auto& w : left) buckets.insert(fnv1a64(w) % 256);
    for (const auto& w : right) REQUIRE(buckets.count(fnv1a64(w) % 256) == 0);
    CHECK(oracle::cosine(hashed_bag_of_words("alpha bravo charlie"), hashed_bag_of_words("delta echo foxtrot")) == 0.0);
}

TEST_CASE("hashed vectors have unit norm") {
    std::mt19937 rng(2);
    const std::vector<std::string> vocab{"gaze", "board", "sketch", "Map", "idea", "42", "öl", "x", "team", "notes"};
    for (int round = 0; round < 200; ++round) {
        std::string t;
        for (int k = 0; k < 1 + static_cast<int>(rng() % 20); ++k) t += vocab[rng() % vocab.size()] + " ";
        CHECK(std::abs(norm(hashed_bag_of_words(t)) - 1.0) < 1e-9);
    }
}

TEST_CASE("table provider looks vectors up by chunk id") {
    TableEmbeddingProvider table({{"chunk-u1", {1, 2}}});
    CHECK(table.embed("chunk-u1", "ignored") == std::vector<double>{1, 2});
    CHECK_THROWS_AS(table.embed("chunk-u9", "x"), ProviderError);
}

TEST_CASE("fallback title on a toy corpus") {
    const std::vector<std::string> corpus{
        "we discussed the board layout and the board colors",
        "the segmentation of the transcript works with segmentation thresholds",
        "board colors for the transcript",
    };
    const auto title = fallback_title(corpus[1], corpus);
    CHECK(title == "Segmentation · Thresholds · Works");

    // independent TF-IDF over the same tokens
    std::map<std::string, int> df;
    std::vector<std::map<std::string, int>> tfs;
    const std::set<std::string> stop{"we", "the", "and", "of", "with", "for"};
    for (const auto& doc : corpus) {
        std::map<std::string, int> tf;
        std::istringstream in(doc);
        for (std::string w; in >> w;) {
            if (!stop.count(w)) ++tf[w];
        }
        for (const auto& [w, _] : tf) ++df[w];
        tfs.push_back(tf);
    }
    std::vector<std::pair<double, std::string>> scores;
    for (const auto& [w, c] : tfs[1]) scores.push_back({-c * std::log(3.0 / df[w]), w});
    std::sort(scores.begin(), scores.end());
    CHECK(text::lower(title) == scores[0].second + " · " + scores[1].second + " · " + scores[2].second);
}

TEST_CASE("fallback title edge cases") {
    const std::vector<std::string> corpus{"only numbers 42 and stopwords", "the the the"};
    CHECK(fallback_title("", corpus) == kUntitled);
    CHECK(fallback_title("the and 2024", corpus) == kUntitled);
    // every term appears everywhere: ranking falls back to term frequency
    const std::vector<std::string> same{"alpha beta beta", "alpha beta beta"};
    CHECK(fallback_title(same[0], same) == "Beta · Alpha");
}

TEST_CASE("generated titles") {
    const std::vector<std::string> corpus{"notes about segmentation", "notes about colors"};
    EchoTitles echo;
    echo.answer = "From Annotation to Segmentation";
    CHECK(generate_title(corpus[0], corpus, &echo) == GeneratedTitle{"From Annotation to Segmentation", TitleSource::generated});

    echo.answer = "one two three four five six seven eight nine ten eleven twelve thirteen fourteen";
    const auto long_title = generate_title(corpus[0], corpus, &echo);
    CHECK(long_title.title == "one two three four five six seven eight nine ten eleven twelve");

    BrokenTitles broken;
    const auto fb = generate_title(corpus[0], corpus, &broken);
    CHECK(fb.source == TitleSource::fallback);
    CHECK(fb.title.find("Segmentation") != std::string::npos);

    CHECK(generate_title("   ", corpus, &echo) == GeneratedTitle{std::string(kUntitled), TitleSource::fallback});
    CHECK(generate_title(corpus[1], corpus, nullptr).source == TitleSource::fallback);
}

TEST_CASE("HTTP providers speak JSON over plain http") {
    StubServer stub;
    HttpEmbeddingProvider embed(stub.url("/embed"), "secret");
    CHECK(embed.embed("chunk-u1", "hello") == std::vector<double>{5.0, 1.0});
    CHECK(stub.last_auth == "Bearer secret");

    HttpTitleProvider titles(stub.url("/title"), "");
    CHECK(titles.title("maps") == "About maps");

    HttpEmbeddingProvider broken(stub.url("/broken"), "");
    CHECK_THROWS_AS(broken.embed("c", "t"), ProviderError);
    CHECK_THROWS_AS(HttpEmbeddingProvider("https://example.invalid/x", "").embed("c", "t"), ProviderError);
}

TEST_CASE("provider selection") {
    ::unsetenv("RECAPIT_EMBED_URL");
    ::unsetenv("RECAPIT_TITLE_URL");
    ::setenv("RECAPIT_API_KEY", "k", 1);
    const auto offline = ProviderConfig::from_environment();
    CHECK(offline.api_key == "k");
    CHECK(make_title_provider(offline) == nullptr);
    CHECK(dynamic_cast<HashedEmbeddingProvider*>(make_embedding_provider(offline).get()));
    const EmbeddingTable table{{"c", {1.0}}};
    CHECK(dynamic_cast<TableEmbeddingProvider*>(make_embedding_provider(offline, &table).get()));

    ::setenv("RECAPIT_EMBED_URL", "http://127.0.0.1:9/embed", 1);
    ::setenv("RECAPIT_TITLE_URL", "http://127.0.0.1:9/title", 1);
    const auto online = ProviderConfig::from_environment();
    CHECK(dynamic_cast<HttpEmbeddingProvider*>(make_embedding_provider(online, &table).get()));
    CHECK(make_title_provider(online) != nullptr);
    ::unsetenv("RECAPIT_EMBED_URL");
    ::unsetenv("RECAPIT_TITLE_URL");
    ::unsetenv("RECAPIT_API_KEY");
}
