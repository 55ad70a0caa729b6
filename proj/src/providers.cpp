#include "recapit/providers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "recapit/error.hpp"
#include "recapit/text.hpp"

namespace recapit {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) throw ProviderError("provider URL must start with http://", url);
    const auto slash = url.find('/', scheme.size());
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

nlohmann::json post_json(const std::string& url, const std::string& api_key, const nlohmann::json& body) {
    const auto ep = split_url(url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto res = client.Post(ep.path, headers, body.dump(), "application/json");
    if (!res) throw ProviderError("provider request failed: " + httplib::to_string(res.error()), url);
    if (res->status != 200) throw ProviderError("provider answered HTTP " + std::to_string(res->status), url);
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("provider answer is not JSON: ") + e.what(), url);
    }
}

const std::set<std::string, std::less<>>& stopwords() {
    static const std::set<std::string, std::less<>> words{
        "a",     "about", "after", "again", "all",   "also",  "am",    "an",    "and",   "any",   "are",
        "as",    "at",    "be",    "been",  "but",   "by",    "can",   "could", "did",   "do",    "does",
        "for",   "from",  "get",   "got",   "had",   "has",   "have",  "he",    "her",   "here",  "him",
        "his",   "how",   "i",     "if",    "in",    "into",  "is",    "it",    "its",   "just",  "let",
        "like",  "me",    "maybe", "more",  "my",    "no",    "not",   "now",   "of",    "ok",    "okay",
        "on",    "one",   "or",    "our",   "out",   "over",  "really", "right", "s",    "she",   "so",
        "some",  "that",  "the",   "their", "them",  "then",  "there", "these", "they",  "this",  "those",
        "to",    "too",   "up",    "us",    "very",  "was",   "we",    "well",  "were",  "what",  "when",
        "where", "which", "who",   "why",   "will",  "with",  "would", "yeah",  "yes",   "you",   "your"};
    return words;
}

bool is_term(const std::string& token) {
    if (stopwords().contains(token)) return false;
    return std::any_of(token.begin(), token.end(), [](char c) { return !(c >= '0' && c <= '9'); });
}

std::map<std::string, double> term_counts(std::string_view text) {
    std::map<std::string, double> tf;
    for (auto& t : text::tokenize(text)) {
        if (is_term(t)) tf[t] += 1.0;
    }
    return tf;
}

std::string title_case(std::string word) {
    if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 'a' + 'A');
    return word;
}

std::string truncate_words(std::string_view title) {
    const auto trimmed = text::trim(title);
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < trimmed.size()) {
        while (i < trimmed.size() && (trimmed[i] == ' ' || trimmed[i] == '\t' || trimmed[i] == '\n')) ++i;
        const auto start = i;
        while (i < trimmed.size() && !(trimmed[i] == ' ' || trimmed[i] == '\t' || trimmed[i] == '\n')) ++i;
        if (i > start) words.push_back(trimmed.substr(start, i - start));
    }
    if (words.size() <= kMaxTitleWords) return std::string(trimmed);
    std::string out;
    for (std::size_t k = 0; k < kMaxTitleWords; ++k) {
        if (k) out += ' ';
        out += words[k];
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> hashed_bag_of_words(std::string_view text, std::size_t buckets) {
    if (buckets == 0) throw ValidationError("bucket count must be positive");
    std::vector<double> v(buckets, 0.0);
    for (const auto& t : text::tokenize(text)) v[fnv1a64(t) % buckets] += 1.0;
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

std::vector<double> HashedEmbeddingProvider::embed(const std::string&, const std::string& text) {
    return hashed_bag_of_words(text, buckets_);
}

std::vector<double> TableEmbeddingProvider::embed(const std::string& chunk_id, const std::string&) {
    auto it = table_.find(chunk_id);
    if (it == table_.end()) throw ProviderError("no offline embedding for chunk " + chunk_id, chunk_id);
    return it->second;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string url, std::string api_key)
    : url_(std::move(url)), api_key_(std::move(api_key)) {
    split_url(url_);
}

std::vector<double> HttpEmbeddingProvider::embed(const std::string& chunk_id, const std::string& text) {
    const auto answer = post_json(url_, api_key_, {{"id", chunk_id}, {"text", text}});
    if (!answer.is_object() || !answer.contains("embedding") || !answer["embedding"].is_array()) {
        throw ProviderError("provider answer lacks an embedding array", chunk_id);
    }
    std::vector<double> v;
    for (const auto& x : answer["embedding"]) {
        if (!x.is_number()) throw ProviderError("embedding holds a non-number", chunk_id);
        v.push_back(x.get<double>());
    }
    return v;
}

HttpTitleProvider::HttpTitleProvider(std::string url, std::string api_key)
    : url_(std::move(url)), api_key_(std::move(api_key)) {
    split_url(url_);
}

std::string HttpTitleProvider::title(const std::string& text) {
    const auto answer = post_json(url_, api_key_, {{"text", text}});
    if (!answer.is_object() || !answer.contains("title") || !answer["title"].is_string()) {
        throw ProviderError("provider answer lacks a title string", url_);
    }
    return answer["title"].get<std::string>();
}

ProviderConfig ProviderConfig::from_environment() {
    auto env = [](const char* name) {
        const char* v = std::getenv(name);
        return std::string(v ? v : "");
    };
    return {env("RECAPIT_EMBED_URL"), env("RECAPIT_TITLE_URL"), env("RECAPIT_API_KEY")};
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const ProviderConfig& config, const EmbeddingTable* table) {
    if (!config.embed_url.empty()) return std::make_unique<HttpEmbeddingProvider>(config.embed_url, config.api_key);
    if (table) return std::make_unique<TableEmbeddingProvider>(*table);
    return std::make_unique<HashedEmbeddingProvider>();
}

std::unique_ptr<TitleProvider> make_title_provider(const ProviderConfig& config) {
    if (config.title_url.empty()) return nullptr;
    return std::make_unique<HttpTitleProvider>(config.title_url, config.api_key);
}

std::string fallback_title(std::string_view text, std::span<const std::string> corpus) {
    const auto tf = term_counts(text);
    if (tf.empty()) return std::string(kUntitled);

    std::map<std::string, std::size_t> df;
    for (const auto& doc : corpus) {
        for (const auto& [term, _] : term_counts(doc)) ++df[term];
    }
    const double n = static_cast<double>(std::max<std::size_t>(corpus.size(), 1));

    struct Scored {
        std::string term;
        double score;
    };
    auto rank = [](std::vector<Scored>& v) {
        std::sort(v.begin(), v.end(), [](const Scored& a, const Scored& b) {
            return a.score != b.score ? a.score > b.score : a.term < b.term;
        });
    };

    std::vector<Scored> scored;
    for (const auto& [term, count] : tf) {
        const auto it = df.find(term);
        const double d = static_cast<double>(it == df.end() ? 1 : std::max<std::size_t>(it->second, 1));
        const double s = count * std::log(n / d);
        if (s > 0) scored.push_back({term, s});
    }
    if (scored.empty()) {
        for (const auto& [term, count] : tf) scored.push_back({term, count});
    }
    rank(scored);

    std::string out;
    for (std::size_t k = 0; k < scored.size() && k < 3; ++k) {
        if (k) out += " · ";
        out += title_case(scored[k].term);
    }
    return out;
}

GeneratedTitle generate_title(std::string_view text, std::span<const std::string> corpus, TitleProvider* provider) {
    if (text::trim(text).empty()) return {std::string(kUntitled), TitleSource::fallback};
    if (provider) {
        try {
            auto t = truncate_words(provider->title(std::string(text)));
            if (!t.empty()) return {std::move(t), TitleSource::generated};
        } catch (const std::exception&) {
        }
    }
    return {fallback_title(text, corpus), TitleSource::fallback};
}

}  // namespace recapit
