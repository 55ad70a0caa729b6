#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recapit/ingest.hpp"
#include "recapit/model.hpp"

namespace recapit {

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(const std::string& chunk_id, const std::string& text) = 0;
};

class TitleProvider {
public:
    virtual ~TitleProvider() = default;
    virtual std::string title(const std::string& text) = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Case-folded tokens hashed into `buckets` counts, L2-normalized. Text
// without tokens yields the zero vector.
std::vector<double> hashed_bag_of_words(std::string_view text, std::size_t buckets = 256);

class HashedEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HashedEmbeddingProvider(std::size_t buckets = 256) : buckets_(buckets) {}
    std::vector<double> embed(const std::string& chunk_id, const std::string& text) override;

private:
    std::size_t buckets_;
};

// Looks vectors up by chunk id; unknown ids are a provider failure.
class TableEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit TableEmbeddingProvider(EmbeddingTable table) : table_(std::move(table)) {}
    std::vector<double> embed(const std::string& chunk_id, const std::string& text) override;

private:
    EmbeddingTable table_;
};

// POSTs {"id": ..., "text": ...} as JSON and expects {"embedding": [...]}.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string url, std::string api_key);
    std::vector<double> embed(const std::string& chunk_id, const std::string& text) override;

private:
    std::string url_;
    std::string api_key_;
};

// POSTs {"text": ...} as JSON and expects {"title": "..."}.
class HttpTitleProvider final : public TitleProvider {
public:
    HttpTitleProvider(std::string url, std::string api_key);
    std::string title(const std::string& text) override;

private:
    std::string url_;
    std::string api_key_;
};

struct ProviderConfig {
    std::string embed_url;
    std::string title_url;
    std::string api_key;

    // Reads RECAPIT_EMBED_URL, RECAPIT_TITLE_URL and RECAPIT_API_KEY.
    static ProviderConfig from_environment();
};

// HTTP when an endpoint is configured, otherwise the offline table when one is
// given, otherwise hashed bag-of-words.
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const ProviderConfig& config,
                                                           const EmbeddingTable* table = nullptr);
// Null when no title endpoint is configured.
std::unique_ptr<TitleProvider> make_title_provider(const ProviderConfig& config);

inline constexpr std::string_view kUntitled = "Untitled Segment";
inline constexpr std::size_t kMaxTitleWords = 12;

// Top three TF-IDF terms of `text`, IDF taken over `corpus` (one document per
// segment), title-cased and joined by " · ".
std::string fallback_title(std::string_view text, std::span<const std::string> corpus);

struct GeneratedTitle {
    std::string title;
    TitleSource source = TitleSource::fallback;

    friend bool operator==(const GeneratedTitle&, const GeneratedTitle&) = default;
};

// Uses the provider when present; a failing or empty provider answer falls
// back to TF-IDF and is flagged as such.
GeneratedTitle generate_title(std::string_view text, std::span<const std::string> corpus, TitleProvider* provider);

}  // namespace recapit
