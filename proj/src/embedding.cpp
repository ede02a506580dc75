#include "utilrank/embedding.hpp"

#include <cmath>
#include <thread>

#include "json.hpp"
#include "utilrank/error.hpp"
#include "utilrank/text.hpp"

namespace utilrank {
namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

// Byte offsets of each code point boundary in s, including s.size().
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets{0};
  std::string_view rest = s;
  std::size_t consumed = 0;
  while (!rest.empty()) {
    const auto step = utf8_prefix(rest, 1).size();
    consumed += step;
    offsets.push_back(consumed);
    rest.remove_prefix(step);
  }
  return offsets;
}

Embedding normalized(Embedding v) {
  const double norm = v.norm();
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw Error(ErrorCode::ProviderUnavailable, "embedding provider returned a zero or non-finite vector");
  }
  return v / norm;
}

}  // namespace

Embedding embed_text(const EmbeddingProvider& provider, std::string_view text) {
  const std::string owned(text);
  auto batch = provider.embed_batch(std::span<const std::string>(&owned, 1));
  return std::move(batch.front());
}

HashEmbedder::HashEmbedder(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw Error(ErrorCode::InvalidConfig, "embedding dimension must be positive");
}

std::string HashEmbedder::model_id() const { return "builtin-hash-3gram-" + std::to_string(dimension_); }

Embedding HashEmbedder::embed(std::string_view text) const {
  Embedding v = Embedding::Zero(dimension_);
  for (const auto& token : tokenize(text)) {
    const std::string padded = "^" + token + "$";
    const auto offsets = code_point_offsets(padded);
    for (std::size_t i = 0; i + 3 < offsets.size(); ++i) {
      const auto gram = std::string_view(padded).substr(offsets[i], offsets[i + 3] - offsets[i]);
      v[static_cast<Eigen::Index>(fnv1a(gram) % static_cast<std::uint64_t>(dimension_))] += 1.0;
    }
  }
  if (v.squaredNorm() == 0.0) {
    v[0] = 1.0;
    return v;
  }
  return v.normalized();
}

std::vector<Embedding> HashEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

RemoteEmbedder::RemoteEmbedder(ModelEndpoint endpoint, int expected_dimension, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), batch_size_(std::max<std::size_t>(1, batch_size)), dimension_(expected_dimension) {
  validate_endpoint(endpoint_);
}

std::vector<Embedding> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += batch_size_) {
    auto part = request(texts.subspan(i, std::min(batch_size_, texts.size() - i)));
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

std::vector<Embedding> RemoteEmbedder::request(std::span<const std::string> texts) const {
  const nlohmann::json body = {{"input", std::vector<std::string>(texts.begin(), texts.end())},
                               {"model", endpoint_.model_name}};
  const auto payload = body.dump();

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(25 * attempt));
    const auto response = http_post_json(endpoint_.base_url, "/embeddings", payload, endpoint_.timeout);
    if (!response) {
      last_failure = "no response from " + endpoint_.base_url;
      continue;
    }
    if (response->status < 200 || response->status >= 300) {
      last_failure = endpoint_.base_url + " returned HTTP " + std::to_string(response->status);
      continue;
    }
    const auto parsed = nlohmann::json::parse(response->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("data") || !parsed["data"].is_array() ||
        parsed["data"].size() != texts.size()) {
      last_failure = endpoint_.base_url + " returned an unreadable embeddings response";
      continue;
    }

    std::vector<Embedding> vectors(texts.size());
    for (std::size_t i = 0; i < parsed["data"].size(); ++i) {
      const auto& item = parsed["data"][i];
      const std::size_t slot = item.contains("index") ? item["index"].get<std::size_t>() : i;
      if (slot >= vectors.size() || !item.contains("embedding") || !item["embedding"].is_array()) {
        throw Error(ErrorCode::ProviderUnavailable, "malformed embedding item from " + endpoint_.base_url);
      }
      const auto values = item["embedding"].get<std::vector<double>>();
      int expected = dimension_.load();
      if (expected == 0) {
        dimension_.compare_exchange_strong(expected, static_cast<int>(values.size()));
        expected = dimension_.load();
      }
      if (static_cast<int>(values.size()) != expected) {
        throw Error(ErrorCode::DimensionMismatch, "expected dimension " + std::to_string(expected) + ", provider returned " +
                                                      std::to_string(values.size()));
      }
      vectors[slot] = normalized(Eigen::Map<const Embedding>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
    for (const auto& v : vectors) {
      if (v.size() == 0) throw Error(ErrorCode::ProviderUnavailable, "embeddings response skipped an input");
    }
    return vectors;
  }
  throw Error(ErrorCode::ProviderUnavailable,
              last_failure + " (after " + std::to_string(endpoint_.max_retries) + " retries)");
}

}  // namespace utilrank
