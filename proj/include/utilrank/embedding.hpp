#pragma once

#include <atomic>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "utilrank/endpoint.hpp"

namespace utilrank {

using Embedding = Eigen::VectorXd;

/// Maps text to unit-norm vectors of a fixed dimension. Implementations must
/// be safe to call from several threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts) const = 0;
  /// 0 while unknown (a remote provider that has not answered yet).
  virtual int dimension() const = 0;
  virtual std::string model_id() const = 0;
};

Embedding embed_text(const EmbeddingProvider& provider, std::string_view text);

/// Character 3-gram feature hashing over the lowercased tokens, L2
/// normalized. Text without tokens maps to the first basis vector.
class HashEmbedder final : public EmbeddingProvider {
 public:
  static constexpr int kDefaultDimension = 256;

  explicit HashEmbedder(int dimension = kDefaultDimension);

  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;
  int dimension() const override { return dimension_; }
  std::string model_id() const override;

  Embedding embed(std::string_view text) const;

 private:
  int dimension_;
};

/// OpenAI-embeddings-compatible client. Responses are renormalized; a
/// response whose dimension differs from the expected one (or from the first
/// response when none was given) raises DimensionMismatch.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(ModelEndpoint endpoint, int expected_dimension = 0, std::size_t batch_size = 32);

  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;
  int dimension() const override { return dimension_.load(); }
  std::string model_id() const override { return endpoint_.model_name; }

 private:
  std::vector<Embedding> request(std::span<const std::string> texts) const;

  ModelEndpoint endpoint_;
  std::size_t batch_size_;
  mutable std::atomic<int> dimension_;
};

}  // namespace utilrank
