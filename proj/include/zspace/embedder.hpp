#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "zspace/errors.hpp"
#include "zspace/hash.hpp"
#include "zspace/vec.hpp"

namespace zspace {

enum class EmbedderKind { deterministic_hash, external_service };

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::deterministic_hash;
  size_t dim = 64;
  uint64_t seed = 42;       // deterministic kind only
  std::string endpoint;     // external kind only
};

// Lowercased runs of [a-z0-9]. Everything else is a separator.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual size_t dim() const = 0;
  virtual Vector embed(std::string_view text) const = 0;
};

// Hash-seeded token embedder. Each token deterministically expands to a
// pseudo-normal vector (sum of 12 uniforms minus 6 per component, all
// drawn from a splitmix64 counter stream keyed by the token hash), token
// vectors are summed and the result L2-normalized. No libm beyond sqrt,
// so identical text gives bit-identical vectors on any platform.
class DeterministicEmbedder final : public TextEmbedder {
 public:
  explicit DeterministicEmbedder(size_t dim = 64, uint64_t seed = 42)
      : dim_(dim), seed_(seed) {
    if (dim_ < 2) throw DimMismatchError("embedding dim must be >= 2");
  }

  size_t dim() const override { return dim_; }
  uint64_t seed() const { return seed_; }

  Vector token_vector(std::string_view token) const {
    const uint64_t th = hash64(seed_, token);
    Vector v(dim_);
    uint64_t counter = 0;
    for (size_t i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (int j = 0; j < 12; ++j) {
        s += unit_double(mix64(th + kGolden64 * ++counter));
      }
      v[i] = s - 6.0;
    }
    return v;
  }

  Vector embed(std::string_view text) const override {
    const auto tokens = tokenize(text);
    if (tokens.empty()) throw EmptyTextError();
    Vector acc(dim_, 0.0);
    for (const auto& tok : tokens) {
      axpy(acc, 1.0, token_vector(tok));
    }
    return normalize(acc);
  }

 private:
  size_t dim_;
  uint64_t seed_;
};

}  // namespace zspace
