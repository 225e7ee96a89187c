#pragma once

#include <string>
#include <string_view>

namespace dvr {

enum class ContentKind { topic, sentiment };

inline std::string_view content_kind_name(ContentKind k) { return k == ContentKind::topic ? "topic" : "sentiment"; }

// Client for an external text classifier used as a verifier for content
// constraints. Implementations must allow concurrent calls.
class ContentClassifier {
 public:
  virtual ~ContentClassifier() = default;
  // Top label for the text; throws UnknownLabel or TransportError.
  virtual std::string classify(ContentKind kind, std::string_view text) = 0;
};

}  // namespace dvr
