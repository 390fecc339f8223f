#pragma once

#include <stdexcept>
#include <string>

namespace lumaforge {

// Invalid parameters: weights, noise levels, windows, config documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed mismatched buffers (dimensions, kinds).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Frame files could not be read or do not form a valid sequence.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage failed while processing a specific frame.
class StageError : public std::runtime_error {
 public:
  StageError(std::size_t frame_index, const std::string& what)
      : std::runtime_error("frame " + std::to_string(frame_index) + ": " + what),
        frame_index_(frame_index) {}

  std::size_t frame_index() const noexcept { return frame_index_; }

 private:
  std::size_t frame_index_;
};

}  // namespace lumaforge
