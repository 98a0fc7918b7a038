#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scifig {

enum class ErrorCode {
  invalid_argument,
  config,
  io,
  decode,
  empty_input,
  extraction_failed,
  normalization_impossible,
  provider,
  timeout,
  rate_limited,
  replay_miss,
  malformed_feedback,
  unknown_target,
  missing_visual,
  empty_corpus,
  insufficient_records,
  malformed_ranking,
  empty_answer_set,
  answer_failed,
  internal,
};

std::string_view to_string(ErrorCode code);

// True for the codes raised by the provider gateway (transport, retries, replay).
constexpr bool is_provider_error(ErrorCode code) {
  return code == ErrorCode::provider || code == ErrorCode::timeout ||
         code == ErrorCode::rate_limited || code == ErrorCode::replay_miss;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scifig
