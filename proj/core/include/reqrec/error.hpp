#ifndef REQREC_ERROR_HPP_
#define REQREC_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace reqrec {

/// Every failure the library reports carries one of these codes. The string
/// form returned by code_name() is part of the public API (HTTP bodies, CLI
/// exit messages) and must never change meaning.
enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  kDuplicateId,
  kUnknownReference,
  kUnknownStakeholder,
  kUnknownRequirement,
  kOutOfScale,
  kNoRatings,
  kSelfSimilarity,
  kAlreadyRated,
  kTargetHasNoRatings,
  kCatalogTooSmall,
  kWrongItems,
  kWrongState,
  kUnknownRecommendedItem,
  kStarsOutOfRange,
  kIoError,
  kSchemaVersionMismatch,
  kSessionNotFound,
  kNotFound,
  kMethodNotAllowed,
  kInternal,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace reqrec

#endif  // REQREC_ERROR_HPP_
