#include "reqrec/error.hpp"

namespace reqrec {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kUnknownReference: return "unknown_reference";
    case ErrorCode::kUnknownStakeholder: return "unknown_stakeholder";
    case ErrorCode::kUnknownRequirement: return "unknown_requirement";
    case ErrorCode::kOutOfScale: return "out_of_scale";
    case ErrorCode::kNoRatings: return "no_ratings";
    case ErrorCode::kSelfSimilarity: return "self_similarity";
    case ErrorCode::kAlreadyRated: return "already_rated";
    case ErrorCode::kTargetHasNoRatings: return "target_has_no_ratings";
    case ErrorCode::kCatalogTooSmall: return "catalog_too_small";
    case ErrorCode::kWrongItems: return "wrong_items";
    case ErrorCode::kWrongState: return "wrong_state";
    case ErrorCode::kUnknownRecommendedItem: return "unknown_recommended_item";
    case ErrorCode::kStarsOutOfRange: return "stars_out_of_range";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kSchemaVersionMismatch: return "schema_version_mismatch";
    case ErrorCode::kSessionNotFound: return "session_not_found";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kMethodNotAllowed: return "method_not_allowed";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

}  // namespace reqrec
