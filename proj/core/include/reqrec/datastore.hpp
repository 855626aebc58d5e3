#ifndef REQREC_DATASTORE_HPP_
#define REQREC_DATASTORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reqrec/domain.hpp"
#include "reqrec/session.hpp"

namespace reqrec::store {

inline constexpr int kSchemaVersion = 1;

/// Everything the service persists. The matrix's requirement index always
/// mirrors the catalog.
struct Dataset {
  Catalog catalog;
  RatingMatrix matrix;
  std::vector<Session> sessions;

  /// Dataset over a catalog with every requirement registered in the matrix.
  static Dataset over(Catalog catalog, RatingScale scale = {});

  /// All feedback records, session order then record order.
  std::vector<FeedbackRecord> feedback() const;
  const Session* find_session(const SessionId& id) const;
  Session* find_session(const SessionId& id);

  /// Throws kUnknownReference when any rating, session or feedback record
  /// points at a missing catalog entry, stakeholder or session, and
  /// kInvalidArgument when a session contradicts its own state.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Catalog CSV: header row, columns id,label,left_pole,right_pole and an
// optional description. Errors carry the 1-based line number.
Catalog load_catalog(std::istream& in);
Catalog load_catalog(const std::filesystem::path& path);
void write_catalog(std::ostream& out, const Catalog& catalog);

struct RatingRow {
  Stakeholder stakeholder;
  RequirementId requirement_id;
  int score = 0;
};

struct RatingsLoad {
  RatingMatrix matrix;
  /// Rows that replaced an earlier row for the same pair (last write wins).
  std::size_t overwritten = 0;
};

// Ratings CSV: header row, columns stakeholder_id,education_level,
// requirement_id,score; education_level may be left out and then reads as
// Unspecified. A stakeholder's first row registers it; later rows must agree
// on education level. `known` stakeholders are registered first.
RatingsLoad load_ratings(std::istream& in, const Catalog& catalog, RatingScale scale = {},
                         std::span<const Stakeholder> known = {});
RatingsLoad load_ratings(const std::filesystem::path& path, const Catalog& catalog,
                         RatingScale scale = {}, std::span<const Stakeholder> known = {});
void write_ratings(std::ostream& out, std::span<const RatingRow> rows);
/// Every matrix entry, stakeholders in registration order.
std::vector<RatingRow> rating_rows(const RatingMatrix& matrix);

std::string to_json_text(const Dataset& dataset);
/// Throws kParseError on malformed text, kSchemaVersionMismatch on a missing
/// or foreign schema_version, and the validate() errors on broken references.
Dataset from_json_text(const std::string& text);

/// Writes through a temporary file and a rename, so a reader never sees a
/// half-written store. Throws kIoError.
void save_state(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_state(const std::filesystem::path& path);

/// Seeded synthetic ratings. Stakeholders fall into a few taste groups, each
/// rating close to its group's profile. Only used to stand in for field data
/// that was never published.
struct FixtureSpec {
  std::size_t stakeholders = 50;
  std::uint64_t seed = 2021;
  RatingScale scale;
  std::size_t taste_groups = 3;
  double noise = 0.8;
  /// Probability that a given (stakeholder, requirement) cell is rated.
  double density = 1.0;
};

std::vector<RatingRow> generate_fixture(const Catalog& catalog, const FixtureSpec& spec);

}  // namespace reqrec::store

#endif  // REQREC_DATASTORE_HPP_
