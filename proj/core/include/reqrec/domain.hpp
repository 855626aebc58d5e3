#ifndef REQREC_DOMAIN_HPP_
#define REQREC_DOMAIN_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reqrec/ids.hpp"

namespace reqrec {

enum class EducationLevel { kPhD, kMaster, kBachelor, kUnspecified };

std::string_view to_string(EducationLevel level) noexcept;

/// Case-insensitive; accepts "PhD", "Ph.D.", "Master", "Bachelor",
/// "Unspecified". Throws Error(kParseError) otherwise.
EducationLevel parse_education_level(std::string_view text);

/// Closed integer interval of admissible scores.
struct RatingScale {
  int min = 1;
  int max = 5;

  bool contains(int score) const noexcept { return score >= min && score <= max; }
  double clamp(double value) const noexcept;
  /// Throws Error(kInvalidArgument) unless min < max.
  void validate() const;

  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

/// Bipolar construct. A score near the scale minimum means the stakeholder
/// leans to the left pole, near the maximum to the right pole.
struct ConstructPair {
  std::string left_pole;
  std::string right_pole;

  friend bool operator==(const ConstructPair&, const ConstructPair&) = default;
};

struct Requirement {
  RequirementId id;
  std::string label;
  std::string description;
  ConstructPair construct_pair;

  /// Throws Error(kInvalidArgument) on an empty id/label, an empty pole or
  /// identical poles.
  void validate() const;

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

struct Stakeholder {
  StakeholderId id;
  EducationLevel education_level = EducationLevel::kUnspecified;

  friend bool operator==(const Stakeholder&, const Stakeholder&) = default;
};

/// Ordered requirement list with unique ids. Order is presentation order.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Requirement> items);

  /// Validates the requirement and appends it. Throws kDuplicateId if the id
  /// is already present.
  void add(Requirement requirement);

  const std::vector<Requirement>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool contains(const RequirementId& id) const { return index_.contains(id); }
  const Requirement* find(const RequirementId& id) const;
  std::vector<RequirementId> ids() const;

  friend bool operator==(const Catalog& a, const Catalog& b) { return a.items_ == b.items_; }

 private:
  std::vector<Requirement> items_;
  std::map<RequirementId, std::size_t> index_;
};

/// Sparse stakeholder x requirement score store. Stakeholders and
/// requirements must be registered before they can be rated. Not internally
/// synchronized; readers may share a const instance freely.
class RatingMatrix {
 public:
  using Row = std::map<RequirementId, int>;

  explicit RatingMatrix(RatingScale scale = {});

  const RatingScale& scale() const noexcept { return scale_; }

  /// Registers every catalog entry as a ratable requirement (catalog order).
  void add_requirements(const Catalog& catalog);
  void add_requirement(const RequirementId& id);
  /// Registers a stakeholder. Re-registering the same id with the same
  /// education level is a no-op; a different level throws kInvalidArgument.
  void add_stakeholder(const Stakeholder& stakeholder);

  bool has_stakeholder(const StakeholderId& id) const { return rows_.contains(id); }
  bool has_requirement(const RequirementId& id) const { return requirement_index_.contains(id); }
  const Stakeholder& stakeholder(const StakeholderId& id) const;

  /// Inserts or overwrites. Returns true when an existing entry was replaced.
  bool set(const StakeholderId& who, const RequirementId& what, int score);
  std::optional<int> get(const StakeholderId& who, const RequirementId& what) const;

  /// Ratings of one stakeholder keyed by requirement; empty for unknown ids.
  const Row& row(const StakeholderId& who) const;
  std::size_t rater_count(const RequirementId& what) const;

  /// Registration order.
  const std::vector<Stakeholder>& stakeholders() const noexcept { return stakeholders_; }
  const std::vector<RequirementId>& requirements() const noexcept { return requirements_; }
  std::size_t entry_count() const noexcept { return entries_; }

  friend bool operator==(const RatingMatrix& a, const RatingMatrix& b);

 private:
  RatingScale scale_;
  std::vector<Stakeholder> stakeholders_;
  std::map<StakeholderId, std::size_t> stakeholder_index_;
  std::vector<RequirementId> requirements_;
  std::map<RequirementId, std::size_t> requirement_index_;
  std::map<StakeholderId, Row> rows_;
  std::size_t entries_ = 0;
};

/// Arithmetic mean over every score the stakeholder has in the matrix.
/// Throws kUnknownStakeholder for unregistered ids and kNoRatings when there
/// are no scores.
double mean_rating(const RatingMatrix& matrix, const StakeholderId& who);

/// Requirements rated by both stakeholders, ascending by id.
std::vector<RequirementId> corated_items(const RatingMatrix& matrix,
                                         const StakeholderId& a,
                                         const StakeholderId& b);

/// The elicitation instrument: requirements as rows, each read through its
/// construct pair, and per-stakeholder partial response rows.
class RepertoryGrid {
 public:
  RepertoryGrid(std::vector<Requirement> rows, RatingScale scale);

  const std::vector<Requirement>& rows() const noexcept { return rows_; }
  const RatingScale& scale() const noexcept { return scale_; }

  /// Throws kUnknownRequirement for a requirement not in the grid and
  /// kOutOfScale for a score outside the scale.
  void record(const StakeholderId& who, const RequirementId& what, int score);
  const RatingMatrix::Row& responses(const StakeholderId& who) const;
  /// True when the stakeholder has answered every row.
  bool complete(const StakeholderId& who) const;

 private:
  std::vector<Requirement> rows_;
  RatingScale scale_;
  std::map<StakeholderId, RatingMatrix::Row> responses_;
};

}  // namespace reqrec

#endif  // REQREC_DOMAIN_HPP_
