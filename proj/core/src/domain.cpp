#include "reqrec/domain.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "reqrec/error.hpp"

namespace reqrec {

namespace {

std::string lowercase_alnum(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

const RatingMatrix::Row& empty_row() {
  static const RatingMatrix::Row row;
  return row;
}

}  // namespace

std::string_view to_string(EducationLevel level) noexcept {
  switch (level) {
    case EducationLevel::kPhD: return "PhD";
    case EducationLevel::kMaster: return "Master";
    case EducationLevel::kBachelor: return "Bachelor";
    case EducationLevel::kUnspecified: return "Unspecified";
  }
  return "Unspecified";
}

EducationLevel parse_education_level(std::string_view text) {
  // Punctuation is ignored so "Ph.D." reads as "phd".
  const std::string key = lowercase_alnum(text);
  if (key == "phd") return EducationLevel::kPhD;
  if (key == "master") return EducationLevel::kMaster;
  if (key == "bachelor") return EducationLevel::kBachelor;
  if (key == "unspecified") return EducationLevel::kUnspecified;
  throw Error(ErrorCode::kParseError,
              "unknown education level '" + std::string(text) + "'");
}

double RatingScale::clamp(double value) const noexcept {
  return std::min(static_cast<double>(max), std::max(static_cast<double>(min), value));
}

void RatingScale::validate() const {
  if (min >= max) {
    throw Error(ErrorCode::kInvalidArgument,
                "rating scale needs min < max, got [" + std::to_string(min) + ", " +
                    std::to_string(max) + "]");
  }
}

void Requirement::validate() const {
  if (id.empty()) throw Error(ErrorCode::kInvalidArgument, "requirement id is empty");
  if (label.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "requirement " + id.str() + " has an empty label");
  }
  if (construct_pair.left_pole.empty() || construct_pair.right_pole.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "requirement " + id.str() + " has an empty pole");
  }
  if (construct_pair.left_pole == construct_pair.right_pole) {
    throw Error(ErrorCode::kInvalidArgument,
                "requirement " + id.str() + " has identical left and right poles");
  }
}

Catalog::Catalog(std::vector<Requirement> items) {
  for (auto& item : items) add(std::move(item));
}

void Catalog::add(Requirement requirement) {
  requirement.validate();
  if (index_.contains(requirement.id)) {
    throw Error(ErrorCode::kDuplicateId, "duplicate requirement id " + requirement.id.str());
  }
  index_.emplace(requirement.id, items_.size());
  items_.push_back(std::move(requirement));
}

const Requirement* Catalog::find(const RequirementId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

std::vector<RequirementId> Catalog::ids() const {
  std::vector<RequirementId> out;
  out.reserve(items_.size());
  for (const auto& item : items_) out.push_back(item.id);
  return out;
}

RatingMatrix::RatingMatrix(RatingScale scale) : scale_(scale) { scale_.validate(); }

void RatingMatrix::add_requirements(const Catalog& catalog) {
  for (const auto& item : catalog.items()) add_requirement(item.id);
}

void RatingMatrix::add_requirement(const RequirementId& id) {
  if (id.empty()) throw Error(ErrorCode::kInvalidArgument, "requirement id is empty");
  if (requirement_index_.contains(id)) return;
  requirement_index_.emplace(id, requirements_.size());
  requirements_.push_back(id);
}

void RatingMatrix::add_stakeholder(const Stakeholder& stakeholder) {
  if (stakeholder.id.empty()) throw Error(ErrorCode::kInvalidArgument, "stakeholder id is empty");
  if (rows_.contains(stakeholder.id)) {
    if (this->stakeholder(stakeholder.id).education_level != stakeholder.education_level) {
      throw Error(ErrorCode::kInvalidArgument,
                  "stakeholder " + stakeholder.id.str() +
                      " is already registered with a different education level");
    }
    return;
  }
  rows_.emplace(stakeholder.id, Row{});
  stakeholder_index_.emplace(stakeholder.id, stakeholders_.size());
  stakeholders_.push_back(stakeholder);
}

const Stakeholder& RatingMatrix::stakeholder(const StakeholderId& id) const {
  auto it = stakeholder_index_.find(id);
  if (it == stakeholder_index_.end()) {
    throw Error(ErrorCode::kUnknownStakeholder, "unknown stakeholder " + id.str());
  }
  return stakeholders_[it->second];
}

bool RatingMatrix::set(const StakeholderId& who, const RequirementId& what, int score) {
  auto row = rows_.find(who);
  if (row == rows_.end()) {
    throw Error(ErrorCode::kUnknownStakeholder, "unknown stakeholder " + who.str());
  }
  if (!has_requirement(what)) {
    throw Error(ErrorCode::kUnknownRequirement, "unknown requirement " + what.str());
  }
  if (!scale_.contains(score)) {
    throw Error(ErrorCode::kOutOfScale, "score " + std::to_string(score) + " outside [" +
                                            std::to_string(scale_.min) + ", " +
                                            std::to_string(scale_.max) + "]");
  }
  auto [it, inserted] = row->second.insert_or_assign(what, score);
  if (inserted) ++entries_;
  return !inserted;
}

std::optional<int> RatingMatrix::get(const StakeholderId& who, const RequirementId& what) const {
  const Row& r = row(who);
  auto it = r.find(what);
  if (it == r.end()) return std::nullopt;
  return it->second;
}

const RatingMatrix::Row& RatingMatrix::row(const StakeholderId& who) const {
  auto it = rows_.find(who);
  return it == rows_.end() ? empty_row() : it->second;
}

std::size_t RatingMatrix::rater_count(const RequirementId& what) const {
  std::size_t count = 0;
  for (const auto& [who, r] : rows_) count += r.contains(what) ? 1 : 0;
  return count;
}

bool operator==(const RatingMatrix& a, const RatingMatrix& b) {
  return a.scale_ == b.scale_ && a.stakeholders_ == b.stakeholders_ &&
         a.requirements_ == b.requirements_ && a.rows_ == b.rows_;
}

double mean_rating(const RatingMatrix& matrix, const StakeholderId& who) {
  if (!matrix.has_stakeholder(who)) {
    throw Error(ErrorCode::kUnknownStakeholder, "unknown stakeholder " + who.str());
  }
  const auto& row = matrix.row(who);
  if (row.empty()) {
    throw Error(ErrorCode::kNoRatings, "stakeholder " + who.str() + " has no ratings");
  }
  double sum = 0.0;
  for (const auto& [item, score] : row) sum += score;
  return sum / static_cast<double>(row.size());
}

std::vector<RequirementId> corated_items(const RatingMatrix& matrix,
                                         const StakeholderId& a,
                                         const StakeholderId& b) {
  const auto& ra = matrix.row(a);
  const auto& rb = matrix.row(b);
  std::vector<RequirementId> out;
  auto ia = ra.begin();
  auto ib = rb.begin();
  while (ia != ra.end() && ib != rb.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      out.push_back(ia->first);
      ++ia;
      ++ib;
    }
  }
  return out;
}

RepertoryGrid::RepertoryGrid(std::vector<Requirement> rows, RatingScale scale)
    : rows_(std::move(rows)), scale_(scale) {
  scale_.validate();
}

void RepertoryGrid::record(const StakeholderId& who, const RequirementId& what, int score) {
  auto it = std::find_if(rows_.begin(), rows_.end(),
                         [&](const Requirement& r) { return r.id == what; });
  if (it == rows_.end()) {
    throw Error(ErrorCode::kUnknownRequirement, "requirement " + what.str() + " is not in the grid");
  }
  if (!scale_.contains(score)) {
    throw Error(ErrorCode::kOutOfScale, "score " + std::to_string(score) + " is outside the grid scale");
  }
  responses_[who].insert_or_assign(what, score);
}

const RatingMatrix::Row& RepertoryGrid::responses(const StakeholderId& who) const {
  auto it = responses_.find(who);
  return it == responses_.end() ? empty_row() : it->second;
}

bool RepertoryGrid::complete(const StakeholderId& who) const {
  return responses(who).size() == rows_.size();
}

}  // namespace reqrec
