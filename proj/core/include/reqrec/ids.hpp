#ifndef REQREC_IDS_HPP_
#define REQREC_IDS_HPP_

#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <utility>

namespace reqrec {

// Opaque string identifier, distinct per Tag so a stakeholder id can never be
// passed where a requirement id is expected. Ordering is lexicographic and is
// the tie-break order used everywhere ("ascending id").
template <class Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Id& id) {
    return os << id.value_;
  }

 private:
  std::string value_;
};

struct StakeholderTag {};
struct RequirementTag {};
struct SessionTag {};

using StakeholderId = Id<StakeholderTag>;
using RequirementId = Id<RequirementTag>;
using SessionId = Id<SessionTag>;

}  // namespace reqrec

template <class Tag>
struct std::hash<reqrec::Id<Tag>> {
  std::size_t operator()(const reqrec::Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

#endif  // REQREC_IDS_HPP_
