#include "reqrec/datastore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <system_error>
#include <utility>

#include <json.hpp>

#include "csv.hpp"
#include "reqrec/error.hpp"

namespace reqrec::store {

using nlohmann::json;

namespace {

[[noreturn]] void fail_at(ErrorCode code, std::size_t line, const std::string& what) {
  throw Error(code, "line " + std::to_string(line) + ": " + what);
}

int parse_int(const std::string& text, std::size_t line, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    fail_at(ErrorCode::kParseError, line,
            std::string(what) + " '" + text + "' is not an integer");
  }
  return value;
}

const std::string& field(const csv::Record& record, std::size_t column) {
  static const std::string empty;
  return column < record.fields.size() ? record.fields[column] : empty;
}

void check_width(const csv::Record& record, const csv::Header& header) {
  if (record.fields.size() != header.width()) {
    fail_at(ErrorCode::kParseError, record.line,
            "expected " + std::to_string(header.width()) + " fields, found " +
                std::to_string(record.fields.size()));
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

// --- JSON mapping -------------------------------------------------------

json to_json(const cf::Prediction& p) {
  return {{"requirement_id", p.requirement.str()},
          {"raw_value", p.raw_value},
          {"clamped_value", p.clamped_value},
          {"neighbor_support", p.neighbor_support}};
}

json to_json(const cf::Recommendation& r) {
  json items = json::array();
  for (const auto& p : r.items) items.push_back(to_json(p));
  return {{"target", r.target.str()},
          {"params", {{"n", r.params.n_seeds}, {"m", r.params.m_neighbors}, {"k", r.params.k_recommendations}}},
          {"form", std::string(cf::to_string(r.form))},
          {"items", std::move(items)}};
}

json session_to_json(const Session& s) {
  json seeds = json::array();
  for (const auto& id : s.presented_seeds) seeds.push_back(id.str());
  return {{"id", s.id.str()},
          {"stakeholder_id", s.stakeholder.id.str()},
          {"education_level", std::string(to_string(s.stakeholder.education_level))},
          {"state", std::string(to_string(s.state))},
          {"presented_seeds", std::move(seeds)},
          {"recommendation", s.recommendation ? to_json(*s.recommendation) : json(nullptr)},
          {"created_at", s.created_at},
          {"updated_at", s.updated_at}};
}

cf::Prediction prediction_from_json(const json& j) {
  return {.requirement = RequirementId(j.at("requirement_id").get<std::string>()),
          .raw_value = j.at("raw_value").get<double>(),
          .clamped_value = j.at("clamped_value").get<double>(),
          .neighbor_support = j.at("neighbor_support").get<std::size_t>()};
}

cf::Recommendation recommendation_from_json(const json& j) {
  cf::Recommendation r;
  r.target = StakeholderId(j.at("target").get<std::string>());
  const auto& params = j.at("params");
  r.params = {params.at("n").get<int>(), params.at("m").get<int>(), params.at("k").get<int>()};
  r.form = cf::parse_prediction_form(j.at("form").get<std::string>());
  for (const auto& item : j.at("items")) r.items.push_back(prediction_from_json(item));
  return r;
}

Session session_from_json(const json& j) {
  Session s;
  s.id = SessionId(j.at("id").get<std::string>());
  s.stakeholder = {StakeholderId(j.at("stakeholder_id").get<std::string>()),
                   parse_education_level(j.at("education_level").get<std::string>())};
  s.state = parse_session_state(j.at("state").get<std::string>());
  for (const auto& id : j.at("presented_seeds")) {
    s.presented_seeds.emplace_back(id.get<std::string>());
  }
  if (const auto& rec = j.at("recommendation"); !rec.is_null()) {
    s.recommendation = recommendation_from_json(rec);
  }
  s.created_at = j.at("created_at").get<Timestamp>();
  s.updated_at = j.at("updated_at").get<Timestamp>();
  return s;
}

}  // namespace

// --- Dataset ------------------------------------------------------------

Dataset Dataset::over(Catalog catalog, RatingScale scale) {
  Dataset d{.catalog = std::move(catalog), .matrix = RatingMatrix(scale), .sessions = {}};
  d.matrix.add_requirements(d.catalog);
  return d;
}

std::vector<FeedbackRecord> Dataset::feedback() const {
  std::vector<FeedbackRecord> out;
  for (const auto& s : sessions) out.insert(out.end(), s.feedback.begin(), s.feedback.end());
  return out;
}

const Session* Dataset::find_session(const SessionId& id) const {
  auto it = std::find_if(sessions.begin(), sessions.end(), [&](const Session& s) { return s.id == id; });
  return it == sessions.end() ? nullptr : &*it;
}

Session* Dataset::find_session(const SessionId& id) {
  return const_cast<Session*>(std::as_const(*this).find_session(id));
}

void Dataset::validate() const {
  auto unknown = [](const std::string& what) { throw Error(ErrorCode::kUnknownReference, what); };
  if (matrix.requirements() != catalog.ids()) {
    unknown("rating matrix requirements do not match the catalog");
  }
  std::set<SessionId> session_ids;
  for (const auto& s : sessions) {
    if (!session_ids.insert(s.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate session id " + s.id.str());
    }
    if (!matrix.has_stakeholder(s.stakeholder.id)) {
      unknown("session " + s.id.str() + " references unknown stakeholder " + s.stakeholder.id.str());
    }
    if (matrix.stakeholder(s.stakeholder.id) != s.stakeholder) {
      throw Error(ErrorCode::kInvalidArgument,
                  "session " + s.id.str() + " disagrees with the stakeholder registry");
    }
    for (const auto& seed : s.presented_seeds) {
      if (!catalog.contains(seed)) unknown("session " + s.id.str() + " seed " + seed.str());
    }
    const bool recommended = s.state == SessionState::kRecommended ||
                             s.state == SessionState::kFeedbackCollected;
    if (recommended != s.recommendation.has_value()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "session " + s.id.str() + " recommendation does not match its state");
    }
    std::set<RequirementId> recommended_ids;
    if (s.recommendation) {
      for (const auto& p : s.recommendation->items) {
        if (!catalog.contains(p.requirement)) {
          unknown("session " + s.id.str() + " recommends unknown " + p.requirement.str());
        }
        recommended_ids.insert(p.requirement);
      }
    }
    if (!s.feedback.empty() && s.state != SessionState::kFeedbackCollected) {
      throw Error(ErrorCode::kInvalidArgument,
                  "session " + s.id.str() + " has feedback before feedback was collected");
    }
    for (const auto& f : s.feedback) {
      if (f.session_id != s.id || !recommended_ids.contains(f.requirement_id)) {
        unknown("feedback on " + f.requirement_id.str() + " does not match session " + s.id.str());
      }
      if (f.stars < 0 || f.stars > kMaxStars) {
        throw Error(ErrorCode::kStarsOutOfRange, "stored feedback has " + std::to_string(f.stars) + " stars");
      }
      if (f.education_level != s.stakeholder.education_level) {
        throw Error(ErrorCode::kInvalidArgument, "feedback education level differs from its session");
      }
    }
  }
}

// --- Catalog CSV --------------------------------------------------------

Catalog load_catalog(std::istream& in) {
  csv::Reader reader(in);
  Catalog catalog;
  auto header_record = reader.next();
  if (!header_record) return catalog;
  const csv::Header header(*header_record);
  const auto id_col = header.require("id");
  const auto label_col = header.require("label");
  const auto left_col = header.require("left_pole");
  const auto right_col = header.require("right_pole");
  const auto description_col = header.find("description");

  while (auto record = reader.next()) {
    // A trailing description column may be left off entirely.
    const bool short_description = description_col && *description_col + 1 == header.width() &&
                                   record->fields.size() + 1 == header.width();
    if (!short_description) check_width(*record, header);
    Requirement requirement{
        .id = RequirementId(field(*record, id_col)),
        .label = field(*record, label_col),
        .description = description_col ? field(*record, *description_col) : std::string{},
        .construct_pair = {field(*record, left_col), field(*record, right_col)},
    };
    try {
      catalog.add(std::move(requirement));
    } catch (const Error& e) {
      const auto code = e.code() == ErrorCode::kDuplicateId ? ErrorCode::kDuplicateId
                                                            : ErrorCode::kParseError;
      fail_at(code, record->line, e.what());
    }
  }
  return catalog;
}

Catalog load_catalog(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_catalog(in);
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
  csv::write_row(out, {"id", "label", "left_pole", "right_pole", "description"});
  for (const auto& r : catalog.items()) {
    csv::write_row(out, {r.id.str(), r.label, r.construct_pair.left_pole,
                         r.construct_pair.right_pole, r.description});
  }
}

// --- Ratings CSV --------------------------------------------------------

RatingsLoad load_ratings(std::istream& in, const Catalog& catalog, RatingScale scale,
                         std::span<const Stakeholder> known) {
  RatingsLoad result{RatingMatrix(scale), 0};
  auto& matrix = result.matrix;
  matrix.add_requirements(catalog);
  for (const auto& s : known) matrix.add_stakeholder(s);

  csv::Reader reader(in);
  auto header_record = reader.next();
  if (!header_record) return result;
  const csv::Header header(*header_record);
  const auto who_col = header.require("stakeholder_id");
  const auto level_col = header.find("education_level");
  const auto what_col = header.require("requirement_id");
  const auto score_col = header.require("score");

  while (auto record = reader.next()) {
    check_width(*record, header);
    const StakeholderId who(field(*record, who_col));
    const RequirementId what(field(*record, what_col));
    if (who.empty()) fail_at(ErrorCode::kParseError, record->line, "empty stakeholder_id");
    EducationLevel level = EducationLevel::kUnspecified;
    try {
      if (level_col) level = parse_education_level(field(*record, *level_col));
    } catch (const Error& e) {
      fail_at(ErrorCode::kParseError, record->line, e.what());
    }
    const int score = parse_int(field(*record, score_col), record->line, "score");
    if (!catalog.contains(what)) {
      fail_at(ErrorCode::kUnknownReference, record->line, "unknown requirement '" + what.str() + "'");
    }
    if (!scale.contains(score)) {
      fail_at(ErrorCode::kOutOfScale, record->line,
              "score " + std::to_string(score) + " outside [" + std::to_string(scale.min) + ", " +
                  std::to_string(scale.max) + "]");
    }
    try {
      matrix.add_stakeholder({who, level});
    } catch (const Error& e) {
      fail_at(ErrorCode::kParseError, record->line, e.what());
    }
    if (matrix.set(who, what, score)) ++result.overwritten;
  }
  return result;
}

RatingsLoad load_ratings(const std::filesystem::path& path, const Catalog& catalog,
                         RatingScale scale, std::span<const Stakeholder> known) {
  auto in = open_input(path);
  return load_ratings(in, catalog, scale, known);
}

void write_ratings(std::ostream& out, std::span<const RatingRow> rows) {
  csv::write_row(out, {"stakeholder_id", "education_level", "requirement_id", "score"});
  for (const auto& row : rows) {
    csv::write_row(out, {row.stakeholder.id.str(), std::string(to_string(row.stakeholder.education_level)),
                         row.requirement_id.str(), std::to_string(row.score)});
  }
}

std::vector<RatingRow> rating_rows(const RatingMatrix& matrix) {
  std::vector<RatingRow> rows;
  rows.reserve(matrix.entry_count());
  for (const auto& s : matrix.stakeholders()) {
    for (const auto& [item, score] : matrix.row(s.id)) rows.push_back({s, item, score});
  }
  return rows;
}

// --- State store --------------------------------------------------------

std::string to_json_text(const Dataset& dataset) {
  json catalog = json::array();
  for (const auto& r : dataset.catalog.items()) {
    catalog.push_back({{"id", r.id.str()},
                       {"label", r.label},
                       {"description", r.description},
                       {"left_pole", r.construct_pair.left_pole},
                       {"right_pole", r.construct_pair.right_pole}});
  }
  json stakeholders = json::array();
  for (const auto& s : dataset.matrix.stakeholders()) {
    stakeholders.push_back({{"id", s.id.str()}, {"education_level", std::string(to_string(s.education_level))}});
  }
  json ratings = json::array();
  for (const auto& row : rating_rows(dataset.matrix)) {
    ratings.push_back({{"stakeholder_id", row.stakeholder.id.str()},
                       {"requirement_id", row.requirement_id.str()},
                       {"score", row.score}});
  }
  json sessions = json::array();
  json feedback = json::array();
  for (const auto& s : dataset.sessions) {
    sessions.push_back(session_to_json(s));
    for (const auto& f : s.feedback) {
      feedback.push_back({{"session_id", f.session_id.str()},
                          {"requirement_id", f.requirement_id.str()},
                          {"stars", f.stars},
                          {"education_level", std::string(to_string(f.education_level))}});
    }
  }
  const auto& scale = dataset.matrix.scale();
  json doc = {{"schema_version", kSchemaVersion},
              {"scale", {{"min", scale.min}, {"max", scale.max}}},
              {"catalog", std::move(catalog)},
              {"stakeholders", std::move(stakeholders)},
              {"ratings", std::move(ratings)},
              {"sessions", std::move(sessions)},
              {"feedback", std::move(feedback)}};
  return doc.dump(2) + "\n";
}

Dataset from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("state store is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw Error(ErrorCode::kSchemaVersionMismatch, "state store has no schema_version");
  }
  if (const auto version = doc["schema_version"].get<int>(); version != kSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "state store schema_version " + std::to_string(version) + ", expected " +
                    std::to_string(kSchemaVersion));
  }

  try {
    RatingScale scale{doc.at("scale").at("min").get<int>(), doc.at("scale").at("max").get<int>()};
    Catalog catalog;
    for (const auto& r : doc.at("catalog")) {
      catalog.add({.id = RequirementId(r.at("id").get<std::string>()),
                   .label = r.at("label").get<std::string>(),
                   .description = r.at("description").get<std::string>(),
                   .construct_pair = {r.at("left_pole").get<std::string>(),
                                      r.at("right_pole").get<std::string>()}});
    }
    Dataset dataset = Dataset::over(std::move(catalog), scale);
    for (const auto& s : doc.at("stakeholders")) {
      dataset.matrix.add_stakeholder({StakeholderId(s.at("id").get<std::string>()),
                                      parse_education_level(s.at("education_level").get<std::string>())});
    }
    for (const auto& r : doc.at("ratings")) {
      const StakeholderId who(r.at("stakeholder_id").get<std::string>());
      const RequirementId what(r.at("requirement_id").get<std::string>());
      if (!dataset.matrix.has_stakeholder(who) || !dataset.matrix.has_requirement(what)) {
        throw Error(ErrorCode::kUnknownReference,
                    "rating references " + who.str() + "/" + what.str());
      }
      if (dataset.matrix.set(who, what, r.at("score").get<int>())) {
        throw Error(ErrorCode::kParseError, "duplicate rating " + who.str() + "/" + what.str());
      }
    }
    for (const auto& s : doc.at("sessions")) dataset.sessions.push_back(session_from_json(s));
    for (const auto& f : doc.at("feedback")) {
      const SessionId owner(f.at("session_id").get<std::string>());
      Session* session = dataset.find_session(owner);
      if (session == nullptr) {
        throw Error(ErrorCode::kUnknownReference, "feedback references unknown session " + owner.str());
      }
      session->feedback.push_back({owner, RequirementId(f.at("requirement_id").get<std::string>()),
                                   f.at("stars").get<int>(),
                                   parse_education_level(f.at("education_level").get<std::string>())});
    }
    dataset.validate();
    return dataset;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("state store is malformed: ") + e.what());
  }
}

void save_state(const Dataset& dataset, const std::filesystem::path& path) {
  const std::string text = to_json_text(dataset);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIoError, "cannot replace " + path.string());
  }
}

Dataset load_state(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

// --- Synthetic fixture --------------------------------------------------

std::vector<RatingRow> generate_fixture(const Catalog& catalog, const FixtureSpec& spec) {
  spec.scale.validate();
  if (spec.taste_groups == 0) throw Error(ErrorCode::kInvalidArgument, "taste_groups must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> taste(spec.scale.min, spec.scale.max);
  std::normal_distribution<double> noise(0.0, spec.noise);
  std::bernoulli_distribution rated(spec.density);
  // Education mix weighted like a typical university participant pool.
  std::discrete_distribution<int> level_pick({60.0, 46.0, 21.0});
  constexpr EducationLevel kLevels[] = {EducationLevel::kPhD, EducationLevel::kMaster,
                                        EducationLevel::kBachelor};

  std::vector<std::vector<double>> profiles(spec.taste_groups);
  for (auto& profile : profiles) {
    for (std::size_t i = 0; i < catalog.size(); ++i) profile.push_back(taste(rng));
  }

  const auto width = std::to_string(spec.stakeholders).size();
  std::vector<RatingRow> rows;
  for (std::size_t u = 0; u < spec.stakeholders; ++u) {
    std::string number = std::to_string(u + 1);
    number.insert(0, width - std::min(width, number.size()), '0');
    const Stakeholder who{StakeholderId("u" + number), kLevels[level_pick(rng)]};
    const auto& profile = profiles[u % spec.taste_groups];
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      const double latent = profile[i] + noise(rng);
      const bool keep = rated(rng);
      if (!keep) continue;
      const int score = static_cast<int>(spec.scale.clamp(std::round(latent)));
      rows.push_back({who, catalog.items()[i].id, score});
    }
  }
  return rows;
}

}  // namespace reqrec::store
