#include "lyrica/json_io.h"

#include "lyrica/error.h"

namespace lyrica {

namespace {

std::size_t positive_count(const nlohmann::json& v, const char* field) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw Error(ErrorCode::kValidation, std::string(field) + " must be a positive integer", field);
  }
  return v.get<std::size_t>();
}

std::string required_string(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw Error(ErrorCode::kValidation, std::string(field) + " is required and must be a string", field);
  }
  return j[field].get<std::string>();
}

}  // namespace

ControlSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "spec must be an object", "spec");
  ControlSpec spec;
  spec.style = required_string(j, "style");
  spec.emotion = required_string(j, "emotion");
  if (j.contains("theme") && !j["theme"].is_null()) {
    if (!j["theme"].is_string()) throw Error(ErrorCode::kValidation, "theme must be a string", "theme");
    spec.theme = j["theme"].get<std::string>();
  }
  if (j.contains("keywords") && !j["keywords"].is_null()) {
    if (!j["keywords"].is_array()) {
      throw Error(ErrorCode::kValidation, "keywords must be an array of strings", "keywords");
    }
    for (const auto& k : j["keywords"]) {
      if (!k.is_string()) throw Error(ErrorCode::kValidation, "keywords must be strings", "keywords");
      spec.keywords.push_back(k.get<std::string>());
    }
  }
  if (j.contains("num_lines")) spec.num_lines = positive_count(j["num_lines"], "num_lines");
  if (j.contains("words_per_line")) {
    const auto& w = j["words_per_line"];
    spec.words_per_line.clear();
    if (w.is_array()) {
      for (const auto& n : w) spec.words_per_line.push_back(positive_count(n, "words_per_line"));
    } else {
      spec.words_per_line.push_back(positive_count(w, "words_per_line"));
    }
  }
  if (j.contains("acrostic") && !j["acrostic"].is_null()) {
    const auto& a = j["acrostic"];
    std::vector<Grapheme> chars;
    try {
      if (a.is_string()) {
        chars = graphemes(a.get<std::string>());
      } else if (a.is_array()) {
        for (const auto& g : a) chars.push_back(g.get<std::string>());
      } else {
        throw Error(ErrorCode::kValidation, "acrostic must be a string or array", "acrostic");
      }
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kValidation, "acrostic entries must be strings", "acrostic");
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, e.what(), "acrostic");
    }
    spec.acrostic = std::move(chars);
  }
  if (j.contains("rhyme_group") && !j["rhyme_group"].is_null()) {
    if (!j["rhyme_group"].is_string()) {
      throw Error(ErrorCode::kValidation, "rhyme_group must be a string", "rhyme_group");
    }
    spec.rhyme_group = j["rhyme_group"].get<std::string>();
  }
  validate_shape(spec);
  return spec;
}

nlohmann::json spec_to_json(const ControlSpec& spec) {
  nlohmann::json j;
  j["style"] = spec.style;
  j["emotion"] = spec.emotion;
  j["theme"] = spec.theme ? nlohmann::json(*spec.theme) : nlohmann::json(nullptr);
  j["keywords"] = spec.keywords;
  j["acrostic"] = spec.acrostic ? nlohmann::json(*spec.acrostic) : nlohmann::json(nullptr);
  j["rhyme_group"] = spec.rhyme_group ? nlohmann::json(*spec.rhyme_group) : nlohmann::json(nullptr);
  j["num_lines"] = spec.num_lines;
  if (spec.words_per_line.size() == 1) {
    j["words_per_line"] = spec.words_per_line.front();
  } else {
    j["words_per_line"] = spec.words_per_line;
  }
  return j;
}

nlohmann::json violation_to_json(const Violation& v) {
  return {{"line", v.line}, {"constraint", v.constraint}, {"detail", v.detail}};
}

nlohmann::json candidate_to_json(const Candidate& c) {
  nlohmann::json j;
  j["lines"] = c.lyrics.to_strings();
  j["decode_index"] = c.decode_index;
  j["overlapping_lines"] = c.overlapping_lines;
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : c.violations) violations.push_back(violation_to_json(v));
  j["violations"] = std::move(violations);
  if (c.rejected) {
    j["rejected"] = *c.rejected;
  } else {
    j["scores"] = {{"s_kh", c.s_kh}, {"s_sr", c.s_sr}, {"s_div", c.s_div}, {"s_rank", c.s_rank}};
  }
  return j;
}

nlohmann::json version_to_json(const Version& v) {
  nlohmann::json j;
  j["number"] = v.number;
  j["parent"] = v.parent;
  j["lines"] = v.lines;
  j["spec"] = v.spec;
  j["provenance"] = provenance_name(v.provenance);
  j["restored_from"] = v.restored_from ? nlohmann::json(*v.restored_from) : nlohmann::json(nullptr);
  j["created_at"] = v.created_at;
  return j;
}

nlohmann::json summary_to_json(const DraftSummary& s) {
  return {{"id", s.id}, {"title", s.title}, {"created_at", s.created_at},
          {"version_count", s.version_count}};
}

}  // namespace lyrica
