#include "foon/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "json.hpp"

namespace foon {

using ojson = nlohmann::ordered_json;

Result<bool> ActionLexicon::add(std::string motion, std::vector<std::string> phrases) {
  if (phrases.empty()) {
    return Error{ErrorCode::ParseError, "motion '" + motion + "' has no keyword phrases"};
  }
  for (const auto& entry : entries_) {
    if (iequals(entry.motion, motion)) {
      return Error{ErrorCode::DuplicateMotion, "duplicate lexicon motion '" + motion + "'"};
    }
  }
  for (std::string& phrase : phrases) {
    phrase = to_lower(trim(phrase));
    if (phrase.empty()) {
      return Error{ErrorCode::ParseError, "motion '" + motion + "' has an empty phrase"};
    }
  }
  entries_.push_back({std::move(motion), std::move(phrases)});
  return true;
}

const ActionLexicon& builtin_lexicon() {
  static const ActionLexicon lexicon = [] {
    ActionLexicon l;
    auto add = [&l](const char* motion, std::vector<std::string> phrases) {
      auto added = l.add(motion, std::move(phrases));
      if (!added) throw std::logic_error("builtin lexicon failed to load");
    };
    add("Pick", {"pick", "grab", "take"});
    add("Place", {"place", "put", "set"});
    add("Pour", {"pour", "add"});
    add("Cut", {"cut", "chop", "slice", "dice"});
    add("Mix", {"mix", "stir"});
    add("Cook", {"cook", "fry", "heat", "simmer"});
    return l;
  }();
  return lexicon;
}

Result<ActionLexicon> load_lexicon(std::string_view json_text, const MotionLibrary& library) {
  const ojson doc = ojson::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Error{ErrorCode::ParseError, "lexicon document is not a JSON object"};
  }
  ActionLexicon lexicon;
  for (const auto& [motion, phrases] : doc.items()) {
    const FunctionalUnitTemplate* tmpl = library.find(motion);
    if (tmpl == nullptr) {
      return Error{ErrorCode::UnknownMotion,
                   "lexicon names motion '" + motion + "' not present in the library"};
    }
    if (!phrases.is_array()) {
      return Error{ErrorCode::ParseError, "lexicon entry '" + motion + "' must be an array"};
    }
    std::vector<std::string> list;
    for (const auto& phrase : phrases) {
      if (!phrase.is_string()) {
        return Error{ErrorCode::ParseError,
                     "lexicon entry '" + motion + "' phrases must be strings"};
      }
      list.push_back(phrase.get<std::string>());
    }
    auto added = lexicon.add(tmpl->motion, std::move(list));
    if (!added) return added.error();
  }
  return lexicon;
}

// ---------------------------------------------------------------------------
// Similarity
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, int> token_counts(std::string_view text) {
  std::map<std::string, int> counts;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      ++counts[current];
      current.clear();
    }
  }
  if (!current.empty()) ++counts[current];
  return counts;
}

}  // namespace

double similarity(std::string_view text, std::string_view phrase) {
  const std::string phrase_lower = to_lower(trim(phrase));
  if (phrase_lower.empty()) return 0.0;
  const std::string text_lower = to_lower(text);
  if (text_lower.find(phrase_lower) != std::string::npos) return 1.0;

  const auto a = token_counts(text_lower);
  const auto b = token_counts(phrase_lower);
  if (a.empty() || b.empty()) return 0.0;

  double dot = 0.0;
  for (const auto& [token, count] : b) {
    auto it = a.find(token);
    if (it != a.end()) dot += static_cast<double>(count) * it->second;
  }
  if (dot == 0.0) return 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (const auto& [token, count] : a) norm_a += static_cast<double>(count) * count;
  for (const auto& [token, count] : b) norm_b += static_cast<double>(count) * count;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

// ---------------------------------------------------------------------------
// Segmentation
// ---------------------------------------------------------------------------

Result<std::vector<SceneRecord>> segment(const std::vector<SubtitleCue>& cues,
                                         const ActionLexicon& lexicon, double threshold) {
  if (lexicon.empty()) {
    return Error{ErrorCode::EmptyLexicon, "action lexicon has no entries"};
  }

  // Label each cue with the argmax motion; ties break by declaration order.
  std::vector<std::optional<std::string>> labels(cues.size());
  for (size_t i = 0; i < cues.size(); ++i) {
    double best_score = 0.0;
    const std::string* best_motion = nullptr;
    for (const LexiconEntry& entry : lexicon.entries()) {
      double score = 0.0;
      for (const std::string& phrase : entry.phrases) {
        score = std::max(score, similarity(cues[i].text, phrase));
      }
      if (score > best_score) {
        best_score = score;
        best_motion = &entry.motion;
      }
    }
    if (best_motion != nullptr && best_score >= threshold) labels[i] = *best_motion;
  }

  std::vector<SceneRecord> scenes;
  size_t run_start = 0;
  while (run_start < cues.size()) {
    size_t run_end = run_start;
    while (run_end + 1 < cues.size() && labels[run_end + 1] == labels[run_start]) ++run_end;

    SceneRecord scene;
    scene.scene_id = static_cast<int>(scenes.size()) + 1;
    scene.first_cue = static_cast<int>(run_start);
    scene.last_cue = static_cast<int>(run_end);
    scene.motion = labels[run_start];
    scene.cooking = labels[run_start].has_value();
    scene.start_ms = cues[run_start].start_ms;
    scene.end_ms = cues[run_end].end_ms;
    for (size_t i = run_start; i <= run_end; ++i) {
      if (!scene.text.empty()) scene.text += " ";
      scene.text += cues[i].text;
    }
    scenes.push_back(std::move(scene));
    run_start = run_end + 1;
  }
  return scenes;
}

// ---------------------------------------------------------------------------
// Scene documents
// ---------------------------------------------------------------------------

std::string serialize_scenes(const std::vector<SceneRecord>& scenes) {
  ojson doc;
  doc["scenes"] = ojson::array();
  for (const SceneRecord& scene : scenes) {
    ojson s;
    s["scene_id"] = scene.scene_id;
    s["first_cue"] = scene.first_cue;
    s["last_cue"] = scene.last_cue;
    s["motion"] = scene.motion ? ojson(*scene.motion) : ojson(nullptr);
    s["flag"] = scene.cooking ? "cooking" : "candidate-unnecessary";
    s["start_ms"] = scene.start_ms;
    s["end_ms"] = scene.end_ms;
    s["text"] = scene.text;
    if (!scene.image_refs.empty()) s["image_refs"] = scene.image_refs;
    doc["scenes"].push_back(std::move(s));
  }
  return doc.dump(2) + "\n";
}

Result<std::vector<SceneRecord>> parse_scenes(std::string_view json_text) {
  const ojson doc = ojson::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("scenes") ||
      !doc["scenes"].is_array()) {
    return Error{ErrorCode::ParseError, "scene document needs a 'scenes' array"};
  }
  std::vector<SceneRecord> scenes;
  for (size_t i = 0; i < doc["scenes"].size(); ++i) {
    const auto& s = doc["scenes"][i];
    const std::string path = "scenes[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("scene_id") || !s["scene_id"].is_number_integer()) {
      return Error{ErrorCode::SchemaError, path + ".scene_id: required integer"};
    }
    SceneRecord scene;
    scene.scene_id = s["scene_id"].get<int>();
    scene.first_cue = s.contains("first_cue") ? s["first_cue"].get<int>() : 0;
    scene.last_cue = s.contains("last_cue") ? s["last_cue"].get<int>() : scene.first_cue;
    if (s.contains("motion") && !s["motion"].is_null()) {
      scene.motion = s["motion"].get<std::string>();
    }
    if (s.contains("flag")) {
      scene.cooking = s["flag"].get<std::string>() == "cooking";
    } else {
      scene.cooking = scene.motion.has_value();
    }
    scene.start_ms = s.contains("start_ms") ? s["start_ms"].get<std::int64_t>() : 0;
    scene.end_ms = s.contains("end_ms") ? s["end_ms"].get<std::int64_t>() : 0;
    scene.text = s.contains("text") ? s["text"].get<std::string>() : "";
    if (s.contains("image_refs") && s["image_refs"].is_array()) {
      for (const auto& ref : s["image_refs"]) scene.image_refs.push_back(ref.get<std::string>());
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace foon
