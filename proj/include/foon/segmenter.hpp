#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foon/core.hpp"
#include "foon/motion.hpp"
#include "foon/plan_io.hpp"

namespace foon {

struct LexiconEntry {
  std::string motion;
  std::vector<std::string> phrases;  // lowercase

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

/// Keyword phrases per motion. Declaration order is significant: argmax ties
/// between motions break toward the earlier entry.
class ActionLexicon {
 public:
  Result<bool> add(std::string motion, std::vector<std::string> phrases);
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const ActionLexicon&, const ActionLexicon&) = default;

 private:
  std::vector<LexiconEntry> entries_;
};

/// Keyword lists for the six bundled motions.
const ActionLexicon& builtin_lexicon();

/// Lexicon file: JSON map motion -> [phrases]. Motion names must exist in the
/// library; declaration order is preserved.
Result<ActionLexicon> load_lexicon(std::string_view json_text, const MotionLibrary& library);

/// Case-insensitive token-multiset cosine similarity with an exact-substring
/// bonus: a phrase contained verbatim in the text scores 1.0.
double similarity(std::string_view text, std::string_view phrase);

struct SceneRecord {
  int scene_id = 0;
  int first_cue = 0;  // positions in the cue list, inclusive
  int last_cue = 0;
  std::optional<std::string> motion;  // unset for candidate-unnecessary scenes
  std::string text;                   // cue texts joined with spaces
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  bool cooking = false;
  std::vector<std::string> image_refs;

  friend bool operator==(const SceneRecord&, const SceneRecord&) = default;
};

/// Labels each cue with its best-scoring motion (if the score clears the
/// threshold) and merges maximal runs of equally-labeled cues into scenes.
/// Unlabeled runs become candidate-unnecessary scenes.
Result<std::vector<SceneRecord>> segment(const std::vector<SubtitleCue>& cues,
                                         const ActionLexicon& lexicon, double threshold);

Result<std::vector<SceneRecord>> parse_scenes(std::string_view json_text);
std::string serialize_scenes(const std::vector<SceneRecord>& scenes);

}  // namespace foon
