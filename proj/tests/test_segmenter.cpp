#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "foon/segmenter.hpp"
#include "test_util.hpp"

using namespace foon;

TEST_CASE("substring containment scores 1.0") {
  CHECK(similarity("now cut the onions finely", "cut") == doctest::Approx(1.0));
  CHECK(similarity("CHOP the onion", "chop") == doctest::Approx(1.0));
}

TEST_CASE("disjoint token sets score 0.0") {
  CHECK(similarity("hello world", "mix") == doctest::Approx(0.0));
  CHECK(similarity("", "mix") == doctest::Approx(0.0));
  CHECK(similarity("mix", "") == doctest::Approx(0.0));
}

TEST_CASE("token cosine matches the hand-computed reference") {
  // text {stir, and, mix, well}, phrase {mix, the, bowl}:
  // dot = 1, |text| = 2, |phrase| = sqrt(3)
  const double expected = 1.0 / (2.0 * std::sqrt(3.0));
  CHECK(similarity("stir and mix well", "mix the bowl") == doctest::Approx(expected));

  // repeated tokens count as a multiset
  const double repeated = similarity("mix mix mix", "mix it");
  CHECK(repeated == doctest::Approx(3.0 / (std::sqrt(9.0) * std::sqrt(2.0))));
}

namespace {

std::vector<SubtitleCue> cues_of(const std::vector<std::string>& texts) {
  std::vector<SubtitleCue> cues;
  std::int64_t t = 0;
  for (const auto& text : texts) {
    SubtitleCue cue;
    cue.index = static_cast<int>(cues.size()) + 1;
    cue.start_ms = t;
    cue.end_ms = t + 1000;
    cue.text = text;
    t += 1500;
    cues.push_back(std::move(cue));
  }
  return cues;
}

}  // namespace

TEST_CASE("a single action cue becomes one labeled scene") {
  auto scenes = segment(cues_of({"cut the pork"}), builtin_lexicon(), 0.3);
  REQUIRE(scenes.ok());
  REQUIRE(scenes.value().size() == 1);
  CHECK(scenes.value()[0].motion == "Cut");
  CHECK(scenes.value()[0].cooking);
  CHECK(scenes.value()[0].scene_id == 1);
}

TEST_CASE("unmatched runs merge into one candidate-unnecessary scene") {
  auto scenes = segment(cues_of({"welcome to my channel", "today gyudon"}),
                        builtin_lexicon(), 0.3);
  REQUIRE(scenes.ok());
  REQUIRE(scenes.value().size() == 1);
  CHECK_FALSE(scenes.value()[0].cooking);
  CHECK_FALSE(scenes.value()[0].motion.has_value());
  CHECK(scenes.value()[0].first_cue == 0);
  CHECK(scenes.value()[0].last_cue == 1);
  CHECK(scenes.value()[0].text == "welcome to my channel today gyudon");
}

TEST_CASE("argmax ties break by lexicon declaration order") {
  // "put" (Place) and "pour" (Pour) both hit as substrings; Place is declared first.
  auto scenes = segment(cues_of({"put it down and pour it out"}), builtin_lexicon(), 0.3);
  REQUIRE(scenes.ok());
  CHECK(scenes.value()[0].motion == "Place");
}

TEST_CASE("the gyudon subtitle fixture preprocesses into 13 scenes") {
  auto cues = parse_srt(testutil::read_fixture("recipes/gyudon/gyudon.srt"));
  REQUIRE(cues.ok());
  auto scenes = segment(cues.value(), builtin_lexicon(), 0.3);
  REQUIRE(scenes.ok());
  CHECK(scenes.value().size() == 13);

  // Title and intro cues group into the first candidate-unnecessary scene.
  CHECK_FALSE(scenes.value()[0].cooking);
  CHECK(scenes.value()[0].first_cue == 0);
  CHECK(scenes.value()[0].last_cue == 1);

  int cooking = 0;
  for (const SceneRecord& scene : scenes.value()) {
    if (scene.cooking) ++cooking;
  }
  CHECK(cooking == 8);
}

TEST_CASE("an empty lexicon is an error") {
  auto scenes = segment(cues_of({"cut"}), ActionLexicon{}, 0.3);
  REQUIRE_FALSE(scenes.ok());
  CHECK(scenes.error().code == ErrorCode::EmptyLexicon);
}

TEST_CASE("lexicon files load against the library") {
  auto lexicon = load_lexicon(testutil::read_fixture("lexicon.json"), builtin_library());
  REQUIRE(lexicon.ok());
  CHECK(lexicon.value() == builtin_lexicon());

  auto unknown = load_lexicon(R"({"Season": ["salt"]})", builtin_library());
  REQUIRE_FALSE(unknown.ok());
  CHECK(unknown.error().code == ErrorCode::UnknownMotion);

  auto empty_list = load_lexicon(R"({"Cut": []})", builtin_library());
  CHECK_FALSE(empty_list.ok());
}

TEST_CASE("scene documents round trip") {
  auto cues = parse_srt(testutil::read_fixture("recipes/gyudon/gyudon.srt"));
  auto scenes = segment(cues.value(), builtin_lexicon(), 0.3);
  REQUIRE(scenes.ok());
  auto reparsed = parse_scenes(serialize_scenes(scenes.value()));
  REQUIRE(reparsed.ok());
  CHECK(reparsed.value() == scenes.value());
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

namespace {

std::vector<SubtitleCue> random_cues(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {
      "cut",   "mix",    "pour",  "cook", "take",  "put",    "the",   "onion",
      "pork",  "pan",    "now",   "well", "hello", "great",  "wait",  "stir",
      "bowl",  "little", "video", "fry",  "chop",  "simmer", "place", "watch"};
  const size_t count = rng() % 24;
  std::vector<std::string> texts;
  for (size_t i = 0; i < count; ++i) {
    std::string text;
    const size_t len = 1 + rng() % 6;
    for (size_t w = 0; w < len; ++w) {
      if (!text.empty()) text += " ";
      text += words[rng() % words.size()];
    }
    texts.push_back(text);
  }
  return cues_of(texts);
}

std::vector<bool> labeled_mask(const std::vector<SceneRecord>& scenes, size_t cue_count) {
  std::vector<bool> mask(cue_count, false);
  for (const SceneRecord& scene : scenes) {
    for (int i = scene.first_cue; i <= scene.last_cue && scene.cooking; ++i) {
      mask[static_cast<size_t>(i)] = true;
    }
  }
  return mask;
}

}  // namespace

TEST_CASE("property: scenes partition the cue list") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const auto cues = random_cues(rng);
    const double threshold = static_cast<double>(rng() % 101) / 100.0;
    auto scenes = segment(cues, builtin_lexicon(), threshold);
    REQUIRE(scenes.ok());

    if (cues.empty()) {
      CHECK(scenes.value().empty());
      continue;
    }
    // contiguous, exhaustive, non-overlapping; ids sequential from 1
    int expected_next = 0;
    int id = 1;
    for (const SceneRecord& scene : scenes.value()) {
      CHECK(scene.first_cue == expected_next);
      CHECK(scene.last_cue >= scene.first_cue);
      CHECK(scene.scene_id == id++);
      expected_next = scene.last_cue + 1;
    }
    CHECK(expected_next == static_cast<int>(cues.size()));

    // adjacent scenes never share a label (otherwise they would have merged)
    for (size_t i = 1; i < scenes.value().size(); ++i) {
      CHECK(scenes.value()[i - 1].motion != scenes.value()[i].motion);
    }
  }
}

TEST_CASE("property: raising the threshold never labels new cues") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cues = random_cues(rng);
    const double low = static_cast<double>(rng() % 50) / 100.0;
    const double high = low + static_cast<double>(rng() % 50) / 100.0;
    auto at_low = segment(cues, builtin_lexicon(), low);
    auto at_high = segment(cues, builtin_lexicon(), high);
    REQUIRE(at_low.ok());
    REQUIRE(at_high.ok());
    const auto low_mask = labeled_mask(at_low.value(), cues.size());
    const auto high_mask = labeled_mask(at_high.value(), cues.size());
    for (size_t i = 0; i < cues.size(); ++i) {
      if (high_mask[i]) CHECK(low_mask[i]);
    }
  }
}

TEST_CASE("property: segmentation is deterministic") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cues = random_cues(rng);
    auto first = segment(cues, builtin_lexicon(), 0.3);
    auto second = segment(cues, builtin_lexicon(), 0.3);
    REQUIRE(first.ok());
    REQUIRE(second.ok());
    CHECK(first.value() == second.value());
  }
}
