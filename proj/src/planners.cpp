#include <cstdlib>
#include <map>
#include <random>
#include <thread>

#include "foon/orchestrator.hpp"

#include "json.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"

namespace foon {

namespace {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Prompt inspection shared by the fixture planners
// ---------------------------------------------------------------------------

std::optional<int> scene_id_from_prompt(const PromptMessages& prompt) {
  for (const PromptMessage& message : prompt) {
    if (message.role != "user") continue;
    const size_t pos = message.content.find(kScenePrefix);
    if (pos == std::string::npos) continue;
    size_t i = pos + kScenePrefix.size();
    std::string digits;
    while (i < message.content.size() && std::isdigit(static_cast<unsigned char>(message.content[i]))) {
      digits += message.content[i++];
    }
    if (!digits.empty()) return std::stoi(digits);
  }
  return std::nullopt;
}

std::optional<std::string> feedback_from_prompt(const PromptMessages& prompt) {
  for (auto it = prompt.rbegin(); it != prompt.rend(); ++it) {
    if (it->role != "user") continue;
    const size_t pos = it->content.rfind(kFeedbackMarker);
    if (pos == std::string::npos) continue;
    return trim(it->content.substr(pos + kFeedbackMarker.size()));
  }
  return std::nullopt;
}

std::optional<std::string> block_after_marker(const PromptMessages& prompt,
                                              std::string_view marker) {
  for (const PromptMessage& message : prompt) {
    if (message.role != "user") continue;
    const size_t pos = message.content.find(marker);
    if (pos == std::string::npos) continue;
    auto raw = extract_first_json(message.content.substr(pos + marker.size()));
    if (raw) return raw.value();
  }
  return std::nullopt;
}

Result<std::map<int, std::vector<std::string>>> parse_fixture(std::string_view fixture_json) {
  const ojson doc = ojson::parse(fixture_json, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("scenes") ||
      !doc["scenes"].is_object()) {
    return Error{ErrorCode::ParseError, "planner fixture needs a 'scenes' object"};
  }
  std::map<int, std::vector<std::string>> scripts;
  for (const auto& [key, value] : doc["scenes"].items()) {
    char* end = nullptr;
    const long id = std::strtol(key.c_str(), &end, 10);
    if (end == key.c_str() || *end != '\0') {
      return Error{ErrorCode::ParseError, "fixture scene key '" + key + "' is not an integer"};
    }
    if (!value.is_array() || value.empty()) {
      return Error{ErrorCode::ParseError,
                   "fixture scene '" + key + "' needs a non-empty response array"};
    }
    std::vector<std::string> rounds;
    for (const auto& entry : value) {
      if (!entry.is_string()) {
        return Error{ErrorCode::ParseError, "fixture scene '" + key + "' responses must be strings"};
      }
      rounds.push_back(entry.get<std::string>());
    }
    scripts.emplace(static_cast<int>(id), std::move(rounds));
  }
  return scripts;
}

class ScriptedPlanner : public Planner {
 public:
  explicit ScriptedPlanner(std::map<int, std::vector<std::string>> scripts)
      : scripts_(std::move(scripts)) {}

  Result<std::string> complete(const PromptMessages& prompt) override {
    auto scene = scene_id_from_prompt(prompt);
    if (!scene) {
      return Error{ErrorCode::PlannerTransport, "prompt carries no scene id"};
    }
    auto it = scripts_.find(*scene);
    if (it == scripts_.end()) {
      return Error{ErrorCode::PlannerTransport,
                   "fixture has no script for scene " + std::to_string(*scene)};
    }
    const size_t round = calls_[*scene]++;
    const auto& rounds = it->second;
    return rounds[std::min(round, rounds.size() - 1)];
  }

 private:
  std::map<int, std::vector<std::string>> scripts_;
  std::map<int, size_t> calls_;
};

// ---------------------------------------------------------------------------
// Correcting planner
// ---------------------------------------------------------------------------

struct ParsedMismatch {
  int step_index = 0;
  std::string subject;
  std::string attribute;
  std::string required;
  std::string actual;
};

// First "Action i '...' infeasible: required S.A = R, but actual = V." line.
std::optional<ParsedMismatch> parse_first_mismatch(const std::string& feedback) {
  std::istringstream stream(feedback);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.rfind("Action ", 0) != 0) continue;
    const size_t marker = line.find("' infeasible: required ");
    if (marker == std::string::npos) continue;

    ParsedMismatch out;
    out.step_index = std::atoi(line.c_str() + 7);

    size_t pos = marker + std::string_view("' infeasible: required ").size();
    const size_t eq = line.find(" = ", pos);
    if (eq == std::string::npos) continue;
    const std::string subject_attr = line.substr(pos, eq - pos);
    const size_t dot = subject_attr.rfind('.');
    if (dot == std::string::npos) continue;
    out.subject = subject_attr.substr(0, dot);
    out.attribute = subject_attr.substr(dot + 1);

    const size_t actual_marker = line.find(", but actual = ", eq);
    if (actual_marker == std::string::npos) continue;
    out.required = line.substr(eq + 3, actual_marker - (eq + 3));
    std::string actual = line.substr(actual_marker + std::string_view(", but actual = ").size());
    if (!actual.empty() && actual.back() == '.') actual.pop_back();
    out.actual = actual;
    return out;
  }
  return std::nullopt;
}

class CorrectingPlanner : public Planner {
 public:
  explicit CorrectingPlanner(std::map<int, std::vector<std::string>> scripts)
      : scripted_(std::move(scripts)) {}

  Result<std::string> complete(const PromptMessages& prompt) override {
    auto scene = scene_id_from_prompt(prompt);
    if (!scene) {
      return Error{ErrorCode::PlannerTransport, "prompt carries no scene id"};
    }
    auto feedback = feedback_from_prompt(prompt);
    auto last = last_response_.find(*scene);
    if (feedback && last != last_response_.end()) {
      std::string repaired = repair(last->second, *feedback);
      last->second = repaired;
      return repaired;
    }
    auto response = scripted_.complete(prompt);
    if (!response) return response;
    last_response_[*scene] = response.value();
    return response;
  }

 private:
  // Applies the first mismatch triple to the diagnosed step: restore the place
  // token to the environment's actual value, swap an occupied hand for the
  // other one, or replace a wrongly named object with the one actually held.
  static std::string repair(const std::string& response, const std::string& feedback) {
    auto mismatch = parse_first_mismatch(feedback);
    if (!mismatch) return response;
    auto parsed = parse_planner_response(response, ResponseKind::ActionPlan);
    if (!parsed) return response;
    auto steps = std::get<ActionPlanResponse>(parsed.value()).steps;
    if (mismatch->step_index < 0 || mismatch->step_index >= static_cast<int>(steps.size())) {
      return response;
    }
    PlanStep& step = steps[mismatch->step_index];

    const auto swap_hand_to = [&](Hand from, Hand to) {
      for (std::string& arg : step.args) {
        auto hand = parse_hand_token(arg);
        if (hand && *hand == from) {
          arg = hand_token(to);
          return true;
        }
      }
      return false;
    };

    if (mismatch->attribute == "place") {
      for (std::string& arg : step.args) {
        auto loc = parse_location(arg);
        if (loc && to_string(*loc) == mismatch->required) {
          arg = mismatch->actual;
          break;
        }
      }
    } else if (mismatch->attribute == "holding" && mismatch->required == "none") {
      const Hand wrong = mismatch->subject == "LeftHand" ? Hand::Left : Hand::Right;
      swap_hand_to(wrong, other_hand(wrong));
    } else if (mismatch->attribute == "holding") {
      // The step wants this hand to hold `required`. If an earlier step of the
      // same plan routed that object through the other hand, follow it there;
      // otherwise the object token itself was wrong and the held object
      // (`actual`) is what the plan meant.
      const Hand named = mismatch->subject == "LeftHand" ? Hand::Left : Hand::Right;
      std::optional<Hand> carrier;
      for (int i = 0; i < mismatch->step_index; ++i) {
        const PlanStep& earlier = steps[static_cast<size_t>(i)];
        bool mentions = false;
        std::optional<Hand> hand;
        for (const std::string& arg : earlier.args) {
          if (arg == mismatch->required) mentions = true;
          if (auto h = parse_hand_token(arg)) hand = *h;
        }
        if (mentions && hand) carrier = *hand;
      }
      if (carrier && *carrier != named) {
        swap_hand_to(named, *carrier);
      } else if (mismatch->actual != "none") {
        for (std::string& arg : step.args) {
          if (arg == mismatch->required) {
            arg = mismatch->actual;
            break;
          }
        }
      }
    }

    ojson out;
    out["plan"] = ojson::array();
    for (const PlanStep& s : steps) out["plan"].push_back(print_plan_line(s));
    return out.dump();
  }

  ScriptedPlanner scripted_;
  std::map<int, std::string> last_response_;
};

// ---------------------------------------------------------------------------
// Faulty planner
// ---------------------------------------------------------------------------

class FaultyPlanner : public Planner {
 public:
  FaultyPlanner(std::map<int, std::vector<std::string>> scripts, double error_rate,
                std::uint64_t seed)
      : scripts_(std::move(scripts)), error_rate_(error_rate), rng_(seed) {
    collect_token_pools();
  }

  Result<std::string> complete(const PromptMessages& prompt) override {
    auto scene = scene_id_from_prompt(prompt);
    if (!scene) {
      return Error{ErrorCode::PlannerTransport, "prompt carries no scene id"};
    }
    auto it = scripts_.find(*scene);
    if (it == scripts_.end()) {
      return Error{ErrorCode::PlannerTransport,
                   "fixture has no script for scene " + std::to_string(*scene)};
    }
    const size_t round = calls_[*scene]++;
    const std::string& base = it->second[std::min(round, it->second.size() - 1)];
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) >= error_rate_) return base;
    return corrupt(base);
  }

 private:
  enum class TokenKind { HandTok, LocationTok, ObjectTok };

  static TokenKind classify(const std::string& token) {
    if (parse_hand_token(token)) return TokenKind::HandTok;
    if (parse_location(token)) return TokenKind::LocationTok;
    return TokenKind::ObjectTok;
  }

  void collect_token_pools() {
    locations_ = {"Right storage", "Left storage", "Workspace"};
    for (const auto& [scene, rounds] : scripts_) {
      for (const auto& response : rounds) {
        auto parsed = parse_planner_response(response, ResponseKind::ActionPlan);
        if (!parsed) continue;
        for (const PlanStep& step : std::get<ActionPlanResponse>(parsed.value()).steps) {
          for (const std::string& arg : step.args) {
            auto& pool = classify(arg) == TokenKind::LocationTok ? locations_ : objects_;
            if (classify(arg) != TokenKind::HandTok &&
                std::find(pool.begin(), pool.end(), arg) == pool.end()) {
              pool.push_back(arg);
            }
          }
        }
      }
    }
  }

  std::string corrupt(const std::string& base) {
    auto parsed = parse_planner_response(base, ResponseKind::ActionPlan);
    if (!parsed) return base;
    auto steps = std::get<ActionPlanResponse>(parsed.value()).steps;
    if (steps.empty()) return base;

    std::uniform_int_distribution<size_t> pick_step(0, steps.size() - 1);
    PlanStep& step = steps[pick_step(rng_)];
    if (!step.args.empty()) {
      std::uniform_int_distribution<size_t> pick_arg(0, step.args.size() - 1);
      std::string& arg = step.args[pick_arg(rng_)];
      switch (classify(arg)) {
        case TokenKind::HandTok: {
          auto hand = parse_hand_token(arg);
          arg = hand_token(other_hand(*hand));
          break;
        }
        case TokenKind::LocationTok:
          arg = pick_other(locations_, arg);
          break;
        case TokenKind::ObjectTok:
          arg = pick_other(objects_, arg);
          break;
      }
    }

    ojson out;
    out["plan"] = ojson::array();
    for (const PlanStep& s : steps) out["plan"].push_back(print_plan_line(s));
    return out.dump();
  }

  std::string pick_other(const std::vector<std::string>& pool, const std::string& current) {
    std::vector<const std::string*> options;
    for (const std::string& candidate : pool) {
      if (candidate != current) options.push_back(&candidate);
    }
    if (options.empty()) return current;
    std::uniform_int_distribution<size_t> pick(0, options.size() - 1);
    return *options[pick(rng_)];
  }

  std::map<int, std::vector<std::string>> scripts_;
  std::map<int, size_t> calls_;
  double error_rate_;
  std::mt19937_64 rng_;
  std::vector<std::string> locations_;
  std::vector<std::string> objects_;
};

// ---------------------------------------------------------------------------
// Oracle planner
// ---------------------------------------------------------------------------

class OraclePlanner : public Planner {
 public:
  OraclePlanner(const MotionLibrary& library, int depth_bound, std::size_t node_cap)
      : library_(library), depth_bound_(depth_bound), node_cap_(node_cap) {}

  Result<std::string> complete(const PromptMessages& prompt) override {
    auto env_block = block_after_marker(prompt, kEnvironmentMarker);
    auto target_block = block_after_marker(prompt, kTargetMarker);
    if (!env_block || !target_block) {
      return Error{ErrorCode::PlannerTransport,
                   "prompt carries no environment/target blocks to search from"};
    }
    auto env = parse_environment(*env_block);
    if (!env) return env.error();
    auto targets = parse_targets(*target_block);
    if (!targets) return targets.error();
    if (targets.value().empty()) {
      return Error{ErrorCode::PlannerTransport, "prompt target block lists no scenes"};
    }

    auto plan = oracle_plan(env.value(), targets.value().front(), library_, depth_bound_,
                            node_cap_);
    if (!plan) return plan.error();

    ojson out;
    out["plan"] = ojson::array();
    if (plan.value()) {
      for (const PlanStep& step : *plan.value()) out["plan"].push_back(print_plan_line(step));
    }
    return out.dump();
  }

 private:
  const MotionLibrary& library_;
  int depth_bound_;
  std::size_t node_cap_;
};

// ---------------------------------------------------------------------------
// Remote planner
// ---------------------------------------------------------------------------

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

std::optional<SplitUrl> split_url(const std::string& url) {
  const size_t scheme = url.find("://");
  if (scheme == std::string::npos) return std::nullopt;
  const size_t path_start = url.find('/', scheme + 3);
  if (path_start == std::string::npos) return SplitUrl{url, "/"};
  return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

class RemotePlanner : public Planner {
 public:
  explicit RemotePlanner(RemoteConfig config) : config_(std::move(config)) {}

  Result<std::string> complete(const PromptMessages& prompt) override {
    auto url = split_url(config_.endpoint);
    if (!url) {
      return Error{ErrorCode::PlannerTransport,
                   "bad planner endpoint '" + config_.endpoint + "'"};
    }

    ojson body;
    body["model"] = config_.model;
    body["messages"] = ojson::array();
    for (const PromptMessage& message : prompt) {
      ojson m;
      m["role"] = message.role;
      if (message.image_refs.empty()) {
        m["content"] = message.content;
      } else {
        // Ferry image references through opaquely, chat-completion style.
        ojson blocks = ojson::array();
        ojson text;
        text["type"] = "text";
        text["text"] = message.content;
        blocks.push_back(std::move(text));
        for (const std::string& ref : message.image_refs) {
          ojson image;
          image["type"] = "image_url";
          image["image_url"] = ojson{{"url", ref}};
          blocks.push_back(std::move(image));
        }
        m["content"] = std::move(blocks);
      }
      body["messages"].push_back(std::move(m));
    }
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < std::max(1, config_.max_attempts); ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(config_.base_delay * (1 << (attempt - 1)));
      }
      httplib::Client client(url->base);
      client.set_connection_timeout(10, 0);
      client.set_read_timeout(120, 0);
      auto res = client.Post(url->path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        return Error{ErrorCode::PlannerTransport,
                     "planner endpoint returned HTTP " + std::to_string(res->status)};
      }
      const ojson doc = ojson::parse(res->body, nullptr, /*allow_exceptions=*/false);
      if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
          doc["choices"].empty() || !doc["choices"][0].contains("message") ||
          !doc["choices"][0]["message"].contains("content") ||
          !doc["choices"][0]["message"]["content"].is_string()) {
        return Error{ErrorCode::PlannerTransport, "planner endpoint returned an unexpected body"};
      }
      return doc["choices"][0]["message"]["content"].get<std::string>();
    }
    return Error{ErrorCode::PlannerTransport,
                 "planner unreachable after " + std::to_string(config_.max_attempts) +
                     " attempts (" + last_error + ")"};
  }

 private:
  RemoteConfig config_;
};

}  // namespace

Result<std::unique_ptr<Planner>> make_scripted_planner(std::string_view fixture_json) {
  auto scripts = parse_fixture(fixture_json);
  if (!scripts) return scripts.error();
  return std::unique_ptr<Planner>(new ScriptedPlanner(std::move(scripts).value()));
}

Result<std::unique_ptr<Planner>> make_correcting_planner(std::string_view fixture_json) {
  auto scripts = parse_fixture(fixture_json);
  if (!scripts) return scripts.error();
  return std::unique_ptr<Planner>(new CorrectingPlanner(std::move(scripts).value()));
}

Result<std::unique_ptr<Planner>> make_faulty_planner(std::string_view fixture_json,
                                                     double error_rate, std::uint64_t seed) {
  if (error_rate < 0.0 || error_rate > 1.0) {
    return Error{ErrorCode::InvariantViolation, "error rate must lie in [0, 1]"};
  }
  auto scripts = parse_fixture(fixture_json);
  if (!scripts) return scripts.error();
  return std::unique_ptr<Planner>(
      new FaultyPlanner(std::move(scripts).value(), error_rate, seed));
}

std::unique_ptr<Planner> make_oracle_planner(const MotionLibrary& library, int depth_bound,
                                             std::size_t node_cap) {
  return std::make_unique<OraclePlanner>(library, depth_bound, node_cap);
}

std::unique_ptr<Planner> make_remote_planner(RemoteConfig config) {
  return std::make_unique<RemotePlanner>(std::move(config));
}

Result<RemoteConfig> remote_config_from_env() {
  RemoteConfig config;
  const char* endpoint = std::getenv("FOON_PLANNER_ENDPOINT");
  const char* model = std::getenv("FOON_PLANNER_MODEL");
  const char* key = std::getenv("FOON_PLANNER_API_KEY");
  if (endpoint == nullptr || *endpoint == '\0') {
    return Error{ErrorCode::PlannerTransport, "FOON_PLANNER_ENDPOINT is not set"};
  }
  if (model == nullptr || *model == '\0') {
    return Error{ErrorCode::PlannerTransport, "FOON_PLANNER_MODEL is not set"};
  }
  config.endpoint = endpoint;
  config.model = model;
  if (key != nullptr) config.api_key = key;
  return config;
}

}  // namespace foon
