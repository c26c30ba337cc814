#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "scaffold/common.hpp"

namespace scaffold {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------
class GatewayError : public Error {
 public:
  using Error::Error;
};
class InvalidRequest : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class AuthError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class RateLimited : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class TimeoutError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};
class MalformedResponse : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

// ---------------------------------------------------------------------------
// Request / response
// ---------------------------------------------------------------------------
struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct GenerationParams {
  double temperature = 0.7;
  int max_tokens = 300;
  std::optional<std::int64_t> seed;
  bool operator==(const GenerationParams&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  GenerationParams params;
  std::string model_id;
  bool operator==(const ChatRequest&) const = default;
};

struct ChatResponse {
  std::string content;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  double latency_ms = 0.0;
  int retries = 0;
  bool from_cache = false;
};

inline json to_json(const GenerationParams& p) {
  json j{{"temperature", p.temperature}, {"max_tokens", p.max_tokens}};
  if (p.seed) j["seed"] = *p.seed;
  return j;
}

inline GenerationParams generation_params_from_json(const json& j) {
  GenerationParams p;
  p.temperature = j.value("temperature", p.temperature);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  if (j.contains("seed") && !j["seed"].is_null()) p.seed = j["seed"].get<std::int64_t>();
  if (p.temperature < 0.0) throw InvalidRequest("temperature must be >= 0");
  if (p.max_tokens <= 0) throw InvalidRequest("max_tokens must be > 0");
  return p;
}

inline json to_json(const ChatRequest& r) {
  json msgs = json::array();
  for (const auto& m : r.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model_id", r.model_id}, {"messages", msgs}, {"params", to_json(r.params)}};
}

// Exactly one leading system message, known roles, non-empty contents.
inline void check_request(const ChatRequest& r) {
  if (r.messages.empty()) throw InvalidRequest("request has no messages");
  if (r.messages.front().role != "system") throw InvalidRequest("first message must have role system");
  for (std::size_t i = 0; i < r.messages.size(); ++i) {
    const auto& m = r.messages[i];
    if (i > 0 && m.role == "system") throw InvalidRequest("only the first message may have role system");
    if (m.role != "system" && m.role != "user" && m.role != "assistant")
      throw InvalidRequest("unknown role '" + m.role + "'");
    if (m.content.empty()) throw InvalidRequest("message " + std::to_string(i) + " has empty content");
  }
  if (r.params.temperature < 0.0 || r.params.max_tokens <= 0) throw InvalidRequest("invalid generation params");
}

// Stable content hash of (model_id, messages, params). Cache key and
// per-turn prompt hash.
inline std::uint64_t request_hash(const ChatRequest& r) {
  Fnv1a h;
  h.field(r.model_id);
  h.add_u64(r.messages.size());
  for (const auto& m : r.messages) h.field(m.role).field(m.content);
  h.field(format_g9(r.params.temperature));
  h.add_u64(static_cast<std::uint64_t>(r.params.max_tokens));
  h.add_u64(r.params.seed ? 1 : 0);
  if (r.params.seed) h.add_u64(static_cast<std::uint64_t>(*r.params.seed));
  return h.value();
}

inline int count_words(std::string_view s) {
  int n = 0;
  bool in = false;
  for (char c : s) {
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in) ++n;
    in = !space;
  }
  return n;
}

class Provider {
 public:
  virtual ~Provider() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual std::string describe() const = 0;
};

// ---------------------------------------------------------------------------
// Global concurrent-request limit, shared by every network-backed provider.
// ---------------------------------------------------------------------------
class RequestLimiter {
 public:
  explicit RequestLimiter(int limit) : limit_(limit < 1 ? 1 : limit) {}

  static RequestLimiter& global() {
    static RequestLimiter instance(4);
    return instance;
  }

  void set_limit(int limit) {
    std::lock_guard lock(mu_);
    limit_ = limit < 1 ? 1 : limit;
    cv_.notify_all();
  }
  int limit() const {
    std::lock_guard lock(mu_);
    return limit_;
  }
  int in_flight() const {
    std::lock_guard lock(mu_);
    return active_;
  }

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return active_ < limit_; });
    ++active_;
  }
  void release() {
    std::lock_guard lock(mu_);
    --active_;
    cv_.notify_one();
  }

  class Slot {
   public:
    explicit Slot(RequestLimiter& l) : l_(l) { l_.acquire(); }
    ~Slot() { l_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    RequestLimiter& l_;
  };

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int limit_;
  int active_ = 0;
};

// ---------------------------------------------------------------------------
// Deterministic mock
// ---------------------------------------------------------------------------
enum class MockPersona { tutor, judge, task_writer };

inline std::string to_string(MockPersona p) {
  switch (p) {
    case MockPersona::tutor: return "tutor";
    case MockPersona::judge: return "judge";
    case MockPersona::task_writer: return "task_writer";
  }
  return "tutor";
}

inline std::optional<MockPersona> parse_mock_persona(std::string_view s) {
  if (s == "tutor") return MockPersona::tutor;
  if (s == "judge") return MockPersona::judge;
  if (s == "task_writer" || s == "student") return MockPersona::task_writer;
  return std::nullopt;
}

// Markers the scripted judge looks for in the tutor prompt it is shown.
inline constexpr std::string_view kBoundaryMarker = "Use `scaffolding_recipe.json`";
inline constexpr std::string_view kSchemaMarker = "\"knowledge_levels\"";
inline constexpr std::string_view kSupportLinePrefix = "Support level: ";

namespace detail {

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& options) {
  return options[static_cast<std::size_t>(rng.next() % N)];
}

inline std::string last_user_message(const ChatRequest& r) {
  for (auto it = r.messages.rbegin(); it != r.messages.rend(); ++it) {
    if (it->role == "user") return it->content;
  }
  return {};
}

inline std::string mock_tutor(const ChatRequest& r, Rng& rng) {
  const std::string& system = r.messages.front().content;
  std::string support;
  if (auto pos = system.find(kSupportLinePrefix); pos != std::string::npos) {
    auto start = pos + kSupportLinePrefix.size();
    auto end = system.find_first_of(" .\n", start);
    support = system.substr(start, end == std::string::npos ? std::string::npos : end - start);
  }
  static constexpr std::array<const char*, 4> openers = {"Let's work on this together.", "Good question.",
                                                         "Let's look at this one.", "Okay, let's think about it."};
  static constexpr std::array<const char*, 4> first_steps = {
      "Read the question again and find what it asks", "Write down the numbers or facts you know",
      "Underline the key words in the task", "Think about what the answer should look like"};
  static constexpr std::array<const char*, 4> second_steps = {
      "Pick the rule or idea that fits", "Try one small part first", "Draw a quick picture to help",
      "Match each fact to what it means"};
  static constexpr std::array<const char*, 4> third_steps = {
      "Put the parts together to get your answer", "Check if your answer makes sense",
      "Say your answer in a full sentence", "Compare your answer with a friend's idea"};
  static constexpr std::array<const char*, 4> hints = {
      "You are close, so look at the last step again.", "Try to break the task into two smaller parts.",
      "Think about an example you already know.", "Start with what you are sure about."};
  static constexpr std::array<const char*, 4> praise = {"Nice work.", "That is a strong start.", "Good thinking.",
                                                        "You have the main idea."};
  static constexpr std::array<const char*, 4> stretch = {
      "Can you explain why your method works?", "How would you check your answer?",
      "What would change if the numbers were bigger?", "Can you find another way to solve it?"};
  static constexpr std::array<const char*, 4> checks = {"Does that make sense?", "Can you try the next step?",
                                                        "What do you think comes next?", "Did that help?"};
  static constexpr std::array<const char*, 4> explain = {
      "This kind of task asks you to use what you know.", "Think about the main idea first.",
      "There are a few ways to solve this.", "It helps to go one step at a time."};

  std::string out;
  if (support == "high") {
    out = std::string(pick(rng, openers)) + " Step 1: " + pick(rng, first_steps) + ". Step 2: " +
          pick(rng, second_steps) + ". Step 3: " + pick(rng, third_steps) + ". " + pick(rng, checks);
  } else if (support == "medium") {
    out = std::string(pick(rng, praise)) + " " + pick(rng, hints) + " " + pick(rng, checks);
  } else if (support == "low") {
    out = std::string(pick(rng, praise)) + " " + pick(rng, stretch);
  } else {
    out = std::string(pick(rng, openers)) + " " + pick(rng, explain) + " " + pick(rng, hints) + " " +
          pick(rng, checks);
  }
  return out;
}

// Section of the judge prompt holding the tutor's instructions.
inline std::string judged_prompt_section(const std::string& text) {
  auto start = text.find("<<<PROMPT");
  auto end = text.find("PROMPT>>>");
  if (start == std::string::npos || end == std::string::npos || end < start) return text;
  return text.substr(start, end - start);
}

// Scripted judge: base scores rise with the boundary and schema markers in
// the judged prompt, plus seeded noise of up to one point either way.
inline std::string mock_judge(const ChatRequest& r, Rng& rng) {
  std::string all;
  for (const auto& m : r.messages) {
    if (m.role == "user") {
      all = m.content;
      break;
    }
  }
  const std::string section = judged_prompt_section(all);
  const bool boundary = section.find(kBoundaryMarker) != std::string::npos;
  const bool schema = section.find(kSchemaMarker) != std::string::npos;
  const bool persona = section.find("tutor") != std::string::npos;
  double grade = 3.1 + (boundary ? 0.9 : 0.0) + (persona ? 0.1 : 0.0);
  double scaffolding = 2.6 + (boundary ? 0.5 : 0.0) + (schema ? 1.2 : 0.0) + (persona ? 0.2 : 0.0);
  double adaptivity = 2.8 + (boundary ? 0.6 : 0.0) + (schema ? 0.6 : 0.0) + (persona ? 0.1 : 0.0);
  auto noisy = [&](double base) {
    const double u = rng.uniform() + rng.uniform() - 1.0;  // triangular on (-1, 1)
    const long v = std::lround(base + 1.2 * u);
    return static_cast<int>(v < 1 ? 1 : (v > 5 ? 5 : v));
  };
  json verdict{{"grade", noisy(grade)},
               {"scaffolding", noisy(scaffolding)},
               {"adaptivity", noisy(adaptivity)},
               {"rationale", std::string("Scripted mock verdict") + (boundary ? "; boundary prompt present" : "") +
                                 (schema ? "; control schema present" : "") + "."}};
  return verdict.dump();
}

inline std::string mock_task_writer(const ChatRequest& r, Rng& rng) {
  std::string task = last_user_message(r);
  if (auto pos = task.find("Task:"); pos != std::string::npos) task = std::string(trim(task.substr(pos + 5)));
  static constexpr std::array<const char*, 4> leads = {"Here is a question for you:", "Try this one:",
                                                       "Your challenge:", "Think about this:"};
  return std::string(pick(rng, leads)) + " " + task;
}

}  // namespace detail

// Pure function of (request hash, persona, seed).
inline ChatResponse mock_complete(const ChatRequest& request, MockPersona persona, std::uint64_t seed) {
  check_request(request);
  Rng rng(Fnv1a{}.add_u64(request_hash(request)).field(to_string(persona)).add_u64(seed).value());
  ChatResponse resp;
  switch (persona) {
    case MockPersona::tutor: resp.content = detail::mock_tutor(request, rng); break;
    case MockPersona::judge: resp.content = detail::mock_judge(request, rng); break;
    case MockPersona::task_writer: resp.content = detail::mock_task_writer(request, rng); break;
  }
  for (const auto& m : request.messages) resp.prompt_tokens += count_words(m.content);
  resp.completion_tokens = count_words(resp.content);
  return resp;
}

class MockProvider : public Provider {
 public:
  MockProvider(MockPersona persona, std::uint64_t seed) : persona_(persona), seed_(seed) {}

  ChatResponse complete(const ChatRequest& request) override {
    check_request(request);
    calls_.fetch_add(1);
    return mock_complete(request, persona_, seed_);
  }
  std::string describe() const override { return "mock:" + to_string(persona_); }
  int calls() const { return calls_.load(); }

 private:
  MockPersona persona_;
  std::uint64_t seed_;
  std::atomic<int> calls_{0};
};

// ---------------------------------------------------------------------------
// OpenAI-compatible HTTP provider
// ---------------------------------------------------------------------------
enum class ProviderKind { openai_compatible, local_runtime, mock };

inline std::string to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::openai_compatible: return "openai_compatible";
    case ProviderKind::local_runtime: return "local_runtime";
    case ProviderKind::mock: return "mock";
  }
  return "mock";
}

struct ProviderConfig {
  ProviderKind kind = ProviderKind::mock;
  std::string base_url;
  std::string api_key_env;
  int timeout_ms = 60000;
  int max_retries = 3;
  std::optional<MockPersona> persona;  // mock only
  std::optional<std::string> cache_dir;
};

inline ProviderConfig provider_config_from_json(const json& j) {
  ProviderConfig c;
  const std::string kind = j.value("kind", "mock");
  if (kind == "openai_compatible") c.kind = ProviderKind::openai_compatible;
  else if (kind == "local_runtime") c.kind = ProviderKind::local_runtime;
  else if (kind == "mock") c.kind = ProviderKind::mock;
  else throw InvalidRequest("unknown provider kind '" + kind + "'");
  c.base_url = j.value("base_url", "");
  c.api_key_env = j.value("api_key_env", "");
  c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
  c.max_retries = j.value("max_retries", c.max_retries);
  if (j.contains("persona")) {
    c.persona = parse_mock_persona(j["persona"].get<std::string>());
    if (!c.persona) throw InvalidRequest("unknown mock persona");
  }
  if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
  if (c.kind != ProviderKind::mock && c.base_url.empty()) throw InvalidRequest("HTTP providers require base_url");
  if (c.max_retries < 0) throw InvalidRequest("max_retries must be >= 0");
  return c;
}

// Keys are referenced by environment-variable name only.
inline json to_json(const ProviderConfig& c) {
  json j{{"kind", to_string(c.kind)}};
  if (!c.base_url.empty()) j["base_url"] = c.base_url;
  if (!c.api_key_env.empty()) j["api_key_env"] = c.api_key_env;
  if (c.kind != ProviderKind::mock) {
    j["timeout_ms"] = c.timeout_ms;
    j["max_retries"] = c.max_retries;
  }
  if (c.persona) j["persona"] = to_string(*c.persona);
  if (c.cache_dir) j["cache_dir"] = *c.cache_dir;
  return j;
}

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderConfig config, std::uint64_t jitter_seed = 0,
                        RequestLimiter* limiter = &RequestLimiter::global())
      : config_(std::move(config)), jitter_(jitter_seed), limiter_(limiter) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.base_url, m, url_re)) throw InvalidRequest("bad base_url '" + config_.base_url + "'");
    origin_ = m[1].str();
    path_ = m[2].matched ? m[2].str() : "";
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }

  void set_sleeper(Sleeper s) { sleeper_ = std::move(s); }

  // 500 ms * 2^attempt, +-20% jitter.
  std::chrono::milliseconds backoff(int attempt) {
    std::lock_guard lock(jitter_mu_);
    const double factor = 1.0 + 0.4 * (jitter_.uniform() - 0.5);
    return std::chrono::milliseconds(static_cast<long>(500.0 * static_cast<double>(1L << attempt) * factor));
  }

  std::string describe() const override { return to_string(config_.kind) + ":" + config_.base_url; }

  ChatResponse complete(const ChatRequest& request) override {
    check_request(request);
    json body{{"model", request.model_id},
              {"temperature", request.params.temperature},
              {"max_tokens", request.params.max_tokens}};
    body["messages"] = json::array();
    for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    if (request.params.seed) body["seed"] = *request.params.seed;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
      const char* key = std::getenv(config_.api_key_env.c_str());
      if (!key || !*key) throw AuthError("environment variable " + config_.api_key_env + " is not set");
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const auto start = std::chrono::steady_clock::now();
    int retries = 0;
    for (int attempt = 0;; ++attempt) {
      std::string failure;
      bool rate_limited = false;
      bool timed_out = false;
      {
        RequestLimiter::Slot slot(*limiter_);
        httplib::Client client(origin_);
        const auto t = std::chrono::milliseconds(config_.timeout_ms);
        client.set_connection_timeout(t);
        client.set_read_timeout(t);
        client.set_write_timeout(t);
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
          timed_out = res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
                      res.error() == httplib::Error::ConnectionTimeout;
          failure = "request failed: " + httplib::to_string(res.error());
        } else if (res->status == 401 || res->status == 403) {
          throw AuthError("HTTP " + std::to_string(res->status) + " from " + config_.base_url);
        } else if (res->status == 429) {
          rate_limited = true;
          failure = "HTTP 429 from " + config_.base_url;
        } else if (res->status >= 500) {
          failure = "HTTP " + std::to_string(res->status) + " from " + config_.base_url;
        } else if (res->status < 200 || res->status >= 300) {
          throw GatewayError("HTTP " + std::to_string(res->status) + " from " + config_.base_url);
        } else {
          ChatResponse out = parse_body(res->body);
          out.retries = retries;
          out.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          return out;
        }
      }
      if (attempt >= config_.max_retries) {
        if (rate_limited) throw RateLimited(failure);
        if (timed_out) throw TimeoutError(failure);
        throw GatewayError(failure);
      }
      ++retries;
      sleeper_(backoff(attempt));
    }
  }

  static ChatResponse parse_body(const std::string& body) {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      throw MalformedResponse(std::string("response is not JSON: ") + e.what());
    }
    try {
      ChatResponse out;
      out.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage") && j["usage"].is_object()) {
        out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        out.completion_tokens = j["usage"].value("completion_tokens", 0);
      }
      return out;
    } catch (const json::exception& e) {
      throw MalformedResponse(std::string("unexpected response shape: ") + e.what());
    }
  }

 private:
  ProviderConfig config_;
  std::string origin_;
  std::string path_;
  std::mutex jitter_mu_;
  Rng jitter_;
  RequestLimiter* limiter_;
  Sleeper sleeper_;
};

// ---------------------------------------------------------------------------
// Content-addressed response cache
// ---------------------------------------------------------------------------
class CachedProvider : public Provider {
 public:
  CachedProvider(std::shared_ptr<Provider> delegate, std::filesystem::path dir)
      : delegate_(std::move(delegate)), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  static std::string key(const ChatRequest& r) { return to_hex(request_hash(r)); }
  std::filesystem::path entry_path(const ChatRequest& r) const { return dir_ / (key(r) + ".json"); }

  ChatResponse complete(const ChatRequest& request) override {
    check_request(request);
    const auto k = key(request);
    std::lock_guard lock(stripe(k));
    const auto path = dir_ / (k + ".json");
    if (std::filesystem::exists(path)) {
      if (auto hit = load(path)) {
        hits_.fetch_add(1);
        return *hit;
      }
      warn("cache entry " + path.string() + " is corrupt; refetching");
    }
    misses_.fetch_add(1);
    ChatResponse resp = delegate_->complete(request);
    store(path, request, resp);
    return resp;
  }

  std::string describe() const override { return "cached(" + delegate_->describe() + ")"; }
  int hits() const { return hits_.load(); }
  int misses() const { return misses_.load(); }

  static std::optional<ChatResponse> load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      const json j = json::parse(ss.str());
      const json& r = j.at("response");
      ChatResponse out;
      out.content = r.at("content").get<std::string>();
      out.prompt_tokens = r.at("prompt_tokens").get<int>();
      out.completion_tokens = r.at("completion_tokens").get<int>();
      out.from_cache = true;
      return out;
    } catch (const json::exception&) {
      return std::nullopt;
    }
  }

  static void store(const std::filesystem::path& path, const ChatRequest& request, const ChatResponse& resp) {
    json j{{"request", to_json(request)},
           {"response",
            {{"content", resp.content},
             {"prompt_tokens", resp.prompt_tokens},
             {"completion_tokens", resp.completion_tokens}}}};
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw GatewayError("cannot write cache entry " + tmp.string());
      out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  std::mutex& stripe(const std::string& k) { return stripes_[fnv1a(k) % stripes_.size()]; }

  std::shared_ptr<Provider> delegate_;
  std::filesystem::path dir_;
  std::array<std::mutex, 64> stripes_;
  std::atomic<int> hits_{0};
  std::atomic<int> misses_{0};
};

// Builds the provider for `config`; mock providers use `default_persona`
// unless the config names one.
inline std::shared_ptr<Provider> make_provider(const ProviderConfig& config, MockPersona default_persona,
                                               std::uint64_t seed) {
  std::shared_ptr<Provider> p;
  if (config.kind == ProviderKind::mock) {
    p = std::make_shared<MockProvider>(config.persona.value_or(default_persona), seed);
  } else {
    p = std::make_shared<HttpProvider>(config, derive_seed(seed, "backoff-jitter"));
  }
  if (config.cache_dir) p = std::make_shared<CachedProvider>(p, *config.cache_dir);
  return p;
}

}  // namespace scaffold
