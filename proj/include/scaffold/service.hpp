#pragma once

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "scaffold/gateway.hpp"
#include "scaffold/prompt.hpp"
#include "scaffold/recipe.hpp"
#include "scaffold/scenario.hpp"
#include "scaffold/session.hpp"

namespace scaffold {

using nlohmann::json;

struct ServiceOptions {
  std::size_t max_body_bytes = 1 << 20;
  std::chrono::seconds idle_ttl{30 * 60};
  std::string cors_origin = "*";
  // Used when a create request names no provider.
  ProviderConfig default_provider;
  std::string default_model = "mock-tutor";
};

class Service {
 public:
  explicit Service(ServiceOptions opts = {}) : opts_(std::move(opts)) { routes(); }

  httplib::Server& server() { return server_; }

  // Binds and returns the port; port 0 picks an ephemeral one.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  std::size_t session_count() {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
  }

  // Drops sessions idle for longer than the configured TTL.
  std::size_t evict_idle(std::chrono::steady_clock::time_point now = std::chrono::steady_clock::now()) {
    std::lock_guard lock(registry_mutex_);
    std::size_t dropped = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (now - it->second->last_used.load() > opts_.idle_ttl) {
        it = sessions_.erase(it);
        ++dropped;
      } else {
        ++it;
      }
    }
    return dropped;
  }

 private:
  struct Entry {
    std::mutex mutex;
    SessionState state;
    SessionContext ctx;
    std::atomic<std::chrono::steady_clock::time_point> last_used{std::chrono::steady_clock::now()};
  };

  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                         const std::string& path) {
    send_json(res, status, {{"code", code}, {"message", message}, {"path", path}});
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return nullptr;
    it->second->last_used = std::chrono::steady_clock::now();
    return it->second;
  }

  std::string new_session_id() {
    std::lock_guard lock(registry_mutex_);
    const auto now = std::chrono::system_clock::now().time_since_epoch().count();
    Fnv1a h;
    h.add_u64(++counter_).add_u64(static_cast<std::uint64_t>(now)).add_u64(reinterpret_cast<std::uintptr_t>(this));
    return "s-" + to_hex(h.value());
  }

  void routes() {
    server_.set_payload_max_length(opts_.max_body_bytes);
    server_.set_default_headers({{"Access-Control-Allow-Origin", opts_.cors_origin},
                                 {"Access-Control-Allow-Headers", "Content-Type"},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server_.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
      evict_idle();
      return httplib::Server::HandlerResponse::Unhandled;
    });
    server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server_.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      const std::string code = res.status == 413 ? "payload_too_large" : (res.status == 404 ? "not_found" : "error");
      send_error(res, res.status, code, httplib::status_message(res.status), req.path);
    });

    server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    server_.Post("/api/recipes/validate", [](const httplib::Request& req, httplib::Response& res) {
      const auto check = check_recipe_document(req.body);
      if (check.syntax_failure) {
        const auto& f = check.report.errors.front();
        send_error(res, 400, f.code, f.message, f.path);
        return;
      }
      send_json(res, 200, to_json(check.report));
    });

    server_.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) { create(req, res); });

    server_.Post(R"(/api/sessions/([^/]+)/turns)", [this](const httplib::Request& req, httplib::Response& res) {
      turn(req, res);
    });

    server_.Post(R"(/api/sessions/([^/]+)/close)", [this](const httplib::Request& req, httplib::Response& res) {
      auto e = find(req.matches[1]);
      if (!e) return send_error(res, 404, "not_found", "unknown session", req.path);
      std::lock_guard lock(e->mutex);
      e->state = close_session(e->state);
      send_json(res, 200, to_json(e->state));
    });

    server_.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto e = find(req.matches[1]);
      if (!e) return send_error(res, 404, "not_found", "unknown session", req.path);
      std::lock_guard lock(e->mutex);
      send_json(res, 200, to_json(e->state));
    });

    server_.Get(R"(/api/sessions/([^/]+)/transcript)", [this](const httplib::Request& req, httplib::Response& res) {
      auto e = find(req.matches[1]);
      if (!e) return send_error(res, 404, "not_found", "unknown session", req.path);
      std::lock_guard lock(e->mutex);
      res.status = 200;
      res.set_content(export_transcript_jsonl(e->state), "application/x-ndjson");
    });
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, "syntax_error", e.what(), "");
    }
    if (!body.is_object()) return send_error(res, 400, "schema_error", "body must be an object", "");

    // Recipe: inline document or the default.
    std::shared_ptr<const ScaffoldingRecipe> recipe;
    if (body.contains("recipe")) {
      const auto check = check_recipe_document(body["recipe"].dump());
      if (!check.report.ok()) {
        const auto& f = check.report.errors.front();
        return send_error(res, 422, f.code, f.message, "/recipe" + f.path);
      }
      recipe = std::make_shared<const ScaffoldingRecipe>(*check.recipe);
    } else {
      recipe = std::make_shared<const ScaffoldingRecipe>(default_recipe());
    }

    LearnerProfile profile;
    PromptCondition condition;
    std::string task_type;
    try {
      const auto& p = body.at("profile");
      profile.grade = p.at("grade").get<int>();
      profile.subject = p.at("subject").get<std::string>();
      profile.band = p.at("band").get<std::string>();
      profile.profile_id = p.value("profile_id", "live");
      condition = parse_condition(body.value("condition", std::string("scaffolded/full")));
      task_type = body.value("task_type", recipe->task_types.empty() ? std::string() : recipe->task_types.begin()->first);
    } catch (const json::exception& e) {
      return send_error(res, 422, "invalid_profile", e.what(), "/profile");
    } catch (const UnknownCondition& e) {
      return send_error(res, 422, "unknown_condition", e.what(), "/condition");
    }

    Scenario sc;
    sc.scenario_id = "live";
    sc.subject = profile.subject;
    sc.grade = profile.grade;
    sc.band = profile.band;
    sc.task_type = task_type;
    sc.seed = derive_seed(0, profile.subject + "/" + task_type);
    if (body.contains("task_text") && body["task_text"].is_string()) {
      sc.task_text = body["task_text"].get<std::string>();
    } else {
      const auto candidates = default_template_bank().matching(profile.subject, task_type);
      if (!candidates.empty()) {
        Rng rng(sc.seed);
        sc.template_id = candidates.front()->id;
        sc.task_text = detail::instantiate(*candidates.front(), profile.grade, rng);
      } else {
        sc.task_text = "Let's work on a " + profile.subject + " " + task_type + " task together.";
      }
    }

    SessionContext ctx;
    ctx.recipe = recipe;
    ctx.model_id = body.value("model_id", opts_.default_model);
    try {
      const auto cfg = body.contains("provider") ? provider_config_from_json(body["provider"]) : opts_.default_provider;
      const char* key = cfg.api_key_env.empty() ? "" : std::getenv(cfg.api_key_env.c_str());
      if (cfg.kind != ProviderKind::mock && !cfg.api_key_env.empty() && (!key || !*key))
        throw AuthError("environment variable " + cfg.api_key_env + " is not set");
      ctx.provider = make_provider(cfg, MockPersona::tutor, 0);
    } catch (const GatewayError& e) {
      return send_error(res, 502, "provider_unavailable", e.what(), "/provider");
    }

    SessionState state;
    try {
      state = start_session(profile, condition, sc, ctx, new_session_id());
    } catch (const InvalidProfile& e) {
      return send_error(res, 422, "invalid_profile", e.what(), "/profile/" + e.field());
    } catch (const RecipeInvalid& e) {
      return send_error(res, 422, "recipe_invalid", e.what(), "/recipe");
    }

    auto entry = std::make_shared<Entry>();
    entry->state = state;
    entry->ctx = ctx;
    {
      std::lock_guard lock(registry_mutex_);
      sessions_[state.session_id] = entry;
    }
    json out = to_json(state);
    send_json(res, 200, out);
  }

  void turn(const httplib::Request& req, httplib::Response& res) {
    auto e = find(req.matches[1]);
    if (!e) return send_error(res, 404, "not_found", "unknown session", req.path);
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& ex) {
      return send_error(res, 400, "syntax_error", ex.what(), "");
    }
    std::string utterance;
    std::optional<bool> correctness;
    try {
      utterance = body.at("utterance").get<std::string>();
      if (body.contains("correctness") && !body["correctness"].is_null()) correctness = body["correctness"].get<bool>();
    } catch (const json::exception& ex) {
      return send_error(res, 422, "invalid_turn", ex.what(), "/utterance");
    }
    std::lock_guard lock(e->mutex);
    try {
      auto result = next_turn(e->state, utterance, correctness, e->ctx);
      e->state = std::move(result.state);
      send_json(res, 200,
                {{"session_id", e->state.session_id},
                 {"tutor_message", result.tutor.text},
                 {"follow_up", result.tutor.follow_up ? json(to_string(*result.tutor.follow_up)) : json(nullptr)},
                 {"fk_grade", result.tutor.fk_grade ? json(*result.tutor.fk_grade) : json(nullptr)},
                 {"fuzzy_state", fuzzy_state_json(e->state)},
                 {"turn", to_json(result.tutor)}});
    } catch (const SessionClosed& ex) {
      send_error(res, 409, "session_closed", ex.what(), req.path);
    } catch (const GatewayError& ex) {
      send_error(res, 502, "gateway_error", ex.what(), req.path);
    } catch (const Error& ex) {
      send_error(res, 422, "invalid_turn", ex.what(), req.path);
    }
  }

  ServiceOptions opts_;
  httplib::Server server_;
  std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace scaffold
