#include "opnav/service/service.hpp"

#include <chrono>
#include <filesystem>

#include <httplib.h>

#include "opnav/analytics/comparison.hpp"
#include "opnav/analytics/mann_whitney.hpp"
#include "opnav/config/toml.hpp"
#include "opnav/error.hpp"
#include "opnav/service/json_codec.hpp"

namespace opnav::service {

namespace fs = std::filesystem;
using codec::Json;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

HttpResponse json_response(int status, const Json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, const std::string& code, const std::string& message,
                            const std::string& detail = "") {
  Json j;
  j["error"] = {{"code", code}, {"message", message}, {"detail", detail}};
  return json_response(status, j);
}

HttpResponse from_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::UnknownNode: return error_response(404, "not_found", e.what(), std::string(to_string(e.code())));
    case ErrorCode::SessionEnded:
    case ErrorCode::IllegalTransition:
    case ErrorCode::InvalidTimestamp: return error_response(409, "conflict", e.what(), std::string(to_string(e.code())));
    case ErrorCode::StorageFailure:
    case ErrorCode::IoError:
    case ErrorCode::ConfigError: return error_response(500, "internal", e.what(), std::string(to_string(e.code())));
    default: return error_response(400, "bad_request", e.what(), std::string(to_string(e.code())));
  }
}

std::optional<Json> parse_body(const std::string& body) {
  try {
    auto j = Json::parse(body);
    if (j.is_object()) return j;
  } catch (const nlohmann::json::exception&) {
  }
  return std::nullopt;
}

std::int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::vector<double> number_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ServiceConfig service_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  ServiceConfig c;
  try {
    c.listen_address = j.value("listen_address", c.listen_address);
    c.port = j.value("port", c.port);
    c.corpus_path = resolve(base_dir, j.value("corpus", std::string()));
    c.synonyms_path = resolve(base_dir, j.value("synonyms", std::string()));
    c.telemetry_path = resolve(base_dir, j.value("telemetry", std::string()));
    c.static_dir = resolve(base_dir, j.value("static_dir", std::string()));
    c.keyword_boost = j.value("keyword_boost", c.keyword_boost);
    auto threshold = j.value("refinement_threshold", static_cast<long long>(c.refinement_threshold));
    auto top_k = j.value("top_k", static_cast<long long>(c.top_k));
    if (threshold < 1 || top_k < 1) throw Error(ErrorCode::ConfigError, "refinement_threshold and top_k must be >= 1");
    c.refinement_threshold = static_cast<std::size_t>(threshold);
    c.top_k = static_cast<std::size_t>(top_k);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config type error: ") + e.what());
  }
  return c;
}

ServiceConfig load_service_config(const std::string& path) {
  auto j = config::load_toml(path);
  auto base = fs::path(path).parent_path().string();
  return service_config_from_json(j, base);
}

void check_config(const ServiceConfig& c) {
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::ConfigError, "port out of range: " + std::to_string(c.port));
  if (c.corpus_path.empty()) throw Error(ErrorCode::ConfigError, "config key 'corpus' is required");
  if (!fs::is_regular_file(c.corpus_path)) throw Error(ErrorCode::ConfigError, "corpus file not found: " + c.corpus_path);
  if (!c.synonyms_path.empty() && !fs::is_regular_file(c.synonyms_path)) {
    throw Error(ErrorCode::ConfigError, "synonyms file not found: " + c.synonyms_path);
  }
  if (!c.telemetry_path.empty()) {
    auto dir = fs::path(c.telemetry_path).parent_path();
    if (!dir.empty() && !fs::is_directory(dir)) {
      throw Error(ErrorCode::ConfigError, "telemetry directory not found: " + dir.string());
    }
  }
  if (!c.static_dir.empty() && !fs::is_directory(c.static_dir)) {
    throw Error(ErrorCode::ConfigError, "static assets directory not found: " + c.static_dir);
  }
  if (!(c.keyword_boost >= 1.0)) throw Error(ErrorCode::ConfigError, "keyword_boost must be >= 1");
}

std::shared_ptr<const KnowledgeSnapshot> load_snapshot(const ServiceConfig& config) {
  auto tree = load_corpus(config.corpus_path);
  auto violations = validate(tree);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::ConfigError, "corpus validation failed: " + v.rule + " at '" + v.node_id + "': " + v.detail);
  }
  SynonymTable synonyms;
  if (!config.synonyms_path.empty()) synonyms = load_synonyms(config.synonyms_path);
  Tokenizer tokenizer;
  auto index = build_index(tree, config.keyword_boost, tokenizer);
  return std::make_shared<const KnowledgeSnapshot>(
      KnowledgeSnapshot{std::move(tree), std::move(index), std::move(synonyms), std::move(tokenizer)});
}

AssistantService::AssistantService(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(clock ? std::move(clock) : Clock(wall_clock_ms)) {
  check_config(config_);
  assistant_config_.refinement_threshold = config_.refinement_threshold;
  assistant_config_.max_alternates = config_.top_k;
  assistant_config_.max_suggestions = config_.top_k;
  snapshot_ = load_snapshot(config_);
  telemetry_ = config_.telemetry_path.empty() ? std::make_unique<TelemetryLog>()
                                              : std::make_unique<TelemetryLog>(config_.telemetry_path);
}

AssistantService::~AssistantService() { stop(); }

std::shared_ptr<const KnowledgeSnapshot> AssistantService::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

std::shared_ptr<const KnowledgeSnapshot> AssistantService::reload() {
  std::lock_guard reload_lock(reload_mutex_);
  auto fresh = load_snapshot(config_);
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = fresh;
  return fresh;
}

std::shared_ptr<AssistantService::Session> AssistantService::session(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto& slot = sessions_[id];
  if (!slot) {
    slot = std::make_shared<Session>();
    slot->state.session_id = id;
  }
  return slot;
}

std::int64_t AssistantService::now_for(const SessionState& state) const {
  auto now = clock_();
  if (!state.history.empty()) now = std::max(now, state.history.back().timestamp_ms);
  return now;
}

HttpResponse AssistantService::handle(const std::string& method, const std::string& path, const std::string& body,
                                      const std::map<std::string, std::string>& query) {
  try {
    std::vector<std::string> parts;
    for (std::size_t pos = 1; pos <= path.size();) {
      auto next = path.find('/', pos);
      if (next == std::string::npos) next = path.size();
      if (next > pos) parts.push_back(path.substr(pos, next - pos));
      pos = next + 1;
    }
    const auto n = parts.size();
    if (method == "GET") {
      if (n == 1 && parts[0] == "health") return health();
      if (n == 1 && parts[0] == "tree") return tree();
      if (n == 2 && parts[0] == "nodes") return node(parts[1]);
      if (n == 3 && parts[0] == "nodes" && parts[2] == "related") return related(parts[1], query);
      if (n == 2 && parts[0] == "reports" && parts[1] == "usage") return usage();
    } else if (method == "POST") {
      if (n == 1 && parts[0] == "ask") return ask(body);
      if (n == 3 && parts[0] == "sessions" && parts[2] == "events") return session_event(parts[1], body);
      if (n == 2 && parts[0] == "analytics" && parts[1] == "learning") return analytics_learning(body);
      if (n == 2 && parts[0] == "analytics" && parts[1] == "mwu") return analytics_mwu(body);
      if (n == 2 && parts[0] == "admin" && parts[1] == "reload") return admin_reload();
    }
    return error_response(404, "not_found", "no route for " + method + " " + path);
  } catch (const Error& e) {
    return from_error(e);
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

HttpResponse AssistantService::health() {
  auto snap = snapshot();
  Json j;
  j["status"] = "ok";
  j["api_version"] = kApiVersion;
  j["corpus_version"] = snap->tree.version();
  j["doc_count"] = snap->index.doc_count;
  return json_response(200, j);
}

HttpResponse AssistantService::ask(const std::string& body) {
  auto req = parse_body(body);
  if (!req) return error_response(400, "bad_request", "request body must be a JSON object");
  if (!req->contains("session_id") || !(*req)["session_id"].is_string() || (*req)["session_id"].get<std::string>().empty()) {
    return error_response(400, "bad_request", "session_id is required");
  }
  if (!req->contains("question") || !(*req)["question"].is_string()) {
    return error_response(400, "bad_request", "question is required", "EmptyQuestion");
  }
  const auto session_id = (*req)["session_id"].get<std::string>();
  const auto question = (*req)["question"].get<std::string>();
  std::optional<std::int64_t> nonce;
  if (req->contains("nonce")) {
    if (!(*req)["nonce"].is_number_integer()) return error_response(400, "bad_request", "nonce must be an integer");
    nonce = (*req)["nonce"].get<std::int64_t>();
  }

  auto slot = session(session_id);
  std::lock_guard lock(slot->mutex);
  if (nonce && slot->last_nonce) {
    if (*nonce == *slot->last_nonce && question == slot->last_question) return {200, "application/json", slot->last_response};
    if (*nonce <= *slot->last_nonce) {
      return error_response(409, "conflict", "stale nonce " + std::to_string(*nonce), "StaleNonce");
    }
  }

  auto snap = snapshot();
  KnowledgeBase kb{snap->tree, snap->index, snap->synonyms, snap->tokenizer};
  const auto before = slot->state.history.size();
  auto [answer, next] = answer_question(slot->state, question, kb, assistant_config_, now_for(slot->state));
  for (auto i = before; i < next.history.size(); ++i) telemetry_->record(next.history[i]);
  slot->state = std::move(next);

  Json j = codec::to_json(answer);
  j["session_id"] = session_id;
  j["session_state"] = std::string(to_string(slot->state.phase));
  j["corpus_version"] = snap->tree.version();
  auto response = json_response(200, j);
  if (nonce) {
    slot->last_nonce = nonce;
    slot->last_question = question;
    slot->last_response = response.body;
  }
  return response;
}

HttpResponse AssistantService::node(const std::string& id) {
  auto snap = snapshot();
  return json_response(200, codec::node_to_json(snap->tree, snap->tree.at(id)));
}

HttpResponse AssistantService::related(const std::string& id, const std::map<std::string, std::string>& query) {
  std::size_t k = config_.top_k;
  if (auto it = query.find("k"); it != query.end()) {
    try {
      std::size_t used = 0;
      long v = std::stol(it->second, &used);
      if (used != it->second.size() || v < 1) throw std::invalid_argument("k");
      k = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      return error_response(400, "bad_request", "k must be a positive integer");
    }
  }
  auto snap = snapshot();
  Json j = Json::array();
  for (const auto& r : related_resources(snap->tree, id, k, assistant_config_.jaccard_threshold)) {
    j.push_back(codec::to_json(r));
  }
  return json_response(200, j);
}

HttpResponse AssistantService::tree() { return json_response(200, codec::tree_skeleton(snapshot()->tree)); }

HttpResponse AssistantService::session_event(const std::string& id, const std::string& body) {
  auto req = parse_body(body);
  if (!req || !req->contains("kind") || !(*req)["kind"].is_string()) {
    return error_response(400, "bad_request", "body must be {kind, payload}");
  }
  auto kind = parse_event_kind((*req)["kind"].get<std::string>());
  if (!kind || (*kind != EventKind::OpenContent && *kind != EventKind::Back && *kind != EventKind::EndSession)) {
    return error_response(400, "bad_request", "clients may send OpenContent, Back or EndSession");
  }
  std::string payload = req->value("payload", std::string());
  if (*kind == EventKind::OpenContent) snapshot()->tree.at(payload);

  auto slot = session(id);
  std::lock_guard lock(slot->mutex);
  InteractionEvent event{now_for(slot->state), id, *kind, payload};
  check_payload(event);
  auto next = transition(slot->state, event);
  telemetry_->record(event);
  slot->state = std::move(next);

  Json j;
  j["session_id"] = id;
  j["session_state"] = std::string(to_string(slot->state.phase));
  j["current_node"] = slot->state.current_node ? Json(*slot->state.current_node) : Json(nullptr);
  return json_response(200, j);
}

HttpResponse AssistantService::usage() {
  return json_response(200, codec::to_json(usage_summary(telemetry_->events(), snapshot()->tree)));
}

HttpResponse AssistantService::analytics_learning(const std::string& body) {
  auto data = analytics::parse_operator_csv(body);
  return json_response(200, codec::learning_summary(data, analytics::default_levels()));
}

HttpResponse AssistantService::analytics_mwu(const std::string& body) {
  auto req = parse_body(body);
  if (!req) return error_response(400, "bad_request", "request body must be a JSON object");
  auto a = number_array(*req, "a");
  auto b = number_array(*req, "b");
  double alpha = 0.05;
  if (req->contains("alpha")) {
    if (!(*req)["alpha"].is_number()) return error_response(400, "bad_request", "alpha must be a number");
    alpha = (*req)["alpha"].get<double>();
  }
  auto method = stats::parse_mwu_method(req->value("method", std::string("normal")));
  if (!method) return error_response(400, "bad_request", "method must be 'normal' or 'exact'");
  return json_response(200, codec::to_json(stats::mann_whitney(a, b, alpha, *method)));
}

HttpResponse AssistantService::admin_reload() {
  try {
    auto snap = reload();
    Json j;
    j["status"] = "reloaded";
    j["corpus_version"] = snap->tree.version();
    j["doc_count"] = snap->index.doc_count;
    return json_response(200, j);
  } catch (const Error& e) {
    return error_response(409, "conflict", std::string("reload rejected, previous corpus kept: ") + e.what(),
                          std::string(to_string(e.code())));
  }
}

int AssistantService::start() {
  if (server_) return -1;
  server_ = std::make_unique<httplib::Server>();
  if (!config_.static_dir.empty()) server_->set_mount_point("/console", config_.static_dir);
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query(req.params.begin(), req.params.end());
    auto out = handle(req.method, req.path, req.body, query);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->Get(".*", route);
  server_->Post(".*", route);

  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.listen_address);
  } else if (!server_->bind_to_port(config_.listen_address, port)) {
    port = -1;
  }
  if (port < 0) {
    server_.reset();
    throw Error(ErrorCode::IoError, "cannot bind " + config_.listen_address + ":" + std::to_string(config_.port));
  }
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void AssistantService::stop() {
  if (!server_) return;
  server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  server_.reset();
}

}  // namespace opnav::service
