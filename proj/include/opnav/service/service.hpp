#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "opnav/assistant/assistant.hpp"
#include "opnav/assistant/telemetry.hpp"
#include "opnav/knowledge/corpus.hpp"
#include "opnav/knowledge/synonyms.hpp"
#include "opnav/search/index.hpp"

namespace httplib {
class Server;
}

namespace opnav::service {

inline constexpr const char* kApiVersion = "1";

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string corpus_path;
  std::string synonyms_path;
  std::string telemetry_path;
  std::size_t refinement_threshold = kDefaultRefinementThreshold;
  double keyword_boost = kDefaultKeywordBoost;
  std::size_t top_k = 5;
  std::string static_dir;  // optional console assets
};

/// Reads the TOML config; relative paths resolve against the file's directory.
/// Throws Error(ConfigError).
ServiceConfig load_service_config(const std::string& path);
ServiceConfig service_config_from_json(const nlohmann::json& j, const std::string& base_dir = "");

/// Checks paths and ranges. Throws Error(ConfigError) naming the bad field/path.
void check_config(const ServiceConfig& config);

/// Immutable (tree, index, synonyms) triple served to requests.
struct KnowledgeSnapshot {
  ContentTree tree;
  SearchIndex index;
  SynonymTable synonyms;
  Tokenizer tokenizer;
};

/// Loads, validates and indexes. Throws Error with the first violation.
std::shared_ptr<const KnowledgeSnapshot> load_snapshot(const ServiceConfig& config);

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Routing layer: maps requests onto the assistant pipeline and the
/// knowledge resources. Usable without a socket through handle().
class AssistantService {
 public:
  using Clock = std::function<std::int64_t()>;

  /// Fails fast (throws Error) if the config or the corpus is invalid.
  explicit AssistantService(ServiceConfig config, Clock clock = {});
  ~AssistantService();

  AssistantService(const AssistantService&) = delete;
  AssistantService& operator=(const AssistantService&) = delete;

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& query = {});

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  void stop();

  /// Rebuilds from the configured files and swaps atomically; the previous
  /// snapshot stays live if anything fails.
  std::shared_ptr<const KnowledgeSnapshot> reload();

  std::shared_ptr<const KnowledgeSnapshot> snapshot() const;
  const ServiceConfig& config() const noexcept { return config_; }
  TelemetryLog& telemetry() noexcept { return *telemetry_; }

 private:
  struct Session {
    std::mutex mutex;
    SessionState state;
    std::optional<std::int64_t> last_nonce;
    std::string last_question;
    std::string last_response;
  };

  std::shared_ptr<Session> session(const std::string& id);
  std::int64_t now_for(const SessionState& state) const;

  HttpResponse health();
  HttpResponse ask(const std::string& body);
  HttpResponse node(const std::string& id);
  HttpResponse related(const std::string& id, const std::map<std::string, std::string>& query);
  HttpResponse tree();
  HttpResponse session_event(const std::string& id, const std::string& body);
  HttpResponse usage();
  HttpResponse analytics_learning(const std::string& body);
  HttpResponse analytics_mwu(const std::string& body);
  HttpResponse admin_reload();

  ServiceConfig config_;
  Clock clock_;
  AssistantConfig assistant_config_;
  std::unique_ptr<TelemetryLog> telemetry_;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const KnowledgeSnapshot> snapshot_;
  std::mutex reload_mutex_;

  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
};

}  // namespace opnav::service
