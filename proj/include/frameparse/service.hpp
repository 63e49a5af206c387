#pragma once

// Interactive acquisition sessions over HTTP+JSON. TrainingService holds all
// behaviour and answers (status, json) pairs; HttpFrontend only routes.
//
//   POST /sessions {sentence}          GET /sessions          GET /sessions/{id}
//   POST /sessions/{id}/actions {action | "CONFIRM"}
//   POST /sessions/{id}/undo           POST /sessions/{id}/finish
//   POST /retrain {variant}            GET /model/stats       GET /corpus

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "frameparse/engine.hpp"
#include "frameparse/learner.hpp"

namespace frameparse {

using json = nlohmann::json;

json to_json(const Frame& f);
json to_json(const InputItem& item);
json to_json(const TrainStats& s);

struct ServiceResponse {
  int status = 200;
  json body;
};

class TrainingService {
 public:
  TrainingService(ResourceBundle bundle, FeatureSet features, std::vector<GroupSpec> groups,
                  std::filesystem::path corpus_dir, std::optional<Model> model = std::nullopt);
  ~TrainingService();

  ServiceResponse create_session(const json& body);
  ServiceResponse list_sessions();
  ServiceResponse get_session(const std::string& id);
  ServiceResponse post_action(const std::string& id, const json& body);
  ServiceResponse undo(const std::string& id);
  ServiceResponse finish(const std::string& id);
  ServiceResponse retrain(const json& body);
  ServiceResponse model_stats();
  ServiceResponse corpus();

  // Routes a raw request; malformed JSON bodies yield 400.
  ServiceResponse handle(std::string_view method, std::string_view path, std::string_view body);

  // Called once a retrain has claimed the training slot, before any work.
  std::function<void()> on_retrain_started;

  std::shared_ptr<const Model> model() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id);
  json view(const Session& s) const;
  void refresh_proposal(Session& s) const;

  ResourceBundle bundle_;
  FeatureSet features_;
  std::vector<GroupSpec> groups_;
  std::filesystem::path corpus_dir_;

  mutable std::mutex model_mutex_;
  std::shared_ptr<const Model> model_;
  std::atomic<bool> retraining_{false};

  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex corpus_mutex_;
};

// Blocking HTTP server around a TrainingService.
class HttpFrontend {
 public:
  explicit HttpFrontend(TrainingService& service);
  ~HttpFrontend();

  // Binds (port 0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace frameparse
