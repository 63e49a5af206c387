#include "frameparse/service.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "httplib.h"

#include "frameparse/action.hpp"
#include "frameparse/error.hpp"

namespace frameparse {

namespace fs = std::filesystem;

json to_json(const Frame& f) {
  json forms = json::object();
  if (f.forms.person) forms["person"] = *f.forms.person;
  if (f.forms.number) forms["number"] = std::string(to_string(*f.forms.number));
  if (f.forms.tense) forms["tense"] = *f.forms.tense;
  if (!f.forms.extra.empty()) forms["extra"] = f.forms.extra;
  json subs = json::array();
  for (const auto& s : f.subs) subs.push_back({{"roles", s.roles}, {"child", to_json(s.child)}});
  json out = {{"surface", f.surface},
              {"lex", f.lex},
              {"synt", f.synt.name()},
              {"sem", f.sem ? json(f.sem->name()) : json(nullptr)},
              {"forms", forms},
              {"span", f.span ? json{{"start", f.span->start}, {"end", f.span->end}} : json(nullptr)},
              {"extras", f.extras},
              {"subs", subs}};
  return out;
}

json to_json(const InputItem& item) {
  if (const auto* f = std::get_if<Frame>(&item)) return {{"kind", "frame"}, {"frame", to_json(*f)}};
  const auto& w = std::get<WordUnit>(item);
  json alts = json::array();
  for (const auto& a : w.alternatives) alts.push_back(to_json(a));
  return {{"kind", "word"},
          {"surface", w.surface},
          {"span", {{"start", w.span.start}, {"end", w.span.end}}},
          {"alternatives", alts}};
}

json to_json(const TrainStats& s) {
  json conflicts = json::array();
  for (const auto& [a, b] : s.conflicts) conflicts.push_back({a, b});
  return {{"example_count", s.example_count},
          {"node_count", s.node_count},
          {"depth", s.depth},
          {"training_accuracy", s.training_accuracy},
          {"conflicts", conflicts}};
}

namespace {

ServiceResponse error_response(int status, std::string code, const std::string& message,
                               std::optional<std::size_t> step = std::nullopt) {
  json body = {{"code", std::move(code)}, {"message", message}};
  if (step) body["step"] = *step;
  return {status, body};
}

ServiceResponse error_response(int status, const Error& e) {
  return error_response(status, std::string(to_string(e.code())), e.detail(), e.step());
}

std::string new_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

enum class Entry { Confirmed, Overruled, Unassisted };

}  // namespace

struct TrainingService::Session {
  std::mutex mutex;
  std::string id;
  std::string sentence;
  ParseState initial;
  ParseState state;
  std::vector<std::pair<ParseState, std::string>> history;  // state before, action
  std::vector<Entry> entries;
  std::optional<std::string> proposal;
  std::vector<Decision> trace;
  std::size_t confirmed = 0, overruled = 0, unassisted = 0;
};

TrainingService::TrainingService(ResourceBundle bundle, FeatureSet features, std::vector<GroupSpec> groups,
                                 fs::path corpus_dir, std::optional<Model> model)
    : bundle_(std::move(bundle)),
      features_(std::move(features)),
      groups_(std::move(groups)),
      corpus_dir_(std::move(corpus_dir)) {
  if (model) {
    if (model->features != features_.texts())
      throw Error(ErrorCode::ConfigError, "model was trained on a different feature set");
    model_ = std::make_shared<const Model>(std::move(*model));
  }
}

TrainingService::~TrainingService() = default;

std::shared_ptr<const Model> TrainingService::model() const {
  std::lock_guard lock(model_mutex_);
  return model_;
}

std::shared_ptr<TrainingService::Session> TrainingService::find(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void TrainingService::refresh_proposal(Session& s) const {
  s.proposal.reset();
  s.trace.clear();
  auto m = model();
  if (!m || s.state.finished) return;
  auto c = classify(m->structure, eval_vector(s.state, features_, bundle_));
  s.proposal = c.action;
  s.trace = std::move(c.trace);
}

json TrainingService::view(const Session& s) const {
  json stack = json::array();
  for (const auto& f : s.state.stack) stack.push_back(to_json(f));
  json input = json::array();
  for (const auto& item : s.state.input) input.push_back(to_json(item));
  json history = json::array();
  for (const auto& [_, a] : s.history) history.push_back(a);
  json trace = json::array();
  for (const auto& d : s.trace) {
    json t = {{"stage", d.stage}, {"value", d.value}, {"taken", d.taken}, {"default", d.used_default}};
    if (d.feature) {
      t["feature"] = *d.feature;
      if (*d.feature < features_.size()) t["feature_text"] = features_.texts()[*d.feature];
    }
    trace.push_back(std::move(t));
  }
  json feats = json::array();
  auto values = eval_vector(s.state, features_, bundle_);
  for (std::size_t i = 0; i < values.size(); ++i) feats.push_back({{"text", features_.texts()[i]}, {"value", values[i]}});
  return {{"id", s.id},
          {"sentence", s.sentence},
          {"tokens", s.state.tokens},
          {"stack", stack},
          {"input", input},
          {"finished", s.state.finished},
          {"history", history},
          {"proposal", s.proposal ? json(*s.proposal) : json(nullptr)},
          {"trace", trace},
          {"features", feats},
          {"stats", {{"confirmed", s.confirmed}, {"overruled", s.overruled}, {"unassisted", s.unassisted}}}};
}

ServiceResponse TrainingService::create_session(const json& body) {
  if (!body.is_object() || !body.contains("sentence") || !body["sentence"].is_string())
    return error_response(400, "BAD_REQUEST", "expected {\"sentence\": \"...\"}");
  std::string sentence = body["sentence"];
  auto s = std::make_shared<Session>();
  s->initial = initial_state(sentence, bundle_.lexicon);
  if (s->initial.tokens.empty()) return error_response(400, "BAD_REQUEST", "empty sentence");
  s->sentence = std::move(sentence);
  s->state = s->initial;
  refresh_proposal(*s);
  {
    std::lock_guard lock(sessions_mutex_);
    do s->id = new_id();
    while (sessions_.count(s->id));
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->mutex);
  return {201, view(*s)};
}

ServiceResponse TrainingService::list_sessions() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(sessions_mutex_);
    for (const auto& [_, s] : sessions_) all.push_back(s);
  }
  json out = json::array();
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    out.push_back({{"id", s->id},
                   {"sentence", s->sentence},
                   {"steps", s->history.size()},
                   {"finished", s->state.finished},
                   {"stats", {{"confirmed", s->confirmed}, {"overruled", s->overruled}, {"unassisted", s->unassisted}}}});
  }
  return {200, {{"sessions", out}}};
}

ServiceResponse TrainingService::get_session(const std::string& id) {
  auto s = find(id);
  if (!s) return error_response(404, "NOT_FOUND", "no session " + id);
  std::lock_guard lock(s->mutex);
  return {200, view(*s)};
}

ServiceResponse TrainingService::post_action(const std::string& id, const json& body) {
  auto s = find(id);
  if (!s) return error_response(404, "NOT_FOUND", "no session " + id);
  if (!body.is_object() || !body.contains("action") || !body["action"].is_string())
    return error_response(400, "BAD_REQUEST", "expected {\"action\": \"...\"}");
  std::string text = body["action"];
  std::lock_guard lock(s->mutex);
  bool confirm = sexpr::iequals(text, "CONFIRM");
  if (confirm) {
    if (!s->proposal) return error_response(409, "NO_PROPOSAL", "nothing to confirm");
    text = *s->proposal;
  }
  ParseAction action;
  std::string canonical;
  try {
    action = parse_action(text);
    canonical = canonicalize(action);
    ParseState next = apply_action(s->state, action);
    s->history.emplace_back(std::move(s->state), canonical);
    s->state = std::move(next);
  } catch (const Error& e) {
    return error_response(422, e);
  }
  Entry kind = !s->proposal ? Entry::Unassisted : (*s->proposal == canonical ? Entry::Confirmed : Entry::Overruled);
  s->entries.push_back(kind);
  (kind == Entry::Confirmed ? s->confirmed : kind == Entry::Overruled ? s->overruled : s->unassisted)++;
  refresh_proposal(*s);
  return {200, view(*s)};
}

ServiceResponse TrainingService::undo(const std::string& id) {
  auto s = find(id);
  if (!s) return error_response(404, "NOT_FOUND", "no session " + id);
  std::lock_guard lock(s->mutex);
  if (s->history.empty()) return error_response(409, "EMPTY_HISTORY", "nothing to undo");
  s->state = std::move(s->history.back().first);
  s->history.pop_back();
  Entry kind = s->entries.back();
  s->entries.pop_back();
  (kind == Entry::Confirmed ? s->confirmed : kind == Entry::Overruled ? s->overruled : s->unassisted)--;
  refresh_proposal(*s);
  return {200, view(*s)};
}

ServiceResponse TrainingService::finish(const std::string& id) {
  auto s = find(id);
  if (!s) return error_response(404, "NOT_FOUND", "no session " + id);
  std::unique_lock lock(s->mutex);
  if (!s->state.finished) return error_response(409, "INCOMPLETE_PARSE", "the parse is not DONE yet");
  ActionLog log;
  log.sentence = s->sentence;
  for (const auto& [_, a] : s->history) log.actions.push_back(a);
  log.gold_tree = s->state.stack.back();
  try {
    auto replayed = replay(log, bundle_);
    if (!(replayed.tree == *log.gold_tree))
      return error_response(500, "REPLAY_MISMATCH", "history does not replay to the session tree");
  } catch (const Error& e) {
    return error_response(500, e);
  }

  fs::path path;
  {
    std::lock_guard corpus_lock(corpus_mutex_);
    std::error_code ec;
    fs::create_directories(corpus_dir_, ec);
    int next = 1;
    for (const auto& entry : fs::directory_iterator(corpus_dir_, ec)) {
      if (entry.path().extension() != ".log") continue;
      try {
        next = std::max(next, std::stoi(entry.path().stem().string()) + 1);
      } catch (const std::exception&) {
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "%03d.log", next);
    path = corpus_dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << format_log(log);
    if (!out) return error_response(500, "IO_ERROR", "cannot write " + path.string());
  }
  json body = {{"path", path.string()}, {"file", path.filename().string()}, {"actions", log.actions.size()},
               {"stats", {{"confirmed", s->confirmed}, {"overruled", s->overruled}, {"unassisted", s->unassisted}}}};
  lock.unlock();
  std::lock_guard lock2(sessions_mutex_);
  sessions_.erase(id);
  return {200, body};
}

ServiceResponse TrainingService::retrain(const json& body) {
  Variant variant = Variant::Hybrid;
  if (body.is_object() && body.contains("variant")) {
    if (!body["variant"].is_string()) return error_response(400, "BAD_REQUEST", "variant must be a string");
    try {
      variant = parse_variant(body["variant"].get<std::string>());
    } catch (const Error& e) {
      return error_response(400, e);
    }
  }
  bool expected = false;
  if (!retraining_.compare_exchange_strong(expected, true))
    return error_response(409, "RETRAIN_RUNNING", "a retrain is already running");
  struct Release {
    std::atomic<bool>& flag;
    ~Release() { flag = false; }
  } release{retraining_};
  if (on_retrain_started) on_retrain_started();

  std::vector<ActionLog> logs;
  try {
    std::lock_guard corpus_lock(corpus_mutex_);
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(corpus_dir_, ec))
      if (entry.path().extension() == ".log") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) logs.push_back(load_log(f));
  } catch (const Error& e) {
    return error_response(500, e);
  }
  if (logs.empty()) return error_response(409, "EMPTY_CORPUS", "no logs to train on");
  try {
    auto examples = extract_examples(logs, features_, bundle_);
    std::vector<std::string> warnings;
    auto m = std::make_shared<const Model>(train_model(variant, features_, examples, groups_, &warnings));
    json stats = to_json(m->stats);
    stats["variant"] = std::string(to_string(variant));
    stats["sentences"] = logs.size();
    stats["warnings"] = warnings;
    std::lock_guard lock(model_mutex_);
    model_ = std::move(m);
    return {200, stats};
  } catch (const Error& e) {
    return error_response(422, e);
  }
}

ServiceResponse TrainingService::model_stats() {
  auto m = model();
  if (!m) return {200, {{"loaded", false}}};
  json stats = to_json(m->stats);
  stats["loaded"] = true;
  stats["variant"] = std::string(to_string(m->variant));
  return {200, stats};
}

ServiceResponse TrainingService::corpus() {
  std::lock_guard corpus_lock(corpus_mutex_);
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(corpus_dir_, ec))
    if (entry.path().extension() == ".log") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  json logs = json::array();
  for (const auto& f : files) {
    json item = {{"file", f.filename().string()}};
    try {
      auto log = load_log(f);
      item["sentence"] = log.sentence;
      item["actions"] = log.actions.size();
    } catch (const Error& e) {
      item["error"] = e.what();
    }
    logs.push_back(std::move(item));
  }
  return {200, {{"logs", logs}}};
}

ServiceResponse TrainingService::handle(std::string_view method, std::string_view path, std::string_view body_text) {
  json body = json::object();
  if (method == "POST" && !body_text.empty()) {
    body = json::parse(body_text, nullptr, false);
    if (body.is_discarded()) return error_response(400, "BAD_REQUEST", "body is not JSON");
  }
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string_view::npos) next = path.size();
    if (next > pos) parts.emplace_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  auto is = [&](std::initializer_list<std::string_view> want) {
    if (parts.size() != want.size()) return false;
    std::size_t i = 0;
    for (auto w : want) {
      if (w != "*" && parts[i] != w) return false;
      ++i;
    }
    return true;
  };
  if (method == "POST" && is({"sessions"})) return create_session(body);
  if (method == "GET" && is({"sessions"})) return list_sessions();
  if (method == "GET" && is({"sessions", "*"})) return get_session(parts[1]);
  if (method == "POST" && is({"sessions", "*", "actions"})) return post_action(parts[1], body);
  if (method == "POST" && is({"sessions", "*", "undo"})) return undo(parts[1]);
  if (method == "POST" && is({"sessions", "*", "finish"})) return finish(parts[1]);
  if (method == "POST" && is({"retrain"})) return retrain(body);
  if (method == "GET" && is({"model", "stats"})) return model_stats();
  if (method == "GET" && is({"corpus"})) return corpus();
  return error_response(404, "NOT_FOUND", "no route for " + std::string(method) + " " + std::string(path));
}

struct HttpFrontend::Impl {
  explicit Impl(TrainingService& s) : service(s) {}
  TrainingService& service;
  httplib::Server server;
};

HttpFrontend::HttpFrontend(TrainingService& service) : impl_(std::make_unique<Impl>(service)) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    auto r = impl_->service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->server.Get(".*", route);
  impl_->server.Post(".*", route);
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpFrontend::listen() { return impl_->server.listen_after_bind(); }

void HttpFrontend::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace frameparse
