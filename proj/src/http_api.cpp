#include "bloombench/http_api.hpp"

#include <atomic>
#include <csignal>

#include <httplib.h>

#include "bloombench/render.hpp"

namespace bloombench {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code()), ojson{{"error", to_string(e.code())}, {"detail", e.detail()}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, e.what());
  }
}

// Wraps a handler so library errors become JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorCode::MalformedRequest, e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, ojson{{"error", "Internal"}, {"detail", e.what()}});
    }
  };
}

std::atomic<httplib::Server*> g_server{nullptr};

extern "C" void handle_stop_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownScene:
    case ErrorCode::UnknownSession:
      return 404;
    case ErrorCode::SessionClosed:
      return 409;
    case ErrorCode::MalformedRequest:
      return 400;
    case ErrorCode::InvalidPrompts:
    case ErrorCode::DegeneratePrompts:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NoCandidates:
    case ErrorCode::BadCandidateIndex:
    case ErrorCode::MalformedMask:
    case ErrorCode::MalformedRle:
    case ErrorCode::RunSumMismatch:
    case ErrorCode::UnknownBand:
      return 422;
    default:
      return 500;
  }
}

void register_routes(httplib::Server& server, CurationService& service) {
  server.Get("/scenes", guarded([&service](const httplib::Request&, httplib::Response& res) {
               ojson out = ojson::array();
               for (const auto& id : service.store().scene_ids()) {
                 std::shared_ptr<const Scene> scene;
                 try {
                   scene = service.store().get(id);
                 } catch (const Error&) {
                   continue;  // corrupt scenes are reported by `bloombench validate`
                 }
                 out.push_back({{"scene_id", scene->scene_id},
                                {"width", scene->width},
                                {"height", scene->height},
                                {"bands", scene->band_names()},
                                {"acquisition_time", scene->acquisition_time}});
               }
               send_json(res, 200, out);
             }));

  server.Get(R"(/scenes/([^/]+)/preview\.png)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto scene = service.store().get(req.matches[1].str());
               const auto png = render_preview_png(*scene, service.config().preview_bands);
               res.set_content(std::string(png.begin(), png.end()), "image/png");
             }));

  server.Get(R"(/scenes/([^/]+)/score\.png)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto scene = service.store().get(req.matches[1].str());
               const auto png = render_score_png(service.engine().scores(*scene));
               res.set_content(std::string(png.begin(), png.end()), "image/png");
             }));

  server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body.contains("scene_id") || !body.at("scene_id").is_string()) {
                  throw Error(ErrorCode::MalformedRequest, "scene_id is required");
                }
                send_json(res, 201, session_to_json(service.create_session(body.at("scene_id").get<std::string>())));
              }));

  server.Get("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               std::optional<SessionState> state;
               if (req.has_param("state")) {
                 const auto v = req.get_param_value("state");
                 if (v == "open") {
                   state = SessionState::open;
                 } else if (v == "decided") {
                   state = SessionState::decided;
                 } else if (!v.empty()) {
                   throw Error(ErrorCode::MalformedRequest, "state must be open or decided");
                 }
               }
               std::optional<std::string> annotator;
               if (req.has_param("annotator") && !req.get_param_value("annotator").empty()) {
                 annotator = req.get_param_value("annotator");
               }
               ojson out = ojson::array();
               for (const auto& s : service.list(state, annotator)) out.push_back(session_to_json(s));
               send_json(res, 200, out);
             }));

  server.Get(R"(/sessions/([^/]+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, session_to_json(service.get(req.matches[1].str())));
             }));

  server.Post(R"(/sessions/([^/]+)/prompts)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body.contains("prompts")) throw Error(ErrorCode::MalformedRequest, "prompts is required");
                const auto prompts = prompts_from_json(body.at("prompts"));
                std::optional<std::size_t> k;
                if (body.contains("k") && !body.at("k").is_null()) {
                  if (!body.at("k").is_number_unsigned()) throw Error(ErrorCode::MalformedRequest, "k must be >= 1");
                  k = body.at("k").get<std::size_t>();
                }
                std::optional<PostProcessConfig> post;
                if (body.contains("post") && !body.at("post").is_null()) {
                  post = post_from_json(body.at("post"), service.config().post);
                }
                send_json(res, 200, candidates_to_json(service.submit_prompts(req.matches[1].str(), prompts, k, post)));
              }));

  server.Post(R"(/sessions/([^/]+)/decision)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto decision = decision_from_json(parse_body(req));
                send_json(res, 200, session_to_json(service.decide(req.matches[1].str(), decision)));
              }));

  server.Post("/export", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                ExportFilter filter;
                if (body.contains("filter") && body.at("filter").is_object()) {
                  const auto& f = body.at("filter");
                  if (f.contains("annotator")) filter.annotator = f.at("annotator").get<std::string>();
                  if (f.contains("from")) filter.from = f.at("from").get<std::string>();
                  if (f.contains("to")) filter.to = f.at("to").get<std::string>();
                }
                send_json(res, 200, manifest_to_json(service.export_dataset(filter)));
              }));
}

int serve(CurationService& service, const std::function<void(int port)>& on_ready) {
  httplib::Server server;
  register_routes(server, service);
  const auto& cfg = service.config();
  int port = cfg.port;
  if (port == 0) {
    port = server.bind_to_any_port(cfg.host);
    if (port < 0) return 1;
  } else if (!server.bind_to_port(cfg.host, port)) {
    return 1;
  }
  g_server.store(&server);
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  if (on_ready) on_ready(port);
  const bool ok = server.listen_after_bind();
  g_server.store(nullptr);
  return ok ? 0 : 1;
}

}  // namespace bloombench
