#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "bloombench/codec.hpp"
#include "bloombench/http_api.hpp"
#include "bloombench/mask_io.hpp"
#include "curation_fixture.hpp"

using namespace bloombench;
using namespace bloombench::testing;
using nlohmann::json;

namespace {

class HttpApi : public ::testing::Test {
 protected:
  void SetUp() override {
    fx = std::make_unique<CurationFixture>(2, 32);
    fx->write_labels("scene_id,severity_level\nscene0,4\n");
    service = std::make_unique<CurationService>(fx->cfg);
    register_routes(server, *service);
    port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
  void TearDown() override {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  json post(const std::string& path, const json& body, int expect) {
    auto res = client->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }
  json get(const std::string& path, int expect) {
    auto res = client->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }

  std::unique_ptr<CurationFixture> fx;
  std::unique_ptr<CurationService> service;
  httplib::Server server;
  int port = 0;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

}  // namespace

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::UnknownScene), 404);
  EXPECT_EQ(http_status(ErrorCode::UnknownSession), 404);
  EXPECT_EQ(http_status(ErrorCode::SessionClosed), 409);
  EXPECT_EQ(http_status(ErrorCode::MalformedRequest), 400);
  EXPECT_EQ(http_status(ErrorCode::InvalidPrompts), 422);
  EXPECT_EQ(http_status(ErrorCode::BadCandidateIndex), 422);
  EXPECT_EQ(http_status(ErrorCode::IoError), 500);
}

TEST_F(HttpApi, ScenesAndImages) {
  const auto scenes = get("/scenes", 200);
  ASSERT_EQ(scenes.size(), 2u);
  EXPECT_EQ(scenes[0]["scene_id"], "scene0");
  EXPECT_EQ(scenes[0]["width"], 32);
  auto png = client->Get("/scenes/scene1/preview.png");
  ASSERT_TRUE(png);
  EXPECT_EQ(png->status, 200);
  EXPECT_EQ(png->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(png->body.substr(1, 3), "PNG");
  auto score = client->Get("/scenes/scene1/score.png");
  ASSERT_TRUE(score);
  EXPECT_EQ(score->status, 200);
  EXPECT_EQ(client->Get("/scenes/nope/preview.png")->status, 404);
}

TEST_F(HttpApi, FullSessionFlow) {
  const auto created = post("/sessions", {{"scene_id", "scene0"}}, 201);
  const std::string id = created["session_id"];
  EXPECT_EQ(created["state"], "open");

  const auto prompts = prompts_to_json(fx->prompts(0));
  const auto cands = post("/sessions/" + id + "/prompts", {{"prompts", prompts}, {"k", 2}}, 200);
  ASSERT_EQ(cands["candidates"].size(), 2u);
  const auto chosen = rle_from_json(cands["candidates"][1]["mask"]);

  const auto decided =
      post("/sessions/" + id + "/decision", {{"kind", "accept"}, {"chosen_candidate", 1}, {"annotator", "ann"}}, 200);
  EXPECT_EQ(decided["state"], "decided");
  post("/sessions/" + id + "/decision", {{"kind", "reject"}, {"annotator", "ann"}}, 409);

  EXPECT_EQ(get("/sessions/" + id, 200)["decision"]["kind"], "accept");
  EXPECT_EQ(get("/sessions?state=decided", 200).size(), 1u);
  EXPECT_EQ(get("/sessions?state=open", 200).size(), 0u);
  EXPECT_EQ(get("/sessions?annotator=ann", 200).size(), 1u);

  const auto manifest = post("/export", json::object(), 200);
  ASSERT_EQ(manifest["entries"].size(), 1u);
  EXPECT_EQ(manifest["entries"][0]["severity_level"], 4);
  EXPECT_EQ(manifest["version"], "bloombench-manifest/1");
  EXPECT_EQ(read_rle_file(fx->cfg.export_root / "masks" / "scene0.json"), chosen);
}

TEST_F(HttpApi, ErrorStatuses) {
  post("/sessions", {{"scene_id", "nope"}}, 404);
  post("/sessions", {{"scene", 1}}, 400);
  get("/sessions/does-not-exist", 404);
  get("/sessions?state=bogus", 400);
  auto raw = client->Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->status, 400);
  EXPECT_EQ(json::parse(raw->body)["error"], "MalformedRequest");

  const std::string id = post("/sessions", {{"scene_id", "scene1"}}, 201)["session_id"];
  post("/sessions/" + id + "/prompts", {{"prompts", {{"positive", json::array()}, {"roi", {0, 0, 5, 5}}}}}, 422);
  post("/sessions/" + id + "/prompts", {{"prompts", {{"positive", json::array({json::array({40, 1})})}, {"roi", {0, 0, 31, 31}}}}}, 422);
  post("/sessions/" + id + "/prompts", {{"prompts", "x"}}, 400);
  post("/sessions/" + id + "/decision", {{"kind", "accept"}, {"chosen_candidate", 0}, {"annotator", "a"}}, 422);
  post("/sessions/" + id + "/decision", {{"kind", "maybe"}, {"annotator", "a"}}, 400);
  post("/sessions/" + id + "/decision",
       {{"kind", "refine"}, {"final_mask", {{"width", 32}, {"height", 32}, {"counts", {1}}}}, {"annotator", "a"}}, 422);
  EXPECT_EQ(get("/sessions/" + id, 200)["state"], "open");
}
