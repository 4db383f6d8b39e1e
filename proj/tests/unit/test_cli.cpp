#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "bloombench/cli.hpp"
#include "bloombench/mask_io.hpp"
#include "bloombench/triplet.hpp"
#include "test_support.hpp"

using namespace bloombench;
using namespace bloombench::testing;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bloombench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Mask bits(std::size_t w, std::size_t h, std::initializer_list<int> on) {
  Mask m(w, h);
  for (int i : on) m.bits[i] = 1;
  return m;
}

// The two-pair fixture: IoUs {0.4, 1.0}, counts (2,5) and (10,10).
void write_two_pair_fixture(const TempDir& tmp) {
  fs::create_directories(tmp / "pred");
  fs::create_directories(tmp / "truth");
  write_rle_file(encode_rle(bits(4, 4, {0, 1, 15})), tmp / "pred" / "a.json");
  write_rle_file(encode_rle(bits(4, 4, {0, 1, 2, 3})), tmp / "truth" / "a.json");
  const auto b = bits(4, 4, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  write_mask_png(b, tmp / "pred" / "b.png");
  write_rle_file(encode_rle(b), tmp / "truth" / "b.json");
}

}  // namespace

TEST(CliHelpers, Fixed6RoundsHalfEven) {
  EXPECT_EQ(cli::fixed6(1.0), "1.000000");
  EXPECT_EQ(cli::fixed6(0.7), "0.700000");
  EXPECT_EQ(cli::fixed6(0.0000005), "0.000000");  // binary value is just below the tie
  EXPECT_EQ(cli::fixed6(0.0000015), "0.000002");
  EXPECT_EQ(cli::fixed6(2.5e-7 * 2), "0.000000");
}

TEST(CliHelpers, SeverityAnswerParsing) {
  auto level = [](std::string_view s) -> std::optional<int> {
    const auto l = cli::parse_severity_answer(s);
    if (!l) return std::nullopt;
    return l->value();
  };
  EXPECT_EQ(level("3"), 3);
  EXPECT_EQ(level(" 3 (moderate)"), 3);
  EXPECT_EQ(level("4.0"), 4);
  EXPECT_EQ(level("2.6"), 2);  // first character wins
  EXPECT_EQ(level("+4.4"), 4);
  EXPECT_EQ(level("unknown"), std::nullopt);
  EXPECT_EQ(level("0"), std::nullopt);
  EXPECT_EQ(level("7"), std::nullopt);
  EXPECT_EQ(level(""), std::nullopt);
}

TEST(CliValidate, ValidAndCorruptStores) {
  TempDir tmp;
  write_scene(make_blob_scene("s1", 8, 8, 1).scene, tmp / "store");
  write_scene(make_blob_scene("s2", 8, 8, 2).scene, tmp / "store");
  auto r = run_cli({"validate", (tmp / "store").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "OK s1\nOK s2\n2 scenes, 0 invalid\n");

  fs::resize_file(tmp / "store" / "s2" / "bands" / "B05.f32", 12);
  r = run_cli({"validate", (tmp / "store").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("BandSizeMismatch s2 "), std::string::npos) << r.out;
  EXPECT_EQ(run_cli({"validate", (tmp / "missing").string()}).code, 2);
}

TEST(CliEvalSeg, JsonGolden) {
  TempDir tmp;
  write_two_pair_fixture(tmp);
  const auto r = run_cli({"eval-seg", (tmp / "pred").string(), (tmp / "truth").string(), "--out", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(r.out.substr(0, 38), "{\"ciou\":0.700000,\"giou\":0.800000,\"n_im");
  EXPECT_EQ(j["n_images"], 2);
  EXPECT_EQ(j["bootstrap_resamples"], 1000);
  EXPECT_EQ(j["bootstrap_seed"], 42);
  EXPECT_NE(r.out.find("\"ciou_stderr\":0.300000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"per_image\":[{\"scene_id\":\"a\",\"iou\":0.400000},{\"scene_id\":\"b\",\"iou\":1.000000}]"),
            std::string::npos);
}

TEST(CliEvalSeg, TableAndCsv) {
  TempDir tmp;
  write_two_pair_fixture(tmp);
  auto r = run_cli({"eval-seg", (tmp / "pred").string(), (tmp / "truth").string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("cIoU      0.700000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("gIoU      0.800000"), std::string::npos);
  EXPECT_NE(r.out.find("note: cIoU = mean per-image IoU"), std::string::npos);
  r = run_cli({"eval-seg", (tmp / "pred").string(), (tmp / "truth").string(), "--out", "csv"});
  EXPECT_EQ(r.out, "scene_id,iou\na,0.400000\nb,1.000000\n");
  EXPECT_NE(r.err.find("cIoU 0.700000 gIoU 0.800000"), std::string::npos);
}

TEST(CliEvalSeg, IdenticalDirectoriesScoreOne) {
  TempDir tmp;
  std::mt19937_64 rng(4);
  fs::create_directories(tmp / "m");
  for (int i = 0; i < 3; ++i) {
    write_rle_file(encode_rle(random_mask(rng, 9, 7, 0.3)), tmp / "m" / (std::to_string(i) + ".json"));
  }
  const auto r = run_cli({"eval-seg", (tmp / "m").string(), (tmp / "m").string(), "--out", "json"});
  EXPECT_EQ(r.out.substr(0, 33), "{\"ciou\":1.000000,\"giou\":1.000000,");
}

TEST(CliEvalSeg, MismatchesAndCorruption) {
  TempDir tmp;
  write_two_pair_fixture(tmp);
  fs::create_directories(tmp / "other");
  write_rle_file(encode_rle(Mask(4, 4)), tmp / "other" / "zzz.json");
  EXPECT_EQ(run_cli({"eval-seg", (tmp / "other").string(), (tmp / "truth").string()}).code, 2);
  EXPECT_EQ(run_cli({"eval-seg", (tmp / "other").string(), (tmp / "truth").string(), "--strict"}).code, 2);

  write_rle_file(encode_rle(Mask(4, 4)), tmp / "pred" / "extra.json");
  auto r = run_cli({"eval-seg", (tmp / "pred").string(), (tmp / "truth").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(run_cli({"eval-seg", (tmp / "pred").string(), (tmp / "truth").string(), "--strict"}).code, 2);
  fs::remove(tmp / "pred" / "extra.json");

  write_text(tmp / "pred" / "a.json", "{\"width\":4,\"height\":4,\"counts\":[3]}");
  r = run_cli({"eval-seg", (tmp / "pred").string(), (tmp / "truth").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("a.json"), std::string::npos);
  EXPECT_EQ(run_cli({"eval-seg", "--out", "xml", (tmp / "pred").string(), (tmp / "truth").string()}).code, 2);
}

TEST(CliEvalSeverity, Examples) {
  TempDir tmp;
  write_text(tmp / "truth.csv", "scene_id,severity_level\na,1\nb,5\nc,3\nd,2\n");
  write_text(tmp / "pred.csv", "scene_id,prediction\na,1\nb,3\nc,3 (moderate)\nd,unknown\n");
  const auto r = run_cli({"eval-severity", (tmp / "pred.csv").string(), (tmp / "truth.csv").string(), "--out", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  // residuals 0, -2, 0, 4
  EXPECT_EQ(r.out, "{\"mse\":5.000000,\"rmse\":2.236068,\"mae\":1.500000,\"n\":4,\"n_unparsed\":1}\n");

  write_text(tmp / "two.csv", "scene_id,prediction\na,1\nb,3\n");
  const auto two = run_cli({"eval-severity", (tmp / "two.csv").string(), (tmp / "truth.csv").string(), "--out", "csv"});
  EXPECT_EQ(two.code, 0);
  EXPECT_EQ(two.out, "mse,rmse,mae,n,n_unparsed\n2.000000,1.414214,1.000000,2,0\n");
  EXPECT_EQ(run_cli({"eval-severity", (tmp / "two.csv").string(), (tmp / "truth.csv").string(), "--strict"}).code, 2);
}

TEST(CliGenTriplets, SeverityAndSegmentation) {
  TempDir tmp;
  write_scene(make_blob_scene("s1", 8, 8, 1).scene, tmp / "store");
  write_scene(make_blob_scene("s2", 8, 8, 2).scene, tmp / "store");
  write_text(tmp / "labels.csv", "scene_id,cells_per_ml\ns1,50000\ns2,3000000\n");
  const auto store = (tmp / "store").string();
  const auto labels = (tmp / "labels.csv").string();

  auto r = run_cli({"gen-triplets", store, labels, "--out", (tmp / "sev.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "2\n");
  const auto sev = read_jsonl(tmp / "sev.jsonl");
  ASSERT_EQ(sev.size(), 2u);
  EXPECT_EQ(sev[0].answer, "2");
  EXPECT_EQ(sev[1].answer, "4");

  fs::create_directories(tmp / "masks");
  write_rle_file(encode_rle(Mask(8, 8, true)), tmp / "masks" / "s1.json");
  const std::vector<std::string> seg_args{"gen-triplets", store, labels, (tmp / "masks").string(), "--task",
                                          "segmentation", "--k", "1", "--seed", "5", "--out"};
  auto args = seg_args;
  args.push_back((tmp / "seg.jsonl").string());
  EXPECT_EQ(run_cli(args).code, 3);  // s2 has no mask

  write_rle_file(encode_rle(Mask(8, 8)), tmp / "masks" / "s2.json");
  r = run_cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto seg = read_jsonl(tmp / "seg.jsonl");
  ASSERT_EQ(seg.size(), 2u);
  for (const auto& t : seg) EXPECT_EQ(t.answer, "It is <SEG>.");
  const auto first = read_text(tmp / "seg.jsonl");
  run_cli(args);
  EXPECT_EQ(read_text(tmp / "seg.jsonl"), first);

  write_rle_file(encode_rle(Mask(4, 4)), tmp / "masks" / "s2.json");
  EXPECT_EQ(run_cli(args).code, 3);
  write_text(tmp / "labels.csv", "scene_id,cells_per_ml\nghost,5\n");
  EXPECT_EQ(run_cli({"gen-triplets", store, labels, "--out", (tmp / "x.jsonl").string()}).code, 3);
}

TEST(CliServe, MissingConfigIsUsageError) {
  TempDir tmp;
  const auto r = run_cli({"serve", "--config", (tmp / "nope.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config"), std::string::npos);
  EXPECT_EQ(run_cli({"export", "--config", (tmp / "nope.json").string()}).code, 2);
}

TEST(CliUsage, UnknownSubcommandAndHelp) {
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  const auto help = run_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("eval-seg"), std::string::npos);
}
