#include "bloombench/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bloombench/csv.hpp"
#include "bloombench/curation.hpp"
#include "bloombench/http_api.hpp"
#include "bloombench/mask_io.hpp"
#include "bloombench/raster.hpp"
#include "bloombench/seg_metrics.hpp"
#include "bloombench/triplet.hpp"

namespace bloombench::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kNamingNote =
    "note: cIoU = mean per-image IoU (empty/empty scores 1); gIoU = sum(intersection)/sum(union) over all "
    "images. Some reasoning-segmentation work uses these two names the other way round.";

std::string json_str(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

// scene_id -> mask file, preferring RLE JSON over PNG.
std::map<std::string, fs::path> mask_files(const fs::path& dir) {
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext != ".json" && ext != ".png") continue;
    const auto id = entry.path().stem().string();
    auto [it, inserted] = files.emplace(id, entry.path());
    if (!inserted && ext == ".json") it->second = entry.path();
  }
  return files;
}

// Reconciles prediction and truth id sets. Returns the shared ids or an exit code.
struct Join {
  std::vector<std::string> ids;
  int exit_code = kExitOk;
};

template <typename A, typename B>
Join join_ids(const A& pred, const B& truth, bool strict, std::ostream& err) {
  Join j;
  bool mismatch = false;
  for (const auto& [id, _] : truth) {
    if (pred.count(id)) {
      j.ids.push_back(id);
    } else {
      mismatch = true;
      err << (strict ? "error" : "warning") << ": no prediction for scene '" << id << "'\n";
    }
  }
  for (const auto& [id, _] : pred) {
    if (!truth.count(id)) {
      mismatch = true;
      err << (strict ? "error" : "warning") << ": prediction for unknown scene '" << id << "'\n";
    }
  }
  if (j.ids.empty()) {
    err << "error: no overlapping scene_ids\n";
    j.exit_code = kExitUsage;
  } else if (strict && mismatch) {
    j.exit_code = kExitUsage;
  }
  return j;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  return OutputFormat::table;
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::optional<SeverityLevel> parse_severity_answer(std::string_view raw) {
  const auto s = csv::trim(raw);
  if (s.empty()) return std::nullopt;
  if (s[0] >= '1' && s[0] <= '5') return SeverityLevel(s[0] - '0');
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(x) || x < 1.0 || x > 5.0) return std::nullopt;
  return SeverityLevel(static_cast<int>(std::clamp<long>(std::lround(x), 1, 5)));
}

std::uint64_t scene_seed(std::uint64_t seed, std::string_view scene_id) noexcept { return seed ^ fnv1a(scene_id); }

// ---------------------------------------------------------------------------

int cmd_validate(const fs::path& store_root, std::ostream& out, std::ostream& err) {
  std::vector<SceneCheck> checks;
  try {
    checks = validate_store(store_root);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  int bad = 0;
  for (const auto& c : checks) {
    if (c.violations.empty()) {
      out << "OK " << c.scene_id << "\n";
      continue;
    }
    ++bad;
    for (const auto& v : c.violations) out << to_string(v.code) << " " << c.scene_id << " " << v.detail << "\n";
  }
  out << checks.size() << " scenes, " << bad << " invalid\n";
  return bad == 0 ? kExitOk : kExitValidation;
}

int cmd_eval_seg(const EvalSegOptions& opts, std::ostream& out, std::ostream& err) {
  for (const auto& d : {opts.pred_dir, opts.truth_dir}) {
    if (!fs::is_directory(d)) {
      err << "error: not a directory: " << d.string() << "\n";
      return kExitUsage;
    }
  }
  const auto pred_files = mask_files(opts.pred_dir);
  const auto truth_files = mask_files(opts.truth_dir);
  const auto join = join_ids(pred_files, truth_files, opts.strict, err);
  if (join.exit_code != kExitOk) return join.exit_code;

  std::vector<MaskPair> pairs;
  for (const auto& id : join.ids) {
    MaskPair p{id, {}, {}};
    for (auto [path, dst] : {std::pair{pred_files.at(id), &p.pred}, std::pair{truth_files.at(id), &p.truth}}) {
      try {
        *dst = read_mask_file(path);
      } catch (const Error& e) {
        err << "error: undecodable mask " << path.string() << ": " << e.what() << "\n";
        return kExitCorrupt;
      }
    }
    if (!p.pred.same_shape(p.truth)) {
      err << "error: dimension mismatch for scene '" << id << "': " << pred_files.at(id).string() << " is "
          << p.pred.width << "x" << p.pred.height << ", truth is " << p.truth.width << "x" << p.truth.height << "\n";
      return kExitCorrupt;
    }
    pairs.push_back(std::move(p));
  }
  const auto report = evaluate_segmentation(std::move(pairs));

  switch (opts.format) {
    case OutputFormat::json: {
      out << "{\"ciou\":" << fixed6(report.ciou) << ",\"giou\":" << fixed6(report.giou)
          << ",\"n_images\":" << report.n_images << ",\"ciou_stderr\":" << fixed6(report.ciou_stderr)
          << ",\"giou_bootstrap_sd\":" << fixed6(report.giou_bootstrap_sd)
          << ",\"bootstrap_resamples\":" << kBootstrapResamples << ",\"bootstrap_seed\":" << kBootstrapSeed
          << ",\"per_image\":[";
      for (std::size_t i = 0; i < report.per_image.size(); ++i) {
        if (i) out << ",";
        out << "{\"scene_id\":" << json_str(report.per_image[i].scene_id)
            << ",\"iou\":" << fixed6(report.per_image[i].iou) << "}";
      }
      out << "]}\n";
      break;
    }
    case OutputFormat::csv:
      out << "scene_id,iou\n";
      for (const auto& s : report.per_image) out << s.scene_id << "," << fixed6(s.iou) << "\n";
      err << "cIoU " << fixed6(report.ciou) << " gIoU " << fixed6(report.giou) << " n_images " << report.n_images
          << "\n";
      break;
    case OutputFormat::table:
      out << "n_images  " << report.n_images << "\n"
          << "cIoU      " << fixed6(report.ciou) << "  (+/- " << fixed6(report.ciou_stderr)
          << " standard error of per-image IoU)\n"
          << "gIoU      " << fixed6(report.giou) << "  (+/- " << fixed6(report.giou_bootstrap_sd) << " bootstrap s.d., "
          << kBootstrapResamples << " resamples, seed " << kBootstrapSeed << ")\n"
          << kNamingNote << "\n";
      break;
  }
  return kExitOk;
}

int cmd_eval_severity(const EvalSeverityOptions& opts, std::ostream& out, std::ostream& err) {
  std::map<std::string, SeverityLevel> truth;
  try {
    truth = read_label_csv(opts.truth_file);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? kExitUsage : kExitCorrupt;
  }

  std::ifstream in(opts.pred_file);
  if (!in) {
    err << "error: cannot read " << opts.pred_file.string() << "\n";
    return kExitUsage;
  }
  std::map<std::string, std::string> preds;
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      const auto header = csv::split_line(line);
      if (header.size() < 2 || csv::trim(header[0]) != "scene_id") {
        err << "error: " << opts.pred_file.string() << ": header must start with scene_id\n";
        return kExitCorrupt;
      }
      continue;
    }
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split_line(line);
    if (fields.size() < 2) {
      err << "error: " << opts.pred_file.string() << " line " << lineno << ": expected scene_id,prediction\n";
      return kExitCorrupt;
    }
    std::string value = fields[1];
    for (std::size_t i = 2; i < fields.size(); ++i) value += "," + fields[i];
    ++rows;
    if (!preds.emplace(csv::trim(fields[0]), value).second) {
      err << "error: duplicate prediction for '" << csv::trim(fields[0]) << "'\n";
      return kExitUsage;
    }
  }
  if (opts.strict && rows != truth.size()) {
    err << "error: " << rows << " prediction rows vs " << truth.size() << " labels\n";
    return kExitUsage;
  }
  const auto join = join_ids(preds, truth, opts.strict, err);
  if (join.exit_code != kExitOk) return join.exit_code;

  std::vector<double> residuals;
  std::size_t unparsed = 0;
  for (const auto& id : join.ids) {
    const auto level = parse_severity_answer(preds.at(id));
    if (level) {
      residuals.push_back(static_cast<double>(level->value() - truth.at(id).value()));
    } else {
      residuals.push_back(4.0);
      ++unparsed;
    }
  }
  auto report = severity_metrics_from_residuals(residuals);
  report.n_unparsed = unparsed;

  if (opts.format == OutputFormat::json) {
    out << "{\"mse\":" << fixed6(report.mse) << ",\"rmse\":" << fixed6(report.rmse) << ",\"mae\":"
        << fixed6(report.mae) << ",\"n\":" << report.n << ",\"n_unparsed\":" << report.n_unparsed << "}\n";
  } else if (opts.format == OutputFormat::csv) {
    out << "mse,rmse,mae,n,n_unparsed\n"
        << fixed6(report.mse) << "," << fixed6(report.rmse) << "," << fixed6(report.mae) << "," << report.n << ","
        << report.n_unparsed << "\n";
  } else {
    out << "n           " << report.n << "\n"
        << "MSE         " << fixed6(report.mse) << "\n"
        << "RMSE        " << fixed6(report.rmse) << "\n"
        << "MAE         " << fixed6(report.mae) << "\n"
        << "n_unparsed  " << report.n_unparsed << "  (scored as residual 4)\n";
  }
  return kExitOk;
}

int cmd_gen_triplets(const GenTripletsOptions& opts, std::ostream& out, std::ostream& err) {
  const bool seg = opts.task == "segmentation";
  if (!seg && opts.task != "severity") {
    err << "error: --task must be severity or segmentation\n";
    return kExitUsage;
  }
  if (seg && !opts.masks_dir) {
    err << "error: segmentation triplets need a masks_dir\n";
    return kExitUsage;
  }
  if (!fs::is_directory(opts.store_root)) {
    err << "error: store root not found: " << opts.store_root.string() << "\n";
    return kExitUsage;
  }
  std::map<std::string, SeverityLevel> labels;
  try {
    labels = read_label_csv(opts.labels_csv);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? kExitUsage : kExitCorrupt;
  }

  SceneStore store(opts.store_root);
  const auto templates = TemplateSet::defaults();
  std::vector<Triplet> triplets;
  try {
    for (const auto& [id, level] : labels) {
      if (!store.contains(id)) {
        err << "error: labeled scene '" << id << "' is not in the store\n";
        return kExitCorrupt;
      }
      if (!seg) {
        triplets.push_back(gen_severity_triplet(id, level));
        continue;
      }
      const auto mask_path = *opts.masks_dir / (id + ".json");
      if (!fs::is_regular_file(mask_path)) {
        err << "error: missing mask for labeled scene '" << id << "': " << mask_path.string() << "\n";
        return kExitCorrupt;
      }
      RleMask rle;
      Mask mask;
      try {
        rle = read_rle_file(mask_path);
        mask = decode_rle(rle);
      } catch (const Error& e) {
        err << "error: undecodable mask " << mask_path.string() << ": " << e.what() << "\n";
        return kExitCorrupt;
      }
      const auto scene = store.get(id);
      if (mask.width != scene->width || mask.height != scene->height) {
        err << "error: mask " << mask_path.string() << " does not match scene dimensions\n";
        return kExitCorrupt;
      }
      auto batch = gen_seg_triplets(id, rle, templates, opts.k, scene_seed(opts.seed, id), mask_path.string());
      triplets.insert(triplets.end(), batch.begin(), batch.end());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::TooFewTemplates ? kExitUsage : kExitCorrupt;
  }

  try {
    const auto n = write_jsonl(triplets, opts.out);
    out << n << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

namespace {

std::optional<CurationConfig> config_or_report(const std::optional<std::string>& flag, std::ostream& err) {
  const auto path = resolve_config_path(flag);
  if (!path) {
    err << "error: no config given (use --config or BLOOMBENCH_CONFIG)\n";
    return std::nullopt;
  }
  if (!fs::is_regular_file(*path)) {
    err << "error: config not found: " << path->string() << "\n";
    return std::nullopt;
  }
  try {
    return load_config(*path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

}  // namespace

int cmd_serve(const std::optional<std::string>& config, std::ostream& out, std::ostream& err) {
  auto cfg = config_or_report(config, err);
  if (!cfg) return kExitUsage;
  try {
    CurationService service(*cfg);
    const int rc = serve(service, [&](int port) {
      out << "bloombench: listening on http://" << cfg->host << ":" << port << std::endl;
    });
    if (rc != 0) err << "error: could not listen on " << cfg->host << ":" << cfg->port << "\n";
    return rc;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::RootNotFound ? kExitUsage : kExitCorrupt;
  }
}

int cmd_export(const ExportOptions& opts, std::ostream& out, std::ostream& err) {
  auto cfg = config_or_report(opts.config, err);
  if (!cfg) return kExitUsage;
  try {
    CurationService service(*cfg);
    const auto manifest = service.export_dataset({opts.annotator, opts.from, opts.to});
    out << manifest.entries.size() << " entries exported to " << cfg->export_root.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ExportPathUnwritable ? kExitUsage : kExitCorrupt;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bloombench: HAB mask curation, triplet generation and evaluation"};
  app.require_subcommand(1);

  std::string store_root;
  auto* validate = app.add_subcommand("validate", "Check every scene container in a store");
  validate->add_option("store_root", store_root, "Store directory")->required();

  std::optional<std::string> serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "Run the curation HTTP service");
  serve_cmd->add_option("--config", serve_config, "Config JSON (default: $BLOOMBENCH_CONFIG)");

  ExportOptions export_opts;
  auto* export_cmd = app.add_subcommand("export", "Export accepted masks and the dataset manifest");
  export_cmd->add_option("--config", export_opts.config, "Config JSON (default: $BLOOMBENCH_CONFIG)");
  export_cmd->add_option("--annotator", export_opts.annotator, "Only this annotator's decisions");
  export_cmd->add_option("--from", export_opts.from, "Earliest decision timestamp (ISO-8601, inclusive)");
  export_cmd->add_option("--to", export_opts.to, "Latest decision timestamp (ISO-8601, inclusive)");

  GenTripletsOptions gen_opts;
  std::string gen_store, gen_labels, gen_masks, gen_out;
  auto* gen = app.add_subcommand("gen-triplets", "Write instruction-image-answer triplets as JSONL");
  gen->add_option("store_root", gen_store, "Store directory")->required();
  gen->add_option("labels_csv", gen_labels, "Label CSV (scene_id,cells_per_ml|severity_level)")->required();
  gen->add_option("masks_dir", gen_masks, "Directory of <scene_id>.json RLE masks (segmentation)");
  gen->add_option("--task", gen_opts.task, "severity | segmentation")
      ->check(CLI::IsMember({"severity", "segmentation"}));
  gen->add_option("--k", gen_opts.k, "Segmentation templates per scene")->check(CLI::Range(1, 1000));
  gen->add_option("--seed", gen_opts.seed, "Template sampler seed");
  gen->add_option("--out", gen_out, "Output JSONL path")->required();

  EvalSegOptions seg_opts;
  std::string seg_pred, seg_truth, seg_format = "table";
  auto* eval_seg = app.add_subcommand("eval-seg", "cIoU / gIoU over prediction and truth mask directories");
  eval_seg->add_option("pred_dir", seg_pred, "Predicted masks (<scene_id>.json|png)")->required();
  eval_seg->add_option("truth_dir", seg_truth, "Ground-truth masks (<scene_id>.json|png)")->required();
  eval_seg->add_flag("--strict", seg_opts.strict, "Fail unless both directories cover the same scenes");
  eval_seg->add_option("--out", seg_format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));

  EvalSeverityOptions sev_opts;
  std::string sev_pred, sev_truth, sev_format = "table";
  auto* eval_sev = app.add_subcommand("eval-severity", "MSE / RMSE / MAE of severity predictions");
  eval_sev->add_option("pred_file", sev_pred, "CSV scene_id,<raw model answer>")->required();
  eval_sev->add_option("truth_file", sev_truth, "Label CSV")->required();
  eval_sev->add_flag("--strict", sev_opts.strict, "Fail on any row-count or scene mismatch");
  eval_sev->add_option("--out", sev_format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*validate) return cmd_validate(store_root, out, err);
  if (*serve_cmd) return cmd_serve(serve_config, out, err);
  if (*export_cmd) return cmd_export(export_opts, out, err);
  if (*gen) {
    gen_opts.store_root = gen_store;
    gen_opts.labels_csv = gen_labels;
    if (!gen_masks.empty()) gen_opts.masks_dir = gen_masks;
    gen_opts.out = gen_out;
    return cmd_gen_triplets(gen_opts, out, err);
  }
  if (*eval_seg) {
    seg_opts.pred_dir = seg_pred;
    seg_opts.truth_dir = seg_truth;
    seg_opts.format = parse_format(seg_format);
    return cmd_eval_seg(seg_opts, out, err);
  }
  if (*eval_sev) {
    sev_opts.pred_file = sev_pred;
    sev_opts.truth_file = sev_truth;
    sev_opts.format = parse_format(sev_format);
    return cmd_eval_severity(sev_opts, out, err);
  }
  return kExitUsage;
}

}  // namespace bloombench::cli
