#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "egoview/calibration.hpp"
#include "egoview/diffusion.hpp"
#include "egoview/io.hpp"
#include "egoview/metrics.hpp"
#include "egoview/pose_map.hpp"
#include "egoview/reprojection.hpp"
#include "egoview/synthetic.hpp"

namespace egoview::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

fs::path output_path(const std::string& value) {
  fs::path path(value);
  if (path.is_relative()) {
    if (const char* base = std::getenv(kOutputDirEnv); base != nullptr && *base != '\0') {
      return fs::path(base) / path;
    }
  }
  return path;
}

ordered_json number_or_inf(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

std::string format_csv_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << value;
  return out.str();
}

ordered_json transform_json(const SimilarityTransform& t) {
  return ordered_json::parse(io::serialize_transform(t));
}

// --- shared pipeline pieces ---------------------------------------------------

struct ViewPaths {
  std::string exo_image, exo_depth, exo_intrinsics, exo_pose, ego_pose, ego_intrinsics;
  std::string hand_depth;
};

ViewTranslationInput load_view(const ViewPaths& p) {
  ViewTranslationInput input;
  input.exo_image = io::load_png(p.exo_image);
  input.exo_depth = io::load_pfm(p.exo_depth);
  input.exo_intrinsics = io::load_intrinsics(p.exo_intrinsics);
  input.exo_pose = io::load_pose(p.exo_pose);
  input.ego_pose = io::load_pose(p.ego_pose);
  input.ego_intrinsics = io::load_intrinsics(p.ego_intrinsics);
  if (!p.hand_depth.empty()) input.hand_depth = io::load_pfm(p.hand_depth);
  return input;
}

ViewPaths paths_of(const io::ManifestEntry& e) {
  return {e.exo_image_path.string(),    e.exo_depth_path.string(), e.exo_intrinsics_path.string(),
          e.exo_pose_path.string(),     e.ego_pose_path.string(),  e.ego_intrinsics_path.string(),
          e.hand_depth_path ? e.hand_depth_path->string() : std::string()};
}

struct Scores {
  double psnr = 0.0;
  double ssim = 0.0;
  std::size_t compared = 0;
};

// PSNR over the pixels that received a point (minus occlusion edges of the
// reference depth when available); SSIM over the full frame with the
// uncompared pixels of the reference taken from the prediction.
Scores score_sparse_map(const SparseEgoMap& map, const RgbImage& reference,
                        const std::optional<DepthMap>& reference_depth) {
  require(reference.same_shape(map.rgb), "reference image size differs from the sparse map");
  Mask compared = map.validity;
  if (reference_depth) {
    require(reference_depth->same_shape(compared), "reference depth size differs from the sparse map");
    const Mask edges = occlusion_edge_mask(*reference_depth);
    for (std::size_t i = 0; i < compared.size(); ++i) {
      if (edges.values()[i]) compared.values()[i] = 0;
    }
  }
  const RgbImage prediction = io::quantize(map.rgb);
  RgbImage composite = reference;
  for (int y = 0; y < composite.height(); ++y)
    for (int x = 0; x < composite.width(); ++x)
      if (!compared.at(x, y)) composite.set_pixel(x, y, prediction.pixel(x, y));

  Scores scores;
  scores.compared = count_set(compared);
  scores.psnr = scores.compared == 0 ? 0.0 : psnr_from_mse(masked_mse(prediction, reference, compared));
  scores.ssim = ssim(prediction, composite);
  return scores;
}

// --- subcommands ---------------------------------------------------------------

struct CalibrateArgs {
  std::string hand_depth, est_depth, out;
  double delta = kDefaultScaleDelta;
};

void cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const DepthMap hand = io::load_pfm(a.hand_depth);
  const DepthMap est = io::load_pfm(a.est_depth);
  const ScaleFactor s = compute_scale(hand, est, hand_region_from_depth(hand), a.delta);
  if (!a.out.empty()) io::save_pfm(output_path(a.out), apply_scale(est, s));
  out << ordered_json{{"scale", s.value}, {"samples", s.sample_count}}.dump() << "\n";
}

struct AlignArgs {
  std::string src_pose, dst_pose, out;
};

void cmd_align(const AlignArgs& a, std::ostream& out) {
  const HandPose src = io::load_pose(a.src_pose);
  const HandPose dst = io::load_pose(a.dst_pose);
  const SimilarityTransform t = umeyama(src, dst);
  if (!a.out.empty()) io::save_transform(output_path(a.out), t);
  out << ordered_json{{"residual", alignment_residual(src, dst, t)}, {"transform", transform_json(t)}}.dump()
      << "\n";
}

struct ReprojectArgs {
  ViewPaths paths;
  std::string manifest;
  std::string entry;
  std::string out;
  double delta = kDefaultScaleDelta;
  int splat_radius = kDefaultSplatRadius;
};

void cmd_reproject(ReprojectArgs a, std::ostream& out) {
  if (!a.manifest.empty()) {
    const io::Manifest manifest = io::load_manifest(a.manifest);
    const io::ManifestEntry* chosen = nullptr;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      if (manifest.entries[i].name == a.entry || std::to_string(i) == a.entry || a.entry.empty()) {
        chosen = &manifest.entries[i];
        break;
      }
    }
    if (chosen == nullptr) throw ValidationError("entry", "no manifest entry '" + a.entry + "'");
    a.paths = paths_of(*chosen);
  } else if (a.paths.exo_image.empty() || a.paths.exo_depth.empty() || a.paths.exo_intrinsics.empty() ||
             a.paths.exo_pose.empty() || a.paths.ego_pose.empty() || a.paths.ego_intrinsics.empty()) {
    throw ValidationError("reproject", "need --manifest or all of the explicit input paths");
  }
  const ViewTranslationResult result =
      translate_view(load_view(a.paths), {a.delta, a.splat_radius});
  const fs::path prefix = output_path(a.out);
  io::save_sparse_map(prefix, result.map);
  io::save_transform(prefix.string() + "_transform.json", result.exo_to_ego);
  out << ordered_json{{"scale", result.scale.value},
                      {"scale_samples", result.scale.sample_count},
                      {"points", result.cloud_size},
                      {"valid_pixel_fraction", result.map.valid_fraction()},
                      {"transform", transform_json(result.exo_to_ego)}}
             .dump()
      << "\n";
}

struct PosemapArgs {
  std::string pose, intrinsics, style, out;
};

void cmd_posemap(const PosemapArgs& a, std::ostream& out) {
  const PoseMapStyle style = a.style.empty() ? PoseMapStyle{} : io::load_pose_map_style(a.style);
  const RgbImage map = rasterize_pose_map(io::load_pose(a.pose), io::load_intrinsics(a.intrinsics), style);
  io::save_png(output_path(a.out), map);
  std::size_t drawn = 0;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.pixel(x, y) != style.background) ++drawn;
  out << ordered_json{{"drawn_pixels", drawn}}.dump() << "\n";
}

struct MetricsArgs {
  std::string pred, gt, mask;
  double max_value = 1.0;
};

void cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  const RgbImage pred = io::load_png(a.pred);
  const RgbImage gt = io::load_png(a.gt);
  ordered_json doc;
  if (a.mask.empty()) {
    const double m = mse(pred, gt);
    doc = {{"mse", m}, {"psnr", number_or_inf(psnr_from_mse(m, a.max_value))}, {"ssim", ssim(pred, gt)}};
  } else {
    SparseEgoMap map{pred, io::load_mask_png(a.mask), DepthMap(pred.width(), pred.height(), 0.0)};
    const Scores s = score_sparse_map(map, gt, std::nullopt);
    doc = {{"masked_pixels", s.compared}, {"psnr", number_or_inf(s.psnr)}, {"ssim", s.ssim}};
  }
  out << doc.dump() << "\n";
}

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  const SceneConfig config = a.config.empty() ? SceneConfig{} : io::load_scene_config(a.config);
  const SyntheticScene scene = make_scene(a.seed, config);
  const fs::path dir = output_path(a.out);
  fs::create_directories(dir);

  const OracleRender exo = oracle_render(scene, SceneView::Exo);
  const OracleRender ego = oracle_render(scene, SceneView::Ego);
  // The exocentric depth is handed out up to an unknown global scale, the
  // way a monocular estimator would report it.
  const DepthMap relative = apply_scale(exo.depth, ScaleFactor{1.0 / scene.depth_ambiguity, 1});

  io::Manifest manifest;
  manifest.directory = dir;
  io::ManifestEntry e;
  e.name = "seed" + std::to_string(a.seed);
  e.exo_image_path = dir / "exo_rgb.png";
  e.exo_depth_path = dir / "exo_depth.pfm";
  e.exo_pose_path = dir / "exo_pose.json";
  e.ego_pose_path = dir / "ego_pose.json";
  e.exo_intrinsics_path = dir / "exo_intrinsics.json";
  e.ego_intrinsics_path = dir / "ego_intrinsics.json";
  e.hand_depth_path = dir / "hand_depth.pfm";
  e.ego_gt_image_path = dir / "ego_gt_rgb.png";
  e.ego_gt_depth_path = dir / "ego_gt_depth.pfm";

  io::save_png(e.exo_image_path, exo.image);
  io::save_pfm(e.exo_depth_path, relative);
  io::save_pfm(*e.hand_depth_path, render_hand_depth(scene, SceneView::Exo));
  io::save_pose(e.exo_pose_path, scene_hand_pose(scene, SceneView::Exo));
  io::save_pose(e.ego_pose_path, scene_hand_pose(scene, SceneView::Ego));
  io::save_intrinsics(e.exo_intrinsics_path, scene.exo_camera.intrinsics);
  io::save_intrinsics(e.ego_intrinsics_path, scene.ego_camera.intrinsics);
  io::save_png(*e.ego_gt_image_path, ego.image);
  io::save_pfm(*e.ego_gt_depth_path, ego.depth);
  io::save_transform(dir / "gt_transform.json", ground_truth_transform(scene));
  manifest.entries.push_back(e);
  io::save_manifest(dir / "manifest.json", manifest);

  out << ordered_json{{"seed", a.seed},
                      {"surfels", scene.surfels.size()},
                      {"depth_ambiguity", scene.depth_ambiguity},
                      {"manifest", (dir / "manifest.json").generic_string()}}
             .dump()
      << "\n";
}

struct DiffuseArgs {
  std::uint64_t seed = 0;
  int steps = 50;
  double w = 3.0;
  double eta = 0.0;
  int stride = 8;
  int text_dim = 16;
  std::string out;
};

void cmd_diffuse_demo(const DiffuseArgs& a, std::ostream& out) {
  const SyntheticScene scene = make_scene(a.seed);
  const OracleRender exo = oracle_render(scene, SceneView::Exo);
  const OracleRender ego = oracle_render(scene, SceneView::Ego);

  ViewTranslationInput input;
  input.exo_image = exo.image;
  input.exo_depth = exo.depth;
  input.exo_intrinsics = scene.exo_camera.intrinsics;
  input.exo_pose = scene_hand_pose(scene, SceneView::Exo);
  input.ego_pose = scene_hand_pose(scene, SceneView::Ego);
  input.ego_intrinsics = scene.ego_camera.intrinsics;
  const SparseEgoMap sparse = build_sparse_ego_map(input);
  const RgbImage pose_map = rasterize_pose_map(input.ego_pose, input.ego_intrinsics);

  const IdentityCodec codec(a.stride);
  const LatentGrid z0 = codec.encode(ego.image);
  ConditioningBundle bundle;
  bundle.sparse_latent = codec.encode(sparse.rgb);
  bundle.pose_latent = channel_reduce(codec.encode(pose_map));
  bundle.text_raw = "two hands resting on a table next to a box";
  const LatentGrid text = gaussian_latent(1, 1, a.text_dim, a.seed + 1);
  bundle.text_embedding = TextEmbedding(text.values().begin(), text.values().end());

  const NoiseSchedule schedule = respace_schedule(linear_beta_schedule(), a.steps);
  const SamplerOptions options{a.w, a.eta, a.seed, z0.channels()};
  const LatentGrid z_t = gaussian_latent(z0.height(), z0.width(), z0.channels(), a.seed);
  const LatentGrid z_hat = reverse_sample(oracle_denoiser(z0, schedule), bundle, schedule, options);

  const fs::path dir = output_path(a.out);
  fs::create_directories(dir);
  const RgbImage target = codec.decode(z0);
  const RgbImage reconstruction = codec.decode(z_hat);
  io::save_png(dir / "diffuse_target.png", target);
  io::save_png(dir / "diffuse_sparse.png", codec.decode(bundle.sparse_latent));
  io::save_png(dir / "diffuse_before.png", codec.decode(z_t));
  io::save_png(dir / "diffuse_after.png", reconstruction);

  double max_error = 0.0;
  for (std::size_t i = 0; i < z0.size(); ++i) {
    max_error = std::max(max_error, std::abs(z0.values()[i] - z_hat.values()[i]));
  }
  out << ordered_json{{"seed", a.seed},
                      {"steps", a.steps},
                      {"w", a.w},
                      {"eta", a.eta},
                      {"latent", {z0.height(), z0.width(), z0.channels()}},
                      {"max_abs_latent_error", max_error},
                      {"psnr_before", number_or_inf(psnr(codec.decode(z_t), target))},
                      {"psnr_after", number_or_inf(psnr(reconstruction, target))}}
             .dump()
      << "\n";
}

struct RunManifestArgs {
  std::string manifest;
  std::string out;
  std::string report;
  double delta = kDefaultScaleDelta;
  int splat_radius = kDefaultSplatRadius;
};

void cmd_run_manifest(const RunManifestArgs& a, std::ostream& out) {
  const io::Manifest manifest = io::load_manifest(a.manifest);
  const fs::path dir = output_path(a.out);
  fs::create_directories(dir);

  std::ostringstream report;
  report << kReportSchema << "\n" << "entry,valid_pixel_fraction,psnr,ssim\n";
  for (const auto& entry : manifest.entries) {
    const ViewTranslationResult result =
        translate_view(load_view(paths_of(entry)), {a.delta, a.splat_radius});
    io::save_sparse_map(dir / entry.name, result.map);
    report << entry.name << ',' << format_csv_number(result.map.valid_fraction()) << ',';
    if (entry.ego_gt_image_path) {
      std::optional<DepthMap> gt_depth;
      if (entry.ego_gt_depth_path) gt_depth = io::load_pfm(*entry.ego_gt_depth_path);
      const Scores s = score_sparse_map(result.map, io::load_png(*entry.ego_gt_image_path), gt_depth);
      report << format_csv_number(s.psnr) << ',' << format_csv_number(s.ssim) << '\n';
    } else {
      report << ",\n";
    }
  }
  const fs::path report_path = a.report.empty() ? dir / "report.csv" : output_path(a.report);
  io::write_file(report_path, report.str());
  out << ordered_json{{"entries", manifest.entries.size()}, {"report", report_path.generic_string()}}.dump()
      << "\n";
}

void print_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << ordered_json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"egoview: exocentric-to-egocentric view translation toolkit", "egoview"};
  app.require_subcommand(1);

  CalibrateArgs calibrate;
  auto* c = app.add_subcommand("calibrate", "Recover the metric depth scale from a hand depth map");
  c->add_option("--hand-depth", calibrate.hand_depth, "Metric hand depth (PFM)")->required();
  c->add_option("--est-depth", calibrate.est_depth, "Relative depth estimate (PFM)")->required();
  c->add_option("--delta", calibrate.delta, "Denominator guard")->check(CLI::NonNegativeNumber);
  c->add_option("--out", calibrate.out, "Write the scaled depth here (PFM)");

  AlignArgs align;
  auto* al = app.add_subcommand("align", "Similarity transform between two pose files");
  al->add_option("--src-pose", align.src_pose)->required();
  al->add_option("--dst-pose", align.dst_pose)->required();
  al->add_option("--out", align.out, "Transform document mapping src onto dst");

  ReprojectArgs reproject;
  auto* r = app.add_subcommand("reproject", "Build the sparse egocentric map");
  r->add_option("--manifest", reproject.manifest);
  r->add_option("--entry", reproject.entry, "Entry name or index (default: first)");
  r->add_option("--exo-image", reproject.paths.exo_image);
  r->add_option("--exo-depth", reproject.paths.exo_depth);
  r->add_option("--exo-intrinsics", reproject.paths.exo_intrinsics);
  r->add_option("--exo-pose", reproject.paths.exo_pose);
  r->add_option("--ego-pose", reproject.paths.ego_pose);
  r->add_option("--ego-intrinsics", reproject.paths.ego_intrinsics);
  r->add_option("--hand-depth", reproject.paths.hand_depth);
  r->add_option("--delta", reproject.delta)->check(CLI::NonNegativeNumber);
  r->add_option("--splat-radius", reproject.splat_radius)->check(CLI::NonNegativeNumber);
  r->add_option("--out", reproject.out, "Output prefix for _rgb.png/_mask.png/_depth.pfm")->required();

  PosemapArgs posemap;
  auto* pm = app.add_subcommand("posemap", "Rasterize a 2D hand pose map");
  pm->add_option("--pose", posemap.pose)->required();
  pm->add_option("--intrinsics", posemap.intrinsics)->required();
  pm->add_option("--style", posemap.style, "Style document (JSON)");
  pm->add_option("--out", posemap.out)->required();

  MetricsArgs metrics;
  auto* m = app.add_subcommand("metrics", "PSNR / SSIM between two PNG images");
  m->add_option("--pred", metrics.pred)->required();
  m->add_option("--gt", metrics.gt)->required();
  m->add_option("--mask", metrics.mask, "Restrict PSNR to this validity mask");
  m->add_option("--max-value", metrics.max_value)->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic paired scene");
  s->add_option("--seed", synth.seed);
  s->add_option("--out", synth.out)->required();
  s->add_option("--config", synth.config, "Scene config (JSON)");

  DiffuseArgs diffuse;
  auto* d = app.add_subcommand("diffuse-demo", "Reverse sampling with the oracle denoiser");
  d->add_option("--seed", diffuse.seed);
  d->add_option("--steps", diffuse.steps)->check(CLI::Range(1, kDefaultTimesteps));
  d->add_option("--w", diffuse.w, "Guidance weight");
  d->add_option("--eta", diffuse.eta)->check(CLI::Range(0.0, 1.0));
  d->add_option("--stride", diffuse.stride, "Codec downsampling stride")->check(CLI::PositiveNumber);
  d->add_option("--text-dim", diffuse.text_dim)->check(CLI::PositiveNumber);
  d->add_option("--out", diffuse.out)->required();

  RunManifestArgs run_manifest;
  auto* rm = app.add_subcommand("run-manifest", "Reproject (and score) every manifest entry");
  rm->add_option("--manifest", run_manifest.manifest)->required();
  rm->add_option("--out", run_manifest.out)->required();
  rm->add_option("--report", run_manifest.report, "CSV path (default <out>/report.csv)");
  rm->add_option("--delta", run_manifest.delta)->check(CLI::NonNegativeNumber);
  rm->add_option("--splat-radius", run_manifest.splat_radius)->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    const auto& rp = reproject.paths;
    if (r->parsed() && reproject.manifest.empty() &&
        (rp.exo_image.empty() || rp.exo_depth.empty() || rp.exo_intrinsics.empty() ||
         rp.exo_pose.empty() || rp.ego_pose.empty() || rp.ego_intrinsics.empty())) {
      throw CLI::RequiredError("--manifest or every explicit --exo-*/--ego-* input");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    if (c->parsed()) cmd_calibrate(calibrate, out);
    else if (al->parsed()) cmd_align(align, out);
    else if (r->parsed()) cmd_reproject(reproject, out);
    else if (pm->parsed()) cmd_posemap(posemap, out);
    else if (m->parsed()) cmd_metrics(metrics, out);
    else if (s->parsed()) cmd_synth(synth, out);
    else if (d->parsed()) cmd_diffuse_demo(diffuse, out);
    else if (rm->parsed()) cmd_run_manifest(run_manifest, out);
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what());
    return 1;
  }
  return 0;
}

}  // namespace egoview::cli
