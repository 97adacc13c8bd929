#include <random>

#include <Eigen/Geometry>
#include <benchmark/benchmark.h>

#include "egoview/alignment.hpp"
#include "egoview/diffusion.hpp"
#include "egoview/geometry.hpp"
#include "egoview/metrics.hpp"
#include "egoview/reprojection.hpp"
#include "egoview/synthetic.hpp"

using namespace egoview;

namespace {

const SyntheticScene& scene() {
  static const SyntheticScene s = make_scene(0);
  return s;
}

void BM_ProjectPoints(benchmark::State& state) {
  const PointCloud cloud = apply_transform(scene().surfels, scene().ego_camera.pose);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_points(cloud, scene().ego_camera.intrinsics, int(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(cloud.size()));
}
BENCHMARK(BM_ProjectPoints)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TranslateView(benchmark::State& state) {
  const OracleRender exo = oracle_render(scene(), SceneView::Exo);
  const ViewTranslationInput input{exo.image,
                                   exo.depth,
                                   scene().exo_camera.intrinsics,
                                   scene_hand_pose(scene(), SceneView::Exo),
                                   scene_hand_pose(scene(), SceneView::Ego),
                                   scene().ego_camera.intrinsics,
                                   render_hand_depth(scene(), SceneView::Exo)};
  for (auto _ : state) benchmark::DoNotOptimize(translate_view(input));
}
BENCHMARK(BM_TranslateView)->Unit(benchmark::kMillisecond);

void BM_Umeyama(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  KeypointMatrix src(state.range(0), 3);
  for (double& v : src.reshaped()) v = u(rng);
  SimilarityTransform t;
  t.scale = 1.3;
  t.rotation = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  t.translation = {0.1, -0.2, 0.5};
  KeypointMatrix dst(src.rows(), 3);
  for (int i = 0; i < src.rows(); ++i) dst.row(i) = t.apply(src.row(i).transpose()).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(umeyama(src, dst));
}
BENCHMARK(BM_Umeyama)->Arg(21)->Arg(42)->Arg(1000);

void BM_Ssim(benchmark::State& state) {
  const int n = int(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RgbImage a(n, n);
  RgbImage b(n, n);
  for (double& v : a.values()) v = u(rng);
  for (double& v : b.values()) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ReverseSample(benchmark::State& state) {
  const int n = int(state.range(0));
  const NoiseSchedule s = respace_schedule(linear_beta_schedule(), 50);
  const LatentGrid z0 = gaussian_latent(n, n, 4, 3);
  const ConditioningBundle bundle{LatentGrid(n, n, 4), LatentGrid(n, n, 1), TextEmbedding(16, 0.1), std::nullopt};
  SamplerOptions o;
  o.guidance = 3.0;
  const Denoiser d = oracle_denoiser(z0, s);
  for (auto _ : state) benchmark::DoNotOptimize(reverse_sample(d, bundle, s, o));
}
BENCHMARK(BM_ReverseSample)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
