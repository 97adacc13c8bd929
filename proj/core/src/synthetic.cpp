#include "egoview/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

namespace egoview {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::Vector3d uniform_vector(Rng& rng, double half_extent) {
  return {uniform(rng, -half_extent, half_extent), uniform(rng, -half_extent, half_extent),
          uniform(rng, -half_extent, half_extent)};
}

// Smooth two-wave texture. The steepest channel slope is
// amplitude * 2 pi / min_wavelength per meter.
struct Texture {
  Eigen::Vector3d base;
  Eigen::Vector3d wave_a;
  Eigen::Vector3d wave_b;
  double phase_a = 0.0;
  double phase_b = 0.0;
  double amplitude = 0.1;

  static Texture random(Rng& rng, const SceneConfig& config, const Eigen::Vector3d& base_lo,
                        const Eigen::Vector3d& base_hi) {
    Texture tex;
    tex.amplitude = config.texture_amplitude;
    for (int c = 0; c < 3; ++c) tex.base[c] = uniform(rng, base_lo[c], base_hi[c]);
    const double shortest = config.texture_min_wavelength;
    auto wave = [&rng, shortest] {
      Eigen::Vector3d dir = uniform_vector(rng, 1.0);
      if (dir.norm() < 1e-3) dir = Eigen::Vector3d::UnitX();
      const double wavelength = uniform(rng, shortest, 2.0 * shortest);
      return Eigen::Vector3d(dir.normalized() * (2.0 * std::numbers::pi / wavelength));
    };
    tex.wave_a = wave();
    tex.wave_b = wave();
    tex.phase_a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    tex.phase_b = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    return tex;
  }

  Eigen::Vector3d operator()(const Eigen::Vector3d& p) const {
    const double a = std::sin(wave_a.dot(p) + phase_a);
    const double b = std::sin(wave_b.dot(p) + phase_b);
    const Eigen::Vector3d tint{a, 0.6 * a + 0.4 * b, b};
    return (base + amplitude * tint).cwiseMax(0.0).cwiseMin(1.0);
  }
};

// Samples the parallelogram origin + i*step*u + j*step*v.
void add_patch(PointCloud& cloud, const Eigen::Vector3d& origin, const Eigen::Vector3d& u,
               double u_length, const Eigen::Vector3d& v, double v_length, double spacing,
               const Texture& texture) {
  const int nu = std::max(1, static_cast<int>(std::ceil(u_length / spacing)));
  const int nv = std::max(1, static_cast<int>(std::ceil(v_length / spacing)));
  for (int j = 0; j <= nv; ++j) {
    for (int i = 0; i <= nu; ++i) {
      const Eigen::Vector3d p = origin + (u_length * i / nu) * u + (v_length * j / nv) * v;
      cloud.push_back({p, texture(p)});
    }
  }
}

void add_box(PointCloud& cloud, const Eigen::Vector3d& center, const Eigen::Vector3d& size,
             double spacing, const Texture& texture) {
  const Eigen::Vector3d lo = center - 0.5 * size;
  const Eigen::Vector3d ex = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ey = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
  add_patch(cloud, {lo.x(), lo.y(), lo.z() + size.z()}, ex, size.x(), ey, size.y(), spacing, texture);
  add_patch(cloud, lo, ex, size.x(), ez, size.z(), spacing, texture);
  add_patch(cloud, {lo.x(), lo.y() + size.y(), lo.z()}, ex, size.x(), ez, size.z(), spacing, texture);
  add_patch(cloud, lo, ey, size.y(), ez, size.z(), spacing, texture);
  add_patch(cloud, {lo.x() + size.x(), lo.y(), lo.z()}, ey, size.y(), ez, size.z(), spacing, texture);
}

void add_sphere(PointCloud& cloud, const Eigen::Vector3d& center, double radius, double spacing,
                const Texture& texture) {
  const double area = 4.0 * std::numbers::pi * radius * radius;
  const int count = std::max(16, static_cast<int>(std::ceil(area / (spacing * spacing))));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = golden * i;
    const Eigen::Vector3d p = center + radius * Eigen::Vector3d(r * std::cos(theta), r * std::sin(theta), z);
    cloud.push_back({p, texture(p)});
  }
}

// One hand in MANO joint order: wrist, then thumb..pinky chains of four
// joints each. `side` = -1 for the left hand, +1 for the right.
void add_hand_keypoints(KeypointMatrix& out, int row, Rng& rng, const Eigen::Vector3d& wrist,
                        double side) {
  out.row(row) = wrist.transpose();
  constexpr double kLateral[5] = {-0.045, -0.022, 0.0, 0.02, 0.038};
  constexpr double kForward[5] = {0.035, 0.085, 0.09, 0.085, 0.075};
  constexpr double kSegment[5] = {0.03, 0.032, 0.035, 0.032, 0.026};
  for (int finger = 0; finger < 5; ++finger) {
    // Thumb sits on the inner side, toward the other hand.
    const double lateral = -side * kLateral[finger];
    Eigen::Vector3d joint = wrist + Eigen::Vector3d(lateral, kForward[finger] * 0.5, 0.012);
    Eigen::Vector3d direction(lateral * 0.6, kForward[finger], 0.0);
    direction.normalize();
    const double curl = uniform(rng, 0.15, 0.45);
    for (int k = 0; k < 4; ++k) {
      out.row(row + 1 + finger * 4 + k) = (joint + uniform_vector(rng, 0.003)).transpose();
      const double length = kSegment[finger] * (1.0 - 0.18 * k);
      joint += length * direction;
      direction = (direction - Eigen::Vector3d(0.0, 0.0, curl)).normalized();
    }
  }
}

}  // namespace

void SceneConfig::validate() const {
  if (width < 16) throw ValidationError("width", "must be >= 16");
  if (height < 16) throw ValidationError("height", "must be >= 16");
  if (!(exo_focal > 0.0)) throw ValidationError("exo_focal", "must be > 0");
  if (!(ego_focal > 0.0)) throw ValidationError("ego_focal", "must be > 0");
  if (!(surfel_spacing > 0.0)) throw ValidationError("surfel_spacing", "must be > 0");
  if (!(table_half_width > 0.0)) throw ValidationError("table_half_width", "must be > 0");
  if (!(wall_y > table_near)) throw ValidationError("wall_y", "must exceed table_near");
  if (!(wall_height > 0.0)) throw ValidationError("wall_height", "must be > 0");
  if (!(joint_radius > 0.0)) throw ValidationError("joint_radius", "must be > 0");
  if (!(camera_jitter >= 0.0)) throw ValidationError("camera_jitter", "must be >= 0");
  if (!(texture_amplitude >= 0.0 && texture_amplitude <= 0.5)) {
    throw ValidationError("texture_amplitude", "must lie in [0, 0.5]");
  }
  if (!(texture_min_wavelength > 0.0)) throw ValidationError("texture_min_wavelength", "must be > 0");
  if ((ego_eye - look_at).norm() < 1e-3) throw ValidationError("ego_eye", "coincides with look_at");
  if ((exo_eye - look_at).norm() < 1e-3) throw ValidationError("exo_eye", "coincides with look_at");
}

SimilarityTransform look_at_pose(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  if (std::abs(forward.dot(up)) > 0.999) up = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d right = forward.cross(up).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  SimilarityTransform pose;
  pose.rotation.row(0) = right.transpose();
  pose.rotation.row(1) = down.transpose();
  pose.rotation.row(2) = forward.transpose();
  pose.translation = -(pose.rotation * eye);
  return pose;
}

SyntheticScene make_scene(std::uint64_t seed, const SceneConfig& config) {
  config.validate();
  Rng rng(seed);
  SyntheticScene scene;
  scene.seed = seed;

  const Texture table_tex = Texture::random(rng, config, {0.45, 0.3, 0.2}, {0.75, 0.6, 0.45});
  const Texture wall_tex = Texture::random(rng, config, {0.3, 0.4, 0.5}, {0.7, 0.8, 0.9});
  const Texture box_tex = Texture::random(rng, config, {0.1, 0.3, 0.1}, {0.5, 0.8, 0.6});
  const Texture skin_tex[2] = {Texture::random(rng, config, {0.75, 0.5, 0.4}, {0.95, 0.7, 0.6}),
                               Texture::random(rng, config, {0.75, 0.5, 0.4}, {0.95, 0.7, 0.6})};

  const double s = config.surfel_spacing;
  const double hw = config.table_half_width;
  add_patch(scene.surfels, {-hw, config.table_near, 0.0}, Eigen::Vector3d::UnitX(), 2.0 * hw,
            Eigen::Vector3d::UnitY(), config.wall_y - config.table_near, s, table_tex);
  add_patch(scene.surfels, {-hw, config.wall_y, 0.0}, Eigen::Vector3d::UnitX(), 2.0 * hw,
            Eigen::Vector3d::UnitZ(), config.wall_height, s, wall_tex);

  const Eigen::Vector3d box_size{uniform(rng, 0.1, 0.14), uniform(rng, 0.08, 0.12),
                                 uniform(rng, 0.06, 0.09)};
  const Eigen::Vector3d box_center{uniform(rng, -0.28, -0.2), uniform(rng, 0.3, 0.38),
                                   0.5 * box_size.z()};
  add_box(scene.surfels, box_center, box_size, s, box_tex);

  scene.hand_keypoints_world.resize(42, 3);
  for (int hand = 0; hand < 2; ++hand) {
    const double side = hand == 0 ? -1.0 : 1.0;
    const Eigen::Vector3d wrist{side * uniform(rng, 0.08, 0.11), uniform(rng, 0.0, 0.05),
                                uniform(rng, 0.035, 0.05)};
    add_hand_keypoints(scene.hand_keypoints_world, hand * 21, rng, wrist, side);
  }
  scene.hand_surfel_begin = scene.surfels.size();
  for (int i = 0; i < 42; ++i) {
    add_sphere(scene.surfels, scene.hand_keypoints_world.row(i).transpose(), config.joint_radius,
               0.75 * s, skin_tex[i / 21]);
  }

  const double j = config.camera_jitter;
  const Eigen::Vector3d target = config.look_at + uniform_vector(rng, j / 3.0);
  auto make_camera = [&](const Eigen::Vector3d& eye, double focal) {
    SceneCamera camera;
    camera.intrinsics = CameraIntrinsics{focal, focal, 0.5 * (config.width - 1),
                                         0.5 * (config.height - 1), config.width, config.height};
    camera.pose = look_at_pose(eye + uniform_vector(rng, j), target);
    return camera;
  };
  scene.exo_camera = make_camera(config.exo_eye, config.exo_focal);
  scene.ego_camera = make_camera(config.ego_eye, config.ego_focal);
  scene.depth_ambiguity = uniform(rng, 0.5, 2.0);
  return scene;
}

namespace {

OracleRender rasterize(const PointCloud& surfels, std::size_t begin, const SceneCamera& camera) {
  const CameraIntrinsics& k = camera.intrinsics;
  const Eigen::Matrix3d& r = camera.pose.rotation;
  const Eigen::Vector3d& t = camera.pose.translation;
  OracleRender out{RgbImage(k.width, k.height, kInvalidFill), DepthMap(k.width, k.height, 0.0)};
  std::vector<double> nearest(static_cast<std::size_t>(k.width) * k.height,
                              std::numeric_limits<double>::infinity());

  for (std::size_t n = begin; n < surfels.size(); ++n) {
    const Eigen::Vector3d c = r * surfels[n].position + t;
    if (c.z() <= 1e-6) continue;
    const double px = std::nearbyint(k.fx * c.x() / c.z() + k.cx);
    const double py = std::nearbyint(k.fy * c.y() / c.z() + k.cy);
    if (px < 0.0 || py < 0.0 || px >= k.width || py >= k.height) continue;
    const int cx = static_cast<int>(px);
    const int cy = static_cast<int>(py);
    for (int y = cy - 1; y <= cy + 1; ++y) {
      if (y < 0 || y >= k.height) continue;
      for (int x = cx - 1; x <= cx + 1; ++x) {
        if (x < 0 || x >= k.width) continue;
        double& best = nearest[static_cast<std::size_t>(y) * k.width + x];
        if (c.z() < best) {
          best = c.z();
          out.depth.at(x, y) = c.z();
          out.image.set_pixel(x, y, surfels[n].color);
        }
      }
    }
  }
  return out;
}

const SceneCamera& camera_of(const SyntheticScene& scene, SceneView which) {
  return which == SceneView::Exo ? scene.exo_camera : scene.ego_camera;
}

}  // namespace

OracleRender oracle_render(const SyntheticScene& scene, SceneView which) {
  return rasterize(scene.surfels, 0, camera_of(scene, which));
}

DepthMap render_hand_depth(const SyntheticScene& scene, SceneView which) {
  return rasterize(scene.surfels, scene.hand_surfel_begin, camera_of(scene, which)).depth;
}

SimilarityTransform ground_truth_transform(const SyntheticScene& scene) {
  return compose(scene.ego_camera.pose, invert_transform(scene.exo_camera.pose));
}

HandPose scene_hand_pose(const SyntheticScene& scene, SceneView which) {
  HandPose pose(HandLayout::TwoHands42, scene.hand_keypoints_world);
  return transform_pose(pose, camera_of(scene, which).pose);
}

Mask occlusion_edge_mask(const DepthMap& reference_depth, double max_span) {
  const int w = reference_depth.width();
  const int h = reference_depth.height();
  Mask edges(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      bool invalid = false;
      for (int dy = -1; dy <= 1 && !invalid; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const double d = reference_depth.at(nx, ny);
          if (!is_valid_depth(d)) {
            invalid = true;
            break;
          }
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
      }
      edges.at(x, y) = (invalid || hi - lo > max_span) ? 1 : 0;
    }
  }
  return edges;
}

}  // namespace egoview
