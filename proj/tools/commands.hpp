#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "physkit/camgen/camgen.hpp"
#include "physkit/error.hpp"
#include "physkit/mpm/checkpoint.hpp"
#include "physkit/mpm/mesh.hpp"
#include "physkit/mpm/sdf.hpp"
#include "physkit/mpm/seeding.hpp"
#include "physkit/mpm/solver.hpp"
#include "physkit/parallel.hpp"
#include "physkit/random.hpp"
#include "physkit/scenegen/annotations.hpp"
#include "physkit/scenegen/build.hpp"
#include "physkit/scenegen/registry.hpp"
#include "physkit/scenegen/scene.hpp"
#include "physkit/scenegen/split.hpp"
#include "physkit/scenegen/variation.hpp"
#include "physkit/spectral/spectrum.hpp"
#include "physkit/video/video_io.hpp"

#ifndef PHYSKIT_VERSION
#define PHYSKIT_VERSION "dev"
#endif

namespace physkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Stable process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_zero_energy = 3,
  exit_runtime = 4,
  exit_io = 5,
};

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::zero_energy: return exit_zero_energy;
    case Errc::io_failure: return exit_io;
    case Errc::non_positive_j:
    case Errc::missing_velocity_gradient:
    case Errc::singular_f:
    case Errc::svd_failure:
    case Errc::particle_out_of_domain:
    case Errc::numerical_instability:
    case Errc::pole_singularity:
    case Errc::non_incident:
    case Errc::zero_density: return exit_runtime;
    default: return exit_config;
  }
}

inline std::string hex(const unsigned char* bytes, unsigned n) {
  std::string s;
  static const char* digits = "0123456789abcdef";
  for (unsigned i = 0; i < n; ++i) {
    s += digits[bytes[i] >> 4];
    s += digits[bytes[i] & 15];
  }
  return s;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
      throw Error(Errc::io_failure, "SHA-256 initialisation failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
  std::string hex_digest() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    return hex(md, len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

inline std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex_digest();
}

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex_digest();
}

inline std::string fixed4(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + dir.string() + ": " + ec.message());
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

// ---- pmf ----

struct PmfOptions {
  std::string gen;
  std::string ref;
  std::string batch;
  bool json_output = false;
  double tv_floor = 1e-9;
};

inline VideoTensor load_named(const std::string& path) {
  try {
    return load_video(path);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

inline spectral::PmfResult score_pair(const std::string& gen_path, const std::string& ref_path, double floor) {
  const auto gen = load_named(gen_path);
  const auto ref = load_named(ref_path);
  if (gen.dims != ref.dims)
    throw Error(Errc::dimension_mismatch, gen_path + " is " + to_string(gen.dims) + " but " + ref_path + " is " +
                                              to_string(ref.dims));
  for (const auto* v : {&gen, &ref})
    if (std::all_of(v->data.begin(), v->data.end(), [](double x) { return x == 0.0; }))
      throw Error(Errc::zero_energy, (v == &gen ? gen_path : ref_path) + " has zero spectral energy");
  return spectral::pmf_report(gen, ref, {floor});
}

inline int cmd_pmf(const PmfOptions& o, std::ostream& out) {
  if (!o.batch.empty()) {
    std::ifstream in(o.batch);
    if (!in) throw Error(Errc::io_failure, "cannot open " + o.batch);
    const fs::path base = fs::path(o.batch).parent_path();
    auto resolve = [&](std::string p) {
      p.erase(0, p.find_first_not_of(" \t"));
      p.erase(p.find_last_not_of(" \t\r") + 1);
      fs::path q(p);
      return (q.is_relative() ? base / q : q).string();
    };
    out << "gen,ref,pmf,tv_distance\n";
    std::string line;
    double sum = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("gen,", 0) == 0) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw Error(Errc::invalid_config, "pairs line without a comma: " + line);
      const auto gen = resolve(line.substr(0, comma)), ref = resolve(line.substr(comma + 1));
      const auto r = score_pair(gen, ref, o.tv_floor);
      out << gen << ',' << ref << ',' << fixed4(r.pmf) << ',' << std::setprecision(17) << r.tv_distance << '\n';
      sum += r.pmf;
      ++rows;
    }
    if (rows == 0) throw Error(Errc::invalid_config, o.batch + " lists no pairs");
    out << "mean,," << fixed4(sum / rows) << ",\n";
    return exit_ok;
  }
  const auto r = score_pair(o.gen, o.ref, o.tv_floor);
  if (o.json_output) {
    const auto d = load_named(o.gen).dims;
    json j{{"pmf", r.pmf},
           {"tv_distance", r.tv_distance},
           {"dims", {{"channels", d.channels}, {"height", d.height}, {"width", d.width}, {"frames", d.frames}}}};
    out << j.dump() << '\n';
  } else {
    out << fixed4(r.pmf) << '\n';
  }
  return exit_ok;
}

// ---- simulate ----

struct SimulateOptions {
  std::string scene;
  std::string out_dir;
  std::optional<int> frames;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> dx;
  bool annotate = false;
  std::string command_line;
};

inline std::string frame_name(const char* prefix, std::size_t f, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.%s", prefix, f, ext);
  return buf;
}

/// Everything in the manifest except "unhashed" feeds "digest".
inline json finalize_manifest(json manifest, json unhashed) {
  manifest["digest"] = sha256_hex(manifest.dump());
  manifest["unhashed"] = std::move(unhashed);
  return manifest;
}

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  auto spec = scenegen::load_scene(o.scene);
  if (o.frames) spec.sim.frames = *o.frames;
  if (o.seed) spec.seed = *o.seed;
  if (o.dt) spec.sim.config.dt = *o.dt;
  if (o.dx) spec.sim.config.dx = *o.dx;
  spec.sim.config.seed = spec.seed;
  scenegen::validate(spec);
  const fs::path base = fs::path(o.scene).parent_path();
  const fs::path out_dir = o.out_dir;
  ensure_dir(out_dir);

  const auto build = scenegen::build_simulation(spec, base);
  mpm::Simulation sim(build.config, build.materials, build.particles, build.forces);
  std::vector<std::string> outputs;
  std::vector<scenegen::FrameSnapshot> snapshots;
  for (int f = 1; f <= spec.sim.frames; ++f) {
    sim.advance_frame();
    const auto name = frame_name("frame", static_cast<std::size_t>(f), "pios");
    mpm::save_checkpoint(out_dir / name, sim.particles());
    outputs.push_back(name);
    if (o.annotate) snapshots.push_back({sim.particles(), {}});
  }
  if (o.annotate && !snapshots.empty()) {
    const auto cams = scenegen::camera_poses(spec, static_cast<int>(snapshots.size()));
    const auto summary = scenegen::write_annotations(spec, snapshots, cams, out_dir / "annotations", base);
    for (const auto& p : summary.files) outputs.push_back(fs::relative(p, out_dir).generic_string());
  }
  if (sim.cfl_warnings() > 0)
    err << "warning: " << sim.cfl_warnings() << " substeps moved a particle more than one cell\n";

  json files = json::object();
  for (const auto& name : outputs) files[name] = sha256_file(out_dir / name);
  json manifest{{"scene_id", spec.id},
                {"config_hash", sha256_hex(scenegen::scene_to_json(spec).dump())},
                {"seeds", {{"scene", spec.seed}}},
                {"versions", {{"physkit", PHYSKIT_VERSION}, {"pios", mpm::pios_version}}},
                {"frames", spec.sim.frames},
                {"particles", build.particles.size()},
                {"annotated", o.annotate},
                {"outputs", std::move(files)}};
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest = finalize_manifest(std::move(manifest), {{"command_line", o.command_line},
                                                     {"started_at", utc_now()},
                                                     {"wall_clock_seconds", wall},
                                                     {"cfl_warnings", sim.cfl_warnings()}});
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  out << manifest["digest"].get<std::string>() << '\n';
  return exit_ok;
}

// ---- cameras ----

struct CamerasOptions {
  std::string strategy = "linear_drift";
  std::string hemisphere = "both";
  int frames = 30;
  int count = 12;
  double radius = 1.0;
  std::vector<double> center{0.0, 0.0, 0.0};
  std::uint64_t seed = 0;
};

inline json pose_json(const camgen::CameraPose& p) {
  const auto m = camgen::camera_to_world(p);
  json mat = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) mat.push_back(m(r, c));
  return {{"position", {p.position.x(), p.position.y(), p.position.z()}},
          {"look_at", {p.look_at.x(), p.look_at.y(), p.look_at.z()}},
          {"up", {p.up.x(), p.up.y(), p.up.z()}},
          {"camera_to_world", std::move(mat)}};
}

inline int cmd_cameras(const CamerasOptions& o, std::ostream& out) {
  if (o.center.size() != 3) throw Error(Errc::invalid_config, "--center takes three values");
  const camgen::Vec3 center(o.center[0], o.center[1], o.center[2]);
  std::vector<camgen::CameraPose> poses;
  if (o.strategy == "static") {
    poses = camgen::sample_static_ring(o.count, o.radius, center, o.seed);
  } else {
    camgen::TrajectoryConfig cfg;
    cfg.strategy = camgen::parse_strategy(o.strategy);
    cfg.hemisphere = camgen::parse_hemisphere(o.hemisphere);
    cfg.n_frames = o.frames;
    cfg.base_radius = o.radius;
    cfg.center = center;
    cfg.seed = o.seed;
    poses = camgen::generate_trajectory(cfg);
  }
  json arr = json::array();
  for (const auto& p : poses) arr.push_back(pose_json(p));
  out << json{{"strategy", o.strategy}, {"seed", o.seed}, {"poses", std::move(arr)}}.dump() << '\n';
  return exit_ok;
}

// ---- scenes ----

struct EnumerateOptions {
  std::string registry;
  std::string compatibility;
  std::string arity = "single";
  bool all_compatible = false;
  bool count_only = false;
};

inline int cmd_scenes_enumerate(const EnumerateOptions& o, std::ostream& out) {
  auto reg = scenegen::load_registry(o.registry, o.compatibility.empty()
                                                     ? std::nullopt
                                                     : std::optional<fs::path>(o.compatibility));
  if (o.all_compatible) reg.fill_compatibility(true);
  const auto acts = scenegen::enumerate_activities(reg, scenegen::parse_arity(o.arity));
  if (o.count_only) {
    out << acts.size() << '\n';
    return exit_ok;
  }
  for (const auto& a : acts) {
    json names = json::array();
    for (int p : a.phenomena) names.push_back(reg.entries[static_cast<std::size_t>(p - 1)].name);
    out << json{{"phenomena", a.phenomena}, {"names", std::move(names)}}.dump() << '\n';
  }
  return exit_ok;
}

struct VaryOptions {
  std::string scene;
  std::string out_dir;
  int count = 1;
  std::uint64_t seed = 0;
};

inline int cmd_scenes_vary(const VaryOptions& o, std::ostream& out) {
  const auto spec = scenegen::load_scene(o.scene);
  scenegen::validate(spec);
  ensure_dir(o.out_dir);
  for (const auto& v : scenegen::vary_materials(spec, o.count, o.seed)) {
    const auto path = fs::path(o.out_dir) / (v.id + ".json");
    scenegen::save_scene(v, path);
    out << path.string() << '\n';
  }
  return exit_ok;
}

struct SplitOptions {
  std::vector<std::string> scenes;
  std::vector<double> ratios{8.0, 1.0, 1.0};
  std::uint64_t seed = 0;
};

inline int cmd_scenes_split(const SplitOptions& o, std::ostream& out) {
  if (o.ratios.size() != 3) throw Error(Errc::invalid_config, "--ratios takes three values");
  std::vector<fs::path> files;
  for (const auto& s : o.scenes) {
    if (fs::is_directory(s)) {
      for (const auto& e : fs::directory_iterator(s))
        if (e.path().extension() == ".json") files.push_back(e.path());
    } else {
      files.emplace_back(s);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<scenegen::SceneSpec> specs;
  for (const auto& f : files) specs.push_back(scenegen::load_scene(f));
  const auto split = scenegen::split_dataset(specs, {o.ratios[0], o.ratios[1], o.ratios[2]}, o.seed);
  out << scenegen::split_to_json(split).dump(2) << '\n';
  return exit_ok;
}

struct AnnotateOptions {
  std::string scene;
  std::string checkpoints;
  std::string out_dir;
};

inline int cmd_scenes_annotate(const AnnotateOptions& o, std::ostream& out) {
  const auto spec = scenegen::load_scene(o.scene);
  scenegen::validate(spec);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(o.checkpoints))
    if (e.path().extension() == ".pios") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(Errc::io_failure, "no .pios checkpoints in " + o.checkpoints);
  std::vector<scenegen::FrameSnapshot> frames;
  for (const auto& f : files) frames.push_back({mpm::load_checkpoint(f), {}});
  const auto cams = scenegen::camera_poses(spec, static_cast<int>(frames.size()));
  const auto summary = scenegen::write_annotations(spec, frames, cams, o.out_dir, fs::path(o.scene).parent_path());
  out << summary.files.size() << " files written\n";
  return exit_ok;
}

// ---- sdf ----

struct SdfOptions {
  std::string mesh;
  std::string out;
  double spacing = 0.01;
  int padding = 3;
};

inline constexpr std::string_view psdf_magic = "PSDF";

/// PSDF: magic, u32 nx, ny, nz, f64 origin[3], f64 spacing, f32 distances (x fastest).
inline void save_sdf(const mpm::VoxelSDF& sdf, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  binio::write_magic(out, psdf_magic);
  for (int a = 0; a < 3; ++a) binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(sdf.dims[a]));
  for (int a = 0; a < 3; ++a) binio::write<double>(out, sdf.origin[a]);
  binio::write<double>(out, sdf.spacing);
  for (double d : sdf.distance) binio::write<float>(out, static_cast<float>(d));
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

inline int cmd_sdf(const SdfOptions& o, std::ostream& out) {
  const auto mesh = mpm::load_mesh(o.mesh);
  const auto sdf = mpm::sdf_from_mesh(mesh, o.spacing, o.padding);
  save_sdf(sdf, o.out);
  const auto [lo, hi] = std::minmax_element(sdf.distance.begin(), sdf.distance.end());
  out << json{{"dims", {sdf.dims[0], sdf.dims[1], sdf.dims[2]}},
              {"spacing", sdf.spacing},
              {"min_distance", *lo},
              {"max_distance", *hi}}
             .dump()
      << '\n';
  return exit_ok;
}

// ---- bench ----

struct BenchOptions {
  std::string suite;
  std::size_t particles = 100000;
  int repeats = 5;
  bool json_output = false;
  std::uint64_t seed = 0;
};

struct Timing {
  double median = 0.0;
  double min = 0.0;
};

template <class F>
Timing time_runs(int repeats, F&& f) {
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return {t[t.size() / 2], t.front()};
}

/// Particles seeded uniformly in the middle of the unit domain.
inline mpm::ParticleSet bench_particles(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  mpm::ParticleSet p;
  p.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    p.add(mpm::Vec3(rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)),
          mpm::Vec3(rng.normal(0.0, 0.1), rng.normal(0.0, 0.1), rng.normal(0.0, 0.1)), 1e-4, 1e-7, 0);
  return p;
}

inline std::string grid_checksum(const mpm::GridState& g) {
  Sha256 h;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.mass[i] == 0.0) continue;
    const std::uint64_t idx = i;
    h.update(&idx, sizeof idx);
    h.update(&g.mass[i], sizeof(double));
    h.update(g.momentum[i].data(), 3 * sizeof(double));
  }
  return h.hex_digest();
}

inline int cmd_bench(const BenchOptions& o, std::ostream& out) {
  if (o.repeats < 1) throw Error(Errc::invalid_config, "--repeats must be >= 1");
  json report{{"suite", o.suite}, {"repeats", o.repeats}, {"threads", thread_count()}};
  Timing t;
  if (o.suite == "fft") {
    VideoDims d{2, 64, 64, 64};
    Rng rng(o.seed);
    VideoTensor v(d);
    for (auto& x : v.data) x = rng.uniform();
    t = time_runs(o.repeats, [&] { (void)spectral::dft3(v); });
    report["voxels"] = d.size();
    report["voxels_per_second"] = static_cast<double>(d.size()) / t.median;
  } else if (o.suite == "p2g" || o.suite == "full-step") {
    const auto particles = bench_particles(o.particles, o.seed);
    const std::vector<constitutive::MaterialModel> materials{
        constitutive::ElasticSolid{constitutive::lame_from_modulus(1e4, 0.3)}};
    mpm::SimConfig cfg;
    cfg.dt = 1e-4;
    auto grid = mpm::make_grid(cfg);
    if (o.suite == "p2g") {
      t = time_runs(o.repeats, [&] {
        auto p = particles;
        grid.clear();
        mpm::p2g(p, materials, grid, cfg.dt);
      });
    } else {
      t = time_runs(o.repeats, [&] {
        auto p = particles;
        grid.clear();
        mpm::step(p, materials, grid, cfg);
      });
    }
    report["particles"] = o.particles;
    report["particles_per_second"] = static_cast<double>(o.particles) / t.median;
    report["checksum"] = grid_checksum(grid);
  } else {
    throw Error(Errc::invalid_config, "unknown bench suite '" + o.suite + "' (fft, p2g, full-step)");
  }
  report["median_seconds"] = t.median;
  report["min_seconds"] = t.min;
  if (o.json_output) {
    out << report.dump() << '\n';
  } else {
    for (const auto& [k, val] : report.items()) out << k << ": " << (val.is_string() ? val.get<std::string>() : val.dump()) << '\n';
  }
  return exit_ok;
}

// ---- entry point ----

/// Parses argv and runs one subcommand. stdout carries data, stderr diagnostics.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"physkit: physics simulation, camera, dataset and PMF tooling"};
  app.require_subcommand(1);
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  app.add_option("--threads", threads, "worker threads (PHYSKIT_THREADS also works)");
  app.add_option("--seed", seed, "seed for every random draw");
  app.set_version_flag("--version", PHYSKIT_VERSION);

  PmfOptions pmf_opt;
  auto* pmf = app.add_subcommand("pmf", "score a generated video against a reference");
  pmf->add_option("gen", pmf_opt.gen, "generated video (PIOV file or frame directory)");
  pmf->add_option("ref", pmf_opt.ref, "reference video");
  pmf->add_option("--batch", pmf_opt.batch, "CSV of gen,ref pairs");
  pmf->add_flag("--json", pmf_opt.json_output, "print JSON instead of text or CSV");
  pmf->add_option("--tv-floor", pmf_opt.tv_floor, "lower bound on the TV distance (default 1e-9)");

  SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "run a scene and write checkpoints");
  simulate->add_option("scene", sim_opt.scene, "scene JSON")->required();
  simulate->add_option("--out", sim_opt.out_dir, "output directory")->required();
  simulate->add_option("--frames", sim_opt.frames, "override the scene frame count");
  simulate->add_option("--dt", sim_opt.dt, "override the substep size (s)");
  simulate->add_option("--dx", sim_opt.dx, "override the grid spacing (m)");
  simulate->add_flag("--annotate", sim_opt.annotate, "also write annotations to OUT/annotations");

  CamerasOptions cam_opt;
  auto* cameras = app.add_subcommand("cameras", "sample camera poses");
  cameras->add_option("--strategy", cam_opt.strategy, "static, linear_drift, sinusoidal or circular_loop");
  cameras->add_option("--hemisphere", cam_opt.hemisphere, "upper, lower or both");
  cameras->add_option("--frames", cam_opt.frames, "poses per trajectory");
  cameras->add_option("--count", cam_opt.count, "static views");
  cameras->add_option("--radius", cam_opt.radius, "base radius (m)");
  cameras->add_option("--center", cam_opt.center, "look-at point")->expected(3);

  auto* scenes = app.add_subcommand("scenes", "scene dataset tools");
  scenes->require_subcommand(1);
  EnumerateOptions en_opt;
  auto* enumerate = scenes->add_subcommand("enumerate", "list activities");
  enumerate->add_option("--registry", en_opt.registry, "phenomenon table JSON")->required();
  enumerate->add_option("--compatibility", en_opt.compatibility, "compatibility JSON");
  enumerate->add_option("--arity", en_opt.arity, "single, double or triple");
  enumerate->add_flag("--all-compatible", en_opt.all_compatible, "treat every pair as compatible");
  enumerate->add_flag("--count", en_opt.count_only, "print only the number of activities");
  VaryOptions vary_opt;
  auto* vary = scenes->add_subcommand("vary", "resample material parameters");
  vary->add_option("scene", vary_opt.scene, "scene JSON")->required();
  vary->add_option("--out", vary_opt.out_dir, "output directory")->required();
  vary->add_option("-n,--count", vary_opt.count, "number of variants");
  SplitOptions split_opt;
  auto* split = scenes->add_subcommand("split", "asset-exclusive train/val/test split");
  split->add_option("scenes", split_opt.scenes, "scene files or directories")->required();
  split->add_option("--ratios", split_opt.ratios, "train, val and test weights (default 8 1 1)")->expected(3);
  AnnotateOptions ann_opt;
  auto* annotate = scenes->add_subcommand("annotate", "write depth, segmentation, trajectory and physics files");
  annotate->add_option("scene", ann_opt.scene, "scene JSON")->required();
  annotate->add_option("--checkpoints", ann_opt.checkpoints, "directory written by simulate")->required();
  annotate->add_option("--out", ann_opt.out_dir, "output directory")->required();

  SdfOptions sdf_opt;
  auto* sdf = app.add_subcommand("sdf", "voxelize a closed mesh");
  sdf->add_option("mesh", sdf_opt.mesh, "STL or OFF mesh")->required();
  sdf->add_option("--out", sdf_opt.out, "PSDF output file")->required();
  sdf->add_option("--spacing", sdf_opt.spacing, "voxel spacing (m)");
  sdf->add_option("--padding", sdf_opt.padding, "empty voxels around the mesh bounds");

  BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "time fft, p2g or full-step");
  bench->add_option("suite", bench_opt.suite, "fft, p2g or full-step")->required();
  bench->add_option("--particles", bench_opt.particles, "particle count for p2g and full-step");
  bench->add_option("--repeats", bench_opt.repeats, "timed repetitions");
  bench->add_flag("--json", bench_opt.json_output, "print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << PHYSKIT_VERSION << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    const std::uint64_t s = seed.value_or(0);
    if (*pmf) {
      if (pmf_opt.batch.empty() && (pmf_opt.gen.empty() || pmf_opt.ref.empty())) {
        err << "error: pmf needs GEN and REF or --batch\n";
        return exit_config;
      }
      return cmd_pmf(pmf_opt, out);
    }
    if (*simulate) {
      sim_opt.seed = seed;
      for (int i = 0; i < argc; ++i) sim_opt.command_line += (i ? " " : "") + std::string(argv[i]);
      return cmd_simulate(sim_opt, out, err);
    }
    if (*cameras) {
      cam_opt.seed = s;
      return cmd_cameras(cam_opt, out);
    }
    if (*enumerate) return cmd_scenes_enumerate(en_opt, out);
    if (*vary) {
      vary_opt.seed = s;
      return cmd_scenes_vary(vary_opt, out);
    }
    if (*split) {
      split_opt.seed = s;
      return cmd_scenes_split(split_opt, out);
    }
    if (*annotate) return cmd_scenes_annotate(ann_opt, out);
    if (*sdf) return cmd_sdf(sdf_opt, out);
    if (*bench) {
      bench_opt.seed = s;
      return cmd_bench(bench_opt, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoFailure: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_failure;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"physkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace physkit::cli
