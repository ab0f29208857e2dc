#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "support/temp_dir.hpp"

using namespace physkit;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = PHYSKIT_DATA_DIR;
const std::string example_scene = (data_dir / "scenes/elastic_cube.json").string();

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

VideoTensor ramp_video(std::uint32_t frames, double phase = 0.0) {
  VideoTensor v(VideoDims{1, 8, 8, frames});
  for (std::uint32_t t = 0; t < frames; ++t)
    for (std::uint32_t h = 0; h < 8; ++h)
      for (std::uint32_t w = 0; w < 8; ++w) v.at(0, h, w, t) = 0.5 + 0.4 * std::sin(0.3 * (h + w + t) + phase * t);
  return v;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(Cli, MissingSubcommandIsAConfigError) { EXPECT_EQ(run({}).code, 2); }

TEST(Cli, PmfOfIdenticalFilesHitsTheFloor) {
  test::TempDir dir;
  save_video(ramp_video(6), dir / "a.piov");
  const auto r = run({"pmf", (dir / "a.piov").string(), (dir / "a.piov").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "20.7233\n");
}

TEST(Cli, PmfJsonReportsDims) {
  test::TempDir dir;
  save_video(ramp_video(6), dir / "a.piov");
  save_video(ramp_video(6, 0.2), dir / "b.piov");
  const auto r = run({"pmf", "--json", (dir / "a.piov").string(), (dir / "b.piov").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GT(j["pmf"].get<double>(), 0.0);
  EXPECT_NEAR(j["pmf"].get<double>(), -std::log(j["tv_distance"].get<double>()), 1e-12);
  EXPECT_EQ(j["dims"]["frames"], 6);
  EXPECT_EQ(j["dims"]["height"], 8);
}

TEST(Cli, PmfDimensionMismatchExitsTwoNamingFiles) {
  test::TempDir dir;
  save_video(ramp_video(6), dir / "six.piov");
  save_video(ramp_video(5), dir / "five.piov");
  const auto r = run({"pmf", (dir / "six.piov").string(), (dir / "five.piov").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("five.piov"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, PmfZeroEnergyExitsThree) {
  test::TempDir dir;
  save_video(ramp_video(4), dir / "a.piov");
  save_video(VideoTensor(VideoDims{1, 8, 8, 4}), dir / "black.piov");
  const auto r = run({"pmf", (dir / "a.piov").string(), (dir / "black.piov").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("black.piov"), std::string::npos);
}

TEST(Cli, PmfBatchFooterIsTheMeanOfRows) {
  test::TempDir dir;
  save_video(ramp_video(6), dir / "ref.piov");
  for (int i = 1; i <= 3; ++i) save_video(ramp_video(6, 0.1 * i), dir / ("g" + std::to_string(i) + ".piov"));
  std::ofstream(dir / "pairs.csv") << "gen,ref\ng1.piov,ref.piov\ng2.piov,ref.piov\ng3.piov,ref.piov\n";
  const auto r = run({"pmf", "--batch", (dir / "pairs.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "gen,ref,pmf,tv_distance");
  std::vector<double> tvs;
  double footer = 0.0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (cells[0] == "mean") footer = std::stod(cells[2]);
    else tvs.push_back(std::stod(cells[3]));
  }
  ASSERT_EQ(tvs.size(), 3u);
  double mean = 0.0;
  for (double tv : tvs) mean += -std::log(std::max(tv, 1e-9)) / 3.0;
  EXPECT_NEAR(footer, mean, 5e-5);
}

TEST(Cli, SimulateIsDeterministic) {
  test::TempDir a, b;
  const auto ra = run({"simulate", example_scene, "--out", a.path().string(), "--frames", "3", "--annotate"});
  const auto rb = run({"simulate", example_scene, "--out", b.path().string(), "--frames", "3", "--annotate"});
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(ra.out, rb.out);
  for (const char* f : {"frame_0001.pios", "frame_0003.pios", "annotations/trajectory.jsonl",
                        "annotations/physics.json", "annotations/cam_02/seg_0002.pios16"})
    EXPECT_EQ(read_bytes(a / f), read_bytes(b / f)) << f;
  const auto manifest = nlohmann::json::parse(read_bytes(a / "manifest.json"));
  EXPECT_EQ(manifest["outputs"].size(), 3u + 3u * 3u * 2u + 2u);
  EXPECT_EQ(manifest["seeds"]["scene"], 7);
  EXPECT_TRUE(manifest["unhashed"].contains("wall_clock_seconds"));
}

TEST(Cli, SeedFlagOverridesTheScene) {
  test::TempDir a, b;
  const auto ra = run({"--seed", "8", "simulate", example_scene, "--out", a.path().string(), "--frames", "1"});
  const auto rb = run({"simulate", example_scene, "--out", b.path().string(), "--frames", "1"});
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_NE(read_bytes(a / "frame_0001.pios"), read_bytes(b / "frame_0001.pios"));
  EXPECT_EQ(nlohmann::json::parse(read_bytes(a / "manifest.json"))["seeds"]["scene"], 8);
}

TEST(Cli, ZeroFramesWritesOnlyTheManifest) {
  test::TempDir dir;
  const auto r = run({"simulate", example_scene, "--out", dir.path().string(), "--frames", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir.path())) names.push_back(e.path().filename().string());
  EXPECT_EQ(names, std::vector<std::string>{"manifest.json"});
}

TEST(Cli, IncompressibleMaterialExitsTwo) {
  test::TempDir dir;
  auto j = scenegen::read_json_file(example_scene);
  j["materials"][0]["model"]["poisson_ratio"] = 0.5;
  std::ofstream(dir / "bad.json") << j.dump();
  const auto r = run({"simulate", (dir / "bad.json").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InvalidPoisson"), std::string::npos);
}

TEST(Cli, MissingSceneExitsFive) {
  test::TempDir dir;
  EXPECT_EQ(run({"simulate", (dir / "nope.json").string(), "--out", (dir / "o").string()}).code, 5);
}

TEST(Cli, UnstableRunExitsFour) {
  test::TempDir dir;
  const auto r = run({"simulate", example_scene, "--out", dir.path().string(), "--frames", "30", "--dt", "0.05"});
  EXPECT_EQ(r.code, 4) << r.err;
}

TEST(Cli, CamerasAreSeedDeterministic) {
  const auto a = run({"--seed", "5", "cameras", "--strategy", "sinusoidal", "--frames", "12", "--radius", "2"});
  const auto b = run({"--seed", "5", "cameras", "--strategy", "sinusoidal", "--frames", "12", "--radius", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(nlohmann::json::parse(a.out)["poses"].size(), 12u);
  const auto s = run({"cameras", "--strategy", "static", "--count", "4"});
  EXPECT_EQ(nlohmann::json::parse(s.out)["poses"].size(), 4u);
  EXPECT_EQ(run({"cameras", "--strategy", "zigzag"}).code, 2);
}

TEST(Cli, EnumerateCounts) {
  const auto reg = (data_dir / "registry/phenomena.json").string();
  EXPECT_EQ(run({"scenes", "enumerate", "--registry", reg, "--count"}).out, "71\n");
  EXPECT_EQ(run({"scenes", "enumerate", "--registry", reg, "--arity", "double", "--all-compatible", "--count"}).out,
            "2485\n");
  EXPECT_EQ(run({"scenes", "enumerate", "--registry", reg, "--arity", "double", "--count"}).out, "0\n");
}

TEST(Cli, VariantsShareAssetsSoSplittingThemIsInfeasible) {
  test::TempDir dir;
  const auto v = run({"scenes", "vary", example_scene, "--out", (dir / "v").string(), "-n", "12"});
  ASSERT_EQ(v.code, 0) << v.err;
  const auto s = run({"scenes", "split", (dir / "v").string()});
  EXPECT_EQ(s.code, 2);
  EXPECT_NE(s.err.find("Infeasible"), std::string::npos);
}

TEST(Cli, SplitOfDistinctScenesIsEightOneOne) {
  test::TempDir dir;
  auto j = scenegen::read_json_file(example_scene);
  for (int i = 0; i < 10; ++i) {
    j["id"] = "scene" + std::to_string(i);
    j["objects"][0]["asset_id"] = "cube" + std::to_string(i);
    j["objects"][1]["asset_id"] = "block" + std::to_string(i);
    std::ofstream(dir / ("s" + std::to_string(i) + ".json")) << j.dump();
  }
  const auto r = run({"scenes", "split", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = nlohmann::json::parse(r.out);
  EXPECT_EQ(out["totals"]["train"], 8);
  EXPECT_EQ(out["totals"]["val"], 1);
  EXPECT_EQ(out["totals"]["test"], 1);
}

TEST(Cli, AnnotateFromCheckpoints) {
  test::TempDir dir;
  ASSERT_EQ(run({"simulate", example_scene, "--out", (dir / "sim").string(), "--frames", "2"}).code, 0);
  const auto r = run({"scenes", "annotate", example_scene, "--checkpoints", (dir / "sim").string(), "--out",
                      (dir / "ann").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "ann/cam_00/depth_0001.piod"));
  EXPECT_TRUE(fs::exists(dir / "ann/physics.json"));
}

TEST(Cli, SdfWritesVoxelFile) {
  test::TempDir dir;
  mpm::save_stl(mpm::make_box_mesh(mpm::Vec3::Zero(), mpm::Vec3::Ones()), dir / "box.stl");
  const auto r = run({"sdf", (dir / "box.stl").string(), "--out", (dir / "box.psdf").string(), "--spacing", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j["min_distance"].get<double>(), 0.0);
  EXPECT_GT(j["max_distance"].get<double>(), 0.0);
  EXPECT_EQ(read_bytes(dir / "box.psdf").substr(0, 4), "PSDF");
}

TEST(Cli, BenchReportsThroughputAndChecksum) {
  const auto f = run({"bench", "fft", "--repeats", "1", "--json"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_GT(nlohmann::json::parse(f.out)["voxels_per_second"].get<double>(), 0.0);
  const auto a = run({"bench", "p2g", "--particles", "2000", "--repeats", "2", "--json"});
  const auto b = run({"bench", "p2g", "--particles", "2000", "--repeats", "1", "--json"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(nlohmann::json::parse(a.out)["checksum"], nlohmann::json::parse(b.out)["checksum"]);
  EXPECT_EQ(run({"bench", "quantum"}).code, 2);
}

TEST(Cli, ExitCodeTable) {
  EXPECT_EQ(cli::exit_code_for(Errc::dimension_mismatch), 2);
  EXPECT_EQ(cli::exit_code_for(Errc::invalid_poisson), 2);
  EXPECT_EQ(cli::exit_code_for(Errc::zero_energy), 3);
  EXPECT_EQ(cli::exit_code_for(Errc::numerical_instability), 4);
  EXPECT_EQ(cli::exit_code_for(Errc::io_failure), 5);
}

TEST(Cli, Sha256KnownVector) {
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
