#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "physkit/scenegen/annotations.hpp"
#include "physkit/scenegen/build.hpp"
#include "physkit/scenegen/registry.hpp"
#include "physkit/scenegen/scene.hpp"
#include "physkit/scenegen/split.hpp"
#include "physkit/scenegen/variation.hpp"
#include "support/temp_dir.hpp"

using namespace physkit;
using namespace physkit::scenegen;

namespace {

const std::filesystem::path data_dir = PHYSKIT_DATA_DIR;

PhenomenonRegistry shipped_registry() {
  return load_registry(data_dir / "registry/phenomena.json", data_dir / "registry/compatibility_starter.json");
}

SceneSpec example_scene() { return load_scene(data_dir / "scenes/elastic_cube.json"); }

template <class F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::io_failure;
}

std::vector<SceneRecord> disjoint_records(int n, int phenomena) {
  std::vector<SceneRecord> out;
  for (int i = 0; i < n; ++i)
    out.push_back({"s" + std::to_string(i), {"asset" + std::to_string(i)}, {1 + i % phenomena}});
  return out;
}

}  // namespace

TEST(Registry, ShippedTableHasSeventyOneDenseEntries) {
  const auto reg = shipped_registry();
  ASSERT_EQ(reg.size(), 71);
  for (int i = 0; i < 71; ++i) EXPECT_EQ(reg.entries[i].index, i + 1);
  EXPECT_EQ(reg.entries[0].laws, std::vector<std::string>{"Laws of Momentum"});
  EXPECT_EQ(reg.entries[70].laws, std::vector<std::string>{"Laws of Friction"});
  EXPECT_EQ(reg.entries[3].laws.size(), 3u);
}

TEST(Registry, StarterMatrixIsMarkedNonCanonical) {
  const auto doc = read_json_file(data_dir / "registry/compatibility_starter.json");
  EXPECT_FALSE(doc.at("canonical").get<bool>());
}

TEST(Registry, SingleArityYieldsEveryPhenomenon) {
  const auto acts = enumerate_activities(shipped_registry(), Arity::single);
  ASSERT_EQ(acts.size(), 71u);
  EXPECT_EQ(acts.front().phenomena, std::vector<int>{1});
  EXPECT_EQ(acts.back().phenomena, std::vector<int>{71});
}

TEST(Registry, AllTrueMatrixGivesEveryPairAndTriple) {
  auto reg = shipped_registry();
  reg.fill_compatibility(true);
  EXPECT_EQ(enumerate_activities(reg, Arity::double_).size(), 2485u);
  EXPECT_EQ(enumerate_activities(reg, Arity::triple).size(), 57155u);
}

TEST(Registry, AllFalseMatrixGivesNothing) {
  auto reg = shipped_registry();
  reg.fill_compatibility(false);
  EXPECT_TRUE(enumerate_activities(reg, Arity::double_).empty());
  EXPECT_TRUE(enumerate_activities(reg, Arity::triple).empty());
}

TEST(Registry, DoubleCountMatchesTrueEntriesOfStarterMatrix) {
  const auto reg = shipped_registry();
  std::size_t true_pairs = 0;
  for (int a = 1; a <= 71; ++a)
    for (int b = a + 1; b <= 71; ++b) true_pairs += reg.compatible(a, b);
  const auto doc = read_json_file(data_dir / "registry/compatibility_starter.json");
  EXPECT_EQ(true_pairs, doc.at("pairs").size());
  const auto acts = enumerate_activities(reg, Arity::double_);
  EXPECT_EQ(acts.size(), true_pairs);
  for (std::size_t i = 1; i < acts.size(); ++i) EXPECT_LT(acts[i - 1].phenomena, acts[i].phenomena);
}

TEST(Registry, EnumerationIsRepeatable) {
  const auto reg = shipped_registry();
  EXPECT_EQ(enumerate_activities(reg, Arity::triple), enumerate_activities(reg, Arity::triple));
}

TEST(Registry, TripleDefaultsToPairwiseAnd) {
  auto reg = shipped_registry();
  reg.fill_compatibility(false);
  reg.set_compatible(1, 2, true);
  reg.set_compatible(1, 3, true);
  reg.set_compatible(2, 3, true);
  ASSERT_EQ(enumerate_activities(reg, Arity::triple).size(), 1u);
  reg.set_compatible(2, 3, false);
  EXPECT_TRUE(enumerate_activities(reg, Arity::triple).empty());
}

TEST(Registry, ExplicitTriplesOverridePairwiseRule) {
  auto reg = shipped_registry();
  reg.fill_compatibility(true);
  reg.valid_triples = std::set<std::array<int, 3>>{{4, 9, 10}};
  const auto acts = enumerate_activities(reg, Arity::triple);
  ASSERT_EQ(acts.size(), 1u);
  EXPECT_EQ(acts[0].phenomena, (std::vector<int>{4, 9, 10}));
}

TEST(Registry, RejectsAsymmetricMatrix) {
  auto reg = shipped_registry();
  reg.compatibility[1] = !reg.compatibility[1];
  EXPECT_EQ(error_code_of([&] { validate(reg); }), Errc::invalid_config);
}

TEST(Registry, RejectsSelfPairs) {
  auto reg = shipped_registry();
  EXPECT_EQ(error_code_of([&] { reg.set_compatible(5, 5, true); }), Errc::invalid_config);
}

TEST(Scene, ExampleLoadsAndValidates) {
  const auto s = example_scene();
  EXPECT_NO_THROW(validate(s, nullptr));
  const auto reg = shipped_registry();
  EXPECT_NO_THROW(validate(s, &reg));
  EXPECT_EQ(s.objects.size(), 2u);
  EXPECT_EQ(s.sim.config.seed, 7u);
  EXPECT_EQ(s.activity.arity, Arity::single);
}

TEST(Scene, JsonRoundTripIsAFixedPoint) {
  const auto j1 = scene_to_json(example_scene());
  const auto j2 = scene_to_json(scene_from_json(j1));
  EXPECT_EQ(j1.dump(), j2.dump());
}

TEST(Scene, DefaultsFillMissingSimKeys) {
  auto j = scene_to_json(example_scene());
  j.erase("sim");
  const auto s = scene_from_json(j);
  EXPECT_DOUBLE_EQ(s.sim.config.dt, 1.0 / 150.0);
  EXPECT_DOUBLE_EQ(s.sim.config.dx, 0.0083);
}

TEST(Scene, UnknownMaterialIsRejected) {
  auto s = example_scene();
  s.objects[0].material = "granite";
  EXPECT_EQ(error_code_of([&] { validate(s); }), Errc::invalid_scene);
}

TEST(Scene, IncompressiblePoissonIsRejectedAtParse) {
  auto j = scene_to_json(example_scene());
  j["materials"][0]["model"]["poisson_ratio"] = 0.5;
  EXPECT_EQ(error_code_of([&] { scene_from_json(j); }), Errc::invalid_poisson);
}

TEST(Scene, OutOfRangeSurfacePropertyNeedsOverride) {
  auto s = example_scene();
  s.materials[0].surface.restitution = 0.95;
  EXPECT_EQ(error_code_of([&] { validate(s); }), Errc::value_out_of_range);
  s.materials[0].allow_out_of_range = true;
  EXPECT_NO_THROW(validate(s));
}

TEST(Scene, EveryPhenomenonNeedsATaggedObject) {
  auto s = example_scene();
  s.phenomenon_objects.clear();
  EXPECT_EQ(error_code_of([&] { validate(s); }), Errc::invalid_scene);
  s.phenomenon_objects[67] = {"ghost"};
  EXPECT_EQ(error_code_of([&] { validate(s); }), Errc::invalid_scene);
}

TEST(Scene, SimulatedObjectNeedsAModel) {
  auto s = example_scene();
  s.objects[1].object_class = ObjectClass::granular;
  EXPECT_EQ(error_code_of([&] { validate(s); }), Errc::invalid_scene);
}

TEST(Scene, IncompatibleActivityIsRejected) {
  auto s = example_scene();
  auto reg = shipped_registry();
  reg.fill_compatibility(false);
  s.activity = {{10, 67}, Arity::double_};
  s.phenomenon_objects[10] = {"cube"};
  EXPECT_EQ(error_code_of([&] { validate(s, &reg); }), Errc::invalid_scene);
  reg.set_compatible(10, 67, true);
  EXPECT_NO_THROW(validate(s, &reg));
}

TEST(Variation, ZeroVariantsGivesEmptyList) { EXPECT_TRUE(vary_materials(example_scene(), 0, 1).empty()); }

TEST(Variation, SampledParametersStayInRange) {
  auto s = example_scene();
  s.materials.push_back({"sand", constitutive::make_granular(constitutive::lame_from_modulus(1e5, 0.3), 30.0),
                         SurfaceProperties{}, std::nullopt, false});
  s.materials.push_back({"mud", constitutive::NonNewtonianFluid{100.0, 1e4, 1.0, 5.0}, SurfaceProperties{},
                         SphProperties{}, false});
  const auto variants = vary_materials(s, 200, 11);
  ASSERT_EQ(variants.size(), 200u);
  for (const auto& v : variants) {
    EXPECT_NO_THROW(validate(v));
    for (const auto& m : v.materials) {
      EXPECT_GE(m.surface.restitution, 0.1);
      EXPECT_LE(m.surface.restitution, 0.8);
      EXPECT_LE(m.surface.dynamic_friction, m.surface.static_friction);
    }
    const auto& g = std::get<constitutive::Granular>(*v.materials[2].model);
    EXPECT_DOUBLE_EQ(g.alpha, constitutive::drucker_prager_alpha(g.friction_angle));
  }
}

TEST(Variation, SameSeedGivesIdenticalVariants) {
  const auto s = example_scene();
  const auto a = vary_materials(s, 5, 3), b = vary_materials(s, 5, 3), c = vary_materials(s, 5, 4);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(scene_to_json(a[i]).dump(), scene_to_json(b[i]).dump());
    EXPECT_NE(scene_to_json(a[i]).dump(), scene_to_json(c[i]).dump());
  }
}

TEST(Variation, GeometryAndActivityAreUnchanged) {
  const auto s = example_scene();
  for (const auto& v : vary_materials(s, 3, 9)) {
    auto jv = scene_to_json(v), js = scene_to_json(s);
    EXPECT_EQ(jv["objects"], js["objects"]);
    EXPECT_EQ(jv["activity"], js["activity"]);
    EXPECT_EQ(jv["sim"], js["sim"]);
  }
}

TEST(Split, TargetsUseLargestRemainder) {
  EXPECT_EQ(split_targets(10, {8, 1, 1}), (std::array<int, 3>{8, 1, 1}));
  EXPECT_EQ(split_targets(15, {8, 1, 1}), (std::array<int, 3>{12, 2, 1}));
  EXPECT_EQ(split_targets(1000, {8, 1, 1}), (std::array<int, 3>{800, 100, 100}));
}

TEST(Split, TenDisjointScenesGiveEightOneOne) {
  const auto split = split_dataset(disjoint_records(10, 1));
  EXPECT_EQ(split.totals, (std::array<int, 3>{8, 1, 1}));
  EXPECT_EQ(split.assignments.size(), 10u);
}

TEST(Split, SingleSharedAssetIsInfeasible) {
  auto recs = disjoint_records(20, 2);
  for (auto& r : recs) r.asset_ids.push_back("shared_table");
  try {
    split_dataset(recs);
    FAIL() << "expected Infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible);
    EXPECT_NE(std::string(e.what()).find("shared_table"), std::string::npos);
  }
}

TEST(Split, TooFewScenesIsRejected) {
  EXPECT_EQ(error_code_of([] { split_dataset(disjoint_records(9, 1)); }), Errc::invalid_config);
}

TEST(Split, HundredDisjointScenesAreStratified) {
  const auto split = split_dataset(disjoint_records(100, 10), {8, 1, 1}, 5);
  EXPECT_EQ(split.totals, (std::array<int, 3>{80, 10, 10}));
  for (const auto& [p, c] : split.strata) {
    EXPECT_NEAR(c[0], 8, 1) << "phenomenon " << p;
    EXPECT_NEAR(c[1], 1, 1) << "phenomenon " << p;
    EXPECT_NEAR(c[2], 1, 1) << "phenomenon " << p;
  }
}

TEST(Split, SharedAssetsStayInOneSplit) {
  Rng rng(17);
  std::vector<SceneRecord> recs;
  for (int i = 0; i < 300; ++i) {
    SceneRecord r{"s" + std::to_string(i), {}, {1 + static_cast<int>(rng.below(6))}};
    const int k = 1 + static_cast<int>(rng.below(3));
    for (int a = 0; a < k; ++a) r.asset_ids.push_back("a" + std::to_string(rng.below(600)));
    recs.push_back(r);
  }
  const auto split = split_dataset(recs, {8, 1, 1}, 2);
  std::map<std::string, std::set<Split>> where;
  for (const auto& r : recs)
    for (const auto& a : r.asset_ids) where[a].insert(split.assignments.at(r.id));
  for (const auto& [a, splits] : where) EXPECT_EQ(splits.size(), 1u) << a;
  EXPECT_EQ(split.totals[0] + split.totals[1] + split.totals[2], 300);
}

TEST(Split, DeterministicPerSeed) {
  const auto recs = disjoint_records(50, 5);
  EXPECT_EQ(split_dataset(recs, {8, 1, 1}, 4).assignments, split_dataset(recs, {8, 1, 1}, 4).assignments);
}

TEST(Annotations, PiodAndPios16RoundTrip) {
  test::TempDir dir;
  DepthRaster d{2, 3, {0.f, 1.5f, 2.f, 3.f, 4.f, 5.25f}};
  SegmentationRaster s{2, 3, {0, 1, 2, 3, 65535, 7}};
  save_piod(d, dir / "d.piod");
  save_pios16(s, dir / "s.pios16");
  const auto d2 = load_piod(dir / "d.piod");
  const auto s2 = load_pios16(dir / "s.pios16");
  EXPECT_EQ(d2.meters, d.meters);
  EXPECT_EQ(s2.ids, s.ids);
  EXPECT_EQ(std::filesystem::file_size(dir / "d.piod"), 4u + 8u + 6u * 4u);
  EXPECT_EQ(std::filesystem::file_size(dir / "s.pios16"), 6u + 8u + 6u * 2u);
}

TEST(Annotations, SplatLandsOnOpticalAxisWithItsDepth) {
  camgen::CameraPose pose{Vec3(0, 0, 2), Vec3::Zero(), Vec3::UnitY()};
  AnnotationSpec spec{16, 16, 60.0, 0};
  SplatRenderer r(pose, spec);
  r.splat(Vec3(0.001, -0.001, 0.5), 3);
  const auto& seg = r.segmentation();
  const auto& depth = r.depth();
  EXPECT_EQ(seg.ids[8 * 16 + 8], 3);
  EXPECT_FLOAT_EQ(depth.meters[8 * 16 + 8], 1.5f);
  EXPECT_EQ(std::count(seg.ids.begin(), seg.ids.end(), 0), 255);
}

TEST(Annotations, NearerSplatWins) {
  camgen::CameraPose pose{Vec3(0, 0, 2), Vec3::Zero(), Vec3::UnitY()};
  SplatRenderer r(pose, AnnotationSpec{16, 16, 60.0, 1});
  r.splat(Vec3(0.001, -0.001, 0.0), 1);
  r.splat(Vec3(0.001, -0.001, 1.0), 2);
  r.splat(Vec3(0.001, -0.001, 0.5), 3);
  EXPECT_EQ(r.segmentation().ids[8 * 16 + 8], 2);
  EXPECT_FLOAT_EQ(r.depth().meters[8 * 16 + 8], 1.0f);
}

TEST(Annotations, PointsBehindTheCameraAreIgnored) {
  camgen::CameraPose pose{Vec3(0, 0, 2), Vec3::Zero(), Vec3::UnitY()};
  SplatRenderer r(pose, AnnotationSpec{8, 8, 60.0, 2});
  r.splat(Vec3(0, 0, 3), 1);
  for (auto id : r.segmentation().ids) EXPECT_EQ(id, 0);
}

TEST(Annotations, SurfaceSamplesAreDenseEnough) {
  const auto mesh = mpm::make_box_mesh(Vec3::Zero(), Vec3::Ones());
  const auto pts = surface_samples(mesh, 0.1);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Vec3 q(rng.uniform(), rng.uniform(), 1.0);
    double best = 1e9;
    for (const auto& p : pts) best = std::min(best, (p - q).norm());
    EXPECT_LT(best, 0.15);
  }
}

TEST(Annotations, PhysicsJsonRoundTripsExactly) {
  auto s = example_scene();
  s.materials[0].surface = {0.123456789012345, 0.7000000000000001, 2.718281828459045, 0.3333333333333333};
  const auto parsed = parse_physics_json(nlohmann::json::parse(physics_json(s).dump()));
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed.at(1), s.materials[0].surface);
  EXPECT_EQ(parsed.at(2), s.materials[1].surface);
}

TEST(Annotations, StaticObjectKeepsItsPoseOnEveryFrame) {
  test::TempDir dir;
  auto s = example_scene();
  s.objects.erase(s.objects.begin());
  s.phenomenon_objects[67] = {"block"};
  std::vector<FrameSnapshot> frames(4);
  const auto cams = camera_poses(s, 4);
  write_annotations(s, frames, cams, dir.path());
  std::ifstream in(dir / "trajectory.jsonl");
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r["position"], rows[0]["position"]);
    EXPECT_EQ(r["quaternion"], (nlohmann::json{1.0, 0.0, 0.0, 0.0}));
    EXPECT_EQ(r["object_id"], 1);
  }
}

TEST(Annotations, EmptyFrameIsAllBackground) {
  test::TempDir dir;
  auto s = example_scene();
  s.objects.resize(1);
  std::vector<FrameSnapshot> frames(1);
  const auto summary = write_annotations(s, frames, camera_poses(s, 1), dir.path());
  EXPECT_TRUE(summary.ids_in_rasters.empty());
  const auto seg = load_pios16(dir.path() / "cam_00" / "seg_0000.pios16");
  for (auto id : seg.ids) EXPECT_EQ(id, 0);
  const auto depth = load_piod(dir.path() / "cam_00" / "depth_0000.piod");
  for (auto d : depth.meters) EXPECT_EQ(d, 0.0f);
}

TEST(Annotations, RasterIdsMatchPhysicsKeys) {
  test::TempDir dir;
  const auto s = example_scene();
  const auto built = build_simulation(s);
  std::vector<FrameSnapshot> frames(2);
  frames[0].particles = frames[1].particles = built.particles;
  const auto summary = write_annotations(s, frames, camera_poses(s, 2), dir.path());
  std::set<std::uint32_t> keys;
  for (const auto& [id, props] : parse_physics_json(read_json_file(dir / "physics.json"))) keys.insert(id);
  EXPECT_EQ(summary.ids_in_rasters, keys);
  EXPECT_EQ(summary.files.size(), 3u * 2u * 2u + 2u);
}

TEST(Build, ExampleSceneSeedsTheCubeAndVoxelizesTheBlock) {
  const auto s = example_scene();
  const auto b = build_simulation(s);
  ASSERT_FALSE(b.particles.empty());
  EXPECT_EQ(b.materials.size(), 1u);
  EXPECT_EQ(b.forces.sdfs.size(), 1u);
  EXPECT_EQ(b.forces.sdfs[0].contact_mode, mpm::ContactMode::slip);
  for (auto id : b.particles.object_id) EXPECT_EQ(id, 1u);
  EXPECT_NEAR(mpm::total_mass(b.particles), 1100.0 * 0.1 * 0.1 * 0.1, 1e-9);
  for (const auto& v : b.particles.v) EXPECT_EQ(v, Vec3(0.3, 0.0, 0.0));
}

TEST(Build, SeedingIsDeterministic) {
  const auto s = example_scene();
  const auto a = build_simulation(s), b = build_simulation(s);
  ASSERT_EQ(a.particles.size(), b.particles.size());
  for (std::size_t i = 0; i < a.particles.size(); ++i) EXPECT_EQ(a.particles.x[i], b.particles.x[i]);
}

TEST(Build, CameraTracksCoverEveryFrame) {
  const auto s = example_scene();
  const auto cams = camera_poses(s, 5);
  ASSERT_EQ(cams.size(), 3u);
  for (const auto& c : cams) EXPECT_EQ(c.size(), 5u);
  EXPECT_EQ(cams[0][0].position, cams[0][4].position);
}
