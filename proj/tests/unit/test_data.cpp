#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "oarseg/data/loader.hpp"
#include "oarseg/data/merge.hpp"
#include "oarseg/data/npy.hpp"
#include "oarseg/data/patches.hpp"
#include "oarseg/data/split.hpp"
#include "oarseg/data/synthetic.hpp"
#include "oarseg/data/transforms.hpp"
#include "oarseg/errors.hpp"
#include "test_util.hpp"

using namespace oarseg;

namespace {

std::vector<std::string> make_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("p" + std::to_string(1000 + i));
  return ids;
}

float fixture_value(std::int64_t z, std::int64_t y, std::int64_t x) { return static_cast<float>(z * 100 + y * 10 + x); }

}  // namespace

// ---- npy ------------------------------------------------------------------

TEST(Npy, ReadsNumpyFloatAndIntegerDtypes) {
  const auto dir = test::data_dir() / "npy";
  const auto f4 = npy::read_float(dir / "f4.npy");
  const auto f8 = npy::read_float(dir / "f8.npy");
  const auto i2 = npy::read_float(dir / "i2.npy");
  ASSERT_EQ(f4.shape(), (Shape3{2, 3, 4}));
  for (std::int64_t z = 0; z < 2; ++z)
    for (std::int64_t y = 0; y < 3; ++y)
      for (std::int64_t x = 0; x < 4; ++x) {
        EXPECT_EQ(f4(z, y, x), fixture_value(z, y, x));
        EXPECT_EQ(f8(z, y, x), fixture_value(z, y, x) + 0.5f);
        EXPECT_EQ(i2(z, y, x), fixture_value(z, y, x) - 50.0f);
      }
}

TEST(Npy, ReadsLabelDtypes) {
  const auto dir = test::data_dir() / "npy";
  const auto u1 = npy::read_u8(dir / "u1.npy");
  const auto b1 = npy::read_u8(dir / "b1.npy");
  for (std::int64_t z = 0; z < 2; ++z)
    for (std::int64_t y = 0; y < 3; ++y)
      for (std::int64_t x = 0; x < 4; ++x) {
        const auto v = z * 100 + y * 10 + x;
        EXPECT_EQ(u1(z, y, x), v % 7);
        EXPECT_EQ(b1(z, y, x), v % 2);
      }
}

TEST(Npy, RejectsUnsupportedLayouts) {
  const auto dir = test::data_dir() / "npy";
  EXPECT_THROW(npy::read_float(dir / "fortran.npy"), FormatError);
  EXPECT_THROW(npy::read_float(dir / "big_endian.npy"), FormatError);
  EXPECT_THROW(npy::read_float(dir / "two_d.npy"), FormatError);
  EXPECT_THROW(npy::read_u8(dir / "u1_large.npy"), FormatError);
  EXPECT_THROW(npy::read_float(dir / "absent.npy"), FormatError);
}

TEST(Npy, WriteReadRoundTrip) {
  test::TempDir tmp("npy");
  std::mt19937_64 rng(3);
  Grid3<float> g(Shape3{3, 5, 2});
  std::normal_distribution<float> n;
  for (auto& v : g.values()) v = n(rng);
  const auto l = test::random_grid<std::uint8_t>(Shape3{4, 1, 6}, rng, 255);
  npy::write(tmp / "v.npy", g);
  npy::write(tmp / "l.npy", l);
  EXPECT_EQ(npy::read_float(tmp / "v.npy"), g);
  EXPECT_EQ(npy::read_u8(tmp / "l.npy"), l);
}

// ---- merge ----------------------------------------------------------------

TEST(Merge, LastListedMaskWinsOnOverlap) {
  Grid3<Label> a(Shape3{1, 1, 4}), b(Shape3{1, 1, 4});
  a(0, 0, 0) = a(0, 0, 1) = 1;
  b(0, 0, 1) = b(0, 0, 2) = 1;
  const auto m = merge_masks({a, b}, {"A", "B"});
  EXPECT_EQ(m.class_names, (std::vector<std::string>{"background", "A", "B"}));
  EXPECT_EQ(m.labels(0, 0, 0), 1);
  EXPECT_EQ(m.labels(0, 0, 1), 2);
  EXPECT_EQ(m.labels(0, 0, 2), 2);
  EXPECT_EQ(m.labels(0, 0, 3), 0);
}

TEST(Merge, RejectsBadInput) {
  Grid3<Label> a(Shape3{1, 1, 4}), b(Shape3{1, 2, 2}), c(Shape3{1, 1, 4}, 2);
  EXPECT_THROW(merge_masks({a, b}, {"A", "B"}), ShapeMismatch);
  EXPECT_THROW(merge_masks({a, c}, {"A", "C"}), FormatError);
  EXPECT_THROW(merge_masks({a}, {"A", "B"}), ClassMismatch);
}

TEST(Merge, BinarizeInvertsMergeWithoutOverlap) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto labels = test::random_grid<Label>(Shape3{3, 4, 5}, rng, 3);
    LabelMap lm{labels, {"background", "A", "B", "C"}};
    std::vector<Grid3<Label>> masks;
    for (Label c = 1; c <= 3; ++c) masks.push_back(binarize(lm, c));
    EXPECT_EQ(merge_masks(masks, {"A", "B", "C"}).labels, labels);
  }
}

// ---- split ----------------------------------------------------------------

TEST(Split, OpenKbpSizedCohort) {
  // 188 patients: val = floor(0.15*188) = 28, test = 28, train = 132.
  const auto s = split_patients(make_ids(188), kDefaultSplitRatios, 0);
  EXPECT_EQ(s.train_ids.size(), 132u);
  EXPECT_EQ(s.val_ids.size(), 28u);
  EXPECT_EQ(s.test_ids.size(), 28u);
}

TEST(Split, SmallCohorts) {
  const auto one = split_patients(make_ids(1), kDefaultSplitRatios, 5);
  EXPECT_EQ(one.train_ids.size(), 1u);
  EXPECT_TRUE(one.val_ids.empty());
  EXPECT_TRUE(one.test_ids.empty());
  const auto eight = split_patients(make_ids(8), kDefaultSplitRatios, 5);
  EXPECT_EQ(eight.train_ids.size(), 6u);
  EXPECT_EQ(eight.val_ids.size(), 1u);
  EXPECT_EQ(eight.test_ids.size(), 1u);
  // 0.15 * 20 is 2.9999... in binary; the count still rounds to 3.
  EXPECT_EQ(split_patients(make_ids(20), kDefaultSplitRatios, 5).val_ids.size(), 3u);
}

TEST(Split, PropertiesOverRandomCohorts) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 300);
    const auto seed = rng();
    const auto ids = make_ids(n);
    const auto s = split_patients(ids, kDefaultSplitRatios, seed);
    std::multiset<std::string> all(s.train_ids.begin(), s.train_ids.end());
    all.insert(s.val_ids.begin(), s.val_ids.end());
    all.insert(s.test_ids.begin(), s.test_ids.end());
    EXPECT_EQ(all, std::multiset<std::string>(ids.begin(), ids.end()));
    EXPECT_EQ(s.val_ids.size(), static_cast<std::size_t>(0.15 * n + 1e-9));
    EXPECT_EQ(s, split_patients(ids, kDefaultSplitRatios, seed));
    auto shuffled = ids;
    std::reverse(shuffled.begin(), shuffled.end());
    EXPECT_EQ(split_patients(shuffled, kDefaultSplitRatios, seed).test_ids.size(), s.test_ids.size());
  }
}

TEST(Split, SeedChangesAssignment) {
  const auto ids = make_ids(50);
  EXPECT_NE(split_patients(ids, kDefaultSplitRatios, 1).train_ids, split_patients(ids, kDefaultSplitRatios, 2).train_ids);
}

TEST(Split, RejectsBadRatiosAndDuplicates) {
  EXPECT_THROW(split_patients(make_ids(5), {0.5, 0.5, 0.5}, 0), InvalidRatios);
  EXPECT_THROW(split_patients(make_ids(5), {1.2, -0.1, -0.1}, 0), InvalidRatios);
  EXPECT_THROW(split_patients({"a", "a"}, kDefaultSplitRatios, 0), InvalidConfig);
}

TEST(Split, ManifestRoundTripIsByteStable) {
  test::TempDir tmp("manifest");
  const auto s = split_patients(make_ids(30), kDefaultSplitRatios, 42);
  write_manifest(tmp / "a.json", s);
  write_manifest(tmp / "b.json", read_manifest(tmp / "a.json"));
  std::ifstream a(tmp / "a.json"), b(tmp / "b.json");
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
  EXPECT_EQ(read_manifest(tmp / "a.json"), s);
}

// ---- loader ---------------------------------------------------------------

TEST(Loader, RoundTripsSyntheticPatients) {
  test::TempDir tmp("loader");
  SyntheticOptions opt;
  opt.extent = 16;
  const auto items = make_synthetic_dataset(3, opt);
  const auto spec = synthetic_spec();
  for (const auto& it : items) write_patient(tmp.path(), it, spec);
  const auto loaded = load_dataset(tmp.path(), spec);
  ASSERT_EQ(loaded.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(loaded[i].volume.patient_id, items[i].volume.patient_id);
    EXPECT_EQ(loaded[i].volume.voxels, items[i].volume.voxels);
    EXPECT_EQ(loaded[i].volume.spacing, items[i].volume.spacing);
    EXPECT_EQ(loaded[i].labels.labels, items[i].labels.labels);
    EXPECT_EQ(loaded[i].labels.class_names, spec.class_names());
  }
}

TEST(Loader, MissingMaskNamesTheOrgan) {
  test::TempDir tmp("missing");
  test::write_phantoms(tmp.path(), 2);
  std::filesystem::remove(tmp / "phantom_001" / "mask_chiasm.npy");
  try {
    load_dataset(tmp.path(), synthetic_spec());
    FAIL() << "expected MissingStructure";
  } catch (const MissingStructure& e) {
    EXPECT_EQ(e.patient(), "phantom_001");
    EXPECT_EQ(e.organ(), "chiasm");
  }
  const auto issues = scan_dataset(tmp.path(), synthetic_spec());
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].patient, "phantom_001");
  EXPECT_NE(issues[0].message.find("chiasm"), std::string::npos);
}

TEST(Loader, MaskShapeMismatch) {
  test::TempDir tmp("shape");
  test::write_phantoms(tmp.path(), 1);
  npy::write(tmp / "phantom_000" / "mask_lung.npy", Grid3<std::uint8_t>(Shape3{2, 2, 2}));
  EXPECT_THROW(load_patient(tmp / "phantom_000", synthetic_spec()), ShapeMismatch);
}

TEST(Loader, PresetClassLists) {
  EXPECT_EQ(openkbp_spec().class_names(),
            (std::vector<std::string>{"background", "Brainstem", "Spinal Cord", "Parotid R", "Parotid L", "Mandible"}));
  EXPECT_EQ(pddca_spec().num_foreground(), 6u);
  EXPECT_EQ(nsclc_spec().num_foreground(), 3u);
  EXPECT_EQ(synthetic_spec().num_foreground(), 3u);
}

// ---- transforms -----------------------------------------------------------

TEST(Transforms, CropKeepsForegroundWithMargin) {
  LabelMap l{Grid3<Label>(Shape3{64, 64, 64}), {"background", "A"}};
  l.labels(30, 31, 40) = 1;
  l.labels(34, 33, 44) = 1;
  AugmentationConfig cfg;
  cfg.crop_min_extent = {1, 1, 1};
  const auto box = crop_box(l, cfg);
  EXPECT_EQ(box.lo, (std::array<std::int64_t, 3>{22, 23, 32}));
  EXPECT_EQ(box.hi, (std::array<std::int64_t, 3>{43, 42, 53}));
  cfg.crop_min_extent = {32, 32, 32};
  const auto grown = crop_box(l, cfg);
  EXPECT_EQ(grown.extent(), (Shape3{32, 32, 32}));
  for (std::size_t a = 0; a < 3; ++a) {
    EXPECT_LE(grown.lo[a], box.lo[a]);
    EXPECT_GE(grown.hi[a], box.hi[a]);
  }
}

TEST(Transforms, CropWithoutForegroundIsCentred) {
  LabelMap l{Grid3<Label>(Shape3{40, 40, 40}), {"background", "A"}};
  const auto box = crop_box(l, AugmentationConfig{});
  EXPECT_EQ(box.extent(), (Shape3{32, 32, 32}));
  EXPECT_EQ(box.lo, (std::array<std::int64_t, 3>{4, 4, 4}));
}

TEST(Transforms, StandardizeMoments) {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> n(5.0f, 3.0f);
  Grid3<float> g(Shape3{8, 8, 8});
  for (auto& v : g.values()) v = n(rng);
  standardize(g);
  double mean = 0, sq = 0;
  for (float v : g.values()) mean += v;
  mean /= static_cast<double>(g.size());
  for (float v : g.values()) sq += (v - mean) * (v - mean);
  EXPECT_NEAR(mean, 0.0, 1e-5);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(g.size())), 1.0, 1e-5);

  Grid3<float> flat(Shape3{2, 2, 2}, 7.0f);
  standardize(flat);
  for (float v : flat.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Transforms, AugmentationPreservesLabelSetAndShape) {
  SyntheticOptions opt;
  opt.extent = 20;
  const auto item = make_phantom(opt, 0);
  AugmentationConfig cfg;
  cfg.affine_prob = cfg.elastic_prob = cfg.contrast_prob = cfg.noise_prob = 1.0;
  std::set<Label> before(item.labels.labels.values().begin(), item.labels.labels.values().end());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [v, l] = augment(item.volume, item.labels, cfg, seed);
    EXPECT_EQ(v.voxels.shape(), item.volume.voxels.shape());
    EXPECT_EQ(l.labels.shape(), item.labels.labels.shape());
    for (Label x : l.labels.values()) EXPECT_TRUE(before.count(x)) << int(x);
    for (float x : v.voxels.values()) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(Transforms, AugmentationIsSeedDeterministic) {
  SyntheticOptions opt;
  opt.extent = 16;
  const auto item = make_phantom(opt, 1);
  AugmentationConfig cfg;
  cfg.affine_prob = cfg.elastic_prob = cfg.contrast_prob = cfg.noise_prob = 0.7;
  const auto a = augment(item.volume, item.labels, cfg, 1234);
  const auto b = augment(item.volume, item.labels, cfg, 1234);
  EXPECT_EQ(a.first.voxels, b.first.voxels);
  EXPECT_EQ(a.second.labels, b.second.labels);
}

TEST(Transforms, ZeroProbabilityIsIdentity) {
  SyntheticOptions opt;
  opt.extent = 16;
  const auto item = make_phantom(opt, 2);
  const auto cfg = AugmentationConfig{}.without_augmentation();
  const auto [v, l] = augment(item.volume, item.labels, cfg, 77);
  EXPECT_EQ(v.voxels, item.volume.voxels);
  EXPECT_EQ(l.labels, item.labels.labels);
}

TEST(Transforms, DeriveSeedSeparatesPatientsAndEpochs) {
  std::set<std::uint64_t> seen;
  for (int p = 0; p < 20; ++p)
    for (int e = 0; e < 20; ++e) seen.insert(derive_seed(5, "patient" + std::to_string(p), e));
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(derive_seed(5, "x", 3), derive_seed(5, "x", 3));
  EXPECT_NE(derive_seed(5, "x", 3), derive_seed(6, "x", 3));
}

TEST(Transforms, ConfigValidation) {
  AugmentationConfig cfg;
  cfg.noise_prob = 1.5;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.scale = {1.2, 0.8};
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  nlohmann::json j = AugmentationConfig{};
  EXPECT_EQ(j.get<AugmentationConfig>().elastic_sigma, AugmentationConfig{}.elastic_sigma);
}

// ---- patches / synthetic --------------------------------------------------

TEST(Patches, ShapeAndForegroundCentring) {
  SyntheticOptions opt;
  opt.extent = 24;
  const auto item = make_phantom(opt, 0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const auto p = sample_patch(item, Shape3{8, 8, 8}, 1.0, rng);
    EXPECT_EQ(p.volume.voxels.shape(), (Shape3{8, 8, 8}));
    EXPECT_EQ(p.labels.labels.shape(), (Shape3{8, 8, 8}));
    EXPECT_TRUE(std::any_of(p.labels.labels.values().begin(), p.labels.labels.values().end(),
                            [](Label l) { return l != 0; }));
  }
  const auto big = sample_patch(item, Shape3{32, 32, 32}, 0.0, rng);
  EXPECT_EQ(big.volume.voxels.shape(), (Shape3{32, 32, 32}));
  EXPECT_EQ(big.labels.labels(31, 31, 31), 0);
}

TEST(Patches, RoundUp) {
  EXPECT_EQ(round_up(33, 16), 48);
  EXPECT_EQ(round_up(32, 16), 32);
  EXPECT_EQ(round_up(1, 8), 8);
}

TEST(Synthetic, PhantomHasThreeStructures) {
  SyntheticOptions opt;
  const auto item = make_phantom(opt, 3);
  EXPECT_EQ(item.volume.voxels.shape(), (Shape3{32, 32, 32}));
  std::array<std::int64_t, 4> counts{};
  for (Label l : item.labels.labels.values()) ++counts[l];
  EXPECT_GT(counts[1], counts[3]);  // ellipsoid larger than sphere
  EXPECT_GT(counts[2], 0);
  EXPECT_GT(counts[3], 0);
  EXPECT_EQ(item.labels.class_names, synthetic_spec().class_names());
  const auto again = make_phantom(opt, 3);
  EXPECT_EQ(again.volume.voxels, item.volume.voxels);
}
