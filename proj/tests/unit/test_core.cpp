#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "stratfair/csv.hpp"
#include "stratfair/error.hpp"
#include "stratfair/preprocess.hpp"
#include "stratfair/rng.hpp"
#include "stratfair/synthetic.hpp"

using namespace stratfair;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected stratfair::Error");
  return ErrorKind::Io;
}

Dataset one_feature(std::vector<double> xs, std::vector<int> ys, std::vector<int> gs = {}) {
  std::vector<AgentRecord> recs;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    recs.push_back({gs.empty() ? static_cast<int>(i % 2) : gs[i], {xs[i]}, ys[i]});
  }
  return Dataset(std::move(recs));
}

}  // namespace

TEST_CASE("dataset validation") {
  CHECK(kind_of([] { Dataset(std::vector<AgentRecord>{}); }) == ErrorKind::InvalidDataset);
  CHECK(kind_of([] { Dataset({{0, {0.1}, 0}, {1, {0.1, 0.2}, 1}}); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { Dataset({{2, {0.1}, 0}}); }) == ErrorKind::NonBinaryGroupOrLabel);
  CHECK(kind_of([] { Dataset({{0, {NAN}, 0}}); }) == ErrorKind::InvalidDataset);

  Dataset ds({{0, {0.1, 0.2}, 1}, {1, {0.3, 0.4}, 1}});
  CHECK(ds.degenerate());
  CHECK(ds.feature_names() == std::vector<std::string>{"x0", "x1"});
  CHECK(ds.column(1) == std::vector<double>{0.2, 0.4});
  const std::size_t idx[] = {1};
  CHECK(ds.subset(idx)[0] == ds[1]);
}

TEST_CASE("load a three-row file") {
  const std::string text = "g,y,x\n0,0,0.1\n1,1,0.9\n0,1,0.5\n";
  ColumnSchema schema{"g", "y", {"x"}};
  const Dataset ds = parse_dataset(text, schema);
  CHECK(ds.size() == 3);
  CHECK(ds.dim() == 1);
  CHECK(ds[1] == AgentRecord{1, {0.9}, 1});

  ColumnSchema bad{"g", "y", {"z"}};
  CHECK(kind_of([&] { parse_dataset(text, bad); }) == ErrorKind::MissingColumn);
}

TEST_CASE("non-binary group reports the data row") {
  const std::string text = "group,label,x\n0,0,0.1\n1,1,0.2\n0,1,0.3\n1,0,0.4\n2,1,0.5\n";
  try {
    parse_dataset(text);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonBinaryGroupOrLabel);
    REQUIRE(e.row());
    CHECK(*e.row() == 5);
  }
}

TEST_CASE("csv error paths") {
  CHECK(kind_of([] { parse_dataset(""); }) == ErrorKind::EmptyFile);
  CHECK(kind_of([] { parse_dataset("group,label,x\n"); }) == ErrorKind::EmptyFile);
  CHECK(kind_of([] { parse_dataset("group,label,x\n0,1,abc\n"); }) == ErrorKind::UnparseableNumber);
  CHECK(kind_of([] { load_dataset("/nonexistent/file.csv"); }) == ErrorKind::Io);
}

TEST_CASE("csv round trip keeps values") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset ds = oracle::random_dataset(rng, 30, 3);
    const Dataset back = parse_dataset(format_dataset(ds));
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(back[i].group == ds[i].group);
      CHECK(back[i].label == ds[i].label);
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(back[i].features[k] - ds[i].features[k]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("atomic write through a file") {
  const auto dir = std::filesystem::temp_directory_path() / "stratfair_core_test";
  std::filesystem::create_directories(dir);
  const Dataset ds = one_feature({0.25, 0.5}, {0, 1});
  write_dataset(ds, dir / "d.csv");
  CHECK(load_dataset(dir / "d.csv") == ds);
  CHECK_FALSE(std::filesystem::exists(dir / "d.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(NAN) == "nan");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("normalize_feature") {
  SUBCASE("flip on negative correlation") {
    const Dataset out = normalize_feature(one_feature({2, 4, 6}, {1, 0, 0}), 0);
    CHECK(out.column(0) == std::vector<double>{1.0, 0.5, 0.0});
  }
  SUBCASE("already normalized") {
    const Dataset out = normalize_feature(one_feature({0, 0.5, 1}, {0, 0, 1}), 0);
    CHECK(out.column(0) == std::vector<double>{0.0, 0.5, 1.0});
  }
  SUBCASE("constant column") {
    CHECK(kind_of([] { normalize_feature(one_feature({3, 3, 3}, {0, 1, 0}), 0); }) ==
          ErrorKind::ZeroRange);
  }
  SUBCASE("zero label variance means no flip") {
    const Dataset out = normalize_feature(one_feature({2, 4, 6}, {1, 1, 1}), 0);
    CHECK(out.column(0) == std::vector<double>{0.0, 0.5, 1.0});
  }
}

TEST_CASE("normalize is idempotent") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(3.0, 10.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<AgentRecord> recs;
    for (int i = 0; i < 40; ++i) {
      recs.push_back({i % 2, {n(rng), n(rng)}, static_cast<int>(rng() % 2)});
    }
    const Dataset once = normalize_all(Dataset(recs));
    const Dataset twice = normalize_all(once);
    for (std::size_t i = 0; i < once.size(); ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(once[i].features[k] - twice[i].features[k]) <= 1e-12);
        CHECK(once[i].features[k] >= 0.0);
        CHECK(once[i].features[k] <= 1.0);
      }
    }
  }
}

TEST_CASE("shuffle_split") {
  std::mt19937_64 rng(3);
  const Dataset ds = oracle::random_dataset(rng, 50, 2);
  const Split a = shuffle_split(ds, 0.7, 9);
  const Split b = shuffle_split(ds, 0.7, 9);
  CHECK(a.train.size() == 35);
  CHECK(a.test.size() == 15);
  CHECK(a.train == b.train);
  CHECK(kind_of([&] { shuffle_split(ds, 1.0, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("SplitMix64 reference values") {
  // Published SplitMix64 outputs for seed 0.
  SplitMix64 r(0);
  CHECK(r() == 0xe220a8397b1dcdafULL);
  CHECK(r() == 0x6e789e6aa1b965f4ULL);
  CHECK(r() == 0x06c45d188009454fULL);
  SplitMix64 s(0);
  CHECK(s.at(2) == 0x06c45d188009454fULL);
}

TEST_CASE("rng draws") {
  SplitMix64 r(42);
  double sum = 0;
  double sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 0.05);
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
}

TEST_CASE("synthetic degenerate mixture") {
  SyntheticSpec spec;
  for (auto& c : spec.cells) c = {0.0, {0.5}, {0.0}};
  spec.cell(1, 1).weight = 1.0;
  spec.sample_size = 10;
  spec.seed = 1;
  const Dataset ds = generate_synthetic(spec);
  CHECK(ds.size() == 10);
  for (const auto& r : ds) CHECK(r == AgentRecord{1, {0.5}, 1});
}

TEST_CASE("synthetic cell frequencies and determinism") {
  SyntheticSpec spec;
  for (auto& c : spec.cells) c = {0.25, {0.5, 0.3}, {0.2, 0.1}};
  spec.sample_size = 4000;
  spec.seed = 7;
  const Dataset ds = generate_synthetic(spec);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& r : ds) {
    ++counts[2 * r.group + r.label];
    for (double x : r.features) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
  for (int c : counts) CHECK(std::abs(c - 1000.0) <= 5.0 * std::sqrt(4000.0));
  CHECK(format_dataset(generate_synthetic(spec)) == format_dataset(ds));
}

TEST_CASE("synthetic spec validation") {
  SyntheticSpec spec;
  for (auto& c : spec.cells) c = {0.25, {0.5}, {0.1}};
  spec.sample_size = 10;
  CHECK_NOTHROW(validate(spec));
  auto bad = spec;
  bad.cells[0].weight = 0.5;
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
  bad = spec;
  bad.cells[2].scale = {-1.0};
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
  bad = spec;
  bad.cells[3].location = {0.5, 0.5};
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
  bad = spec;
  bad.sample_size = 0;
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("truncated normal stays in range") {
  SplitMix64 r(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_truncated_normal(r, 3.0, 0.01, 5);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}
