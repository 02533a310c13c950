#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "dlsh/bench.hpp"
#include "dlsh/generators.hpp"
#include "dlsh/index.hpp"

using namespace dlsh;

namespace {

struct Fixture {
  std::shared_ptr<const Dataset> data;
  UniformLshFamily family;
  PlanParams plan;
};

Fixture make_fixture(std::size_t n = 500, std::size_t d = 4, Metric metric = Metric::l2, std::uint64_t seed = 1) {
  auto data = std::make_shared<const Dataset>(
      generate(GeneratorKind::uniform_cube, {.n = n, .d = d, .metric = metric, .side = 6.0}, seed));
  auto family = UniformLshFamily::calibrated(metric, 1.0);
  auto plan = plan_classical(n, 2.0, 0.1, family);
  return {data, family, plan};
}

bool same_tables(const LshIndex& a, const LshIndex& b) {
  if (a.tables().size() != b.tables().size()) return false;
  for (std::size_t t = 0; t < a.tables().size(); ++t) {
    const auto &x = a.tables()[t], &y = b.tables()[t];
    if (!(x.g == y.g) || x.fingerprints != y.fingerprints || x.offsets != y.offsets || x.members != y.members) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(Build, SameSeedSameTables) {
  const auto fx = make_fixture();
  const auto a = LshIndex::build(fx.data, fx.plan, fx.family, 9);
  const auto b = LshIndex::build(fx.data, fx.plan, fx.family, 9, 1);
  EXPECT_TRUE(same_tables(a, b));
  const auto c = LshIndex::build(fx.data, fx.plan, fx.family, 10);
  EXPECT_FALSE(same_tables(a, c));
}

TEST(Build, BucketsHoldExactTuples) {
  const auto fx = make_fixture(400, 3);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 2);
  ASSERT_EQ(idx.tables().size(), fx.plan.L);
  for (std::size_t t = 0; t < idx.tables().size(); t += 7) {
    const auto& table = idx.tables()[t];
    std::vector<std::vector<std::int64_t>> keys;
    for (std::size_t b = 0; b < table.bucket_count(); ++b) {
      const auto members = table.bucket(b);
      ASSERT_TRUE(std::is_sorted(members.begin(), members.end()));
      const auto key = idx.key(t, fx.data->row(members.front()));
      for (auto i : members) ASSERT_EQ(idx.key(t, fx.data->row(i)), key);
      keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    EXPECT_EQ(std::adjacent_find(keys.begin(), keys.end()), keys.end()) << "bucket split across entries";
  }
}

TEST(Build, SinglePointDataset) {
  auto data = std::make_shared<const Dataset>(Dataset({1.0, 2.0}, 2, Metric::l2));
  const auto family = UniformLshFamily::calibrated(Metric::l2, 1.0);
  const auto idx = LshIndex::build(data, plan_classical(1, 2.0, 0.1, family), family, 3);
  for (const auto& table : idx.tables()) {
    ASSERT_EQ(table.bucket_count(), 1u);
    EXPECT_EQ(table.bucket(0).size(), 1u);
  }
}

TEST(Build, RejectsMismatches) {
  const auto fx = make_fixture(50, 2);
  const auto l1 = UniformLshFamily::calibrated(Metric::l1, 1.0);
  EXPECT_THROW(LshIndex::build(fx.data, fx.plan, l1, 1), argument_error);
  const auto wide = UniformLshFamily::calibrated(Metric::l2, 2.0);
  EXPECT_THROW(LshIndex::build(fx.data, fx.plan, wide, 1), argument_error);
}

TEST(Query, DataPointsFindThemselvesInRoundOne) {
  const auto fx = make_fixture(300, 5);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 4);
  for (std::size_t i = 0; i < fx.data->size(); ++i) {
    const auto s = idx.query(fx.data->row(i));
    ASSERT_TRUE(s.found);
    EXPECT_EQ(s.rounds_executed, 1u);
    EXPECT_LE(s.found_distance, 2.0);
    EXPECT_FALSE(s.truncated);
  }
}

TEST(Query, FarQueryIsNeverFound) {
  const auto fx = make_fixture(300, 3);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 4);
  const Point q{1000.0, 1000.0, 1000.0};
  const auto s = idx.query(q);
  EXPECT_FALSE(s.found);
  EXPECT_EQ(s.rounds_executed, fx.plan.L);
  EXPECT_EQ(s.far_candidates, s.candidates_examined);
  EXPECT_EQ(s.far_per_round.size(), fx.plan.L);
  EXPECT_THROW(idx.query(Point{1.0}), dimension_error);
}

TEST(Query, StatsAreConsistent) {
  const auto fx = make_fixture(1000, 4);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 5);
  Engine rng = make_engine(5, 1);
  for (int k = 0; k < 50; ++k) {
    const auto q = random_query(*fx.data, rng);
    const auto s = idx.query(q);
    std::uint64_t far = 0;
    for (auto f : s.far_per_round) far += f;
    EXPECT_EQ(far, s.far_candidates);
    EXPECT_EQ(s.far_per_round.size(), s.rounds_executed);
    EXPECT_EQ(s.candidates_examined, s.far_candidates + (s.found ? 1 : 0));
    if (!s.found) {
      // No point within alpha r shares a bucket with q in any table.
      for (std::size_t t = 0; t < idx.tables().size(); ++t) {
        for (auto i : idx.candidates(t, q)) ASSERT_GT(distance(fx.data->row(i), q, Metric::l2), 2.0);
      }
    }
  }
}

TEST(Query, CandidatesContainThePointItself) {
  const auto fx = make_fixture(200, 3);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 6);
  for (std::size_t i = 0; i < 200; i += 13) {
    const auto c = idx.candidates(3, fx.data->row(i));
    EXPECT_TRUE(std::binary_search(c.begin(), c.end(), static_cast<std::uint32_t>(i)));
  }
}

TEST(QueryWithBudget, Semantics) {
  const auto fx = make_fixture(800, 4);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 7);
  // Index 0 heads every bucket it belongs to.
  const auto s = idx.query_with_budget(fx.data->row(0), 1);
  EXPECT_TRUE(s.found);
  EXPECT_EQ(s.found_index, 0u);
  EXPECT_THROW(idx.query_with_budget(fx.data->row(0), 0), argument_error);

  Engine rng = make_engine(7, 2);
  const std::uint64_t full = fx.data->size() * fx.plan.L;
  for (int k = 0; k < 40; ++k) {
    const auto q = random_query(*fx.data, rng);
    EXPECT_TRUE(idx.query(q).same_outcome(idx.query_with_budget(q, full)));
  }
  const Point far{100.0, 100.0, 100.0, 100.0};
  const auto cut = idx.query_with_budget(far, 1);
  EXPECT_LE(cut.candidates_examined, 1u);
}

TEST(QueryWithBudget, TruncatesBeforeExceedingBudget) {
  // Every point in one spot: every bucket holds all points and none are near a far query.
  auto data = std::make_shared<const Dataset>(Dataset(std::vector<double>(40, 0.0), 2, Metric::l2));
  const auto family = UniformLshFamily::calibrated(Metric::l2, 1.0);
  auto plan = plan_classical(20, 2.0, 0.1, family);
  plan.K = 1;
  plan.L = 50;
  const auto idx = LshIndex::build(data, plan, family, 1);
  const Point q{2.5, 0.0};
  ASSERT_GT(idx.query(q).candidates_examined, 5u);
  const auto s = idx.query_with_budget(q, 5);
  EXPECT_TRUE(s.truncated);
  EXPECT_EQ(s.candidates_examined, 5u);
  EXPECT_FALSE(s.found);
}

TEST(Persistence, SaveLoadEquivalence) {
  for (Metric m : {Metric::l2, Metric::l1}) {
    const auto fx = make_fixture(600, 3, m);
    const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 11);
    std::stringstream buf;
    idx.save(buf);
    const auto loaded = LshIndex::load(buf, fx.data);
    EXPECT_TRUE(same_tables(idx, loaded));
    EXPECT_EQ(loaded.family(), idx.family());
    EXPECT_EQ(loaded.plan().K, idx.plan().K);
    EXPECT_EQ(loaded.plan().L, idx.plan().L);
    Engine rng = make_engine(11, 3);
    for (int k = 0; k < 100; ++k) {
      const auto q = random_query(*fx.data, rng);
      ASSERT_TRUE(idx.query(q).same_outcome(loaded.query(q)));
    }
  }
}

TEST(Persistence, TruncatedFileFails) {
  const auto fx = make_fixture(100, 2);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 12);
  std::stringstream buf;
  idx.save(buf);
  const std::string bytes = buf.str();
  for (std::size_t cut : {std::size_t{3}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    std::stringstream part(bytes.substr(0, cut));
    EXPECT_THROW(LshIndex::load(part, fx.data), format_error) << "cut at " << cut;
  }
}

TEST(Persistence, RejectsMismatchedDataset) {
  const auto fx = make_fixture(100, 2);
  const auto idx = LshIndex::build(fx.data, fx.plan, fx.family, 13);
  std::stringstream buf;
  idx.save(buf);
  const std::string bytes = buf.str();

  auto l1 = std::make_shared<const Dataset>(Dataset(std::vector<double>(fx.data->coords().begin(), fx.data->coords().end()), 2, Metric::l1));
  std::stringstream a(bytes);
  EXPECT_THROW(LshIndex::load(a, l1), format_error);

  auto other = std::make_shared<const Dataset>(generate(GeneratorKind::uniform_cube, {.n = 99, .d = 2}, 1));
  std::stringstream b(bytes);
  EXPECT_THROW(LshIndex::load(b, other), format_error);

  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream c(bad);
  EXPECT_THROW(LshIndex::load(c, fx.data), format_error);
}

TEST(Persistence, CorruptMembersDetected) {
  auto data = std::make_shared<const Dataset>(Dataset({0.0, 50.0}, 1, Metric::l2));
  const auto family = UniformLshFamily::calibrated(Metric::l2, 1.0);
  const auto idx = LshIndex::build(data, plan_classical(2, 2.0, 0.1, family), family, 1);
  std::stringstream buf;
  idx.save(buf);
  std::string bytes = buf.str();
  // The last member of the last table: overwrite it with an out-of-range index.
  bytes[bytes.size() - 4] = 7;
  std::stringstream in(bytes);
  EXPECT_THROW(LshIndex::load(in, data), format_error);
}
