#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "edtlab/parallel.hpp"
#include "edtlab/rng.hpp"

namespace {

using namespace edtlab;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
            (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, DeterministicAndDistinct) {
  RandomStream a(7, 3, 1), b(7, 3, 1), c(7, 4, 1), d(7, 3, 2);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
  EXPECT_EQ(a.draws(), 100u);
}

TEST(RandomStream, UniformAndExponentialMoments) {
  RandomStream r(11, 0, 5);
  const int n = 200000;
  double su = 0, se = 0, min_u = 1;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
    min_u = std::min(min_u, u);
    su += u;
    se += r.exponential(2.5);
  }
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(se / n, 2.5, 5 * 2.5 / std::sqrt(n));
}

TEST(Parallel, CoversRangeOnce) {
  const std::size_t n = 10007;
  std::vector<std::atomic<int>> hits(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) hits[i]++;
  });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_GE(worker_count(), 1u);
}

TEST(Parallel, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(100,
                            [](std::size_t b, std::size_t) {
                              if (b == 0) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
