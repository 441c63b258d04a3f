#include <doctest.h>

#include <random>
#include <set>

#include "nesy/counting.hpp"
#include "nesy/detopt.hpp"
#include "nesy/errors.hpp"
#include "support.hpp"

using namespace nesy;

namespace {

Task make(const char* knowledge, int k, int l, std::vector<const char*> pins = {}) {
  std::vector<BitVec> p;
  for (const char* b : pins) p.push_back(BitVec::from_string(b));
  return compile_task(parse_formula(knowledge, k, l), k, l, p);
}

const char* kXor = "y1 <-> (c1 ^ c2 ^ c3)";

std::vector<bool> pinned_mask(const Task& task) {
  std::vector<bool> out(task.concept_space());
  for (std::uint32_t g = 0; g < out.size(); ++g) out[g] = task.pinned(g);
  return out;
}

}  // namespace

TEST_CASE("counts: xor task") {
  const Task task = make(kXor, 3, 1);
  CHECK(count_likelihood(task) == 65536);   // 4^4 * 4^4
  CHECK(count_likelihood_rec(task) == 576);  // 4! * 4!
  CHECK(count_supervised(task, false) == 65536);
  CHECK(count_supervised(task, true) == 576);
}

TEST_CASE("counts: every label deduced from one concept vector") {
  const Task task = make("y1 <-> c1", 1, 1);
  CHECK(count_likelihood(task) == 1);
  CHECK(count_likelihood_rec(task) == 1);
  const Task two = make("(y1 <-> c1) & (y2 <-> c2)", 2, 2);
  CHECK(count_likelihood(two) == 1);
  CHECK(count_likelihood_rec(two) == 1);
}

TEST_CASE("counts: disjunction task, frozen from brute-force enumeration") {
  const Task task = make("y1 <-> (c1 | c2)", 2, 1);
  const std::vector<bool> none(4, false);
  const Formula& f = task.knowledge();
  const std::uint64_t all = testing::brute_force_count(f, 2, 1, none, false, false);
  const std::uint64_t inj = testing::brute_force_count(f, 2, 1, none, true, false);
  CHECK(all == 27);
  CHECK(inj == 6);
  CHECK(count_likelihood(task) == all);
  CHECK(count_likelihood_rec(task) == inj);
}

TEST_CASE("counts: supervision on xor, frozen from brute-force enumeration") {
  // nu_0 = 4, nu_1 = 0
  const Task half = make(kXor, 3, 1, {"000", "011", "101", "110"});
  const std::uint64_t half_brute = testing::brute_force_count(half.knowledge(), 3, 1,
                                                              pinned_mask(half), false, true);
  CHECK(half_brute == 256);
  CHECK(count_supervised(half, false) == half_brute);

  // nu_0 = nu_1 = 2
  const Task two = make(kXor, 3, 1, {"000", "011", "001", "010"});
  const std::uint64_t two_brute =
      testing::brute_force_count(two.knowledge(), 3, 1, pinned_mask(two), true, true);
  CHECK(two_brute == 4);
  CHECK(count_supervised(two, true) == two_brute);

  const Task full = make(kXor, 3, 1, {"000", "001", "010", "011", "100", "101", "110", "111"});
  CHECK(count_supervised(full, false) == 1);
  CHECK(count_supervised(full, true) == 1);
}

TEST_CASE("counts: big integers do not overflow") {
  // Sixteen concepts under a constant label: one S_y of size 65536.
  const Task task = make("y1", 16, 1);
  const BigInt n = count_likelihood(task);
  CHECK(n == boost::multiprecision::pow(BigInt(2), 16 * 65536));
  CHECK(factorial(20) == BigInt("2432902008176640000"));
  CHECK(factorial(25) == BigInt("15511210043330985984000000"));
  CHECK(factorial(0) == 1);
}

TEST_CASE("count report: rows, products and rendering") {
  const Task task = make(kXor, 3, 1, {"000", "111"});
  const CountReport r = make_count_report(task);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].s_size == 4);
  CHECK(r.rows[0].nu == 1);
  CHECK(r.rows[0].n_lc == 64);
  CHECK(r.rows[0].n_lrc == 6);
  CHECK(r.n_l == 65536);
  CHECK(r.n_lr == 576);
  CHECK(r.n_lc == 4096);
  CHECK(r.n_lrc == 36);
  CHECK(r.n_lrc <= r.n_lc);
  CHECK(r.n_lc <= r.n_l);
  CHECK(r.n_lr <= r.n_l);
  CHECK(render_csv(r) ==
        "label,s_size,nu,n_L,n_LR,n_LC,n_LRC\n"
        "0,4,1,256,24,64,6\n"
        "1,4,1,256,24,64,6\n"
        "product,8,2,65536,576,4096,36\n");
  CHECK(render_table(r).find("product") != std::string::npos);
}

TEST_CASE("enumerate: xor injective maps") {
  const Task task = make(kXor, 3, 1);
  const auto maps = enumerate_detopts(task, {.injective = true, .respect_pins = false, .limit = 1'000'000});
  CHECK(maps.size() == 576);
  std::set<std::vector<std::uint32_t>> distinct;
  for (const DetOpt& m : maps) {
    CHECK(is_admissible(m, task));
    CHECK(is_injective(m));
    CHECK(m.injective);
    distinct.insert(m.image);
  }
  CHECK(distinct.size() == 576);
  CHECK(std::is_sorted(maps.begin(), maps.end(),
                       [](const DetOpt& a, const DetOpt& b) { return a.image < b.image; }));
  CHECK(maps.front().image == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("enumerate: identity knowledge has exactly the identity map") {
  const Task task = make("y1 <-> c1", 1, 1);
  const auto maps = enumerate_detopts(task, {});
  REQUIRE(maps.size() == 1);
  CHECK(is_ground_truth(maps.front()));
}

TEST_CASE("enumerate: limit exceeded reports the closed-form count") {
  const Task task = make(kXor, 3, 1);
  try {
    enumerate_detopts(task, {.injective = false, .respect_pins = false, .limit = 1000});
    FAIL("expected LimitExceeded");
  } catch (const LimitExceeded& e) {
    CHECK(e.count() == "65536");
  }
}

TEST_CASE("enumerate: full supervision leaves only the identity") {
  const Task task = make(kXor, 3, 1, {"000", "001", "010", "011", "100", "101", "110", "111"});
  for (bool injective : {false, true}) {
    const auto maps = enumerate_detopts(task, {.injective = injective, .respect_pins = true});
    REQUIRE(maps.size() == 1);
    CHECK(is_ground_truth(maps.front()));
  }
}

TEST_CASE("is_ground_truth: identity versus shortcuts") {
  CHECK(is_ground_truth(identity_map(3)));
  DetOpt swap = identity_map(3);
  std::swap(swap.image[0], swap.image[3]);   // 000 <-> 011, both in S_0
  CHECK_FALSE(is_ground_truth(swap));
  CHECK(is_admissible(swap, make(kXor, 3, 1)));

  // Every g with even parity sent to 000.
  DetOpt collapse = identity_map(3);
  for (std::uint32_t g : {0u, 3u, 5u, 6u}) collapse.image[g] = 0;
  CHECK_FALSE(is_ground_truth(collapse));
  CHECK(is_admissible(collapse, make(kXor, 3, 1)));
  CHECK_FALSE(is_injective(collapse));
}

TEST_CASE("property: enumeration agrees with closed forms and the brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 3);
    const int l = 1 + static_cast<int>(rng() % 2);
    const Task task = load_task(format_task_spec(testing::random_task_spec(rng, k, l, 0.35)));
    for (Regime regime : kAllRegimes) {
      CAPTURE(trial);
      CAPTURE(regime_name(regime));
      const BigInt closed = count_detopts(task, regime);
      const bool inj = regime_injective(regime);
      const bool pins = regime_supervised(regime);
      if (closed > 1'000'000) {
        CHECK_THROWS_AS(enumerate_detopts(task, {.injective = inj, .respect_pins = pins}),
                        LimitExceeded);
        continue;
      }
      std::size_t n = 0;
      bool identity_seen = false;
      for_each_detopt(task, {.injective = inj, .respect_pins = pins, .limit = 1'000'000},
                      [&](const DetOpt& m) {
                        ++n;
                        CHECK(is_admissible(m, task));
                        if (inj) CHECK(is_injective(m));
                        if (pins) CHECK(respects_pins(m, task));
                        identity_seen = identity_seen || is_ground_truth(m);
                      });
      CHECK(BigInt(n) == closed);
      CHECK(identity_seen);
      if (k <= 2 || (k == 3 && trial % 20 == 0)) {
        CHECK(BigInt(testing::brute_force_count(task.knowledge(), k, l, pinned_mask(task), inj,
                                                pins)) == closed);
      }
    }
  }
}

TEST_CASE("property: monotonicity and ground-truth uniqueness") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 80; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 4);
    const int l = 1 + static_cast<int>(rng() % 3);
    TaskSpec spec = testing::random_task_spec(rng, k, l, 0.0);
    const Task bare = load_task(format_task_spec(spec));
    CHECK(count_likelihood_rec(bare) <= count_likelihood(bare));

    bool all_singletons = true;
    for (std::uint32_t y : bare.achievable_labels()) {
      all_singletons = all_singletons && bare.consistent_concepts(y).size() == 1;
    }
    CHECK((count_likelihood(bare) == 1) == all_singletons);
    CHECK((count_likelihood_rec(bare) == 1) == all_singletons);

    // Adding pins one by one never increases a count.
    BigInt prev_lc = count_supervised(bare, false);
    BigInt prev_lrc = count_supervised(bare, true);
    for (std::uint32_t g = 0; g < space_size(k); ++g) {
      if (rng() % 2 == 0) continue;
      spec.pins.emplace_back(g, k);
      const Task pinned = load_task(format_task_spec(spec));
      const BigInt lc = count_supervised(pinned, false);
      const BigInt lrc = count_supervised(pinned, true);
      CHECK(lc <= prev_lc);
      CHECK(lrc <= prev_lrc);
      CHECK(lrc <= lc);
      CHECK(lrc >= 1);
      prev_lc = lc;
      prev_lrc = lrc;
    }
  }
}
