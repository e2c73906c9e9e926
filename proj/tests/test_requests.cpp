#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "hsim/requests.hpp"
#include "support.hpp"

using namespace hsim;

namespace {

Request make_request(NodeId user, Step issued, std::vector<std::pair<KeywordId, Step>> slots) {
  Request r;
  r.user = user;
  r.issued_at = issued;
  for (auto [k, deadline] : slots) r.slots.push_back(RequestSlot{k, deadline});
  return r;
}

// Three units with keywords {0}, {1}, {0,1}.
Catalog three_units() {
  std::vector<Unit> units(3);
  for (UnitId i = 0; i < 3; ++i) {
    units[i].id = i;
    units[i].size = kMB;
  }
  units[0].keywords = {0};
  units[1].keywords = {1};
  units[2].keywords = {0, 1};
  units[2].primary_keyword = 0;
  units[1].primary_keyword = 1;
  return Catalog(std::move(units), 2, 1.0);
}

}  // namespace

TEST_CASE("without taste reuse keywords follow plain Zipf draws") {
  const std::size_t n = 40;
  const ZipfSampler zipf(n, 1.0);
  // Inverse-CDF oracle over a pmf built here.
  std::vector<double> pmf(n);
  for (std::size_t k = 0; k < n; ++k) pmf[k] = 1.0 / static_cast<double>(k + 1);
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) cdf[k] = (acc += pmf[k] / total);
  cdf.back() = 1.0;

  RequestOptions opts;
  opts.taste_prob = 0.0;
  Rng rng(99), mirror(99);
  for (int i = 0; i < 200; ++i) {
    const Request r = next_request(0, nullptr, opts, zipf, rng, i);
    const auto want = static_cast<std::size_t>(mirror.between(1, opts.max_keywords_per_request));
    std::vector<KeywordId> expect;
    while (expect.size() < want) {
      const double u = mirror.uniform();
      std::size_t k = 0;
      while (k + 1 < n && !(u < cdf[k])) ++k;
      if (std::find(expect.begin(), expect.end(), k) == expect.end()) {
        expect.push_back(static_cast<KeywordId>(k));
      }
    }
    std::vector<KeywordId> got;
    for (const auto& s : r.slots) got.push_back(s.keyword);
    CHECK(got == expect);
    CHECK(r.issued_at == i);
  }
}

TEST_CASE("taste reuse carries a fulfilled keyword over") {
  const ZipfSampler zipf(50, 1.0);
  RequestOptions opts;
  opts.taste_prob = 1.0;
  Request prev = make_request(0, 0, {{7, 10}, {3, 10}});
  prev.slots[0].status = SlotStatus::fulfilled;
  prev.slots[1].status = SlotStatus::missed;
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Request r = next_request(0, &prev, opts, zipf, rng, 20);
    const bool has7 = std::any_of(r.slots.begin(), r.slots.end(),
                                  [](const RequestSlot& s) { return s.keyword == 7; });
    CHECK(has7);
  }
}

TEST_CASE("single-keyword requests") {
  const ZipfSampler zipf(50, 1.0);
  RequestOptions opts;
  opts.max_keywords_per_request = 1;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(next_request(0, nullptr, opts, zipf, rng, 0).slots.size() == 1);
  }
  opts.max_keywords_per_request = 0;
  CHECK_THROWS_AS(next_request(0, nullptr, opts, zipf, rng, 0), Error);
}

TEST_CASE("deadline arithmetic") {
  const Catalog c = test::simple_catalog({2600 * kKB, 100, 10 * kMB}, 3);
  // 10 hops of 2.6 MB at 100 Mbit/s: 2.08 s, 21 steps of 0.1 s.
  CHECK(compute_deadline(0, c, 100e6, 10, 5, 0.1) == 5 + 21);
  CHECK(compute_deadline(1, c, 100e6, 1, 5, 0.1) == 6);
  const Step slow = compute_deadline(2, c, 100e6, 10, 0, 0.1);
  const Step fast = compute_deadline(2, c, 200e6, 10, 0, 0.1);
  CHECK(slow == 80);
  CHECK(fast == 40);
}

TEST_CASE("presentation time at the playback rate") {
  CHECK(presentation_seconds(2600 * kKB, 1e6) == doctest::Approx(20.8));
}

TEST_CASE("local unit at issue gives delay 0") {
  SimulationConfig cfg;
  cfg.requests.max_keywords_per_request = 1;
  // One keyword, so every request asks for keyword 0.
  auto s = test::make_state(test::line_overlay(2), test::simple_catalog({kMB}, 1), cfg);
  s->store.add(0, 0, 0);
  const auto fresh = issue_requests(*s, 0);
  REQUIRE(s->metrics.delays.size() == 1);
  CHECK(s->metrics.delays[0].delay_steps == 0);
  CHECK_FALSE(s->metrics.delays[0].missed);
  CHECK(s->metrics.presentation_starts[0] == 1);
  // Node 1 has no copy: its slot stays open and gets the deposit.
  REQUIRE(fresh.size() == 1);
  CHECK(fresh[0].node == 1);
}

TEST_CASE("arrival fulfils every matching slot") {
  auto s = test::make_state(test::line_overlay(2), three_units());
  s->requests.issue(make_request(0, 2, {{0, 50}, {1, 50}}));
  s->store.add(0, 2, 9);
  const auto out = on_unit_stored(*s, 0, 2, 9);
  REQUIRE(out.size() == 2);
  CHECK(out[0].delay_steps == 7);
  CHECK(out[1].delay_steps == 7);
  CHECK(s->requests.current(0)->terminal());
  CHECK(s->metrics.node_requests_ok[0] == 1);
  CHECK(s->store.find(0, 2)->use_count == 1);
  CHECK(s->store.find(0, 2)->last_used_at == 9);
}

TEST_CASE("missed slots are final") {
  auto s = test::make_state(test::line_overlay(2), three_units());
  s->requests.issue(make_request(0, 0, {{0, 5}}));
  CHECK(expire_slots(*s, 5).empty());
  const auto missed = expire_slots(*s, 6);
  REQUIRE(missed.size() == 1);
  CHECK(missed[0].missed);
  CHECK(missed[0].delay_steps == 5);
  s->store.add(0, 0, 7);
  CHECK(on_unit_stored(*s, 0, 0, 7).empty());
  CHECK(s->metrics.slots_fulfilled == 0);
}

TEST_CASE("failed requests need every slot missed") {
  SUBCASE("all missed") {
    auto s = test::make_state(test::line_overlay(2), three_units());
    s->requests.issue(make_request(0, 0, {{0, 3}, {1, 3}, {0, 4}}));
    expire_slots(*s, 10);
    CHECK(s->metrics.node_requests_failed[0] == 1);
    CHECK(s->metrics.slots_missed == 3);
  }
  SUBCASE("one fulfilled") {
    auto s = test::make_state(test::line_overlay(2), three_units());
    s->requests.issue(make_request(0, 0, {{0, 3}, {1, 3}, {1, 4}}));
    s->store.add(0, 0, 1);
    on_unit_stored(*s, 0, 0, 1);
    expire_slots(*s, 10);
    CHECK(s->metrics.node_requests_failed[0] == 0);
    CHECK(s->metrics.node_requests_ok[0] == 1);
  }
}

TEST_CASE("one open request per user; new one after the terminal step") {
  auto s = test::make_state(test::line_overlay(2), three_units());
  s->requests.issue(make_request(0, 0, {{0, 3}}));
  CHECK_THROWS_AS(s->requests.issue(make_request(0, 1, {{1, 3}})), Error);
  CHECK_FALSE(s->requests.idle(0, 1));
  expire_slots(*s, 4);
  CHECK_FALSE(s->requests.idle(0, 4));
  CHECK(s->requests.idle(0, 5));
}

TEST_CASE("open slots exclude those issued this step") {
  auto s = test::make_state(test::line_overlay(2), three_units());
  s->requests.issue(make_request(1, 3, {{0, 30}, {1, 30}}));
  CHECK(open_slots(*s, 3).empty());
  CHECK(open_slots(*s, 4).size() == 2);
}

TEST_CASE("local popularity ranks") {
  RequestBook book(1);
  book.issue(make_request(0, 0, {{4, 1}, {2, 1}}));
  book.current(0)->slots[0].status = SlotStatus::fulfilled;
  book.current(0)->slots[1].status = SlotStatus::fulfilled;
  book.issue(make_request(0, 1, {{2, 2}, {9, 2}}));
  CHECK(book.popularity_rank(0, 2) == 1);
  CHECK(book.popularity_rank(0, 4) == 2);
  CHECK(book.popularity_rank(0, 9) == 3);
  CHECK(book.popularity_rank(0, 5) == 0);
  CHECK(book.request_count(0, 2) == 2);
  CHECK(book.history_size(0) == 3);
}
