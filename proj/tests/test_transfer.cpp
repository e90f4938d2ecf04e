#include <doctest.h>

#include <algorithm>
#include <random>

#include "esdv/transfer.hpp"
#include "support.hpp"

using namespace esdv;
using namespace esdv::transfer;
using units::qty;

namespace {

TransferRecord record(std::vector<std::pair<double, double>> sites,
                      std::vector<Adjustment> adjustments = {}) {
  TransferRecord r{"P_T", "donor studies", 2000, {}, std::move(adjustments)};
  for (std::size_t i = 0; i < sites.size(); ++i)
    r.observations.push_back({"site" + std::to_string(i),
                              qty(sites[i].first, "RMB/year"),
                              qty(sites[i].second, "RMB/year")});
  return r;
}

} // namespace

TEST_CASE("single donor reconstructs the 44% share exactly") {
  Parameter p = ratio_from_donors(record({{44, 100}}));
  CHECK(p.id() == "P_T");
  CHECK(p.quantity().magnitude() == 0.44);
  CHECK(p.quantity().unit() == units::UnitDim::dimensionless());
  CHECK(p.provenance().method == units::Method::transfer);
  REQUIRE(p.uncertainty());
  CHECK(p.uncertainty()->low == 0.44);
  CHECK(p.uncertainty()->high == 0.44);
}

TEST_CASE("two donors average to their mean") {
  Parameter p = ratio_from_donors(record({{30, 100}, {58, 100}}));
  CHECK(p.quantity().magnitude() == doctest::Approx(0.44).epsilon(1e-15));
  CHECK(p.uncertainty()->low == 0.30);
  CHECK(p.uncertainty()->high == 0.58);
}

TEST_CASE("adjustments scale the mean and the interval") {
  Parameter p = ratio_from_donors(record({{1, 1}}, {{"half", 0.5}}));
  CHECK(p.quantity().magnitude() == 0.5);
  CHECK(p.uncertainty()->low == 0.5);
  CHECK(p.uncertainty()->high == 0.5);
}

TEST_CASE("ratio_from_donors errors") {
  CHECK_THROWS_AS(ratio_from_donors(record({})), StructuralError);
  CHECK_THROWS_AS(ratio_from_donors(record({{1, 0}})), DomainError);
  CHECK_THROWS_AS(ratio_from_donors(record({{1, -2}})), DomainError);
  CHECK_THROWS_AS(ratio_from_donors(record({{1, 2}}, {{"bad", 0}})),
                  DomainError);
  TransferRecord mixed = record({{1, 2}});
  mixed.observations[0].denominator = qty(2, "t");
  CHECK_THROWS_AS(ratio_from_donors(mixed), DomainError);
}

TEST_CASE("mean lies within [min, max] over 200 random donor sets") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> count(1, 33);
  std::uniform_real_distribution<double> num(0, 500), den(0.01, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> sites(count(rng));
    double lo = INFINITY, hi = -INFINITY;
    for (auto &s : sites) {
      s = {num(rng), den(rng)};
      lo = std::min(lo, s.first / s.second);
      hi = std::max(hi, s.first / s.second);
    }
    Parameter p = ratio_from_donors(record(sites));
    double m = p.quantity().magnitude();
    CHECK(m >= p.uncertainty()->low);
    CHECK(m <= p.uncertainty()->high);
    CHECK(p.uncertainty()->low == lo);
    CHECK(p.uncertainty()->high == hi);
  }
}

TEST_CASE("rescaling one site leaves the ratio unchanged") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> v(1, 100), k(0.5, 8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> sites = {
        {v(rng), v(rng)}, {v(rng), v(rng)}, {v(rng), v(rng)}};
    double before = ratio_from_donors(record(sites)).quantity().magnitude();
    // Powers of two keep the per-site quotient bit-identical.
    double c = std::ldexp(1.0, int(k(rng)));
    sites[1].first *= c;
    sites[1].second *= c;
    CHECK(ratio_from_donors(record(sites)).quantity().magnitude() == before);
    double c2 = k(rng);
    sites[2].first *= c2;
    sites[2].second *= c2;
    CHECK(
        test::rel_close(ratio_from_donors(record(sites)).quantity().magnitude(),
                        before, 1e-14));
  }
}

TEST_CASE("point transfer") {
  units::Provenance prov{"survey", 2015, units::Method::local_study};
  Parameter base("C", qty(100, "RMB"), prov, units::Interval{80, 120});

  std::vector<Adjustment> adj = {{"income", 1.2}, {"ppp", 0.9}};
  Parameter p = point_transfer(base, adj);
  CHECK(p.quantity().magnitude() == doctest::Approx(108).epsilon(1e-15));
  CHECK(p.quantity().unit() == base.quantity().unit());
  CHECK(p.provenance().method == units::Method::transfer);
  CHECK(p.provenance().source.find("income") != std::string::npos);
  CHECK(p.uncertainty()->low == doctest::Approx(86.4));
  CHECK(p.uncertainty()->high == doctest::Approx(129.6));

  Parameter same = point_transfer(base, {});
  CHECK(same.quantity() == base.quantity());
  CHECK(same.uncertainty() == base.uncertainty());

  Parameter zero("Z", qty(0, "RMB"), prov);
  std::vector<Adjustment> two = {{"x", 2.0}};
  CHECK(point_transfer(zero, two).quantity().magnitude() == 0);

  std::vector<Adjustment> bad = {{"neg", -1}};
  CHECK_THROWS_AS(point_transfer(base, bad), DomainError);
}

TEST_CASE("point transfer with unit product is identity") {
  units::Provenance prov{"survey", 2015, units::Method::statistic};
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> v(0, 1e6);
  for (int i = 0; i < 100; ++i) {
    double m = v(rng);
    Parameter base("x", qty(m, "RMB/t"), prov, units::Interval{m / 2, m * 2});
    std::vector<Adjustment> adj = {{"up", 4.0}, {"down", 0.25}};
    Parameter p = point_transfer(base, adj);
    CHECK(p.quantity().magnitude() == m);
    CHECK(p.uncertainty() == base.uncertainty());
  }
}
