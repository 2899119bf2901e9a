#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "shepp/errors.hpp"
#include "shepp/fieldsim.hpp"
#include "shepp/mc.hpp"
#include "shepp/models.hpp"

using namespace shepp;

namespace {

struct Moment {
  double mean = 0.0;
  double se = 0.0;
};

Moment moment(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

bool within(const Moment& m, double target, double k = 3.0, double slack = 0.0) {
  return std::abs(m.mean - target) <= k * m.se + slack;
}

// Draws `reps` paths and returns the products x[i] * x[j] for each replication.
std::vector<double> products(const PathSimulator& sim, std::size_t i, std::size_t j, std::size_t reps,
                             std::uint64_t seed) {
  auto scratch = sim.make_scratch();
  std::vector<double> path(sim.size()), out;
  out.reserve(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    sim.generate(derive_seed(seed, k), path, scratch);
    out.push_back(path[i] * path[j]);
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("shepp_test_" + name);
}

}  // namespace

TEST_SUITE("fieldsim") {
  TEST_CASE("grid construction picks the coarsest common path step") {
    const auto g = SheppGrid::make(0.5, 1.0, 10.0, 3, 11);
    CHECK(g.path_step() == doctest::Approx(0.25));
    CHECK(g.stride_tau() == 1);
    CHECK(g.stride_s() == 4);
    CHECK(g.b_index() == 4);
    CHECK(g.tau(0) == 1.0);
    CHECK(g.tau(2) == doctest::Approx(0.5));
    CHECK(g.s(10) == doctest::Approx(10.0));
    CHECK(g.path_points() == 4 + 10 * 4 + 1);
    CHECK(g.points().size() == 33);

    const auto m = SheppGrid::with_mesh(0.5, 1.0, 2.0, 0.3);
    CHECK(m.path_step() == doctest::Approx(0.25));
    CHECK(m.n_tau() == 3);
    CHECK(m.n_s() == 9);
  }

  TEST_CASE("incommensurate grids are rejected") {
    CHECK_THROWS_AS(SheppGrid::make(0.5, 1.0, 10.0, 4, 4, 0.07), IncommensurateGrid);
    const auto g = SheppGrid::make(0.5, 1.0, 2.0, 3, 5);
    const auto path = simulate_fbm(0.5, 200, 0.3, 1);
    CHECK_THROWS_AS(build_shepp_field(path, g, IncrementVariance::fbm(0.5)), IncommensurateGrid);
    const auto short_path = simulate_fbm(0.5, 4, g.path_step(), 1);
    CHECK_THROWS_AS(build_shepp_field(short_path, g, IncrementVariance::fbm(0.5)), IncommensurateGrid);
  }

  TEST_CASE("path simulators are deterministic in the seed") {
    const auto fou = StationaryCovariance::fractional_ou(1.0);
    CHECK(simulate_stationary(fou, 100, 0.1, 5).values == simulate_stationary(fou, 100, 0.1, 5).values);
    CHECK(simulate_stationary(fou, 100, 0.1, 5).values != simulate_stationary(fou, 100, 0.1, 6).values);
    CHECK(simulate_fbm(0.3, 100, 0.1, 9).values == simulate_fbm(0.3, 100, 0.1, 9).values);
    const std::vector<double> w{0.6, 0.8}, h{0.3, 0.7};
    CHECK(simulate_mixed_fbm(w, h, 50, 0.1, 2).values == simulate_mixed_fbm(w, h, 50, 0.1, 2).values);
    CHECK(simulate_integrated(fou, 50, 0.1, 4).values == simulate_integrated(fou, 50, 0.1, 4).values);
  }

  TEST_CASE("stationary paths have unit variance and the fOU lag-1 covariance") {
    const PathSimulator sim(StationaryCovariance::fractional_ou(1.0), 16, 1.0);
    CHECK(within(moment(products(sim, 5, 5, 10000, 11)), 1.0));
    CHECK(within(moment(products(sim, 5, 6, 10000, 12)), std::exp(-1.0)));
    CHECK(within(moment(products(sim, 0, 3, 10000, 13)), std::exp(-3.0)));
  }

  TEST_CASE("smooth covariances still sample with unit variance") {
    // r(t) = exp(-t^2) on a fine grid is the classic case for a negative embedding.
    const PathSimulator sim(StationaryCovariance::fractional_ou(2.0), 64, 0.05);
    CHECK(within(moment(products(sim, 10, 10, 4000, 21)), 1.0));
    CHECK(within(moment(products(sim, 10, 20, 4000, 22)), std::exp(-0.25)));
  }

  TEST_CASE("fBm paths start at zero and have variance t^2H") {
    const auto p = simulate_fbm(0.7, 10, 0.5, 3);
    CHECK(p.values.front() == 0.0);
    const PathSimulator sim(IncrementVariance::fbm(0.7), 5, 0.5);
    for (std::size_t i : {1, 2, 4}) {
      const double t = 0.5 * static_cast<double>(i);
      CHECK(within(moment(products(sim, i, i, 10000, 30 + i)), std::pow(t, 1.4)));
    }
  }

  TEST_CASE("Brownian increments over disjoint lags are uncorrelated") {
    const PathSimulator sim(IncrementVariance::fbm(0.5), 5, 1.0);
    auto scratch = sim.make_scratch();
    std::vector<double> path(5), prod;
    for (std::size_t k = 0; k < 10000; ++k) {
      sim.generate(derive_seed(41, k), path, scratch);
      prod.push_back((path[1] - path[0]) * (path[4] - path[2]));
    }
    CHECK(within(moment(prod), 0.0));
  }

  TEST_CASE("mixed fBm") {
    const std::vector<double> one{1.0}, h{0.7};
    CHECK(simulate_mixed_fbm(one, h, 64, 0.1, 17).values == simulate_fbm(0.7, 64, 0.1, 17).values);

    const std::vector<double> w{0.6, 0.8}, hs{0.3, 0.7};
    const PathSimulator sim(IncrementVariance::mixed_fbm(w, hs), 3, 0.5);
    CHECK(within(moment(products(sim, 2, 2, 10000, 51)), 1.0));
    CHECK(within(moment(products(sim, 1, 1, 10000, 52)), 0.36 * std::pow(0.5, 0.6) + 0.64 * std::pow(0.5, 1.4)));
  }

  TEST_CASE("integrated process") {
    const auto fou = StationaryCovariance::fractional_ou(1.0);
    const PathSimulator sim(IncrementVariance::integrated(fou), 5, 0.25);
    // 2 int_0^1 (1 - s) e^-s ds; trapezoid bias at sub-step 1/32 is far below the MC noise.
    CHECK(within(moment(products(sim, 4, 4, 10000, 61)), 0.73575888234288464319, 3.0, 1e-3));
    CHECK(simulate_integrated(fou, 5, 0.25, 1).values.front() == 0.0);

    // A correlation table that is numerically 1 integrates to a straight line.
    const auto flat = StationaryCovariance::tabulated({0.0, 100.0}, {1.0, 1.0 - 1e-9}, 1.0, 1e-11);
    const auto p = simulate_integrated(flat, 9, 0.5, 7);
    for (std::size_t i = 1; i < p.values.size(); ++i)
      CHECK(p.values[i] == doctest::Approx(static_cast<double>(i) * p.values[1]).epsilon(1e-3));
  }

  TEST_CASE("Shepp fields are standardized and reproduce the model correlation") {
    for (const auto& m : {FieldModel(IncrementVariance::fbm(0.7)),
                          FieldModel(StationaryCovariance::fractional_ou(1.0)),
                          FieldModel(IncrementVariance::integrated(StationaryCovariance::fractional_ou(1.0)))}) {
      CAPTURE(model_id(m));
      const auto grid = SheppGrid::make(0.5, 1.0, 1.5, 3, 4);
      for (const auto& p : grid.points()) CHECK(standardized_covariance(m, p, p) == doctest::Approx(1.0).epsilon(1e-9));

      const FieldSimulator sim(m, grid);
      std::vector<double> var00, cov, var_last;
      for (std::size_t k = 0; k < 6000; ++k) {
        const auto f = sim.sample(derive_seed(71, k));
        var00.push_back(f.values(0, 0) * f.values(0, 0));
        var_last.push_back(f.values(2, 3) * f.values(2, 3));
        cov.push_back(f.values(0, 1) * f.values(2, 1));
      }
      CHECK(within(moment(var00), 1.0));
      CHECK(within(moment(var_last), 1.0, 3.0, 2e-3));
      const auto pts = grid.points();
      CHECK(within(moment(cov), shepp_correlation(m, pts[1], pts[2 * 4 + 1]), 3.0, 2e-3));
    }
  }

  TEST_CASE("Brownian field entries over disjoint windows are uncorrelated") {
    const auto grid = SheppGrid::make(0.5, 1.0, 2.0, 2, 3);
    const FieldSimulator sim(IncrementVariance::fbm(0.5), grid);
    std::vector<double> prod;
    for (std::size_t k = 0; k < 10000; ++k) {
      const auto f = sim.sample(derive_seed(81, k));
      prod.push_back(f.values(0, 0) * f.values(0, 1));  // [0, 1] and [1, 2]
    }
    CHECK(within(moment(prod), 0.0));
  }

  TEST_CASE("two-path field") {
    const auto r = StationaryCovariance::fractional_ou(1.0);
    const auto grid = SheppGrid::make(0.5, 1.0, 1.0, 3, 3);
    const auto sigma = [](double tau) { return 1.0 + tau; };
    const auto a = build_example21_field(r, sigma, grid, 5);
    const auto b = build_example21_field(r, sigma, grid, 5);
    CHECK(a.values == b.values);
    CHECK(a.values != build_example21_field(r, sigma, grid, 6).values);

    std::vector<double> var, cov;
    for (std::size_t k = 0; k < 10000; ++k) {
      const auto f = build_example21_field(r, sigma, grid, derive_seed(91, k));
      var.push_back(f.values(1, 0) * f.values(1, 0));
      cov.push_back(f.values(1, 0) * f.values(1, 2));
    }
    CHECK(within(moment(var), 1.0));
    CHECK(within(moment(cov), r(1.0)));  // (r(ds) + r(ds)) / 2 at fixed tau
  }

  TEST_CASE("field_max") {
    FieldSample single;
    single.values = Eigen::MatrixXd::Constant(1, 1, -0.3);
    CHECK(field_max(single) == -0.3);

    const auto grid = SheppGrid::make(0.5, 1.0, 4.0, 5, 9);
    const FieldSimulator sim(IncrementVariance::fbm(0.3), grid);
    const auto f = sim.sample(123);
    double naive = -INFINITY;
    for (Eigen::Index j = 0; j < f.values.rows(); ++j)
      for (Eigen::Index l = 0; l < f.values.cols(); ++l) naive = std::max(naive, f.values(j, l));
    CHECK(field_max(f) == naive);

    auto scratch = sim.make_scratch();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      sim.draw(seed, scratch);
      const double fine = sim.current_max(scratch, 1);
      CHECK(fine == sim.sample_max(seed, scratch));
      CHECK(sim.current_max(scratch, 2) <= fine);
      CHECK(sim.current_max(scratch, 4) <= sim.current_max(scratch, 2));
    }
  }

  TEST_CASE("Cholesky oracle") {
    const FieldModel brown = IncrementVariance::fbm(0.5);
    const auto grid = SheppGrid::make(0.5, 1.0, 1.5, 4, 4);
    CHECK(oracle_sample_max(brown, grid, 500, -10.0, 1).p_hat == 1.0);
    CHECK(oracle_sample_max(brown, grid, 1000, 10.0, 1).p_hat == 0.0);
    CHECK_THROWS_AS(oracle_sample_maxima(brown, SheppGrid::make(0.5, 1.0, 1.0, 5, 13), 10, 1), DomainError);

    const std::size_t n = 10000;
    const FieldSimulator sim(brown, grid);
    auto scratch = sim.make_scratch();
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) hits += sim.sample_max(derive_seed(2, k), scratch) > 2.0;
    const auto pipeline = binomial_estimate(hits, n, 2.0, 2);
    const auto oracle = oracle_sample_max(brown, grid, n, 2.0, 3);
    CHECK(agree_within(pipeline, oracle, 3.0));
  }

  TEST_CASE("CSV and binary export round-trip") {
    const auto grid = SheppGrid::make(0.5, 1.0, 2.0, 3, 5);
    const auto f = FieldSimulator(StationaryCovariance::fractional_ou(1.0), grid).sample(77);

    const auto csv = temp_file("field.csv");
    write_field_csv(f, csv);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "tau,s,value");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      double tau = 0, s = 0, v = 0;
      REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &tau, &s, &v) == 3);
      const std::size_t j = rows / grid.n_s(), l = rows % grid.n_s();
      CHECK(tau == grid.tau(j));
      CHECK(s == grid.s(l));
      CHECK(v == f.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)));
      ++rows;
    }
    CHECK(rows == grid.size());

    const auto bin = temp_file("field.bin");
    write_field_binary(f, bin);
    const auto back = read_field_binary(bin);
    CHECK(back.values == f.values);
    CHECK(back.seed == 77);
    CHECK(back.model_id == f.model_id);
    CHECK(back.grid.n_tau() == 3);
    CHECK(back.grid.n_s() == 5);
    CHECK(back.grid.path_step() == grid.path_step());
    std::ifstream raw(bin, std::ios::binary);
    char magic[4];
    raw.read(magic, 4);
    CHECK(std::string(magic, 4) == "SHPF");

    std::ofstream(bin, std::ios::binary) << "JUNK";
    CHECK_THROWS_AS(read_field_binary(bin), IoError);
    std::filesystem::remove(csv);
    std::filesystem::remove(bin);
  }
}
