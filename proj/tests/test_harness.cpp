/*
* Copyright (C) 2026 mvsis contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mvsis/bounds.hpp"
#include "mvsis/config.hpp"
#include "mvsis/csv.hpp"
#include "mvsis/experiments.hpp"

using namespace mvsis;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mvsis_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config grammar round trip") {
    const std::string text = R"(
# run configuration
[experiment]
id = persistence
T = 10
steps = 200
M = 64
seed = 12345678901234567890
alpha = -0.08, 0, 0.5, 1
out = somewhere

[model]
model = gghmp
sigma = 0.01   # noise level
)";
    const auto cfg = parse_config_text(text);
    CHECK(cfg.id == "persistence");
    CHECK(cfg.horizon == 10.0);
    CHECK(cfg.steps == 200);
    CHECK(cfg.particles == 64);
    CHECK(cfg.seed == 12345678901234567890ull);
    CHECK(cfg.alphas == std::vector<double>{-0.08, 0.0, 0.5, 1.0});
    CHECK(cfg.out_dir == "somewhere");
    CHECK(cfg.model.preset == "gghmp");
    CHECK(cfg.model.get("sigma", 0.0) == 0.01);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config_text("[experiment]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\nid = nonsense\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\nsteps = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\nalpha = -2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\nT = \n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[somewhere]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nmodel = unknown\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("csv emission") {
    const auto dir = fresh_dir("csv");

    // header-only file
    Table empty;
    empty.headers = {"time"};
    emit_csv(empty, dir / "empty.csv");
    CHECK(slurp(dir / "empty.csv") == "time\n");

    // 2x2 table: three lines
    Table small;
    small.headers = {"a", "b"};
    small.rows = {{1.0, 2.0}, {3.0, 4.0}};
    emit_csv(small, dir / "small.csv");
    CHECK(slurp(dir / "small.csv") == "a,b\n1,2\n3,4\n");

    Table ragged;
    ragged.headers = {"a", "b"};
    ragged.rows = {{1.0}};
    CHECK_THROWS_AS(emit_csv(ragged, dir / "bad.csv"), std::invalid_argument);
}

TEST_CASE("csv values round-trip exactly") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    Table table;
    table.headers = {"x"};
    std::vector<double> values;
    for (int i = 0; i < 500; ++i) {
        const double v = dist(rng) * std::pow(10.0, static_cast<int>(i % 13) - 6);
        values.push_back(v);
        table.rows.push_back({v});
    }
    values.push_back(0.001);
    table.rows.push_back({0.001});
    const auto dir = fresh_dir("roundtrip");
    emit_csv(table, dir / "values.csv");

    std::ifstream in(dir / "values.csv");
    std::string line;
    std::getline(in, line);  // header
    for (double expected : values) {
        REQUIRE(std::getline(in, line));
        CHECK(std::stod(line) == expected);
    }
}

TEST_CASE("log-slope estimator is exact on synthetic exponentials") {
    SimulationOutput synthetic;
    synthetic.grid = Partition::equidistant(1.0, 100);
    synthetic.particle_count = 2;
    synthetic.stored_particles = {0, 1};
    synthetic.population.assign(101, 100.0);
    synthetic.paths.resize(2, std::vector<double>(101));
    for (std::size_t j = 0; j <= 100; ++j) {
        const double t = synthetic.grid.node(static_cast<std::int64_t>(j));
        synthetic.paths[0][j] = 50.0 * std::exp(-27.0 * t);
        synthetic.paths[1][j] = 3.0 * std::exp(4.0 * t) / 1e6;
    }
    const auto est = estimate_lyapunov(synthetic, 0.2, 1.0);
    CHECK(est.excluded == 0);
    REQUIRE(est.slopes.size() == 2);
    CHECK(est.slopes[0] == doctest::Approx(-27.0).epsilon(1e-12));
    CHECK(est.slopes[1] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(est.median == doctest::Approx(0.5 * (-27.0 + 4.0)).epsilon(1e-12));

    // particles leaving (0, N] are excluded and counted
    synthetic.paths[1][60] = -0.5;
    const auto excl = estimate_lyapunov(synthetic, 0.2, 1.0);
    CHECK(excl.excluded == 1);
    CHECK(excl.slopes.size() == 1);

    synthetic.paths[0][60] = 0.0;
    CHECK_THROWS(estimate_lyapunov(synthetic, 0.2, 1.0));
    CHECK_THROWS_AS(estimate_lyapunov(synthetic, 0.9, 0.2), std::invalid_argument);
}

TEST_CASE("persistent drift keeps the log flat") {
    SimulatedModelParams p{100.0, 0.5, 25.0, 20.0, 0.01, 0.0, 50.0};
    const auto model = build_simulated(p);
    const auto grid = Partition::equidistant(2.0, 2000);
    const auto out = simulate_particles(model, grid, 400, 9, constant_initial(50.0));
    const auto est = estimate_lyapunov(out, 0.4, 2.0);
    CHECK(std::abs(est.median) < 5.0);
}

TEST_CASE("deterministic convergence study has first-order slope") {
    ConvergenceSpec spec(build_simulated(SimulatedModelParams{100, 0.5, 25, 20, 0.0, 0.0, 50}));
    spec.horizon = 0.5;
    spec.particles = 1;
    spec.seed = 0;
    spec.order = 2.0;
    spec.coarse_exponents = {4, 5, 6, 7, 8, 9};
    spec.ref_exponent = 13;
    spec.i0law = constant_initial(50.0);
    const auto fit = run_convergence_study(spec);
    CHECK(fit.slope > 0.85);
    CHECK(fit.slope < 1.15);
    for (std::size_t i = 1; i < fit.errors.size(); ++i) CHECK(fit.errors[i] < fit.errors[i - 1]);
}

TEST_CASE("study errors sit below the theorem bound with a generous constant") {
    SimulatedModelParams p{100.0, 0.5, 25.0, 20.0, 0.01, 0.0, 50.0};
    ConvergenceSpec spec(build_simulated(p));
    spec.horizon = 0.25;
    spec.particles = 128;
    spec.seed = 1;
    spec.order = 2.0;
    spec.coarse_exponents = {4, 5, 6, 7};
    spec.ref_exponent = 10;
    spec.i0law = constant_initial(50.0);
    const auto fit = run_convergence_study(spec);

    // one Monte Carlo inversion is tolerated on the refinement ladder
    int inversions = 0;
    for (std::size_t i = 1; i < fit.errors.size(); ++i)
        if (fit.errors[i] > fit.errors[i - 1]) ++inversions;
    CHECK(inversions <= 1);

    const auto hc = hat_functions(spec.model);
    const auto finest = Partition::equidistant(spec.horizon, std::int64_t{1} << 7);
    StrongErrorParams params;
    params.p = 2.0;
    params.q = 5.0;
    params.particles = spec.particles;
    params.c_pq = 1e6;  // any admissible constant; the bound is one-sided
    params.noise_dim = spec.model.noise_dim();
    const double bound = strong_error_bound(hc, finest, params, spec.horizon).value;
    CHECK(fit.errors.back() * fit.errors.back() <= bound);
}

TEST_CASE("convergence the study validates its grid chain") {
    ConvergenceSpec spec(build_simulated(SimulatedModelParams{}));
    spec.coarse_exponents = {4, 5};
    spec.ref_exponent = 6;  // less than 8x finer
    spec.i0law = constant_initial(50.0);
    CHECK_THROWS_AS(run_convergence_study(spec), std::invalid_argument);
}

TEST_CASE("rate fit validates inputs") {
    CHECK_THROWS_AS(fit_loglog({0.1}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_loglog({0.1, 0.2}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_loglog({0.2, 0.1}, {1.0, 0.0}), std::invalid_argument);
    const auto fit = fit_loglog({0.2, 0.1, 0.05}, {2.0, 1.0, 0.5});
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("experiment runner writes deterministic outputs") {
    const fs::path dir_a = fresh_dir("det_a");
    const fs::path dir_b = fresh_dir("det_b");

    ExperimentConfig cfg;
    cfg.id = "extinction";
    cfg.steps = 150;
    cfg.particles = 300;
    cfg.seed = 21;
    cfg.out_dir = dir_a.string();
    const auto first = run_experiment(cfg);
    CHECK(first.size() >= 3);

    cfg.out_dir = dir_b.string();
    run_experiment(cfg);

    for (const char* name : {"means.csv", "paths.csv", "report.txt"}) {
        const auto a = slurp(dir_a / name);
        const auto b = slurp(dir_b / name);
        CHECK(a == b);
        CHECK_FALSE(a.empty());
    }
}

TEST_CASE("transition experiment couples initial values") {
    ExperimentConfig cfg;
    cfg.id = "transition";
    cfg.horizon = 0.5;
    cfg.steps = 100;
    cfg.particles = 200;
    cfg.seed = 4;
    cfg.i0s = {1.0, 50.0};
    cfg.out_dir = fresh_dir("transition").string();
    run_experiment(cfg);
    const auto means = slurp(fs::path(cfg.out_dir) / "means.csv");
    CHECK(means.find("mean[i0=1]") != std::string::npos);
    CHECK(means.find("mean[i0=50]") != std::string::npos);
    const auto report = slurp(fs::path(cfg.out_dir) / "report.txt");
    CHECK(report.find("alpha = 2.5") != std::string::npos);
    // no verdict is claimed in the transition regime
    CHECK(report.find("verdict") == std::string::npos);
}

TEST_CASE("analyze experiment reports thresholds") {
    ExperimentConfig cfg;
    cfg.id = "analyze";
    cfg.alphas = {0.5, 0.6};
    cfg.out_dir = fresh_dir("analyze").string();
    run_experiment(cfg);
    const auto report = slurp(fs::path(cfg.out_dir) / "report.txt");
    CHECK(report.find("extinction[alpha=0.5] = extinct") != std::string::npos);
    CHECK(report.find("extinction[alpha=0.6] = inconclusive") != std::string::npos);
}

TEST_CASE("persistence experiment emits level metadata") {
    ExperimentConfig cfg;
    cfg.id = "persistence";
    cfg.horizon = 0.2;
    cfg.steps = 40;
    cfg.particles = 50;
    cfg.out_dir = fresh_dir("levels").string();
    run_experiment(cfg);
    const auto report = slurp(fs::path(cfg.out_dir) / "report.txt");
    CHECK(report.find("level[alpha=-0.08] = 1.0203") != std::string::npos);
    CHECK(report.find("level[alpha=0] = 9.1750") != std::string::npos);
    CHECK(report.find("level[alpha=0.5] = 6.0785") != std::string::npos);
    CHECK(report.find("level[alpha=1] = 4.5444") != std::string::npos);
}

TEST_CASE("analyze covers every named preset") {
    const auto run_preset = [](const std::string& name,
                               std::map<std::string, double> values) {
        ExperimentConfig cfg;
        cfg.id = "analyze";
        cfg.model.preset = name;
        cfg.model.values = std::move(values);
        cfg.out_dir = fresh_dir("analyze_" + name).string();
        run_experiment(cfg);
        return slurp(fs::path(cfg.out_dir) / "report.txt");
    };

    const auto wang = run_preset("wang", {{"beta_eq", 0.3},
                                          {"beta_start", 0.5},
                                          {"theta", 1.0},
                                          {"xi", 0.1},
                                          {"gamma", 25.0},
                                          {"mu", 20.0},
                                          {"N", 100.0}});
    CHECK(wang.find("extinction[alpha=0] = extinct") != std::string::npos);

    const auto cai = run_preset("cai", {{"a1", 1.0},
                                        {"a3", 1.0},
                                        {"sigma1", 0.08},
                                        {"beta", 0.5},
                                        {"gamma", 25.0},
                                        {"mu", 20.0},
                                        {"N", 100.0}});
    CHECK(cai.find("extinction[alpha=0] = extinct") != std::string::npos);
    CHECK(cai.find("R0S[alpha=0] = 0.4") != std::string::npos);

    const auto bernardi = run_preset("bernardi", {{"sigma", 0.05},
                                                  {"beta", 0.5},
                                                  {"gamma", 25.0},
                                                  {"mu", 20.0},
                                                  {"N", 100.0}});
    // (beta N = 50) >= (mu + gamma = 45): the extinction criterion cannot fire
    CHECK(bernardi.find("extinction[alpha=0] = inconclusive") != std::string::npos);
    CHECK(bernardi.find("x0[alpha=0]") != std::string::npos);

    // raw-coefficient presets get envelope levels without a family verdict
    const auto rep = run_preset("representative", {{"beta", 0.5},
                                                   {"gamma", 25.0},
                                                   {"mu", 20.0},
                                                   {"g11", 0.01},
                                                   {"eta0", 1.0},
                                                   {"N", 100.0}});
    // beta1 = 0 pins both interaction corrections, giving the two-sided verdict
    CHECK(rep.find("persistence[alpha=0] = persist_around") != std::string::npos);
    CHECK(rep.find("extinction[alpha=0]") == std::string::npos);
}

TEST_CASE("unknown experiment id is a config error") {
    ExperimentConfig cfg;
    cfg.id = "nonsense";
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}
