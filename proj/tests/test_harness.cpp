/*
 * Copyright 2026 The cdma-jic Authors
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


#include <doctest.h>

#include "cdma/config.hpp"
#include "cdma/harness.hpp"
#include "cdma/output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace cdma;

namespace {

ExperimentConfig tiny()
{
    ExperimentConfig c;
    c.k_users = 3;
    c.packet_len = 300;
    c.training_len = 60;
    c.trials = 3;
    c.pilot_trials = 2;
    c.mse_window = 50;
    c.master_seed = 42;
    for (auto& [kind, g] : c.grids) {
        g.mu_w = {0.01, 0.03};
        g.mu_lambda = {0.001};
        g.mu_h = {0.005};
    }
    return c;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config defaults")
{
    const ExperimentConfig c;
    CHECK(c.n == 16);
    CHECK(c.lp == 9);
    CHECK(c.packet_len == 1500);
    CHECK(c.training_len == 150);
    CHECK(c.pic_stages == 3);
    CHECK(c.receivers.size() == 5);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config parsing")
{
    const auto c = parse_config(R"(
# comment line
experiment = sweep-ebn0
ebn0_db = 6, 9, 12   # trailing comment
receivers = linear, jo-sic
trials = 4
master_seed = 18446744073709551615
first_path = random
fixed_codes = true

[jo-sic]
mu_w = 0.04, 0.01, 0.01
mu_lambda = 0.002
mu_h = 0.005
)");
    CHECK(c.experiment == ExperimentKind::sweep_ebn0);
    CHECK(c.ebn0_db == std::vector<double>{6, 9, 12});
    CHECK(c.receivers == std::vector<ReceiverKind>{ReceiverKind::linear, ReceiverKind::jo_sic});
    CHECK(c.trials == 4);
    CHECK(c.master_seed == 18446744073709551615ull);
    CHECK(c.first_path == FirstPath::random);
    CHECK(c.fixed_codes);
    CHECK(c.grids.at(ReceiverKind::jo_sic).mu_w == std::vector<double>{0.01, 0.04});
    CHECK(c.grids.at(ReceiverKind::jo_sic).mu_lambda == std::vector<double>{0.002});
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[jo-sic]\nmu_q = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nope]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("trials = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("trials = 3.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("receivers = linear, linear\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("ebn0_db = 6, 9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("training_len = 1500\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("lp = 17\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("trials\n"), ConfigError);

    try {
        parse_config("n = 16\n\nwhat = 2\n");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    ExperimentConfig empty;
    empty.receivers.clear();
    CHECK_THROWS_AS(empty.validate(), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.conf"), ConfigError);
}

TEST_CASE("config text round trip")
{
    auto c = tiny();
    c.ebn0_db = {0.1};
    c.power_std_db = 2.7;
    c.adapt_ic_in_dd = false;
    const auto text = to_text(c);
    CHECK(to_text(parse_config(text)) == text);
}

TEST_CASE("channel MSE is scale and phase invariant")
{
    Rng rng(6);
    const auto h = generate_channel(rng).taps;
    CHECK(channel_mse(h, h) <= 1e-15);
    CHECK(channel_mse(Complex(-0.3, 2.0) * h, h) <= 1e-15);
    const auto g = generate_channel(rng).taps;
    const double m = channel_mse(g, h);
    CHECK(m > 0.0);
    CHECK(m <= 1.0);
    CHECK(std::abs(channel_mse(Complex(0, 5) * g, h) - m) <= 1e-14);
    CHECK(channel_mse(CVector::Zero(9), h) == 1.0);
}

TEST_CASE("seeds")
{
    const auto c = tiny();
    CHECK(evaluation_seed(c, 0) != pilot_seed(c, 0));
    CHECK(evaluation_seed(c, 0) != evaluation_seed(c, 1));
    const auto a = generate_trial(c, {3, 10.0}, 99);
    const auto b = generate_trial(c, {3, 10.0}, 99);
    CHECK(a.received == b.received);
    CHECK(a.symbols == b.symbols);

    auto fixed = c;
    fixed.fixed_codes = true;
    const auto x = generate_trial(fixed, {3, 10.0}, 1);
    const auto y = generate_trial(fixed, {3, 10.0}, 2);
    CHECK(x.users[1].code.chips() == y.users[1].code.chips());
    CHECK(a.users[0].code.chips() != generate_trial(c, {3, 10.0}, 100).users[0].code.chips());
}

TEST_CASE("summaries")
{
    const auto cell = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(cell.mean == doctest::Approx(2.5));
    CHECK(cell.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(cell.trials == 4);
    CHECK(summarize({2.0}).stderr_ == 0.0);
}

TEST_CASE("parallel_for covers every index and reports failures")
{
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](int i) { hit[static_cast<std::size_t>(i)] += 1; });
    for (int h : hit) CHECK(h == 1);
    try {
        parallel_for(20, 3, [](int i) {
            if (i == 7 || i == 13) throw std::runtime_error("boom " + std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "boom 7");
    }
}

TEST_CASE("singleton grid is returned unchanged")
{
    auto c = tiny();
    c.grids[ReceiverKind::jo_pic] = {{0.03}, {0.004}, {0.002}};
    const auto choice = optimize_step_sizes(c, {3, 10.0}, ReceiverKind::jo_pic);
    CHECK(choice.steps == StepSizes{0.03, 0.004, 0.002});
}

TEST_CASE("divergent steps are never chosen")
{
    auto c = tiny();
    c.grids[ReceiverKind::linear] = {{0.02, 10.0}, {0.001}, {0.005}};
    const auto choice = optimize_step_sizes(c, {3, 10.0}, ReceiverKind::linear);
    CHECK(choice.steps.mu_w == 0.02);
    CHECK(choice.pilot_ber < 0.2);

    // Non-joint receivers only see the smallest IC step.
    c.grids[ReceiverKind::sic] = {{0.02}, {0.001, 0.5}, {0.005}};
    CHECK(optimize_step_sizes(c, {3, 10.0}, ReceiverKind::sic).steps.mu_lambda == 0.001);
}

TEST_CASE("sequential and parallel runs write identical files")
{
    auto c = tiny();
    const auto tmp = std::filesystem::temp_directory_path() / "cdma_jic_determinism";
    std::filesystem::remove_all(tmp);
    for (auto kind : {ExperimentKind::convergence, ExperimentKind::sweep_users}) {
        c.experiment = kind;
        c.users_sweep = {2, 3};
        c.threads = 1;
        const auto seq = write_outputs(run_experiment(c), tmp / "seq");
        c.threads = 4;
        const auto par = write_outputs(run_experiment(c), tmp / "par");
        REQUIRE(seq.size() == par.size());
        for (std::size_t f = 0; f < seq.size(); ++f) {
            CHECK(seq[f].filename() == par[f].filename());
            const auto a = slurp(seq[f]);
            const auto b = slurp(par[f]);
            CHECK(!a.empty());
            // The manifest records the thread count; everything else must match.
            if (seq[f].filename() == "manifest.txt") {
                CHECK(a.size() == b.size());
            } else {
                CHECK(a == b);
            }
        }
    }
    std::filesystem::remove_all(tmp);
}

TEST_CASE("CSV layout")
{
    auto c = tiny();
    c.receivers = {ReceiverKind::linear, ReceiverKind::jo_sic};
    c.trials = 2;
    const auto res = run_experiment(c);
    const auto conv = convergence_csv(res);
    CHECK(conv.rfind("symbol_index,receiver,ber,stderr\n1,linear,", 0) == 0);
    CHECK(std::count(conv.begin(), conv.end(), '\n') == 1 + 2 * 300);
    CHECK(channel_mse_csv(res).rfind("symbol_index,receiver,mse,stderr\n", 0) == 0);
    const auto sweep = sweep_csv(res);
    CHECK(sweep.rfind("x_value,receiver,ber,stderr,trials\n12,linear,", 0) == 0);
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(manifest_text(res).find("seed = 42") != std::string::npos);
    CHECK(csv_name(ExperimentKind::channel_mse) == "channel_mse.csv");
}
