#include <doctest.h>

#include <cstdio>

#include "config.hpp"
#include "errors.hpp"
#include "test_util.hpp"

TEST_CASE("parse_config applies defaults for missing sections and keys") {
    const bm::Config cfg = bm::parse_config("{}");
    CHECK(cfg.channel.sample_rate_hz == 5000.0);
    CHECK(cfg.decoder.preamble_len == 8);
    CHECK_FALSE(cfg.decoder.expected_bit_count.has_value());
    CHECK_FALSE(cfg.decoder.min_peak_width_s.has_value());
    CHECK(cfg.tx.bit_period_s == 0.5);
    CHECK(cfg.tx.preamble_len == 8);

    const bm::Config partial = bm::parse_config(R"({"tx": {"bit_period_s": 0.9}})");
    CHECK(partial.tx.bit_period_s == 0.9);
    CHECK(partial.tx.duty_cycle == 0.5);
}

TEST_CASE("config round-trips through its JSON form") {
    bm::Config cfg;
    cfg.channel.seed = 99;
    cfg.channel.hf_noise_ma = 3.5;
    cfg.decoder.expected_bit_count = 520;
    cfg.decoder.min_peak_width_s = 0.04;
    cfg.tx.bit_period_s = 0.8;
    cfg.tx.preamble_len = 10;
    const bm::Config back = bm::parse_config(bm::config_json(cfg));
    CHECK(back.channel.seed == 99);
    CHECK(back.channel.hf_noise_ma == 3.5);
    CHECK(back.decoder.expected_bit_count == 520);
    CHECK(back.decoder.min_peak_width_s == 0.04);
    CHECK(back.tx.bit_period_s == 0.8);
    CHECK(back.tx.preamble_len == 10);
}

TEST_CASE("unknown sections and keys are rejected") {
    CHECK_THROWS_WITH(bm::parse_config(R"({"chanel": {}})"),
                      doctest::Contains("unknown key \"chanel\""));
    CHECK_THROWS_WITH(bm::parse_config(R"({"channel": {"baselines_ma": 2}})"),
                      doctest::Contains("baselines_ma"));
    CHECK_THROWS_WITH(bm::parse_config(R"({"decoder": {"preamble": 8}})"),
                      doctest::Contains("preamble"));
    CHECK_THROWS_AS(bm::parse_config("not json"), bm::parse_error);
}

TEST_CASE("invariant violations fail at load time") {
    CHECK_THROWS_AS(bm::parse_config(R"({"tx": {"duty_cycle": 1.5}})"), std::invalid_argument);
    CHECK_THROWS_AS(bm::parse_config(R"({"channel": {"width_shrink_mean": 0}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(bm::parse_config(R"({"decoder": {"preamble_len": 1}})"),
                    std::invalid_argument);
    CHECK_THROWS_WITH(bm::parse_config(R"({"tx": {"preamble": "0010"}})"),
                      doctest::Contains("peak bits"));
    CHECK_THROWS_WITH(bm::parse_config(R"({"tx": {"preamble": ""}})"),
                      doctest::Contains("non-empty"));
}

TEST_CASE("config file i/o") {
    const auto path = temp_path("config.json");
    bm::Config cfg;
    cfg.channel.seed = 7;
    bm::save_config(cfg, path);
    const bm::Config back = bm::load_config(path);
    CHECK(back.channel.seed == 7);
    CHECK_THROWS_AS(bm::load_config("no_such_config.json"), bm::io_error);
    std::remove(path.c_str());
}
