#include "doctest.h"

#include <cmath>

#include "hecc/config.hpp"
#include "hecc/scenario.hpp"
#include "hecc/units.hpp"

using namespace hecc;
using namespace hecc::units;

namespace {

std::vector<Point> es_layout(int K)
{
    ScenarioConfig c;
    c.num_ess = K;
    auto rng = make_stream(1, Stream::topology);
    return generate_topology(c, rng).es_positions;
}

}  // namespace

TEST_CASE("ES layout")
{
    auto two = es_layout(2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].x == 66.0);
    CHECK(two[1].x == 133.0);
    CHECK(two[0].y == 100.0);

    auto four = es_layout(4);
    REQUIRE(four.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(four[k].x == 40.0 * (k + 1));
        CHECK(four[k].y == 100.0);
    }

    auto three = es_layout(3);
    CHECK(three[0].x == 50.0);
    CHECK(three[1].x == 100.0);
    CHECK(three[2].x == 150.0);
}

TEST_CASE("UE positions are uniform in the square")
{
    ScenarioConfig c;
    c.num_ues = 400;
    auto rng = make_stream(3, Stream::topology);
    auto out = generate_topology(c, rng);
    double mx = 0.0;
    for (auto p : out.ue_positions) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 200.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= 200.0);
        mx += p.x;
    }
    CHECK(mx / 400 == doctest::Approx(100.0).epsilon(0.1));
}

TEST_CASE("path loss law")
{
    CHECK(path_loss_db(1.0) == doctest::Approx(-35.3));
    CHECK(path_loss_db(10.0) == doctest::Approx(-72.9));
    CHECK(path_loss_db(50.0) == doctest::Approx(-35.3 - 37.6 * std::log10(50.0)));
    CHECK(path_loss_db(50.0) == doctest::Approx(-99.18).epsilon(1e-3));
    CHECK_THROWS_AS(path_loss_db(0.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(-1.0), std::invalid_argument);
    double prev = path_loss_db(1.0);
    for (double d = 2.0; d < 300.0; d *= 1.3) {
        CHECK(path_loss_db(d) < prev);
        prev = path_loss_db(d);
    }
}

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_watt(23.0) == doctest::Approx(0.19953).epsilon(1e-4));
    CHECK(dbm_per_hz_to_watt_per_hz(-174.0) == doctest::Approx(3.981e-21).epsilon(1e-3));
    CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3));
    CHECK(linear_to_db(db_to_linear(-72.9)) == doctest::Approx(-72.9));
    CHECK(watt_to_dbm(dbm_to_watt(17.0)) == doctest::Approx(17.0));
}

TEST_CASE("Rayleigh channel draws")
{
    SUBCASE("gain is path loss times channel norm")
    {
        auto rng = make_stream(5, Stream::channel);
        auto e = draw_channel(rng, 8, 0.5);
        double n2 = 0.0;
        for (auto h : e.small_scale) n2 += std::norm(h);
        CHECK(e.small_scale.size() == 8);
        CHECK(e.gain == doctest::Approx(0.5 * n2));
        CHECK(e.gain > 0.0);
    }
    SUBCASE("mean squared norm equals the antenna count")
    {
        auto rng = make_stream(11, Stream::channel);
        double sum = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) sum += draw_channel(rng, 8, 1.0).gain;
        double mean = sum / n;
        CHECK(mean >= 7.9);
        CHECK(mean <= 8.1);
    }
    SUBCASE("antenna count must be positive")
    {
        auto rng = make_stream(1, Stream::channel);
        CHECK_THROWS_AS(draw_channel(rng, 0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("request process")
{
    ScenarioConfig c;
    auto sc = make_scenario(c);
    auto r0 = requests_for_frame(sc, 0);
    REQUIRE(static_cast<int>(r0.service_of_ue.size()) == c.num_ues);
    for (int s : r0.service_of_ue) {
        CHECK(s >= 0);
        CHECK(s < c.num_services);
    }
    for (int f = 1; f < 5; ++f) CHECK(requests_for_frame(sc, f).service_of_ue == r0.service_of_ue);
    auto r5 = requests_for_frame(sc, 5);
    CHECK(r5.service_of_ue == requests_for_frame(sc, 5).service_of_ue);
    CHECK(r5.regenerations == 1);
    CHECK(requests_for_frame(sc, 9).service_of_ue == r5.service_of_ue);

    // stepping matches replay
    RequestState st;
    st.service_of_ue.assign(static_cast<std::size_t>(c.num_ues), 0);
    for (int f = 0; f <= 10; ++f) {
        auto rng = make_stream(c.seed, Stream::request, {static_cast<std::uint64_t>(f)});
        st = advance_requests(st, f, c.num_services, c.request_period, rng);
        CHECK(st.service_of_ue == requests_for_frame(sc, f).service_of_ue);
    }
}

TEST_CASE("same seed reproduces every draw")
{
    ScenarioConfig c;
    c.seed = 42;
    auto a = make_scenario(c);
    auto b = make_scenario(c);
    CHECK(a.path_loss == b.path_loss);
    auto ca = draw_channel_state(a, 3, 2);
    auto cb = draw_channel_state(b, 3, 2);
    for (int m = 0; m < c.num_ues; ++m)
        for (int k = 0; k < c.num_ess; ++k) {
            CHECK(ca.gain(m, k) == cb.gain(m, k));
            CHECK(ca.at(m, k).path_loss == a.path_loss_at(m, k));
        }
    auto req = requests_for_frame(a, 3);
    auto ta = draw_tasks(a, req, 3, 2);
    auto tb = draw_tasks(b, req, 3, 2);
    for (int m = 0; m < c.num_ues; ++m) {
        CHECK(ta[m].cycles == tb[m].cycles);
        CHECK(ta[m].size == 1354.0 * 8);
        CHECK(ta[m].cycles / 1354.0 >= 200.0);
        CHECK(ta[m].cycles / 1354.0 <= 500.0);
        CHECK(ta[m].service == req.service_of_ue[m]);
        CHECK(ta[m].deadline == c.latency_cap);
    }
    // a different slot redraws the fading but not the path loss
    auto cc = draw_channel_state(a, 3, 3);
    CHECK(cc.gain(0, 0) != ca.gain(0, 0));
    CHECK(cc.at(0, 0).path_loss == ca.at(0, 0).path_loss);

    c.seed = 43;
    CHECK(make_scenario(c).path_loss != a.path_loss);
}

TEST_CASE("config validation")
{
    ScenarioConfig c;
    CHECK_NOTHROW(validate(c));
    c.max_services_per_es = c.num_services + 1;
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("max_services_per_es"), std::invalid_argument);
    c = {};
    c.prices.uninstall = 0.2;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.weight_latency = 0.5;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.ue_positions = {{10, 10}};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("config files")
{
    auto c = parse_config(R"({"network": {"num_ues": 16, "num_ess": 4},
                              "radio": {"tx_power_dbm": 23},
                              "weights": {"latency": 0.9},
                              "simulation": {"seed": 9}})");
    CHECK(c.num_ues == 16);
    CHECK(c.num_ess == 4);
    CHECK(c.tx_power == doctest::Approx(0.19953).epsilon(1e-4));
    CHECK(c.weight_cost == doctest::Approx(0.1));
    CHECK(c.seed == 9);
    CHECK(c.es_rate == 2e9);

    auto again = parse_config(dump_config(c));
    CHECK(again.num_ues == c.num_ues);
    CHECK(again.tx_power == c.tx_power);
    CHECK(again.weight_cost == c.weight_cost);

    CHECK_THROWS_AS(parse_config(R"({"network": {"num_uez": 3}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::runtime_error);
}
