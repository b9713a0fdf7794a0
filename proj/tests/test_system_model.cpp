#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "hecc/system_model.hpp"

using namespace hecc;

namespace {

struct Instance {
    Scenario scenario;
    ChannelState channel;
    std::vector<TaskSpec> tasks;

    SlotContext ctx() const { return {scenario, channel, tasks}; }
};

Instance make_instance(int M, int K, int S, std::uint64_t seed = 1)
{
    ScenarioConfig c;
    c.num_ues = M;
    c.num_ess = K;
    c.num_services = S;
    c.max_services_per_es = S;
    c.seed = seed;
    Instance in{make_scenario(c), {}, {}};
    in.channel = draw_channel_state(in.scenario, 0, 0);
    auto req = requests_for_frame(in.scenario, 0);
    in.tasks = draw_tasks(in.scenario, req, 0, 0);
    return in;
}

// Two UEs, two ESs. UE0 -> ES0 -> cloud, UE1 -> ES1 -> ES0.
Instance hand_instance()
{
    Instance in = make_instance(2, 2, 2);
    in.channel.at(0, 0).gain = 1e-10;
    in.channel.at(0, 1).gain = 1e-12;
    in.channel.at(1, 0).gain = 1e-12;
    in.channel.at(1, 1).gain = 2e-10;
    in.tasks = {{2e-3, 1e4, 3e5, 0}, {2e-3, 1e4, 3e5, 1}};
    return in;
}

PlacementDecision hand_decision()
{
    PlacementDecision d(2, 2, 2);
    d.a(0, 0) = 1;
    d.ec(0, 0) = 1;
    d.a(1, 1) = 1;
    d.ee(1, 1, 0) = 1;
    d.g(1, 0) = 1;
    d.g(0, 1) = 1;
    return d;
}

// Independent restatement of the binary structure: one association, at most
// one outward route, routes only from the serving ES, service present where
// the task is processed.
bool structure_feasible(const PlacementDecision& d, const std::vector<int>& svc, int smax)
{
    for (int k = 0; k < d.num_ess; ++k) {
        int n = d.services_on(k);
        if (n < 1 || n > smax) return false;
    }
    for (int m = 0; m < d.num_ues; ++m) {
        int na = 0;
        for (int k = 0; k < d.num_ess; ++k) na += d.a(m, k);
        if (na > 1) return false;
        for (int k = 0; k < d.num_ess; ++k) {
            if (d.ee(m, k, k)) return false;
            int out = d.forwarded(m, k) + d.ec(m, k);
            if (out > d.a(m, k)) return false;
            if (d.a(m, k) && out == 0 && !d.g(svc[m], k)) return false;
            for (int kp = 0; kp < d.num_ess; ++kp)
                if (kp != k && d.ee(m, k, kp) && !d.g(svc[m], kp)) return false;
        }
    }
    return true;
}

// Enumerate every binary decision of the given size, calling f on each.
template <class F>
void for_each_decision(int M, int K, int S, F&& f)
{
    PlacementDecision d(M, K, S);
    std::vector<std::uint8_t*> bits;
    for (auto& v : d.assoc) bits.push_back(&v);
    for (auto& v : d.placement) bits.push_back(&v);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
                if (kp != k) bits.push_back(&d.ee(m, k, kp));
    for (auto& v : d.edge_cloud) bits.push_back(&v);
    const std::uint64_t n = std::uint64_t{1} << bits.size();
    for (std::uint64_t code = 0; code < n; ++code) {
        for (std::size_t i = 0; i < bits.size(); ++i) *bits[i] = static_cast<std::uint8_t>((code >> i) & 1);
        f(d);
    }
}

bool has(const std::vector<Violation>& v, const std::string& prefix)
{
    for (const auto& x : v)
        if (x.id.rfind(prefix, 0) == 0) return true;
    return false;
}

}  // namespace

TEST_CASE("primitive delays")
{
    CHECK(processing_delay(0.0, 1e9) == 0.0);
    CHECK(processing_delay(3e5, 1e9) == doctest::Approx(3e-4));
    CHECK(processing_delay(3e5, 5e8) == doctest::Approx(2 * processing_delay(3e5, 1e9)));
    CHECK_THROWS_AS(processing_delay(1.0, 0.0), std::invalid_argument);

    CHECK(transmission_delay_ue(1e4, 1.0, 0.0) == 0.0);
    CHECK(transmission_delay_ue(1e4, 0.5, 1e6) == doctest::Approx(5e-3));
    CHECK(transmission_delay_ue(1e4, 0.0, 1e6) == doctest::Approx(2 * transmission_delay_ue(1e4, 0.5, 1e6)));
    CHECK(transmission_delay_ue(1e4, 0.5, 0.0) == kInfeasible);
}

TEST_CASE("snr and uplink rate")
{
    CHECK(snr(1, 4, 0.5, 2, 1) == doctest::Approx(4.0));
    CHECK(snr(1, 4, 1.0, 2, 1) == doctest::Approx(0.5 * snr(1, 4, 0.5, 2, 1)));
    CHECK(snr(1, 0, 0.5, 2, 1) == 0.0);
    CHECK_THROWS_AS(snr(1, 4, 0.0, 2, 1), std::invalid_argument);

    std::vector<std::uint8_t> none{0, 0}, first{1, 0};
    std::vector<double> g{3.0, 7.0};
    CHECK(uplink_rate(none, 1.0, g, std::numbers::ln2) == 0.0);
    CHECK(uplink_rate(first, 1.0, g, std::numbers::ln2) == doctest::Approx(std::log(4.0)));
    std::vector<double> dead{0.0, 7.0};
    CHECK(uplink_rate(first, 1.0, dead, 1e6) == 0.0);

    ScenarioConfig c;
    double prev = 0.0;
    for (double b = 0.01; b <= 1.0; b += 0.01) {
        double r = link_rate(c, 1e-10, b);
        CHECK(r > prev);
        prev = r;
    }
    CHECK(link_rate(c, 1e-10, 0.0) == 0.0);
}

TEST_CASE("energy")
{
    TaskSpec t{2e-3, 1e4, 3e5, 0};
    CHECK(energy(1.0, t, 0.0, 0.2, 1e-27, 1e9) == doctest::Approx(1.5e-4));
    double tx = energy(0.5, t, 1e6, 0.2, 1e-27, 1e9) - energy(0.5, t, 1e12, 0.2, 1e-27, 1e9);
    CHECK(tx == doctest::Approx(0.2 * transmission_delay_ue(1e4, 0.5, 1e6)).epsilon(1e-5));
}

TEST_CASE("cost map")
{
    CHECK(status_change_cost(1, 0, 0.1, 0.05) == doctest::Approx(0.1));
    CHECK(status_change_cost(0, 1, 0.1, 0.05) == doctest::Approx(0.05));
    CHECK(status_change_cost(1, 1, 0.1, 0.05) == 0.0);
    CHECK(status_change_cost(0, 0, 0.1, 0.05) == 0.0);

    Prices p;
    PlacementDecision d(2, 2, 3);
    d.g(0, 0) = 1;
    d.g(1, 1) = 1;
    std::vector<std::uint8_t> prev = d.placement;
    auto same = total_cost(d, prev, p);
    CHECK(same.total == doctest::Approx(2 * 0.1));
    CHECK(same.request == 0.0);

    std::vector<std::uint8_t> none(d.placement.size(), 0);
    d.a(0, 0) = 1;
    d.ec(0, 0) = 1;
    auto fresh = total_cost(d, none, p);
    CHECK(fresh.total == doctest::Approx(2 * 0.1 + 2 * 0.1 + 0.01));
    CHECK(fresh.change[0] == 1);
    CHECK(total_cost(d, {}, p).total == fresh.total);

    auto drop = d;
    drop.g(1, 1) = 0;
    drop.g(2, 1) = 1;
    auto moved = total_cost(drop, prev, p);
    // uninstall one, install one, operate two, one cloud request
    CHECK(moved.total == doctest::Approx(0.05 + 0.1 + 0.2 + 0.01));

    CostAverager avg;
    for (int i = 0; i < 4; ++i) avg.add(fresh.total);
    CHECK(avg.average() == doctest::Approx(fresh.total));
    CHECK(avg.count() == 4);

    CHECK_THROWS_AS(total_cost(d, {1, 0}, p), std::invalid_argument);
}

TEST_CASE("hand-computed instance")
{
    auto in = hand_instance();
    auto d = hand_decision();
    AllocationDecision al{{0.5, 0.25}, {0.5, 0.5}};
    auto ctx = in.ctx();

    CHECK(ue_rate(ctx, d, al, 0) == doctest::Approx(49853222.08131247).epsilon(1e-12));
    CHECK(ue_rate(ctx, d, al, 1) == doctest::Approx(54849626.57766897).epsilon(1e-12));

    auto haul = backhaul_fronthaul_delays(ctx, d, al);
    CHECK(haul.backhaul[0] == doctest::Approx(5e-6));
    CHECK(haul.backhaul[1] == 0.0);
    CHECK(haul.fronthaul[0] == 0.0);
    CHECK(haul.fronthaul[1] == doctest::Approx(1.5e-6));

    auto pro = propagation_delay(in.scenario, d, services_of(in.tasks));
    CHECK(pro[0] == doctest::Approx(5e-5));
    CHECK(pro[1] == doctest::Approx(67.0 / 2e8));

    auto lat = e2e_latency(ctx, d, al);
    CHECK(lat[0].e2e == doctest::Approx(0.0003427944201248379).epsilon(1e-12));
    CHECK(lat[1].e2e == doctest::Approx(0.0003295724851564348).epsilon(1e-12));
    for (const auto& L : lat) {
        CHECK(L.e2e == doctest::Approx(L.total_pro + L.total_cp + L.total_t));
        CHECK(L.ue_cp >= 0.0);
        CHECK(L.radio >= 0.0);
    }
    CHECK(lat[0].total_cp == doctest::Approx(1.5e-4 + 3.75e-5));
    CHECK(lat[1].total_cp == doctest::Approx(7.5e-5 + 1.125e-4));

    auto en = ue_energies(ctx, d, al);
    CHECK(en[0] == doctest::Approx(9.501136768767454e-05).epsilon(1e-12));
    CHECK(en[1] == doctest::Approx(6.478271511762506e-05).epsilon(1e-12));

    auto loads = compute_loads(in.scenario, d, services_of(in.tasks));
    CHECK(loads.es[0] == doctest::Approx(2e9));
    CHECK(loads.es[1] == 0.0);
    CHECK(loads.cloud == doctest::Approx(4e9));

    double cost = total_cost(d, {}, in.scenario.config.prices).total;
    CHECK(cost == doctest::Approx(0.41));
    CHECK(objective(ctx, d, al, cost) == doctest::Approx(0.0010816945383759914).epsilon(1e-12));

    CHECK(check_feasibility(ctx, d, al, {}).empty());
}

TEST_CASE("objective weights")
{
    auto in = hand_instance();
    auto d = hand_decision();
    AllocationDecision al{{0.5, 0.25}, {0.5, 0.5}};
    double latency = 0.0;
    for (const auto& L : e2e_latency(in.ctx(), d, al)) latency += L.e2e;

    in.scenario.config.weight_latency = 1.0;
    in.scenario.config.weight_cost = 0.0;
    CHECK(objective(in.ctx(), d, al, 0.41) == doctest::Approx(latency));
    in.scenario.config.weight_latency = 0.0;
    in.scenario.config.weight_cost = 1.0;
    CHECK(objective(in.ctx(), d, al, 0.41) == doctest::Approx(0.41));

    AllocationDecision starved{{0.5, 0.25}, {0.0, 0.5}};
    CHECK(objective(in.ctx(), d, starved, 0.41) == kInfeasible);
}

TEST_CASE("local-only and unassociated UEs")
{
    auto in = hand_instance();
    PlacementDecision d(2, 2, 2);
    d.g(0, 0) = 1;
    d.g(1, 1) = 1;
    AllocationDecision al{{0.3, 1.0}, {0.5, 0.5}};
    auto eff = effective_allocation(d, al);
    CHECK(eff.phi[0] == 1.0);
    auto lat = e2e_latency(in.ctx(), d, eff);
    for (int m = 0; m < 2; ++m) {
        CHECK(lat[m].radio == 0.0);
        CHECK(lat[m].total_pro == 0.0);
        CHECK(lat[m].e2e == doctest::Approx(3e5 / 1e9));
    }
    // coupling is violated when an unassociated UE keeps offloading
    auto v = check_feasibility(in.ctx(), d, al, {});
    CHECK(has(v, "coupling[0]"));
    CHECK_FALSE(has(v, "coupling[1]"));
    CHECK(check_feasibility(in.ctx(), d, eff, {}).empty());
}

TEST_CASE("feasibility report")
{
    auto in = hand_instance();
    auto d = hand_decision();
    SUBCASE("bandwidth over-subscription")
    {
        AllocationDecision al{{0.5, 0.25}, {0.75, 0.75}};
        auto v = check_feasibility(in.ctx(), d, al, {});
        REQUIRE(has(v, "bandwidth_sum"));
        for (const auto& x : v)
            if (x.id == "bandwidth_sum") CHECK(x.residual == doctest::Approx(0.5));
    }
    SUBCASE("latency deadline")
    {
        in.tasks[0].deadline = 1e-4;
        AllocationDecision al{{0.5, 0.25}, {0.5, 0.5}};
        CHECK(has(check_feasibility(in.ctx(), d, al, {}), "latency[0]"));
    }
    SUBCASE("compute cap")
    {
        in.scenario.config.es_capacity = 1e9;
        AllocationDecision al{{0.5, 0.25}, {0.5, 0.5}};
        CHECK(has(check_feasibility(in.ctx(), d, al, {}), "es_capacity[0]"));
    }
    SUBCASE("rate floor")
    {
        in.scenario.config.rate_floor = 6e7;
        AllocationDecision al{{0.5, 0.25}, {0.5, 0.5}};
        auto v = check_feasibility(in.ctx(), d, al, {});
        CHECK(has(v, "rate[0]"));
        CHECK(has(v, "rate[1]"));
    }
    SUBCASE("structure")
    {
        auto bad = d;
        bad.g(1, 0) = 0;  // UE1's service vanishes from the target ES
        bad.g(0, 0) = 1;
        AllocationDecision al{{0.5, 0.25}, {0.5, 0.5}};
        CHECK(has(check_feasibility(in.ctx(), bad, al, {}), "transfer[1,1,0]"));
        auto two = d;
        two.a(0, 1) = 1;
        CHECK(has(structural_violations(two, {0, 1}, 2), "assoc_sum[0]"));
        auto empty = d;
        empty.g(0, 1) = 0;
        CHECK(has(structural_violations(empty, {0, 1}, 2), "services_min[1]"));
    }
}

TEST_CASE("product identity A*B = B for B <= A")
{
    for (int A = 0; A <= 1; ++A)
        for (int B = 0; B <= A; ++B) CHECK(A * B == B);
}

TEST_CASE("coupled and simplified forms agree on every structurally feasible point")
{
    struct Shape {
        int M, K, S;
    };
    for (Shape sh : {Shape{2, 2, 2}, Shape{1, 3, 2}, Shape{3, 2, 1}}) {
        auto in = make_instance(sh.M, sh.K, sh.S, 3);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.05, 0.95);
        AllocationDecision al;
        for (int m = 0; m < sh.M; ++m) {
            al.phi.push_back(u(rng));
            al.b.push_back(1.0 / sh.M);
        }
        // every service assignment
        int combos = 1;
        for (int m = 0; m < sh.M; ++m) combos *= sh.S;
        long checked = 0;
        for (int code = 0; code < combos; ++code) {
            std::vector<int> svc;
            for (int m = 0, c = code; m < sh.M; ++m, c /= sh.S) svc.push_back(c % sh.S);
            for (int m = 0; m < sh.M; ++m) in.tasks[m].service = svc[m];
            auto ctx = in.ctx();
            for_each_decision(sh.M, sh.K, sh.S, [&](const PlacementDecision& d) {
                if (!structure_feasible(d, svc, sh.S)) return;
                ++checked;
                auto lc = compute_loads(in.scenario, d, svc, Form::coupled);
                auto ls = compute_loads(in.scenario, d, svc, Form::simplified);
                CHECK(lc.es == ls.es);
                CHECK(lc.cloud == ls.cloud);
                auto hc = backhaul_fronthaul_delays(ctx, d, al, Form::coupled);
                auto hs = backhaul_fronthaul_delays(ctx, d, al, Form::simplified);
                CHECK(hc.backhaul == hs.backhaul);
                CHECK(hc.fronthaul == hs.fronthaul);
                for (Reduce r : {Reduce::max, Reduce::sum}) {
                    CHECK(propagation_delay(in.scenario, d, svc, Form::coupled, r) ==
                          propagation_delay(in.scenario, d, svc, Form::simplified, Reduce::max));
                    CHECK(total_processing_delay(ctx, d, al, Form::coupled, r) ==
                          total_processing_delay(ctx, d, al, Form::simplified, Reduce::max));
                }
                CHECK(propagation_delay(in.scenario, d, svc, Form::simplified, Reduce::sum) ==
                      propagation_delay(in.scenario, d, svc, Form::simplified, Reduce::max));
            });
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("duplicate structural checker agrees with the library")
{
    auto in = make_instance(2, 2, 2, 4);
    std::vector<int> svc{0, 1};
    long agree = 0, total = 0;
    for_each_decision(2, 2, 2, [&](const PlacementDecision& d) {
        ++total;
        bool lib = structural_violations(d, svc, 2).empty();
        if (lib == structure_feasible(d, svc, 2)) ++agree;
    });
    CHECK(agree == total);
}

TEST_CASE("latency is monotone in server rates")
{
    auto in = hand_instance();
    auto d = hand_decision();
    AllocationDecision al{{0.5, 0.25}, {0.5, 0.5}};
    auto base = e2e_latency(in.ctx(), d, al);
    for (double* rate : {&in.scenario.config.es_rate, &in.scenario.config.cloud_rate, &in.scenario.config.ue_rate,
                         &in.scenario.config.backhaul_rate, &in.scenario.config.fronthaul_rate}) {
        double keep = *rate;
        *rate *= 1.5;
        auto faster = e2e_latency(in.ctx(), d, al);
        for (int m = 0; m < 2; ++m) CHECK(faster[m].e2e <= base[m].e2e);
        *rate = keep;
    }
}

TEST_CASE("evaluators are pure")
{
    auto in = make_instance(4, 2, 3, 8);
    PlacementDecision d(4, 2, 3);
    for (int s = 0; s < 3; ++s) d.g(s, 0) = d.g(s, 1) = 1;
    for (int m = 0; m < 4; ++m) d.a(m, m % 2) = 1;
    AllocationDecision al{{0.2, 0.4, 0.6, 0.8}, {0.25, 0.25, 0.25, 0.25}};
    auto a = e2e_latency(in.ctx(), d, al);
    auto b = e2e_latency(in.ctx(), d, al);
    for (int m = 0; m < 4; ++m) CHECK(a[m].e2e == b[m].e2e);
    CHECK(ue_energies(in.ctx(), d, al) == ue_energies(in.ctx(), d, al));
}
