#include <algorithm>

#include "ofnet/sim.hpp"

namespace ofnet::sim {

SimResult run_relay_attack(const ScenarioConfig& config, const geo::GeoPoint& capture_site,
                           const geo::GeoPoint& replay_site, Seconds offset) {
    ScenarioConfig with_relay = config;
    with_relay.relays.push_back({capture_site, replay_site, offset});
    return run_scenario(with_relay);
}

void owners_fetch(SimResult& run, const ScenarioConfig& config, TimePoint when) {
    service::InProcessEndpoint endpoint(*run.service, [when] { return when; });
    for (std::size_t i = 0; i < config.devices.size(); ++i) {
        const auto& dev = config.devices[i];
        if (dev.owner_token.empty()) continue;
        auto got = owner_retrieve(run.masters[i], dev.ground_truth.front().time, dev.ground_truth.back().time,
                                  endpoint, dev.owner_token, when, config.key_window);
        SimEvent e;
        e.time = when;
        e.sequence = run.events.size();
        e.kind = EventKind::FetchPerformed;
        e.device = dev.owner_token;
        e.count = got.reports.size();
        run.events.push_back(std::move(e));
    }
    run.end = std::max(run.end, when);
}

CorrelationDemo run_correlation_demo(const ScenarioConfig& config, Seconds window) {
    CorrelationDemo demo{run_scenario(config), {}};
    owners_fetch(demo.run, config, demo.run.end + Seconds{1});
    demo.findings = demo.run.service->correlate(window);
    return demo;
}

}  // namespace ofnet::sim
