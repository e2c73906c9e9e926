#include "hsim/state.hpp"

namespace hsim {

SimulationState::SimulationState(SimulationConfig cfg, Overlay overlay_in,
                                 Catalog catalog_in, std::uint64_t seed)
    : config(std::move(cfg)),
      overlay(std::move(overlay_in)),
      catalog(std::move(catalog_in)),
      store(catalog, overlay.node_count(), config.capacity),
      hormones(overlay.node_count(), catalog.keyword_count()),
      requests(overlay.node_count()),
      popularity(catalog.keyword_count(), catalog.zipf_exponent()),
      request_rng(Rng::substream(seed, "requests")),
      transport_rng(Rng::substream(seed, "transport")) {
  config.params.validate();
  metrics.dt = config.dt;
  metrics.resize(overlay.node_count(), catalog.unit_count());
}

}  // namespace hsim
