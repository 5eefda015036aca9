#pragma once

#include <json.hpp>

#include <ostream>

#include "handoff/ap_selection.hpp"

namespace handoff {

/// Neighbour graph, handoff history and association counts as JSON.
inline nlohmann::json context_to_json(const NeighborContext& ctx) {
  nlohmann::json aps = nlohmann::json::array();
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto a = static_cast<ApId>(i);
    nlohmann::json history = nlohmann::json::object();
    for (std::size_t k = 0; k < ctx.size(); ++k)
      if (const auto n = ctx.history(a, static_cast<ApId>(k)); n > 0) history[std::to_string(k)] = n;
    aps.push_back({{"id", a}, {"neighbors", ctx.neighbors(a)}, {"associated", ctx.associated(a)}, {"history", history}});
  }
  return {{"capacity", ctx.capacity()}, {"aps", aps}};
}

inline void write_context_json(std::ostream& os, const NeighborContext& ctx) {
  os << context_to_json(ctx).dump(2) << '\n';
  if (!os) throw std::ios_base::failure("context export failed");
}

}  // namespace handoff
