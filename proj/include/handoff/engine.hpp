#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "handoff/ap_selection.hpp"
#include "handoff/dynamic_ap_list.hpp"
#include "handoff/event_log.hpp"
#include "handoff/latency_model.hpp"
#include "handoff/mobility.hpp"
#include "handoff/propagation.hpp"
#include "handoff/pshp_fsm.hpp"
#include "handoff/rng.hpp"
#include "handoff/scenario.hpp"
#include "handoff/schemes.hpp"
#include "handoff/traffic.hpp"

namespace handoff {

/// Pending events ordered by (time, insertion sequence).
template <typename Payload>
class EventQueue {
 public:
  void push(SimTime at, Payload p) { heap_.push(Entry{at, seq_++, std::move(p)}); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  SimTime next_time() const { return heap_.top().at; }

  std::pair<SimTime, Payload> pop() {
    Entry e = heap_.top();
    heap_.pop();
    return {e.at, std::move(e.payload)};
  }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    Payload payload;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t seq_ = 0;
};

/// Where the time of one handoff went.
struct LatencyBreakdown {
  Duration switching;  // channel switches during scans
  Duration dwell;      // probe / beacon waits
  Duration frames;     // probe, authentication and association frames
  Duration wait;       // finishing an interrupted pre-scan channel
  Duration backoff;    // retry delay after an empty scan

  Duration total() const { return switching + dwell + frames + wait + backoff; }
  bool operator==(const LatencyBreakdown&) const = default;
};

struct HandoffRecord {
  std::int32_t ms = -1;
  ApId from = -1;
  ApId to = -1;
  HandoffForm form = HandoffForm::Baseline;
  SimTime trigger_time;
  SimTime complete_time;
  Duration latency;
  LatencyBreakdown breakdown;
  Dbm rssi_at_trigger;             // current link when the handoff fired
  std::optional<Dbm> listed_rssi;  // gate input for forms 1 and 2

  bool operator==(const HandoffRecord&) const = default;
};

struct Diagnostics {
  std::int64_t ignored_events = 0;
  std::int64_t association_failures = 0;
  std::int64_t form1_failures = 0;
  std::int64_t form2_failures = 0;
  std::int64_t prescans = 0;
  std::int64_t prescans_interrupted = 0;
  std::int64_t disconnections = 0;

  bool operator==(const Diagnostics&) const = default;
};

struct PacketCounters {
  std::int64_t emitted = 0;
  std::int64_t delivered = 0;
  std::int64_t deadline_dropped = 0;
  std::int64_t buffer_dropped = 0;
  std::int64_t handoff_lost = 0;
  std::int64_t in_flight = 0;

  bool conserves() const { return emitted == delivered + deadline_dropped + buffer_dropped + handoff_lost + in_flight; }
  bool operator==(const PacketCounters&) const = default;
};

/// Everything a run measured.
struct MetricsLedger {
  std::vector<HandoffRecord> handoffs;
  std::array<std::int64_t, 4> form_counts{};  // indexed by HandoffForm
  std::int64_t emitted = 0;
  std::int64_t delivered = 0;
  std::int64_t deadline_dropped = 0;
  std::int64_t buffer_dropped = 0;
  std::int64_t handoff_lost = 0;
  std::int64_t in_flight = 0;
  std::vector<std::vector<std::int64_t>> inter_frame_us;  // per station
  std::vector<PacketCounters> per_station;
  Diagnostics diagnostics;
  std::vector<std::int64_t> history_row_totals;           // per AP, sum of O[i][*] at run end
  std::uint64_t event_hash = 0;
  std::uint64_t event_count = 0;
  double tx_power_dbm = 0.0;

  std::int64_t count(HandoffForm f) const { return form_counts[static_cast<std::size_t>(f)]; }
  std::int64_t handoff_count() const { return static_cast<std::int64_t>(handoffs.size()); }
  std::int64_t dropped() const { return deadline_dropped + buffer_dropped + handoff_lost; }

  /// (deadline drops + handoff-window losses) / emitted
  double loss_probability() const {
    if (emitted == 0) return 0.0;
    return static_cast<double>(deadline_dropped + handoff_lost) / static_cast<double>(emitted);
  }
  bool conserves() const { return emitted == delivered + deadline_dropped + buffer_dropped + handoff_lost + in_flight; }

  std::vector<std::int64_t> latencies_us() const {
    std::vector<std::int64_t> v;
    v.reserve(handoffs.size());
    for (const auto& h : handoffs) v.push_back(h.latency.count());
    return v;
  }

  bool operator==(const MetricsLedger&) const = default;
};

struct LatencyStats {
  double mean = 0.0;
  double median = 0.0;
  std::int64_t p95 = 0;
};

/// Mean, median (midpoint of the two middle samples for even n) and nearest-rank p95.
inline LatencyStats latency_stats(std::vector<std::int64_t> v) {
  LatencyStats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (auto x : v) sum += static_cast<double>(x);
  s.mean = sum / static_cast<double>(v.size());
  const std::size_t n = v.size();
  s.median = n % 2 == 1 ? static_cast<double>(v[n / 2])
                        : (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = v[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

namespace detail {

enum class EvKind : std::uint8_t { Tick, Emit, Arrive, Step };

struct SimEvent {
  EvKind kind = EvKind::Tick;
  std::int32_t ms = -1;
  Packet packet;
};

enum class LinkMode { Connected, Handoff, Disconnected };
enum class FrameKind { Probe, Auth, Assoc };

inline const char* to_string(FrameKind k) {
  switch (k) {
    case FrameKind::Probe: return "probe";
    case FrameKind::Auth: return "auth";
    case FrameKind::Assoc: return "assoc";
  }
  return "?";
}

struct HandoffJob {
  enum class Stage { Scan, Frames, Backoff };

  bool active = false;
  HandoffForm form = HandoffForm::Baseline;
  ApId from = -1;
  bool released = false;  // station gave up its old AP (empty scan)
  SimTime trigger;
  Dbm rssi_at_trigger;
  std::optional<Dbm> listed_rssi;
  LatencyBreakdown br;
  Stage stage = Stage::Scan;
  bool passive = false;
  std::int64_t channel = 0;
  bool dwelling = false;
  std::vector<ApSample> found;
  std::vector<ApId> refused;
  ApId target = -1;
  std::vector<FrameKind> frames;
  std::size_t frame_index = 0;
};

struct Station {
  std::int32_t id = -1;
  MobilityState mob;
  Rng mob_rng{0};
  Rng traffic_rng{0};
  Rng access_rng{0};
  Rng noise_rng{0};
  std::optional<ApId> ap;
  LinkMode mode = LinkMode::Disconnected;
  bool realtime = true;
  VoipSource src;
  PsmBuffer psm;
  std::optional<SimTime> last_delivery;
  std::int64_t pending = 0;  // packets on the air towards this station

  // prevent-scan procedure
  PshpState pshp = PshpState::Standby;
  DynamicApList list;
  SimTime next_prescan_at;
  bool preauthenticated = false;
  bool prescanning = false;
  bool prescan_abort = false;
  std::optional<SimTime> urgent_trigger;
  std::int64_t prescan_channel = 0;
  SimTime prescan_started;
  std::vector<ApSample> prescan_found;

  // zone-based preemptive baseline
  ApfhTracker apfh;
  std::int64_t apfh_channel = 0;

  HandoffJob job;
};

}  // namespace detail

/// Single-threaded discrete-event run of one scenario.
class Simulator {
 public:
  explicit Simulator(Scenario scenario, std::ostream* trace = nullptr)
      : s_(std::move(scenario)), log_(trace) {
    s_.validate();
    world_ = build_world(s_);
    ctx_ = NeighborContext::from_positions(world_.aps, world_.neighbor_radius, s_.capacity);
    for (const auto& h : s_.history_seed) ctx_.seed_history(h.from, h.to, h.count);
    alpha_ = prescan_period_alpha(s_.timing);
    if (s_.selection.policy) {
      s_.selection.policy->threshold = s_.thresholds.rssi_min();
      s_.selection.policy->capacity = s_.capacity;
    }
    background_load_ = LoadModel{static_cast<std::int64_t>(std::llround(s_.load * kMaxActiveStations))};
  }

  const World& world() const { return world_; }

  MetricsLedger run() {
    if (ran_) throw std::logic_error("Simulator::run called twice");
    ran_ = true;
    const SimTime end = SimTime::origin() + s_.duration;
    ledger_.tx_power_dbm = world_.tx_power.value();
    log_.record(SimTime::origin(), "run_start", -1, -1,
                Detail()
                    .add("seed", static_cast<std::int64_t>(s_.seed))
                    .add("scheme", to_string(s_.scheme))
                    .add("tx_power_mdbm", std::llround(world_.tx_power.value() * 1000.0))
                    .str());
    init_stations();
    queue_.push(SimTime::origin() + s_.tick, {detail::EvKind::Tick, -1, {}});

    SimTime clock;
    while (!queue_.empty() && queue_.next_time() <= end) {
      auto [now, ev] = queue_.pop();
      if (now < clock) throw std::logic_error("event queue went backwards");
      clock = now;
      switch (ev.kind) {
        case detail::EvKind::Tick: on_tick(now, end); break;
        case detail::EvKind::Emit: on_emit(now, end, ev.ms); break;
        case detail::EvKind::Arrive: on_arrive(now, ev.packet); break;
        case detail::EvKind::Step: on_step(now, ev.ms); break;
      }
    }

    std::int64_t buffered = 0;
    for (const auto& st : stations_) {
      buffered += static_cast<std::int64_t>(st.psm.size());
      ledger_.per_station[static_cast<std::size_t>(st.id)].in_flight =
          st.pending + static_cast<std::int64_t>(st.psm.size());
    }
    ledger_.in_flight = in_flight_ + buffered;
    ledger_.history_row_totals.resize(world_.aps.size());
    for (std::size_t i = 0; i < world_.aps.size(); ++i)
      ledger_.history_row_totals[i] = ctx_.history_row_total(static_cast<ApId>(i));
    log_.record(end, "run_end", -1, -1,
                Detail().add("emitted", ledger_.emitted).add("in_flight", ledger_.in_flight).str());
    ledger_.event_hash = log_.hash();
    ledger_.event_count = log_.count();
    return std::move(ledger_);
  }

  const NeighborContext& context() const { return ctx_; }

 private:
  using Station = detail::Station;
  using Job = detail::HandoffJob;

  // -------------------------------------------------------------------------
  // Setup

  void init_stations() {
    stations_.resize(static_cast<std::size_t>(s_.stations));
    ledger_.inter_frame_us.resize(stations_.size());
    ledger_.per_station.resize(stations_.size());
    const double rt_share = realtime_share(s_.traffic);
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      auto& st = stations_[i];
      st.id = static_cast<std::int32_t>(i);
      st.mob_rng = Rng::derive(s_.seed, i, Stream::Mobility);
      st.traffic_rng = Rng::derive(s_.seed, i, Stream::Traffic);
      st.access_rng = Rng::derive(s_.seed, i, Stream::Access);
      st.noise_rng = Rng::derive(s_.seed, i, Stream::Noise);
      st.psm = PsmBuffer(s_.psm_capacity);

      switch (s_.mobility) {
        case MobilityModel::RandomWaypoint:
        case MobilityModel::RandomDirection:
          st.mob = init_random(s_.mobility, world_.arena, s_.mobility_params, st.mob_rng);
          break;
        case MobilityModel::Static:
          st.mob.model = MobilityModel::Static;
          st.mob.current = i < s_.station_positions.size()
                               ? s_.station_positions[i]
                               : Position{st.mob_rng.uniform(0.0, world_.arena.width),
                                          st.mob_rng.uniform(0.0, world_.arena.height)};
          break;
        case MobilityModel::Scripted:
          st.mob.model = MobilityModel::Scripted;
          st.mob.path = s_.path;
          st.mob.current = i < s_.station_positions.size() ? s_.station_positions[i] : s_.path.front();
          st.mob.next_waypoint = 0;
          st.mob.speed = s_.path_speed;
          break;
      }
      if (!world_.arena.contains(st.mob.current)) throw std::invalid_argument("station starts outside the arena");

      st.realtime = st.traffic_rng.uniform01() < rt_share;
      st.src.inter_arrival = s_.inter_arrival;
      st.src.deadline = s_.deadline;
      const auto phase = static_cast<std::int64_t>(
          std::floor(st.traffic_rng.uniform01() * static_cast<double>(s_.inter_arrival.count())));
      st.src.next_emit = SimTime::origin() + Duration::micros(phase);

      initial_association(st);
      if (st.src.next_emit <= SimTime::origin() + s_.duration)
        queue_.push(st.src.next_emit, {detail::EvKind::Emit, st.id, {}});
    }
  }

  void initial_association(Station& st) {
    std::optional<ApId> best;
    Dbm best_rssi;
    for (std::size_t a = 0; a < world_.aps.size(); ++a) {
      const auto ap = static_cast<ApId>(a);
      if (!ctx_.has_room(ap)) continue;
      const Dbm r = rssi(st, ap);
      if (!best || r > best_rssi) {
        best = ap;
        best_rssi = r;
      }
    }
    if (!best) {
      st.mode = detail::LinkMode::Disconnected;
      return;
    }
    ctx_.associate(*best);
    st.ap = best;
    st.mode = detail::LinkMode::Connected;
    if (s_.scheme == SchemeKind::Pshp) {
      st.preauthenticated = true;
      st.next_prescan_at = SimTime::origin();
    }
    log_.record(SimTime::origin(), "associate", st.id, *best, Detail().add("rssi_mdbm", mdbm(best_rssi)).str());
  }

  // -------------------------------------------------------------------------
  // Radio

  PacketCounters& counters(const Station& st) { return ledger_.per_station[static_cast<std::size_t>(st.id)]; }

  static std::int64_t mdbm(Dbm v) { return std::llround(v.value() * 1000.0); }

  Dbm rssi(Station& st, ApId ap) {
    const double d = std::max(distance(st.mob.current, world_.aps[static_cast<std::size_t>(ap)]), 0.5);
    double v = received_power(world_.tx_power, d, s_.frequency_hz).value();
    for (const auto& pen : s_.penalties)
      if ((pen.ap < 0 || pen.ap == ap) && pen.covers(st.mob.current)) v -= pen.db;
    if (s_.noise_std_db > 0.0) v += s_.noise_std_db * st.noise_rng.normal();
    return Dbm(v);
  }

  std::vector<ApSample> probe(Station& st, std::int64_t channel, SimTime now, std::optional<ApId> exclude) {
    std::vector<ApSample> out;
    for (ApId ap : world_.on_channel[static_cast<std::size_t>(channel)]) {
      if (exclude && ap == *exclude) continue;
      const Dbm r = rssi(st, ap);
      if (r >= s_.rx_sensitivity) out.push_back({ap, r, now});
    }
    return out;
  }

  Duration access_delay(Station& st) { return medium_access_delay(background_load_, s_.contention, st.access_rng); }

  // -------------------------------------------------------------------------
  // Event handlers

  void on_tick(SimTime now, SimTime end) {
    for (auto& st : stations_) {
      st.mob = mobility_step(std::move(st.mob), SimTime::at_micros(now.micros() - s_.tick.count()), s_.tick,
                             world_.arena, s_.mobility_params, st.mob_rng);
      scheme_tick(st, now);
    }
    const SimTime next = now + s_.tick;
    if (next <= end) queue_.push(next, {detail::EvKind::Tick, -1, {}});
  }

  void on_emit(SimTime now, SimTime end, std::int32_t ms) {
    auto& st = stations_[static_cast<std::size_t>(ms)];
    const auto at = next_packet(st.src, now);
    if (!at) throw std::logic_error("emission event before its boundary");
    Packet p{next_packet_id_++, ms, *at, st.realtime};
    ++ledger_.emitted;
    ++counters(st).emitted;
    log_.record(now, "emit", ms, st.ap.value_or(-1),
                Detail().add("pkt", static_cast<std::int64_t>(p.id)).add("rt", p.realtime ? 1 : 0).str());
    route(st, p, now);
    if (st.src.next_emit <= end) queue_.push(st.src.next_emit, {detail::EvKind::Emit, ms, {}});
  }

  void route(Station& st, const Packet& p, SimTime now) {
    if (st.mode != detail::LinkMode::Connected) {
      lose(st, p, now);
    } else if (st.psm.active()) {
      buffer(st, p, now);
    } else {
      ++in_flight_;
      ++st.pending;
      queue_.push(now + access_delay(st), {detail::EvKind::Arrive, st.id, p});
    }
  }

  void on_arrive(SimTime now, const Packet& p) {
    --in_flight_;
    auto& st = stations_[static_cast<std::size_t>(p.ms)];
    --st.pending;
    if (st.mode != detail::LinkMode::Connected) {
      lose(st, p, now);
    } else if (st.psm.active()) {
      buffer(st, p, now);
    } else {
      deliver(st, p, now);
    }
  }

  void deliver(Station& st, const Packet& p, SimTime now) {
    const auto age = now - p.emitted_at;
    if (p.realtime && misses_deadline(p.emitted_at, now, s_.deadline)) {
      ++ledger_.deadline_dropped;
      ++counters(st).deadline_dropped;
      log_.record(now, "deadline_drop", st.id, st.ap.value_or(-1),
                  Detail().add("pkt", static_cast<std::int64_t>(p.id)).add("age", age.count()).str());
      return;
    }
    ++ledger_.delivered;
    ++counters(st).delivered;
    if (st.last_delivery) ledger_.inter_frame_us[static_cast<std::size_t>(st.id)].push_back((now - *st.last_delivery).count());
    st.last_delivery = now;
    log_.record(now, "deliver", st.id, st.ap.value_or(-1),
                Detail().add("pkt", static_cast<std::int64_t>(p.id)).add("age", age.count()).str());
  }

  void lose(Station& st, const Packet& p, SimTime now) {
    ++ledger_.handoff_lost;
    ++counters(st).handoff_lost;
    log_.record(now, "handoff_loss", st.id, st.ap.value_or(-1), Detail().add("pkt", static_cast<std::int64_t>(p.id)).str());
  }

  void buffer(Station& st, const Packet& p, SimTime now) {
    const auto evicted = st.psm.enqueue(p);
    log_.record(now, "buffer", st.id, st.ap.value_or(-1), Detail().add("pkt", static_cast<std::int64_t>(p.id)).str());
    if (evicted) {
      ++ledger_.buffer_dropped;
      ++counters(st).buffer_dropped;
      log_.record(now, "overflow_drop", st.id, st.ap.value_or(-1),
                  Detail().add("pkt", static_cast<std::int64_t>(evicted->id)).str());
    }
  }

  void on_step(SimTime now, std::int32_t ms) {
    auto& st = stations_[static_cast<std::size_t>(ms)];
    if (st.prescanning) {
      prescan_step(st, now);
    } else if (st.job.active) {
      switch (st.job.stage) {
        case Job::Stage::Scan: scan_step(st, now); break;
        case Job::Stage::Frames: frame_step(st, now); break;
        case Job::Stage::Backoff:
          st.job.refused.clear();
          begin_scan(st, now);
          break;
      }
    } else {
      throw std::logic_error("procedure step with nothing in progress");
    }
  }

  // -------------------------------------------------------------------------
  // Per-scheme behaviour on each RSSI sample

  void scheme_tick(Station& st, SimTime now) {
    if (!st.ap) return;
    if (s_.scheme == SchemeKind::Pshp) {
      const Dbm r = rssi(st, *st.ap);
      pshp_event(st, PshpEvent::RssiSample, now, r);
      if (st.mode == detail::LinkMode::Connected && !st.prescanning && st.pshp == PshpState::Standby &&
          now >= st.next_prescan_at)
        pshp_event(st, PshpEvent::PrescanDue, now, r);
      return;
    }
    if (st.mode != detail::LinkMode::Connected) return;
    const Dbm r = rssi(st, *st.ap);
    switch (s_.scheme) {
      case SchemeKind::StandardActive:
      case SchemeKind::StandardPassive:
        if (r <= s_.thresholds.rssi_min()) start_handoff(st, HandoffForm::Baseline, std::nullopt, now, now, r, {});
        break;
      case SchemeKind::Apfh: {
        const Zone z = classify_zone(r, s_.thresholds);
        const auto d = apfh_step(z, st.apfh, s_.thresholds);
        switch (d.action) {
          case ApfhAction::None: st.apfh.reset(); break;
          case ApfhAction::Track: {
            const auto ch = st.apfh_channel++ % s_.timing.n_channels();
            st.apfh.observe(probe(st, ch, now, st.ap));
            break;
          }
          case ApfhAction::Reassociate:
            start_handoff(st, HandoffForm::Baseline, d.target, now, now, r, st.apfh.best()->rssi);
            break;
          case ApfhAction::FullScan: start_handoff(st, HandoffForm::Baseline, std::nullopt, now, now, r, {}); break;
        }
        break;
      }
      case SchemeKind::Pshp: break;
    }
  }

  void pshp_event(Station& st, PshpEvent ev, SimTime now, Dbm r) {
    for (;;) {
      PshpInputs in;
      in.rssi = r;
      in.prescan_in_progress = st.prescanning;
      if (st.ap && !st.job.active) {
        st.list.purge_stale(now, alpha_ * 2);
        in.form1_target = pshp_form1_target(st.list, *st.ap, r, ctx_, s_.selection, s_.thresholds);
        in.urgent_target = pshp_urgent_target(st.list, *st.ap, ctx_, s_.selection, s_.thresholds);
      }
      const PshpStep step = pshp_transition(st.pshp, ev, in, s_.thresholds);
      if (step.action == PshpAction::Ignored) {
        ++ledger_.diagnostics.ignored_events;
        return;
      }
      if (step.next != st.pshp)
        log_.record(now, "state", st.id, st.ap.value_or(-1),
                    Detail().add("from", to_string(st.pshp)).add("to", to_string(step.next)).add("on", to_string(ev)).str());
      const PshpState before = st.pshp;
      st.pshp = step.next;
      pshp_perform(st, step, before, now, r);
      const bool deciding = st.pshp == PshpState::PreHandoff || st.pshp == PshpState::UrgentHandover;
      if (step.action == PshpAction::None && deciding) continue;
      return;
    }
  }

  void pshp_perform(Station& st, const PshpStep& step, PshpState before, SimTime now, Dbm r) {
    switch (step.action) {
      case PshpAction::None:
      case PshpAction::DeferPrescan:
      case PshpAction::Ignored: break;
      case PshpAction::StartPrescan: start_prescan(st, now); break;
      case PshpAction::AbortPrescan:
        st.prescan_abort = true;
        if (!st.urgent_trigger) st.urgent_trigger = now;
        log_.record(now, "prescan_abort", st.id, st.ap.value_or(-1));
        break;
      case PshpAction::Reassociate: {
        const HandoffForm form = before == PshpState::PreHandoff ? HandoffForm::Form1 : HandoffForm::Form2;
        const SimTime trigger = st.urgent_trigger.value_or(now);
        st.urgent_trigger.reset();
        std::optional<Dbm> listed;
        for (const auto& e : st.list.entries())
          if (e.ap == *step.target) listed = e.rssi;
        start_handoff(st, form, step.target, trigger, now, r, listed);
        break;
      }
      case PshpAction::FullScan:
        if (st.job.active) {
          st.job.form = HandoffForm::Form3;
          begin_scan(st, now);
        } else {
          const SimTime trigger = st.urgent_trigger.value_or(now);
          st.urgent_trigger.reset();
          start_handoff(st, HandoffForm::Form3, std::nullopt, trigger, now, r, {});
        }
        break;
      case PshpAction::RetryScan: break;  // handled where the association failed
      case PshpAction::ImmediatePrescan: st.next_prescan_at = now; break;
      case PshpAction::PurgeAndPrescan:
        st.list.purge();
        st.next_prescan_at = now;
        break;
    }
  }

  // -------------------------------------------------------------------------
  // Pre-scan under power-save

  void start_prescan(Station& st, SimTime now) {
    st.prescanning = true;
    st.prescan_abort = false;
    st.prescan_started = now;
    st.prescan_channel = 0;
    st.prescan_found.clear();
    st.psm.enter();
    ++ledger_.diagnostics.prescans;
    log_.record(now, "psm_enter", st.id, *st.ap);
    queue_.push(now + s_.timing.t_switch() + s_.effective_prescan_wait(), {detail::EvKind::Step, st.id, {}});
  }

  void prescan_step(Station& st, SimTime now) {
    auto heard = probe(st, st.prescan_channel, now, st.ap);
    log_.record(now, "prescan_channel", st.id, st.ap.value_or(-1),
                Detail().add("ch", st.prescan_channel).add("heard", static_cast<std::int64_t>(heard.size())).str());
    st.prescan_found.insert(st.prescan_found.end(), heard.begin(), heard.end());
    ++st.prescan_channel;
    if (st.prescan_abort || st.prescan_channel == s_.timing.n_channels()) {
      finish_prescan(st, now);
      return;
    }
    queue_.push(now + s_.timing.t_switch() + s_.effective_prescan_wait(), {detail::EvKind::Step, st.id, {}});
  }

  void finish_prescan(Station& st, SimTime now) {
    const bool interrupted = st.prescan_abort;
    st.prescanning = false;
    st.prescan_abort = false;
    st.next_prescan_at = st.prescan_started + alpha_;
    if (interrupted) {
      st.list.merge(st.prescan_found, st.ap);
      ++ledger_.diagnostics.prescans_interrupted;
    } else {
      st.list.rebuild(st.prescan_found, st.ap);
    }
    log_.record(now, "prescan_end", st.id, st.ap.value_or(-1),
                Detail()
                    .add("channels", st.prescan_channel)
                    .add("listed", static_cast<std::int64_t>(st.list.size()))
                    .add("interrupted", interrupted ? 1 : 0)
                    .str());
    if (!interrupted) {
      const auto out = st.psm.flush(now, [&] { return access_delay(st); });
      log_.record(now, "psm_flush", st.id, st.ap.value_or(-1), Detail().add("count", static_cast<std::int64_t>(out.size())).str());
      for (const auto& d : out) {
        ++in_flight_;
        ++st.pending;
        queue_.push(d.delivered_at, {detail::EvKind::Arrive, st.id, d.packet});
      }
    }
    pshp_event(st, PshpEvent::PrescanComplete, now, rssi(st, *st.ap));
  }

  // -------------------------------------------------------------------------
  // Handoff procedures

  void start_handoff(Station& st, HandoffForm form, std::optional<ApId> target, SimTime trigger, SimTime now,
                     Dbm rssi_at_trigger, std::optional<Dbm> listed) {
    Job& job = st.job;
    job = Job{};
    job.active = true;
    job.form = form;
    job.from = *st.ap;
    job.trigger = trigger;
    job.rssi_at_trigger = rssi_at_trigger;
    job.listed_rssi = listed;
    job.passive = s_.scheme == SchemeKind::StandardPassive;
    st.mode = detail::LinkMode::Handoff;
    for (const auto& p : st.psm.discard()) lose(st, p, now);
    log_.record(now, "handoff_trigger", st.id, job.from,
                Detail()
                    .add("form", to_string(form))
                    .add("trigger", trigger.micros())
                    .add("rssi_mdbm", mdbm(rssi_at_trigger))
                    .str());
    if (now > trigger) {
      job.br.wait += now - trigger;
      log_.record(now, "wait", st.id, job.from, Detail().add("us", (now - trigger).count()).str());
    }
    if (target) {
      job.target = *target;
      plan_frames(st, false);
      begin_frames(st, now);
    } else {
      begin_scan(st, now);
    }
  }

  void begin_scan(Station& st, SimTime now) {
    Job& job = st.job;
    job.stage = Job::Stage::Scan;
    job.channel = 0;
    job.dwelling = false;
    job.found.clear();
    job.br.switching += s_.timing.t_switch();
    queue_.push(now + s_.timing.t_switch(), {detail::EvKind::Step, st.id, {}});
  }

  void scan_step(Station& st, SimTime now) {
    Job& job = st.job;
    if (!job.dwelling) {
      auto heard = probe(st, job.channel, now, std::nullopt);
      const Duration dwell = job.passive ? s_.timing.beacon_interval() : active_channel_dwell(s_.timing, !heard.empty());
      log_.record(now, "scan_channel", st.id, job.from,
                  Detail()
                      .add("ch", job.channel)
                      .add("switch", s_.timing.t_switch().count())
                      .add("dwell", dwell.count())
                      .add("heard", static_cast<std::int64_t>(heard.size()))
                      .str());
      job.found.insert(job.found.end(), heard.begin(), heard.end());
      job.br.dwell += dwell;
      job.dwelling = true;
      queue_.push(now + dwell, {detail::EvKind::Step, st.id, {}});
      return;
    }
    job.dwelling = false;
    ++job.channel;
    if (job.channel < s_.timing.n_channels()) {
      job.br.switching += s_.timing.t_switch();
      queue_.push(now + s_.timing.t_switch(), {detail::EvKind::Step, st.id, {}});
      return;
    }
    choose_scan_target(st, now);
  }

  void choose_scan_target(Station& st, SimTime now) {
    Job& job = st.job;
    std::vector<ApSample> open;
    for (const auto& s : job.found)
      if (std::find(job.refused.begin(), job.refused.end(), s.ap) == job.refused.end()) open.push_back(s);
    const auto pick = choose_after_scan(open, job.from, ctx_, s_.selection);
    if (!pick) {
      if (!job.released) {
        ctx_.disassociate(job.from);
        job.released = true;
        st.ap.reset();
        ++ledger_.diagnostics.disconnections;
        log_.record(now, "disconnect", st.id, job.from);
      }
      job.stage = Job::Stage::Backoff;
      job.br.backoff += s_.retry_backoff;
      log_.record(now, "backoff", st.id, job.from, Detail().add("us", s_.retry_backoff.count()).str());
      queue_.push(now + s_.retry_backoff, {detail::EvKind::Step, st.id, {}});
      return;
    }
    job.target = *pick;
    plan_frames(st, job.passive);
    begin_frames(st, now);
  }

  void plan_frames(Station& st, bool directed_probe) {
    Job& job = st.job;
    job.frames.clear();
    if (directed_probe) job.frames.insert(job.frames.end(), 2, detail::FrameKind::Probe);
    if (!st.preauthenticated)
      job.frames.insert(job.frames.end(), static_cast<std::size_t>(auth_frame_count(s_.auth)), detail::FrameKind::Auth);
    job.frames.insert(job.frames.end(), static_cast<std::size_t>(kAssocFrameCount), detail::FrameKind::Assoc);
  }

  void begin_frames(Station& st, SimTime now) {
    st.job.stage = Job::Stage::Frames;
    st.job.frame_index = 0;
    next_frame(st, now);
  }

  void next_frame(Station& st, SimTime now) {
    Job& job = st.job;
    const Duration d = access_delay(st);
    job.br.frames += d;
    log_.record(now, "frame", st.id, job.target,
                Detail().add("kind", detail::to_string(job.frames[job.frame_index])).add("delay", d.count()).str());
    queue_.push(now + d, {detail::EvKind::Step, st.id, {}});
  }

  void frame_step(Station& st, SimTime now) {
    Job& job = st.job;
    ++job.frame_index;
    if (job.frame_index < job.frames.size()) {
      next_frame(st, now);
      return;
    }
    complete_association(st, now);
  }

  void complete_association(Station& st, SimTime now) {
    Job& job = st.job;
    if (ctx_.has_room(job.target)) {
      if (job.released) {
        ctx_.seed_history(job.from, job.target, ctx_.history(job.from, job.target) + 1);
        ctx_.associate(job.target);
      } else {
        ctx_.record_handoff(job.from, job.target);
      }
      st.ap = job.target;
      st.mode = detail::LinkMode::Connected;
      HandoffRecord rec;
      rec.ms = st.id;
      rec.from = job.from;
      rec.to = job.target;
      rec.form = job.form;
      rec.trigger_time = job.trigger;
      rec.complete_time = now;
      rec.latency = now - job.trigger;
      rec.breakdown = job.br;
      rec.rssi_at_trigger = job.rssi_at_trigger;
      rec.listed_rssi = job.listed_rssi;
      if (rec.latency != rec.breakdown.total()) throw std::logic_error("handoff latency does not match its parts");
      ledger_.handoffs.push_back(rec);
      ++ledger_.form_counts[static_cast<std::size_t>(job.form)];
      log_.record(now, "handoff_complete", st.id, job.target,
                  Detail()
                      .add("form", to_string(job.form))
                      .add("from", job.from)
                      .add("latency", rec.latency.count())
                      .str());
      job.active = false;
      st.apfh.reset();
      if (s_.scheme == SchemeKind::Pshp) {
        st.preauthenticated = true;
        st.list.remove(job.target);
        pshp_event(st, PshpEvent::AssociationSuccess, now, rssi(st, job.target));
      }
      return;
    }

    ++ledger_.diagnostics.association_failures;
    log_.record(now, "assoc_fail", st.id, job.target, Detail().add("form", to_string(job.form)).str());
    job.refused.push_back(job.target);
    if (s_.scheme == SchemeKind::Pshp && job.form == HandoffForm::Form1) {
      ++ledger_.diagnostics.form1_failures;
      job.active = false;
      st.mode = detail::LinkMode::Connected;  // still attached to the old AP
      pshp_event(st, PshpEvent::AssociationFailure, now, rssi(st, *st.ap));
      return;
    }
    if (s_.scheme == SchemeKind::Pshp && job.form == HandoffForm::Form2) {
      ++ledger_.diagnostics.form2_failures;
      pshp_event(st, PshpEvent::AssociationFailure, now, st.ap ? rssi(st, *st.ap) : s_.thresholds.rssi_min());
      return;
    }
    if (s_.scheme == SchemeKind::Pshp) {
      pshp_event(st, PshpEvent::AssociationFailure, now, st.ap ? rssi(st, *st.ap) : s_.thresholds.rssi_min());
    }
    if (job.found.empty()) {
      begin_scan(st, now);  // direct re-association refused: fall back to a full scan
    } else {
      choose_scan_target(st, now);
    }
  }

  Scenario s_;
  World world_;
  NeighborContext ctx_;
  Duration alpha_;
  LoadModel background_load_;
  EventLog log_;
  EventQueue<detail::SimEvent> queue_;
  std::vector<Station> stations_;
  MetricsLedger ledger_;
  std::int64_t in_flight_ = 0;
  std::uint64_t next_packet_id_ = 0;
  bool ran_ = false;
};

/// Runs one scenario to completion.
inline MetricsLedger run(const Scenario& s, std::ostream* trace = nullptr) { return Simulator(s, trace).run(); }

struct SweepRun {
  double load = 0.0;
  std::uint64_t seed = 0;
  MetricsLedger ledger;
};

/// One run per (load, seed), returned sorted by (load, seed).
///
/// Runs are independent and execute on up to `threads` workers
/// (0: hardware concurrency); the result does not depend on the count.
inline std::vector<SweepRun> sweep(const Scenario& base, const std::vector<double>& loads,
                                   const std::vector<std::uint64_t>& seeds, unsigned threads = 0) {
  for (double l : loads)
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("sweep loads must lie in [0, 1]");
  std::vector<std::pair<double, std::uint64_t>> keys;
  for (double l : loads)
    for (auto s : seeds) keys.emplace_back(l, s);
  std::sort(keys.begin(), keys.end());
  std::vector<SweepRun> out(keys.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  auto job = [&](std::size_t i) {
    Scenario s = base;
    s.load = keys[i].first;
    s.seed = keys[i].second;
    out[i] = SweepRun{keys[i].first, keys[i].second, run(s)};
  };
  if (threads == 1) {
    for (std::size_t i = 0; i < keys.size(); ++i) job(i);
    return out;
  }
  for (std::size_t start = 0; start < keys.size(); start += threads) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(keys.size(), start + threads); ++i)
      batch.push_back(std::async(std::launch::async, job, i));
    for (auto& f : batch) f.get();
  }
  return out;
}

/// Pooled statistics of all runs at one load.
struct SweepRow {
  double load = 0.0;
  std::int64_t runs = 0;
  std::int64_t handoffs = 0;
  double mean_latency_us = 0.0;
  double form1_fraction = 0.0;
  double form2_fraction = 0.0;
  double form3_fraction = 0.0;
  double baseline_fraction = 0.0;
  double loss_probability = 0.0;
};

inline std::vector<SweepRow> aggregate(const std::vector<SweepRun>& runs) {
  std::vector<SweepRow> rows;
  for (const auto& r : runs) {
    if (rows.empty() || rows.back().load != r.load) rows.push_back(SweepRow{r.load});
    auto& row = rows.back();
    ++row.runs;
    row.handoffs += r.ledger.handoff_count();
    for (const auto& h : r.ledger.handoffs) row.mean_latency_us += static_cast<double>(h.latency.count());
    row.form1_fraction += static_cast<double>(r.ledger.count(HandoffForm::Form1));
    row.form2_fraction += static_cast<double>(r.ledger.count(HandoffForm::Form2));
    row.form3_fraction += static_cast<double>(r.ledger.count(HandoffForm::Form3));
    row.baseline_fraction += static_cast<double>(r.ledger.count(HandoffForm::Baseline));
    row.loss_probability += static_cast<double>(r.ledger.deadline_dropped + r.ledger.handoff_lost);
    // emitted is accumulated in a second pass below
  }
  std::size_t i = 0;
  for (auto& row : rows) {
    std::int64_t emitted = 0;
    for (std::int64_t k = 0; k < row.runs; ++k, ++i) emitted += runs[i].ledger.emitted;
    const double n = static_cast<double>(row.handoffs);
    if (row.handoffs > 0) {
      row.mean_latency_us /= n;
      row.form1_fraction /= n;
      row.form2_fraction /= n;
      row.form3_fraction /= n;
      row.baseline_fraction /= n;
    }
    row.loss_probability = emitted > 0 ? row.loss_probability / static_cast<double>(emitted) : 0.0;
  }
  return rows;
}

}  // namespace handoff
