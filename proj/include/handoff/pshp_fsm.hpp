#pragma once

#include <array>
#include <optional>

#include "handoff/ap_selection.hpp"
#include "handoff/propagation.hpp"

namespace handoff {

/// Per-station states of the prevent-scan handoff procedure.
enum class PshpState { Standby, PreHandoff, UrgentHandover, HandoffForm1, HandoffForm2, HandoffForm3 };

inline constexpr std::array kAllPshpStates = {PshpState::Standby,        PshpState::PreHandoff,
                                              PshpState::UrgentHandover, PshpState::HandoffForm1,
                                              PshpState::HandoffForm2,   PshpState::HandoffForm3};

enum class PshpEvent { RssiSample, PrescanDue, PrescanComplete, AssociationSuccess, AssociationFailure };

inline constexpr std::array kAllPshpEvents = {PshpEvent::RssiSample, PshpEvent::PrescanDue,
                                              PshpEvent::PrescanComplete, PshpEvent::AssociationSuccess,
                                              PshpEvent::AssociationFailure};

/// What the engine must do after a transition.
enum class PshpAction {
  None,
  StartPrescan,     // enter PSM and sweep all channels
  DeferPrescan,     // due, but the link is still above the preventive threshold
  AbortPrescan,     // finish the current channel, then stop the sweep
  Reassociate,      // re-associate with `target` (forms 1 and 2)
  FullScan,         // classical active scan, then re-associate (form 3)
  RetryScan,        // form 3 failed to associate: back off and scan again
  ImmediatePrescan, // associated: make the next pre-scan due now
  PurgeAndPrescan,  // form 1 refused: empty the list and pre-scan now
  Ignored,          // event does not apply in this state
};

inline const char* to_string(PshpState s) {
  switch (s) {
    case PshpState::Standby: return "standby";
    case PshpState::PreHandoff: return "pre_handoff";
    case PshpState::UrgentHandover: return "urgent_handover";
    case PshpState::HandoffForm1: return "handoff_form1";
    case PshpState::HandoffForm2: return "handoff_form2";
    case PshpState::HandoffForm3: return "handoff_form3";
  }
  return "?";
}

inline const char* to_string(PshpEvent e) {
  switch (e) {
    case PshpEvent::RssiSample: return "rssi_sample";
    case PshpEvent::PrescanDue: return "prescan_due";
    case PshpEvent::PrescanComplete: return "prescan_complete";
    case PshpEvent::AssociationSuccess: return "association_success";
    case PshpEvent::AssociationFailure: return "association_failure";
  }
  return "?";
}

/// Snapshot the transition reads. Targets are already filtered by the
/// association gate (and by the selection policy when one is attached).
struct PshpInputs {
  Dbm rssi;
  bool prescan_in_progress = false;
  std::optional<ApId> form1_target;   // listed AP strictly better than the current link
  std::optional<ApId> urgent_target;  // listed AP above the handoff threshold
};

struct PshpStep {
  PshpState next = PshpState::Standby;
  PshpAction action = PshpAction::None;
  std::optional<ApId> target;

  bool operator==(const PshpStep&) const = default;
};

/// Form-1 association gate: the listed AP must beat both the handoff threshold and the current link.
inline bool pshp_association_gate(Dbm head_rssi, Dbm current_rssi, const Thresholds& t) {
  return head_rssi > t.rssi_min() && head_rssi > current_rssi;
}

namespace detail {

inline PshpStep classify_link(const PshpInputs& in, const Thresholds& t) {
  if (in.rssi <= t.rssi_min()) return {PshpState::UrgentHandover, PshpAction::None, {}};
  if (in.rssi <= t.rssi_prev()) return {PshpState::PreHandoff, PshpAction::None, {}};
  return {PshpState::Standby, PshpAction::None, {}};
}

inline PshpStep evaluate_urgent(const PshpInputs& in) {
  if (in.urgent_target) return {PshpState::HandoffForm2, PshpAction::Reassociate, in.urgent_target};
  return {PshpState::HandoffForm3, PshpAction::FullScan, {}};
}

}  // namespace detail

/// Total transition function of the PSHP station state machine.
///
/// PreHandoff and UrgentHandover are decision states: the engine re-delivers
/// the same sample to them so the dynamic list is consulted immediately.
inline PshpStep pshp_transition(PshpState s, PshpEvent e, const PshpInputs& in, const Thresholds& t) {
  const PshpStep ignored{s, PshpAction::Ignored, {}};
  switch (s) {
    case PshpState::Standby:
      switch (e) {
        case PshpEvent::RssiSample: {
          auto step = detail::classify_link(in, t);
          // The list is being refreshed; the sweep's completion re-checks the link.
          if (step.next == PshpState::PreHandoff && in.prescan_in_progress) step.next = PshpState::Standby;
          return step;
        }
        case PshpEvent::PrescanDue:
          if (in.prescan_in_progress) return ignored;
          if (in.rssi <= t.rssi_prev()) return {PshpState::Standby, PshpAction::StartPrescan, {}};
          return {PshpState::Standby, PshpAction::DeferPrescan, {}};
        case PshpEvent::PrescanComplete: return detail::classify_link(in, t);
        case PshpEvent::AssociationSuccess:
        case PshpEvent::AssociationFailure: return ignored;
      }
      break;

    case PshpState::PreHandoff:
      switch (e) {
        case PshpEvent::RssiSample:
        case PshpEvent::PrescanComplete:
          if (in.rssi <= t.rssi_min()) return {PshpState::UrgentHandover, PshpAction::None, {}};
          if (in.form1_target && !in.prescan_in_progress)
            return {PshpState::HandoffForm1, PshpAction::Reassociate, in.form1_target};
          return {PshpState::Standby, PshpAction::None, {}};
        case PshpEvent::PrescanDue:
        case PshpEvent::AssociationSuccess:
        case PshpEvent::AssociationFailure: return ignored;
      }
      break;

    case PshpState::UrgentHandover:
      switch (e) {
        case PshpEvent::RssiSample:
          if (in.prescan_in_progress) return {PshpState::UrgentHandover, PshpAction::AbortPrescan, {}};
          return detail::evaluate_urgent(in);
        case PshpEvent::PrescanComplete: return detail::evaluate_urgent(in);
        case PshpEvent::PrescanDue:
        case PshpEvent::AssociationSuccess:
        case PshpEvent::AssociationFailure: return ignored;
      }
      break;

    case PshpState::HandoffForm1:
      switch (e) {
        case PshpEvent::AssociationSuccess: return {PshpState::Standby, PshpAction::ImmediatePrescan, {}};
        case PshpEvent::AssociationFailure: return {PshpState::Standby, PshpAction::PurgeAndPrescan, {}};
        default: return ignored;
      }

    case PshpState::HandoffForm2:
      switch (e) {
        case PshpEvent::AssociationSuccess: return {PshpState::Standby, PshpAction::ImmediatePrescan, {}};
        case PshpEvent::AssociationFailure: return {PshpState::HandoffForm3, PshpAction::FullScan, {}};
        default: return ignored;
      }

    case PshpState::HandoffForm3:
      switch (e) {
        case PshpEvent::AssociationSuccess: return {PshpState::Standby, PshpAction::ImmediatePrescan, {}};
        case PshpEvent::AssociationFailure: return {PshpState::HandoffForm3, PshpAction::RetryScan, {}};
        default: return ignored;
      }
  }
  return ignored;
}

}  // namespace handoff
