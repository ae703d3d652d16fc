#pragma once

#include <cstdint>
#include <vector>

#include "fadcm/model.hpp"
#include "fadcm/rng.hpp"

namespace fadcm {

enum class ExitCause {
    AbandonedAfterClick,
    AbandonedAfterSkip,
    ExhaustedSlate,
};

// One user session: the offered slate plus the examined prefix and its clicks.
// Positions at or past examined_len carry no feedback.
struct InteractionRecord {
    Slate slate;
    std::size_t examined_len = 0;
    std::vector<std::uint8_t> clicks;
    ExitCause exit_cause = ExitCause::ExhaustedSlate;
    int realized_clicks = 0;
};

// Event (i, j): item j was examined as the (i+1)-th shown item of its
// category; click holds the observed Bernoulli outcome.
struct EventObservation {
    int discount_index = 0;
    int item_id = 0;
    std::uint8_t click = 0;
};

// Walks the slate from the front. At each position the user clicks with
// probability z = f(h) * u, then resumes with probability g after a click and
// q after a skip. The first item is always examined; no resume draw happens
// after the final position.
InteractionRecord simulate_session(const Slate& slate, const ModelParams& truth, Rng& rng);

// One observation per examined position; nothing for unexamined positions.
std::vector<EventObservation> extract_events(const InteractionRecord& record,
                                             const Catalog& catalog);

const char* exit_cause_name(ExitCause cause);

} // namespace fadcm
