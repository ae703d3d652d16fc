#include "fadcm/simulator.hpp"

namespace fadcm {

InteractionRecord simulate_session(const Slate& slate, const ModelParams& truth, Rng& rng) {
    const std::vector<double> z = attractiveness_profile(slate, truth);

    InteractionRecord rec;
    rec.slate = slate;
    rec.exit_cause = ExitCause::ExhaustedSlate;

    for (std::size_t p = 0; p < z.size(); ++p) {
        const bool click = rng.bernoulli(z[p]);
        rec.clicks.push_back(click ? 1 : 0);
        rec.realized_clicks += click ? 1 : 0;
        rec.examined_len = p + 1;
        if (p + 1 == z.size()) break;
        const double resume = click ? truth.behavior.g() : truth.behavior.q();
        if (!rng.bernoulli(resume)) {
            rec.exit_cause = click ? ExitCause::AbandonedAfterClick
                                   : ExitCause::AbandonedAfterSkip;
            break;
        }
    }
    return rec;
}

std::vector<EventObservation> extract_events(const InteractionRecord& record,
                                             const Catalog& catalog) {
    const std::vector<int> h = same_category_prefix_counts(record.slate, catalog);
    std::vector<EventObservation> events;
    events.reserve(record.examined_len);
    for (std::size_t p = 0; p < record.examined_len; ++p) {
        events.push_back(EventObservation{h[p], record.slate.order[p], record.clicks[p]});
    }
    return events;
}

const char* exit_cause_name(ExitCause cause) {
    switch (cause) {
        case ExitCause::AbandonedAfterClick: return "abandoned_after_click";
        case ExitCause::AbandonedAfterSkip: return "abandoned_after_skip";
        case ExitCause::ExhaustedSlate: return "exhausted_slate";
    }
    return "unknown";
}

} // namespace fadcm
