#pragma once

// Deterministic discrete-event core: a seeded clock-ordered event queue that
// emits one trace line per dispatched event.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "util.hpp"

namespace edass {

using SimTime = double;

struct PastEventError : Error {
  explicit PastEventError(const std::string& w) : Error(w) {}
};

// Seeded random source with hand-rolled distributions. mt19937_64 output is
// fixed by the standard, but the std distribution adaptors are not; mapping
// raw draws ourselves keeps the sequence identical across compilers, which
// the replay tests rely on.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller. Always exactly two draws; the second variate is discarded so
  // the draw count never depends on call history. sigma == 0 consumes no
  // draws, letting noiseless configs replay the same event sequence as the
  // hand-computed oracles in the tests.
  double normal(double mu, double sigma) {
    if (sigma == 0.0) return mu;
    double u = 1.0 - uniform();  // (0, 1], keeps the log finite
    double v = uniform();
    return mu + sigma * std::sqrt(-2.0 * std::log(u)) *
                    std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::mt19937_64 gen_;
};

enum class EventKind { Timer, MessageDelivery, SensorTick, TargetMotion };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Timer: return "timer";
    case EventKind::MessageDelivery: return "message-delivery";
    case EventKind::SensorTick: return "sensor-tick";
    case EventKind::TargetMotion: return "target-motion";
  }
  return "unknown";
}

// One line per dispatched event; details are key=value pairs appended by the
// handler in call order.
struct TraceLine {
  SimTime time = 0;
  std::string actor;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> details;

  std::string to_string() const {
    std::string out = fmt_fixed(time, 6);
    out += ' ';
    out += actor;
    out += ' ';
    out += kind;
    for (const auto& [k, v] : details) {
      out += ' ';
      out += k;
      out += '=';
      out += v;
    }
    return out;
  }
};

class Simulator;

// Handed to each handler: read the clock, draw randomness, schedule
// follow-ups, and attach key=value details to the current trace line.
class EventContext {
 public:
  EventContext(Simulator& sim, std::size_t line) : sim_(sim), line_(line) {}

  SimTime now() const;
  RandomSource& rng();
  void schedule(SimTime t, std::string actor, EventKind kind,
                std::function<void(EventContext&)> fn);
  void detail(const std::string& key, std::string value);
  void detail(const std::string& key, double v, int decimals) {
    detail(key, fmt_fixed(v, decimals));
  }
  void detail(const std::string& key, long long v) {
    detail(key, std::to_string(v));
  }

 private:
  Simulator& sim_;
  std::size_t line_;
};

using EventFn = std::function<void(EventContext&)>;

// Single-threaded event loop. Events are dispatched in (time, seq) order;
// equal timestamps resolve by insertion order, which is what makes reruns
// byte-identical without any actor priority scheme.
class Simulator {
 public:
  explicit Simulator(std::uint64_t seed) : rng_(seed) {}

  SimTime now() const { return clock_; }
  RandomSource& rng() { return rng_; }

  void schedule(SimTime t, std::string actor, EventKind kind, EventFn fn) {
    if (t < clock_)
      throw PastEventError("schedule at t=" + fmt_fixed(t, 6) +
                           " is before clock " + fmt_fixed(clock_, 6));
    heap_.push_back(Event{t, next_seq_++, std::move(actor), kind, std::move(fn)});
    std::push_heap(heap_.begin(), heap_.end(), later);
  }

  // Dispatches every event with time <= t_end, then advances the clock to
  // t_end. Returns the cumulative trace.
  const std::vector<TraceLine>& run_until(SimTime t_end) {
    if (t_end < clock_)
      throw PastEventError("run_until(" + fmt_fixed(t_end, 6) +
                           ") is before clock " + fmt_fixed(clock_, 6));
    while (!heap_.empty() && heap_.front().time <= t_end) {
      std::pop_heap(heap_.begin(), heap_.end(), later);
      Event ev = std::move(heap_.back());
      heap_.pop_back();
      clock_ = ev.time;
      trace_.push_back(TraceLine{ev.time, std::move(ev.actor),
                                 event_kind_name(ev.kind), {}});
      EventContext ctx(*this, trace_.size() - 1);
      ev.fn(ctx);
    }
    clock_ = t_end;
    return trace_;
  }

  const std::vector<TraceLine>& trace() const { return trace_; }

 private:
  struct Event {
    SimTime time;
    std::uint64_t seq;
    std::string actor;
    EventKind kind;
    EventFn fn;
  };

  // min-heap on (time, seq) through the std max-heap algorithms
  static bool later(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }

  friend class EventContext;

  SimTime clock_ = 0;
  std::uint64_t next_seq_ = 0;
  std::vector<Event> heap_;
  RandomSource rng_;
  std::vector<TraceLine> trace_;
};

inline SimTime EventContext::now() const { return sim_.clock_; }
inline RandomSource& EventContext::rng() { return sim_.rng_; }
inline void EventContext::schedule(SimTime t, std::string actor, EventKind kind,
                                   EventFn fn) {
  sim_.schedule(t, std::move(actor), kind, std::move(fn));
}
inline void EventContext::detail(const std::string& key, std::string value) {
  // trace lines are space-separated key=value tokens; keep values one token
  for (char& c : value)
    if (c == ' ' || c == '\t' || c == '\n') c = '_';
  sim_.trace_[line_].details.emplace_back(key, std::move(value));
}

}  // namespace edass
