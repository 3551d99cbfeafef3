#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Core transition semantics for the three ring protocol variants.
// Every operation here is a pure function of its arguments; state values
// are plain value types and can be copied or shared across threads freely.

namespace ringcheck {

enum class Variant { General, Modified, ExtraModified };

const char* variant_name(Variant v);                       // "general" | "modified" | "extra"
std::optional<Variant> variant_from_name(std::string_view name);  // accepts aliases alg2|alg3|alg4

enum class Mode : uint8_t { Active = 0, Relay = 1 };

// Program counter values. General uses {S0..S4, LEAD}, Modified {S0..S5, LEAD},
// ExtraModified {S0, S2, S3, S4, LEAD}. LEAD is absorbing.
namespace pc {
constexpr uint8_t S0 = 0;
constexpr uint8_t S1 = 1;
constexpr uint8_t S2 = 2;
constexpr uint8_t S3 = 3;
constexpr uint8_t S4 = 4;
constexpr uint8_t S5 = 5;
constexpr uint8_t LEAD = 6;
}  // namespace pc

const char* pc_name(uint8_t pc);

// Sentinel for "no value" in id2/id3 and the single-slot inbox. Uids live in
// [0, n-1] with n <= kMaxRing, so 0xFF is outside the value domain.
constexpr uint8_t kNone = 0xFF;
constexpr int kMaxRing = 200;

struct LocalState {
  uint8_t vid = 0;            // virtual id tag, initially the uid
  Mode mode = Mode::Active;
  uint8_t pc = pc::S0;
  uint8_t id2 = kNone;
  uint8_t id3 = kNone;
  uint8_t slot = kNone;       // single-slot inbox (Modified/ExtraModified)
  std::vector<uint8_t> fifo;  // bounded FIFO inbox, capacity n (General)

  bool operator==(const LocalState&) const = default;
};

struct GlobalState {
  std::vector<LocalState> nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  int successor_of(int i) const { return (i + 1) % size(); }

  bool operator==(const GlobalState&) const = default;
};

enum class StepKind : uint8_t { Progress, Stutter, Overflow };

struct StepOutcome {
  StepKind kind = StepKind::Stutter;
  GlobalState next;       // populated for Progress only (successors() fills self-loops)
  int inbox_writes = 0;   // link transmissions performed by this step (0 or 1)
};

struct Atom {
  enum class Kind : uint8_t { IsLeader, VidEquals, ModeIs, Quiescent };
  Kind kind = Kind::IsLeader;
  int node = 0;       // IsLeader/VidEquals/ModeIs
  int value = 0;      // VidEquals
  Mode mode = Mode::Active;  // ModeIs

  static Atom is_leader(int i) { return {Kind::IsLeader, i, 0, Mode::Active}; }
  static Atom vid_equals(int i, int v) { return {Kind::VidEquals, i, v, Mode::Active}; }
  static Atom mode_is(int i, Mode m) { return {Kind::ModeIs, i, 0, m}; }
  static Atom quiescent() { return {Kind::Quiescent, 0, 0, Mode::Active}; }
};

struct DuplicateUidError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct EmptyRingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// All nodes Active at S0 with vid = uid, temporaries unset, inboxes empty.
// Throws EmptyRingError for n = 0 and DuplicateUidError on repeated uids.
GlobalState initial_state(Variant variant, const std::vector<int>& uids);

// Executes exactly one atomic statement of node i's program. Deterministic:
// the same (variant, g, i) always yields the same outcome. A step touches only
// node i's local fields and the inbox of node (i+1) mod n. Overflow is a
// distinguished outcome of the General variant (bounded FIFO full on send).
StepOutcome step(Variant variant, const GlobalState& g, int i);

// True iff step(variant, g, i) would yield Progress or Overflow (guard holds).
bool step_enabled(Variant variant, const GlobalState& g, int i);

// Exactly n entries; entry i is step(variant, g, i) with Stutter carrying
// next = g, so the transition relation is total.
std::vector<StepOutcome> successors(Variant variant, const GlobalState& g);

bool atom_eval(Variant variant, const GlobalState& g, const Atom& a);

// { i : pc_i = LEAD }
std::vector<int> leader_set(const GlobalState& g);

// Fixed-width canonical byte encoding, injective per (variant, n):
//   [n] then per node [vid][mode][pc][id2+1|0][id3+1|0][inbox len][contents...]
// Slot inboxes carry one content byte (value+1, 0 when empty); General FIFOs
// carry n content bytes, zero-padded past the explicit length.
size_t record_size(Variant variant, int n);
std::vector<uint8_t> canonical_encode(Variant variant, const GlobalState& g);
void canonical_encode_into(Variant variant, const GlobalState& g, uint8_t* out);
GlobalState canonical_decode(Variant variant, std::span<const uint8_t> record);

// Record-level helpers used by the graph engines; offsets mirror the layout
// above so properties can be read without materializing a GlobalState.
bool record_is_leader(std::span<const uint8_t> record, int node);
uint8_t record_vid(std::span<const uint8_t> record, int node);
Mode record_mode(std::span<const uint8_t> record, int node);
bool record_any_leader(std::span<const uint8_t> record);

// Dead-temp clearing (id2/id3 reset when control returns to S0) is a state
// reduction measure; on by default. The toggle affects new steps only.
struct StepOptions {
  bool clear_dead_temps = true;
};
StepOutcome step(Variant variant, const GlobalState& g, int i, const StepOptions& opts);

}  // namespace ringcheck
