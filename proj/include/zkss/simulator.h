#ifndef ZKSS_SIMULATOR_H_
#define ZKSS_SIMULATOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zkss/contract.h"
#include "zkss/envelope.h"
#include "zkss/signing.h"

namespace zkss {

enum class Adversary { kNone, kMalleableSig, kDoubleNullifier, kSelfPick, kFrontrun, kStaleRoot };

// CLI spellings: "none", "malleable-sig", "double-nullifier", "self-pick",
// "frontrun", "stale-root".
std::string_view AdversaryName(Adversary adversary);
Adversary AdversaryFromName(std::string_view name);

struct GameConfig {
  int n = 5;
  uint64_t seed = 0;
  Adversary adversary = Adversary::kNone;
  bool commitment_step = true;
  // Senders publish hashToField of a fresh RSA-2048 public key as their
  // randomness. When false they publish a random field element and no
  // envelopes are exchanged (much cheaper; used for large sweeps in tests).
  bool rsa_randomness = true;
  uint64_t event_nonce = 1;
  int tree_depth = SparseMerkleTree::kDefaultDepth;

  bool operator==(const GameConfig&) const = default;
};

nlohmann::json ToJson(const GameConfig& config);
GameConfig GameConfigFromJson(const nlohmann::json& j);

// One simulated player. Participant i of a seed is the same identity no
// matter how many players the game has.
struct Participant {
  int index = 0;
  KeyPair key;
  std::optional<RsaKeyPair> rsa;
  std::string delivery_address;
};

// RSA key generation dominates a game's cost, so derived RSA keys are
// memoized per (seed, index). Derivation is a pure function of those.
Participant DeriveParticipant(uint64_t seed, int index, bool with_rsa);
void ClearParticipantCache();

// Simulator-private knowledge never given to the contract.
struct GroundTruth {
  EventId event_id;
  std::vector<Participant> participants;
  std::vector<Signature> signatures;  // every signature any participant produced
  std::map<Nullifier, int> nullifier_owner;
  std::optional<int> adversary;

  std::optional<int> OwnerOf(const Nullifier& nullifier) const;
};

struct AssignmentRow {
  int slot = 0;
  FieldElement randomness;
  Nullifier nullifier;
  std::optional<Address> receiver;
  std::optional<Address> sender;  // ground truth; absent if unknown
};

struct AttackStats {
  std::optional<int> adversary;
  int adversary_slots = 0;
  int locked_out = 0;  // honest participants left without a sender slot
  int extra_submissions = 0;
  int extra_submissions_rejected = 0;
  int second_commit_attempts = 0;
  int second_commit_rejected = 0;
  int replay_attempts = 0;
  int replay_rejected = 0;  // REVERTED(nullifier-spent)
  int fresh_randomness_attempts = 0;
  int fresh_randomness_rejected = 0;
  int self_pick_attempts = 0;
  int self_pick_accepted = 0;
  bool frontrun_fired = false;
  std::optional<int> victim;
  int victim_collisions = 0;
  int stale_root_rejected = 0;
};

struct PhaseTiming {
  std::string phase;
  double millis = 0;
};

struct GameReport {
  GameConfig config;
  EventId event_id;
  Phase final_phase = Phase::kSetup;
  bool stalled = false;
  std::string stall_reason;
  std::vector<AssignmentRow> assignment;
  bool derangement_ok = false;
  bool anonymity_ok = false;
  bool protocol_violation = false;
  bool expectation_met = false;
  std::string expectation;
  std::map<std::string, int> receipts;  // "<call>:<receipt>" -> count
  // Disclose transactions accepted while targeting the discloser's own slot.
  int self_assignments_accepted = 0;
  AttackStats attack;
  // Wall-clock only; deliberately not part of report.json.
  std::vector<PhaseTiming> timing;
};

// Serialization excludes timing so report.json is reproducible.
nlohmann::json ToJson(const GameReport& report);
GameReport GameReportFromJson(const nlohmann::json& j);

struct ArtifactLogs {
  std::string state_json;  // snapshot document
  std::string txlog;       // JSON lines: {seq, tx, receipt}
  std::string relay_log;   // JSON lines
};

struct GameResult {
  GameReport report;
  GroundTruth truth;
  PublicView final_view;
  ArtifactLogs logs;
  std::string report_json;
};

// Throws RangeError for n < 2.
GameResult RunGame(const GameConfig& config);
// RunGame for a config with an adversary script; throws std::invalid_argument
// when config.adversary is kNone.
GameResult RunAttack(const GameConfig& config);

// Writes state.json, txlog.jsonl, relay.jsonl and report.json.
void WriteArtifacts(const GameResult& result, const std::filesystem::path& dir);

struct Link {
  int participant = 0;
  std::string artifact;  // file the record came from
  std::string what;      // which secret-side value co-occurred with the address
};

// Mechanical search for records that contain an honest participant's
// address together with that participant's own randomness, nullifier or RSA
// key. A record is one line of a JSON-lines log or one sender entry (or the
// remaining top level) of the state snapshot.
std::vector<Link> FindAddressRandomnessLinks(const ArtifactLogs& logs, const GroundTruth& truth);

// eventIds seen within one session.
class EventIdRegistry {
 public:
  // False if the eventId was already recorded.
  bool Record(const EventId& id) { return seen_.insert(id).second; }

 private:
  std::set<EventId> seen_;
};

struct Checklist {
  bool bijection = false;
  bool derangement = false;
  bool anonymity = false;
  bool low_s = false;
  bool event_id_unique = false;
  bool envelopes = false;

  bool all() const {
    return bijection && derangement && anonymity && low_s && event_id_unique && envelopes;
  }
};

nlohmann::json ToJson(const Checklist& checklist);

struct VerifyOptions {
  const ArtifactLogs* logs = nullptr;  // without logs only the snapshot is searched
  EventIdRegistry* session = nullptr;  // without a session (e) passes trivially
  bool check_envelopes = true;
};

// (a) bijection (b) derangement (c) anonymity (d) low-s signatures
// (e) eventId uniqueness (f) only the owning sender decrypts each envelope.
// All judged against ground truth rather than contract data alone.
Checklist VerifyReport(const GameReport& report, const PublicView& snapshot,
                       const GroundTruth& truth, const VerifyOptions& options = {});

}  // namespace zkss

#endif  // ZKSS_SIMULATOR_H_
