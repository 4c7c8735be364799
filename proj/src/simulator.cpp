#include "zkss/simulator.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "zkss/drbg.h"
#include "zkss/errors.h"
#include "zkss/relayer.h"

namespace zkss {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<Adversary, std::string_view>, 6> kAdversaryNames = {{
    {Adversary::kNone, "none"},
    {Adversary::kMalleableSig, "malleable-sig"},
    {Adversary::kDoubleNullifier, "double-nullifier"},
    {Adversary::kSelfPick, "self-pick"},
    {Adversary::kFrontrun, "frontrun"},
    {Adversary::kStaleRoot, "stale-root"},
}};

constexpr std::array<std::string_view, 12> kStreets = {
    "Juniper Lane", "Alder Road",   "Birch Court",  "Cedar Street",
    "Elm Row",      "Fir Terrace",  "Hazel Way",    "Larch Close",
    "Maple Avenue", "Pine Crescent", "Rowan Drive", "Willow Walk",
};

constexpr std::array<std::string_view, 8> kTowns = {
    "Ashford", "Brookfield", "Coldwater", "Dunmore", "Eastleigh", "Fairhaven", "Glenrock", "Harrow",
};

std::mutex g_cache_mu;
std::map<std::pair<uint64_t, int>, RsaKeyPair> g_rsa_cache;

Drbg ParticipantStream(uint64_t seed) { return Drbg("zkss/participant", seed); }

std::string ScriptedDeliveryAddress(uint64_t seed, int index) {
  Drbg rng = ParticipantStream(seed).Fork("delivery", static_cast<uint64_t>(index));
  std::ostringstream out;
  out << (1 + rng.Uniform(240)) << ' ' << kStreets[rng.Uniform(kStreets.size())] << ", Flat "
      << (1 + rng.Uniform(30)) << ", " << kTowns[rng.Uniform(kTowns.size())] << ' '
      << (10000 + rng.Uniform(90000));
  return out.str();
}

FieldElement RandomFieldElement(Drbg& rng) { return FieldElement::Reduce(rng.NextBytes(32)); }

std::string Bare(const std::string& hex) { return hex.rfind("0x", 0) == 0 ? hex.substr(2) : hex; }

std::string ReceiptKey(const Call& call, const Receipt& receipt) {
  return std::string(CallName(call)) + ":" + receipt.ToString();
}

std::map<Address, int> AddressIndex(const GroundTruth& truth) {
  std::map<Address, int> index;
  for (const Participant& p : truth.participants) index[p.key.address()] = p.index;
  return index;
}

// Every participant owns exactly one slot and receives exactly one gift.
bool IsBijection(const PublicView& view, const GroundTruth& truth) {
  const size_t n = truth.participants.size();
  if (view.phase != Phase::kComplete || view.senders.size() != n) return false;
  std::map<Address, int> index = AddressIndex(truth);
  std::set<int> owners;
  std::set<int> receivers;
  for (const SenderEntry& e : view.senders) {
    std::optional<int> owner = truth.OwnerOf(e.nullifier);
    if (!owner || !e.assigned_receiver) return false;
    auto it = index.find(*e.assigned_receiver);
    if (it == index.end()) return false;
    owners.insert(*owner);
    receivers.insert(it->second);
  }
  return owners.size() == n && receivers.size() == n;
}

int CountSelfAssignments(const PublicView& view, const GroundTruth& truth) {
  std::map<Address, int> index = AddressIndex(truth);
  int count = 0;
  for (const SenderEntry& e : view.senders) {
    if (!e.assigned_receiver) continue;
    std::optional<int> owner = truth.OwnerOf(e.nullifier);
    auto it = index.find(*e.assigned_receiver);
    if (owner && it != index.end() && *owner == it->second) ++count;
  }
  return count;
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& line : lines) out += line + "\n";
  return out;
}

// One simulated game. All randomness flows from `root_`.
class Game {
 public:
  explicit Game(const GameConfig& config)
      : config_(config),
        root_(GameStream(config)),
        mode_(config.commitment_step ? CommitmentMode::kRequired : CommitmentMode::kDisabled),
        backend_(Digest(ToDigest(root_.Fork("backend").NextBytes(32)))),
        event_id_(EventId::Create(Address::FromBytes(root_.Fork("contract").NextBytes(20)),
                                  config.event_nonce)),
        contract_(ContractConfig{event_id_, config.tree_depth, mode_}, backend_) {
    const int n = config.n;
    if (config.adversary != Adversary::kNone) {
      adversary_ = static_cast<int>(root_.Fork("adversary").Uniform(static_cast<uint64_t>(n)));
    }
    truth_.event_id = event_id_;
    truth_.adversary = adversary_;
    stats_.adversary = adversary_;
    own_.resize(n);
    for (int i = 0; i < n; ++i) {
      Participant p = DeriveParticipant(config.seed, i, config.rsa_randomness);
      Signature sig = SignDeterministic(p.key, BuildMessage(p.key.address(), event_id_));
      Drbg rng = root_.Fork("randomness", static_cast<uint64_t>(i));
      randomness_.push_back(p.rsa ? p.rsa->public_key.Fingerprint() : RandomFieldElement(rng));
      sigs_.push_back(sig);
      RecordSignature(i, sig);
      truth_.participants.push_back(std::move(p));
    }
  }

  GameResult Run() {
    Timed("setup", [this] { Setup(); });
    if (mode_ == CommitmentMode::kRequired) Timed("commit", [this] { CommitStep(); });
    Timed("determine", [this] { DetermineStep(); });
    Timed("disclose", [this] { DiscloseStep(); });
    return Finish();
  }

 private:
  static Drbg GameStream(const GameConfig& c) {
    Bytes material;
    Append(material, AsBytes(ToJson(c).dump()));
    return Drbg(Sha256(material));
  }

  static Digest ToDigest(const Bytes& b) {
    Digest d{};
    std::copy(b.begin(), b.end(), d.begin());
    return d;
  }

  template <typename F>
  void Timed(const char* phase, F&& body) {
    auto start = std::chrono::steady_clock::now();
    body();
    std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    timing_.push_back(PhaseTiming{phase, elapsed.count()});
  }

  const Address& AddressOf(int i) const { return truth_.participants[i].key.address(); }
  bool IsAdversary(int i) const { return adversary_ && *adversary_ == i; }
  bool Scenario(Adversary a) const { return config_.adversary == a; }

  void RecordSignature(int owner, const Signature& sig) {
    Nullifier null = DeriveNullifier(sig);
    truth_.signatures.push_back(sig);
    truth_.nullifier_owner[null] = owner;
    own_[owner].insert(null);
  }

  struct Applied {
    PendingTransaction pending;
    Receipt receipt;
  };

  std::vector<Applied> Drain() {
    std::vector<Applied> applied;
    while (std::optional<PendingTransaction> p = mempool_.PopFront()) {
      Receipt receipt = contract_.Apply(p->tx);
      json line = {{"seq", seq_++}, {"tx", ToJson(p->tx)}, {"receipt", ToJson(receipt)}};
      txlog_.push_back(line.dump());
      ++receipts_[ReceiptKey(p->tx.call, receipt)];
      applied.push_back(Applied{std::move(*p), receipt});
    }
    return applied;
  }

  Receipt Send(Transaction tx) {
    mempool_.Enqueue(std::move(tx));
    return Drain().back().receipt;
  }

  Receipt Relay(const RelayRequest& request) {
    relayer_.Relay(request, mempool_);
    return Drain().back().receipt;
  }

  // A second, valid signature by `i` under a fresh random nonce.
  Signature AlternativeSignature(int i, uint64_t attempt) {
    Drbg rng = root_.Fork("alternative-nonce", attempt);
    const KeyPair& key = truth_.participants[i].key;
    Message message = BuildMessage(key.address(), event_id_);
    for (;;) {
      Scalar k{};
      rng.Fill(k);
      try {
        Signature sig = SignWithNonce(key, message, k);
        if (sig.s != sigs_[i].s) return sig;
      } catch (const RangeError&) {
      }
    }
  }

  void Setup() {
    std::vector<Address> addresses;
    for (int i = 0; i < config_.n; ++i) addresses.push_back(AddressOf(i));
    Send(Transaction{AddressOf(0), RegisterCall{addresses}});
  }

  SenderWitness WitnessFor(int i, const Signature& sig) const {
    SenderWitness w{sig, AddressOf(i), contract_.participants().Prove(HashToField(AddressOf(i).bytes())),
                    MerkleProof{}};
    if (mode_ == CommitmentMode::kRequired) {
      w.commitment_proof = contract_.commitments().Prove(CommitmentHash(sig).value);
    }
    return w;
  }

  SenderPublicInputs PublicsFor(const FieldElement& r, const Nullifier& null) const {
    return SenderPublicInputs{r, event_id_, contract_.participants().root(),
                              contract_.commitments().root(), null};
  }

  std::optional<RsaPublicKey> RsaKeyOf(int i) const {
    const auto& rsa = truth_.participants[i].rsa;
    return rsa ? std::optional<RsaPublicKey>(rsa->public_key) : std::nullopt;
  }

  RelayRequest HonestRequest(int i) {
    SenderPublicInputs x = PublicsFor(randomness_[i], DeriveNullifier(sigs_[i]));
    Proof proof = Prove(WitnessFor(i, sigs_[i]), x, backend_, mode_);
    return RelayRequest{proof, x, RsaKeyOf(i), clock_++};
  }

  void CommitStep() {
    std::vector<int> order(config_.n);
    std::iota(order.begin(), order.end(), 0);
    Drbg rng = root_.Fork("commit-order");
    rng.Shuffle(order);
    // Both scripts act while other commits are still pending: the stale-root
    // adversary needs later commits to move root_c, the malleable one needs
    // the step still open for its second commitment.
    if (Scenario(Adversary::kStaleRoot) || Scenario(Adversary::kMalleableSig)) {
      std::stable_partition(order.begin(), order.end(), [this](int i) { return IsAdversary(i); });
    }
    for (int i : order) {
      Send(Transaction{AddressOf(i), CommitCall{CommitmentHash(sigs_[i])}});
      if (!IsAdversary(i)) continue;
      if (Scenario(Adversary::kMalleableSig)) {
        Signature alt = AlternativeSignature(i, 0);
        RecordSignature(i, alt);
        ++stats_.second_commit_attempts;
        if (!Send(Transaction{AddressOf(i), CommitCall{CommitmentHash(alt)}}).accepted()) {
          ++stats_.second_commit_rejected;
        }
      }
      if (Scenario(Adversary::kStaleRoot)) stale_request_ = HonestRequest(i);
    }
  }

  void MalleableExtras(int a, const Proof& accepted_proof) {
    for (int e = 0; e + 1 < config_.n; ++e) {
      Signature sig = AlternativeSignature(a, 1 + static_cast<uint64_t>(e));
      RecordSignature(a, sig);
      Drbg rng = root_.Fork("extra-randomness", static_cast<uint64_t>(e));
      SenderPublicInputs x = PublicsFor(RandomFieldElement(rng), DeriveNullifier(sig));
      Proof proof;
      try {
        proof = Prove(WitnessFor(a, sig), x, backend_, mode_);
      } catch (const Error&) {
        // No honest proof exists; reuse an accepted blob under new public inputs.
        proof = accepted_proof;
        proof.public_inputs = Serialize(x);
      }
      ++stats_.extra_submissions;
      if (!Relay(RelayRequest{proof, x, std::nullopt, clock_++}).accepted()) {
        ++stats_.extra_submissions_rejected;
      }
    }
  }

  void DetermineStep() {
    if (contract_.phase() != Phase::kDetermine) return;
    std::vector<int> order(config_.n);
    std::iota(order.begin(), order.end(), 0);
    Drbg rng = root_.Fork("relay-order");
    rng.Shuffle(order);
    bool adversary_first = Scenario(Adversary::kMalleableSig) || Scenario(Adversary::kStaleRoot);
    if (adversary_first) {
      std::stable_partition(order.begin(), order.end(), [this](int i) { return IsAdversary(i); });
    }

    for (int i : order) {
      if (IsAdversary(i) && Scenario(Adversary::kStaleRoot) && stale_request_) {
        stale_request_->submission_time = clock_++;
        if (Relay(*stale_request_).Is(RevertReason::kStaleRoot)) ++stats_.stale_root_rejected;
      }
      RelayRequest request = HonestRequest(i);
      relayer_.Relay(request, mempool_);
      std::vector<Applied> applied = Drain();
      const Applied& last = applied.back();
      if (!last.receipt.accepted()) continue;

      if (IsAdversary(i) && Scenario(Adversary::kMalleableSig)) MalleableExtras(i, request.proof);
      if (Scenario(Adversary::kDoubleNullifier)) {
        // Any mempool watcher can rebroadcast an accepted submission verbatim.
        ++stats_.replay_attempts;
        if (Send(last.pending.tx).Is(RevertReason::kNullifierSpent)) ++stats_.replay_rejected;
        if (IsAdversary(i)) {
          Drbg fresh = root_.Fork("fresh-randomness");
          SenderPublicInputs x = PublicsFor(RandomFieldElement(fresh), DeriveNullifier(sigs_[i]));
          Proof proof = Prove(WitnessFor(i, sigs_[i]), x, backend_, mode_);
          ++stats_.fresh_randomness_attempts;
          if (Relay(RelayRequest{proof, x, std::nullopt, clock_++}).Is(RevertReason::kNullifierSpent)) {
            ++stats_.fresh_randomness_rejected;
          }
        }
      }
    }
  }

  bool SlotOpenFor(int i) const {
    for (const SenderEntry& e : contract_.senders()) {
      if (own_[i].contains(e.nullifier) && !e.assigned_receiver) return true;
    }
    return false;
  }

  Transaction DiscloseTx(int i, const SenderEntry& target) {
    ReceiverPublicInputs x{AddressOf(i), event_id_, target.nullifier};
    Proof proof = Prove(ReceiverWitness{sigs_[i]}, x, backend_);
    std::optional<DeliveryEnvelope> envelope;
    if (target.rsa_public_key) {
      envelope = EncryptDeliveryAddress(AsBytes(truth_.participants[i].delivery_address),
                                        *target.rsa_public_key, envelope_rng_);
    }
    return Transaction{AddressOf(i), DiscloseCall{proof, x, envelope}};
  }

  void AttemptSelfPick(int a) {
    ReceiverPublicInputs x{AddressOf(a), event_id_, DeriveNullifier(sigs_[a])};
    Proof proof;
    try {
      proof = Prove(ReceiverWitness{sigs_[a]}, x, backend_);
    } catch (const ProverRefusedError&) {
      // Without a satisfying witness the adversary can only guess a blob.
      Drbg rng = root_.Fork("forged-blob");
      proof = Proof{RelationTag::kReceiver, Serialize(x), rng.NextBytes(32)};
    }
    ++stats_.self_pick_attempts;
    if (Send(Transaction{AddressOf(a), DiscloseCall{proof, x, std::nullopt}}).accepted()) {
      ++stats_.self_pick_accepted;
      remaining_.erase(a);
    }
  }

  // Frontrun hook: the adversary watches pending disclosures and races the
  // first one that targets a slot it is allowed to take.
  void MaybeFrontrun() {
    int a = *adversary_;
    if (stats_.frontrun_fired || !remaining_.contains(a) || !SlotOpenFor(a)) return;
    std::map<Address, int> index = AddressIndex(truth_);
    for (const PendingSummary& pending : mempool_.Peek()) {
      if (pending.call != "disclose" || !pending.origin || *pending.origin == AddressOf(a)) continue;
      if (!pending.nullifier || own_[a].contains(*pending.nullifier)) continue;
      auto target = std::find_if(contract_.senders().begin(), contract_.senders().end(),
                                 [&](const SenderEntry& e) { return e.nullifier == *pending.nullifier; });
      if (target == contract_.senders().end() || target->assigned_receiver) continue;
      mempool_.InjectAhead(DiscloseTx(a, *target), pending.id);
      stats_.frontrun_fired = true;
      stats_.victim = index.at(*pending.origin);
      return;
    }
  }

  void DiscloseStep() {
    if (contract_.phase() != Phase::kDisclose) return;
    for (int i = 0; i < config_.n; ++i) remaining_.insert(i);
    Drbg schedule = root_.Fork("disclose-order");
    Drbg pick = root_.Fork("disclose-pick");
    std::set<int> stuck;
    bool self_pick_done = false;
    const bool frontrun = Scenario(Adversary::kFrontrun);

    while (contract_.phase() == Phase::kDisclose) {
      std::vector<int> active;
      for (int i : remaining_) {
        if (!stuck.contains(i)) active.push_back(i);
      }
      if (active.empty()) {
        stall_reason_ = "no remaining receiver can target an unassigned foreign slot";
        return;
      }
      int a = adversary_.value_or(-1);
      bool holding = frontrun && !stats_.frontrun_fired && remaining_.contains(a) &&
                     !stuck.contains(a) && SlotOpenFor(a) && active.size() > 1;
      std::vector<int> candidates;
      for (int i : active) {
        if (!(holding && i == a)) candidates.push_back(i);
      }
      int chosen;
      std::vector<int> open;
      for (int i : candidates) {
        if (SlotOpenFor(i)) open.push_back(i);
      }
      // With two receivers left, one whose own slot is still open must go
      // first or the other may be left holding only that slot.
      if (active.size() == 2 && candidates.size() == 2 && open.size() == 1) {
        chosen = open.front();
      } else {
        chosen = candidates[schedule.Uniform(candidates.size())];
      }

      if (Scenario(Adversary::kSelfPick) && chosen == a && !self_pick_done) {
        self_pick_done = true;
        AttemptSelfPick(a);
        if (!remaining_.contains(a)) continue;
      }

      std::vector<const SenderEntry*> options;
      for (const SenderEntry& e : contract_.senders()) {
        if (!e.assigned_receiver && !own_[chosen].contains(e.nullifier)) options.push_back(&e);
      }
      if (options.empty()) {
        stuck.insert(chosen);
        continue;
      }
      const SenderEntry& target = *options[pick.Uniform(options.size())];
      mempool_.Enqueue(DiscloseTx(chosen, target));
      if (frontrun && chosen != a) MaybeFrontrun();

      std::map<Address, int> index = AddressIndex(truth_);
      for (const Applied& applied : Drain()) {
        int origin = index.at(*applied.pending.tx.origin);
        if (applied.receipt.accepted()) {
          remaining_.erase(origin);
        } else if (applied.receipt.Is(RevertReason::kCollision)) {
          if (stats_.victim == origin) ++stats_.victim_collisions;
        } else {
          stuck.insert(origin);
        }
      }
    }
  }

  GameResult Finish() {
    GameResult result;
    result.truth = truth_;
    result.final_view = contract_.Snapshot();
    result.logs.state_json = ToJson(result.final_view).dump(2) + "\n";
    result.logs.txlog = JoinLines(txlog_);
    result.logs.relay_log = relayer_.LogJsonLines();

    const PublicView& view = result.final_view;
    GameReport& report = result.report;
    report.config = config_;
    report.event_id = event_id_;
    report.final_phase = view.phase;
    report.stalled = view.phase != Phase::kComplete;
    if (report.stalled) {
      report.stall_reason = stall_reason_.empty()
                                ? "game ended in phase " + std::string(PhaseName(view.phase))
                                : stall_reason_;
    }
    std::map<int, int> slots_per_owner;
    for (size_t s = 0; s < view.senders.size(); ++s) {
      const SenderEntry& e = view.senders[s];
      AssignmentRow row{static_cast<int>(s), e.randomness, e.nullifier, e.assigned_receiver, std::nullopt};
      if (std::optional<int> owner = truth_.OwnerOf(e.nullifier)) {
        row.sender = AddressOf(*owner);
        ++slots_per_owner[*owner];
      }
      report.assignment.push_back(row);
    }
    report.self_assignments_accepted = CountSelfAssignments(view, truth_);
    report.derangement_ok = IsBijection(view, truth_) && report.self_assignments_accepted == 0;
    report.anonymity_ok = FindAddressRandomnessLinks(result.logs, truth_).empty();
    report.receipts = receipts_;
    bool multi_slot = std::any_of(slots_per_owner.begin(), slots_per_owner.end(),
                                  [](const auto& kv) { return kv.second > 1; });
    report.protocol_violation = multi_slot || report.self_assignments_accepted > 0;

    if (adversary_) stats_.adversary_slots = slots_per_owner[*adversary_];
    for (int i = 0; i < config_.n; ++i) {
      if (!IsAdversary(i) && !slots_per_owner.contains(i)) ++stats_.locked_out;
    }
    report.attack = stats_;
    Judge(report);
    report.timing = timing_;
    result.report_json = ToJson(report).dump(2) + "\n";
    return result;
  }

  void Judge(GameReport& report) const {
    const AttackStats& a = report.attack;
    bool sound = !report.stalled && report.derangement_ok;
    switch (config_.adversary) {
      case Adversary::kNone:
        report.expectation = "COMPLETE with a derangement and no address-randomness links";
        report.expectation_met = sound && report.anonymity_ok;
        break;
      case Adversary::kMalleableSig:
        if (config_.commitment_step) {
          report.expectation = "adversary holds exactly one slot, every extra submission reverts, COMPLETE";
          report.expectation_met = sound && a.adversary_slots == 1 &&
                                   a.extra_submissions == a.extra_submissions_rejected &&
                                   a.second_commit_attempts == a.second_commit_rejected;
        } else {
          report.expectation = "adversary occupies at least two slots (protocol violation)";
          report.expectation_met = a.adversary_slots >= 2 && report.protocol_violation;
        }
        break;
      case Adversary::kDoubleNullifier:
        report.expectation = "every replayed or re-randomized submission reverts with nullifier-spent";
        report.expectation_met = sound && a.replay_attempts > 0 && a.replay_attempts == a.replay_rejected &&
                                 a.fresh_randomness_attempts == a.fresh_randomness_rejected;
        break;
      case Adversary::kSelfPick:
        report.expectation = "self-targeted disclosure never accepted, COMPLETE";
        report.expectation_met = sound && a.self_pick_attempts > 0 && a.self_pick_accepted == 0;
        break;
      case Adversary::kFrontrun:
        report.expectation = "at most one forced retry for the victim (exactly one when the attack fires), COMPLETE";
        report.expectation_met = sound && a.victim_collisions == (a.frontrun_fired ? 1 : 0);
        break;
      case Adversary::kStaleRoot:
        if (config_.commitment_step) {
          report.expectation = "proof against an outdated root reverts with stale-root, COMPLETE";
          report.expectation_met = sound && a.stale_root_rejected == 1;
        } else {
          report.expectation = "roots never change after registration, so no stale proof exists; COMPLETE";
          report.expectation_met = sound && a.stale_root_rejected == 0;
        }
        break;
    }
  }

  GameConfig config_;
  Drbg root_;
  CommitmentMode mode_;
  TransparentBackend backend_;
  EventId event_id_;
  Contract contract_;
  Mempool mempool_;
  Relayer relayer_;
  Drbg envelope_rng_ = root_.Fork("envelope");

  GroundTruth truth_;
  std::optional<int> adversary_;
  std::vector<Signature> sigs_;
  std::vector<FieldElement> randomness_;
  std::vector<std::set<Nullifier>> own_;
  std::optional<RelayRequest> stale_request_;
  std::set<int> remaining_;
  std::string stall_reason_;

  std::vector<std::string> txlog_;
  std::map<std::string, int> receipts_;
  AttackStats stats_;
  std::vector<PhaseTiming> timing_;
  uint64_t seq_ = 0;
  uint64_t clock_ = 0;
};

json OptionalIndex(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<int> IndexFromJson(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<int>(j.get<int>());
}

json ToJson(const AttackStats& a) {
  return {{"adversary", OptionalIndex(a.adversary)},
          {"adversarySlots", a.adversary_slots},
          {"lockedOut", a.locked_out},
          {"extraSubmissions", a.extra_submissions},
          {"extraSubmissionsRejected", a.extra_submissions_rejected},
          {"secondCommitAttempts", a.second_commit_attempts},
          {"secondCommitRejected", a.second_commit_rejected},
          {"replayAttempts", a.replay_attempts},
          {"replayRejected", a.replay_rejected},
          {"freshRandomnessAttempts", a.fresh_randomness_attempts},
          {"freshRandomnessRejected", a.fresh_randomness_rejected},
          {"selfPickAttempts", a.self_pick_attempts},
          {"selfPickAccepted", a.self_pick_accepted},
          {"frontrunFired", a.frontrun_fired},
          {"victim", OptionalIndex(a.victim)},
          {"victimCollisions", a.victim_collisions},
          {"staleRootRejected", a.stale_root_rejected}};
}

AttackStats AttackStatsFromJson(const json& j) {
  AttackStats a;
  a.adversary = IndexFromJson(j.at("adversary"));
  a.adversary_slots = j.at("adversarySlots").get<int>();
  a.locked_out = j.at("lockedOut").get<int>();
  a.extra_submissions = j.at("extraSubmissions").get<int>();
  a.extra_submissions_rejected = j.at("extraSubmissionsRejected").get<int>();
  a.second_commit_attempts = j.at("secondCommitAttempts").get<int>();
  a.second_commit_rejected = j.at("secondCommitRejected").get<int>();
  a.replay_attempts = j.at("replayAttempts").get<int>();
  a.replay_rejected = j.at("replayRejected").get<int>();
  a.fresh_randomness_attempts = j.at("freshRandomnessAttempts").get<int>();
  a.fresh_randomness_rejected = j.at("freshRandomnessRejected").get<int>();
  a.self_pick_attempts = j.at("selfPickAttempts").get<int>();
  a.self_pick_accepted = j.at("selfPickAccepted").get<int>();
  a.frontrun_fired = j.at("frontrunFired").get<bool>();
  a.victim = IndexFromJson(j.at("victim"));
  a.victim_collisions = j.at("victimCollisions").get<int>();
  a.stale_root_rejected = j.at("staleRootRejected").get<int>();
  return a;
}

struct Needles {
  int participant;
  std::string address;
  std::vector<std::pair<std::string, std::string>> secrets;  // (label, text)
};

void SearchRecord(const std::string& record, const std::string& artifact,
                  const std::vector<Needles>& needles, std::vector<Link>& links) {
  for (const Needles& n : needles) {
    if (record.find(n.address) == std::string::npos) continue;
    for (const auto& [label, text] : n.secrets) {
      if (record.find(text) != std::string::npos) links.push_back(Link{n.participant, artifact, label});
    }
  }
}

}  // namespace

std::string_view AdversaryName(Adversary adversary) {
  for (const auto& [a, name] : kAdversaryNames) {
    if (a == adversary) return name;
  }
  throw MalformedInputError("unknown adversary");
}

Adversary AdversaryFromName(std::string_view name) {
  for (const auto& [a, n] : kAdversaryNames) {
    if (n == name) return a;
  }
  throw MalformedInputError("unknown adversary: " + std::string(name));
}

nlohmann::json ToJson(const GameConfig& c) {
  return {{"n", c.n},
          {"seed", c.seed},
          {"adversary", AdversaryName(c.adversary)},
          {"commitmentStep", c.commitment_step},
          {"rsaRandomness", c.rsa_randomness},
          {"eventNonce", c.event_nonce},
          {"treeDepth", c.tree_depth}};
}

GameConfig GameConfigFromJson(const nlohmann::json& j) {
  GameConfig c;
  c.n = j.at("n").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  c.adversary = AdversaryFromName(j.at("adversary").get<std::string>());
  c.commitment_step = j.at("commitmentStep").get<bool>();
  c.rsa_randomness = j.at("rsaRandomness").get<bool>();
  c.event_nonce = j.at("eventNonce").get<uint64_t>();
  c.tree_depth = j.at("treeDepth").get<int>();
  return c;
}

Participant DeriveParticipant(uint64_t seed, int index, bool with_rsa) {
  if (index < 0) throw RangeError("participant index must be non-negative");
  Drbg ecdsa = ParticipantStream(seed).Fork("ecdsa", static_cast<uint64_t>(index));
  Participant p{index, KeyPair::Generate(ecdsa), std::nullopt, ScriptedDeliveryAddress(seed, index)};
  if (with_rsa) {
    const std::pair<uint64_t, int> key{seed, index};
    {
      std::lock_guard<std::mutex> lock(g_cache_mu);
      auto it = g_rsa_cache.find(key);
      if (it != g_rsa_cache.end()) p.rsa = it->second;
    }
    if (!p.rsa) {
      Drbg rng = ParticipantStream(seed).Fork("rsa", static_cast<uint64_t>(index));
      RsaKeyPair generated = RsaKeyPair::Generate(rng);
      std::lock_guard<std::mutex> lock(g_cache_mu);
      p.rsa = g_rsa_cache.emplace(key, std::move(generated)).first->second;
    }
  }
  return p;
}

void ClearParticipantCache() {
  std::lock_guard<std::mutex> lock(g_cache_mu);
  g_rsa_cache.clear();
}

std::optional<int> GroundTruth::OwnerOf(const Nullifier& nullifier) const {
  auto it = nullifier_owner.find(nullifier);
  return it == nullifier_owner.end() ? std::nullopt : std::optional<int>(it->second);
}

nlohmann::json ToJson(const GameReport& r) {
  json assignment = json::array();
  for (const AssignmentRow& row : r.assignment) {
    assignment.push_back({{"slot", row.slot},
                          {"randomness", row.randomness.ToHex()},
                          {"nullifier", row.nullifier.value.ToHex()},
                          {"receiver", row.receiver ? json(row.receiver->ToHex()) : json(nullptr)},
                          {"sender", row.sender ? json(row.sender->ToHex()) : json(nullptr)}});
  }
  return {{"config", ToJson(r.config)},
          {"eventId", r.event_id.ToHex()},
          {"finalPhase", PhaseName(r.final_phase)},
          {"stalled", r.stalled},
          {"stallReason", r.stall_reason},
          {"assignment", assignment},
          {"derangementOk", r.derangement_ok},
          {"anonymityOk", r.anonymity_ok},
          {"protocolViolation", r.protocol_violation},
          {"expectation", r.expectation},
          {"expectationMet", r.expectation_met},
          {"receipts", r.receipts},
          {"selfAssignmentsAccepted", r.self_assignments_accepted},
          {"attack", ToJson(r.attack)}};
}

GameReport GameReportFromJson(const nlohmann::json& j) {
  GameReport r;
  r.config = GameConfigFromJson(j.at("config"));
  r.event_id = EventId::FromHex(j.at("eventId").get<std::string>());
  r.final_phase = PhaseFromName(j.at("finalPhase").get<std::string>());
  r.stalled = j.at("stalled").get<bool>();
  r.stall_reason = j.at("stallReason").get<std::string>();
  for (const json& row : j.at("assignment")) {
    AssignmentRow a;
    a.slot = row.at("slot").get<int>();
    a.randomness = FieldElement::FromHex(row.at("randomness").get<std::string>());
    a.nullifier = Nullifier{FieldElement::FromHex(row.at("nullifier").get<std::string>())};
    if (!row.at("receiver").is_null()) a.receiver = Address::FromHex(row.at("receiver").get<std::string>());
    if (!row.at("sender").is_null()) a.sender = Address::FromHex(row.at("sender").get<std::string>());
    r.assignment.push_back(a);
  }
  r.derangement_ok = j.at("derangementOk").get<bool>();
  r.anonymity_ok = j.at("anonymityOk").get<bool>();
  r.protocol_violation = j.at("protocolViolation").get<bool>();
  r.expectation = j.at("expectation").get<std::string>();
  r.expectation_met = j.at("expectationMet").get<bool>();
  r.receipts = j.at("receipts").get<std::map<std::string, int>>();
  r.self_assignments_accepted = j.at("selfAssignmentsAccepted").get<int>();
  r.attack = AttackStatsFromJson(j.at("attack"));
  return r;
}

GameResult RunGame(const GameConfig& config) {
  if (config.n < 2) throw RangeError("a game needs at least two participants");
  return Game(config).Run();
}

GameResult RunAttack(const GameConfig& config) {
  if (config.adversary == Adversary::kNone) {
    throw std::invalid_argument("RunAttack requires an adversary script");
  }
  return RunGame(config);
}

void WriteArtifacts(const GameResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << content;
  };
  write("state.json", result.logs.state_json);
  write("txlog.jsonl", result.logs.txlog);
  write("relay.jsonl", result.logs.relay_log);
  write("report.json", result.report_json);
}

std::vector<Link> FindAddressRandomnessLinks(const ArtifactLogs& logs, const GroundTruth& truth) {
  std::vector<Needles> needles;
  for (const Participant& p : truth.participants) {
    if (truth.adversary && *truth.adversary == p.index) continue;
    Needles n{p.index, Bare(p.key.address().ToHex()), {}};
    if (p.rsa) {
      n.secrets.emplace_back("randomness", Bare(p.rsa->public_key.Fingerprint().ToHex()));
      n.secrets.emplace_back("rsaPublicKey", ToBase64(p.rsa->public_key.Encode()));
    }
    for (const auto& [null, owner] : truth.nullifier_owner) {
      if (owner == p.index) n.secrets.emplace_back("nullifier", Bare(null.value.ToHex()));
    }
    needles.push_back(std::move(n));
  }
  // Randomness without an RSA key is only knowable from the logs; recover it
  // from the owner's submissions.
  std::map<int, std::set<std::string>> randomness_of;
  auto collect = [&](const json& publics) {
    Nullifier null{FieldElement::FromHex(publics.at("nullS").get<std::string>())};
    if (std::optional<int> owner = truth.OwnerOf(null)) {
      randomness_of[*owner].insert(Bare(publics.at("r").get<std::string>()));
    }
  };
  for (const std::string& line : SplitLines(logs.relay_log)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("publics")) collect(j.at("publics"));
  }
  for (Needles& n : needles) {
    for (const std::string& r : randomness_of[n.participant]) {
      std::pair<std::string, std::string> secret{"randomness", r};
      if (std::find(n.secrets.begin(), n.secrets.end(), secret) == n.secrets.end()) {
        n.secrets.push_back(secret);
      }
    }
  }

  std::vector<Link> links;
  for (const std::string& line : SplitLines(logs.txlog)) SearchRecord(line, "txlog.jsonl", needles, links);
  for (const std::string& line : SplitLines(logs.relay_log)) {
    SearchRecord(line, "relay.jsonl", needles, links);
  }
  json state = json::parse(logs.state_json, nullptr, false);
  if (state.is_object()) {
    json top = json::object();
    for (const auto& [key, value] : state.items()) {
      if (key == "senders") {
        for (const json& entry : value) SearchRecord(entry.dump(), "state.json", needles, links);
      } else if (!value.is_array()) {
        top[key] = value;
      }
      // Other arrays hold one scalar per element and cannot pair values.
    }
    SearchRecord(top.dump(), "state.json", needles, links);
  } else {
    SearchRecord(logs.state_json, "state.json", needles, links);
  }
  return links;
}

nlohmann::json ToJson(const Checklist& c) {
  return {{"bijection", c.bijection},       {"derangement", c.derangement},
          {"anonymity", c.anonymity},       {"lowS", c.low_s},
          {"eventIdUnique", c.event_id_unique}, {"envelopes", c.envelopes},
          {"all", c.all()}};
}

Checklist VerifyReport(const GameReport& report, const PublicView& snapshot, const GroundTruth& truth,
                       const VerifyOptions& options) {
  Checklist c;
  std::map<Address, int> index = AddressIndex(truth);

  bool report_matches = report.assignment.size() == snapshot.senders.size() &&
                        report.final_phase == snapshot.phase && report.event_id == snapshot.event_id;
  for (size_t s = 0; report_matches && s < report.assignment.size(); ++s) {
    const AssignmentRow& row = report.assignment[s];
    const SenderEntry& e = snapshot.senders[s];
    std::optional<int> owner = truth.OwnerOf(e.nullifier);
    std::optional<Address> truth_sender;
    if (owner) truth_sender = truth.participants[*owner].key.address();
    report_matches = row.nullifier == e.nullifier && row.randomness == e.randomness &&
                     row.receiver == e.assigned_receiver && row.sender == truth_sender;
  }
  c.bijection = report_matches && IsBijection(snapshot, truth);

  // Judged on the report's own table so a tampered report is caught.
  bool fixed_point = false;
  for (const AssignmentRow& row : report.assignment) {
    if (row.receiver && row.sender && *row.receiver == *row.sender) fixed_point = true;
  }
  c.derangement = c.bijection && !fixed_point && CountSelfAssignments(snapshot, truth) == 0;

  ArtifactLogs logs;
  if (options.logs) {
    logs = *options.logs;
  } else {
    logs.state_json = ToJson(snapshot).dump();
  }
  c.anonymity = FindAddressRandomnessLinks(logs, truth).empty();

  c.low_s = std::all_of(truth.signatures.begin(), truth.signatures.end(),
                        [](const Signature& s) { return s.IsLowS(); });

  c.event_id_unique = options.session ? options.session->Record(snapshot.event_id) : true;

  c.envelopes = true;
  if (options.check_envelopes && report.config.rsa_randomness) {
    for (const SenderEntry& e : snapshot.senders) {
      if (!e.assigned_receiver) continue;
      std::optional<int> owner = truth.OwnerOf(e.nullifier);
      auto receiver = index.find(*e.assigned_receiver);
      if (!e.encrypted_delivery_address || !owner || receiver == index.end()) {
        c.envelopes = false;
        break;
      }
      const std::string& expected = truth.participants[receiver->second].delivery_address;
      for (const Participant& p : truth.participants) {
        if (!p.rsa) {
          c.envelopes = false;
          continue;
        }
        std::optional<Bytes> plain;
        try {
          plain = DecryptDeliveryAddress(*e.encrypted_delivery_address, *p.rsa);
        } catch (const PaddingError&) {
        }
        bool ok = p.index == *owner
                      ? plain && std::string(plain->begin(), plain->end()) == expected
                      : !plain.has_value();
        if (!ok) c.envelopes = false;
      }
    }
  }
  return c;
}

}  // namespace zkss
