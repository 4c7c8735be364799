#ifndef ZKSS_CONTRACT_H_
#define ZKSS_CONTRACT_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "zkss/envelope.h"
#include "zkss/primitives.h"
#include "zkss/relations.h"
#include "zkss/signing.h"
#include "zkss/smt.h"

namespace zkss {

enum class Phase { kSetup, kCommit, kDetermine, kDisclose, kComplete };

std::string_view PhaseName(Phase phase);
Phase PhaseFromName(std::string_view name);

enum class RevertReason {
  kPhase,
  kDuplicate,
  kTooFew,
  kNotParticipant,
  kAlreadyCommitted,
  kNullifierSpent,
  kStaleRoot,
  kBadProof,
  kNotRelayed,
  kCollision,
  kAlreadyDisclosed,
  kNoSuchSender,
  kWrongEvent,
  kOriginMismatch,
  kMissingOrigin,
  kRandomnessMismatch,
};

std::string_view RevertReasonName(RevertReason reason);
RevertReason RevertReasonFromName(std::string_view name);

struct Receipt {
  std::optional<RevertReason> reverted;

  static Receipt Accepted() { return {}; }
  static Receipt Reverted(RevertReason reason) { return Receipt{reason}; }

  bool accepted() const { return !reverted.has_value(); }
  bool Is(RevertReason reason) const { return reverted == reason; }
  // "ACCEPTED" or "REVERTED(<reason>)"
  std::string ToString() const;

  bool operator==(const Receipt&) const = default;
};

struct RegisterCall {
  std::vector<Address> addresses;
};

struct CommitCall {
  Commitment commitment;
};

struct SubmitRandomnessCall {
  Proof proof;
  SenderPublicInputs publics;
  std::optional<RsaPublicKey> rsa_public_key;
};

struct DiscloseCall {
  Proof proof;
  ReceiverPublicInputs publics;
  std::optional<DeliveryEnvelope> encrypted_delivery_address;
};

using Call = std::variant<RegisterCall, CommitCall, SubmitRandomnessCall, DiscloseCall>;

// origin is msg.sender; it is absent for relayed transactions.
struct Transaction {
  std::optional<Address> origin;
  Call call;
};

std::string_view CallName(const Call& call);
nlohmann::json ToJson(const Transaction& tx);
Transaction TransactionFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const Receipt& receipt);
Receipt ReceiptFromJson(const nlohmann::json& j);

struct SenderEntry {
  FieldElement randomness;
  std::optional<RsaPublicKey> rsa_public_key;
  Nullifier nullifier;
  std::optional<Address> assigned_receiver;
  std::optional<DeliveryEnvelope> encrypted_delivery_address;

  bool operator==(const SenderEntry&) const = default;
};

struct ContractConfig {
  EventId event_id;
  int tree_depth = SparseMerkleTree::kDefaultDepth;
  CommitmentMode commitments = CommitmentMode::kRequired;
};

// Everything an outside observer can read from the contract. Holds no
// witness data and no origin of relayed transactions.
struct PublicView {
  EventId event_id;
  Phase phase = Phase::kSetup;
  CommitmentMode commitments = CommitmentMode::kRequired;
  int tree_depth = SparseMerkleTree::kDefaultDepth;
  FieldElement root_p;
  FieldElement root_c;
  std::vector<Address> participants;
  std::vector<Address> committed;
  std::vector<SenderEntry> senders;
  std::vector<Nullifier> spent_nullifiers;
  std::vector<Address> disclosed_receivers;

  bool operator==(const PublicView&) const = default;
};

nlohmann::json ToJson(const PublicView& view);
PublicView PublicViewFromJson(const nlohmann::json& j);

// Deterministic single-writer state machine for one game. Every rejected
// transaction leaves the state untouched.
class Contract {
 public:
  // `verifier` must outlive the contract.
  Contract(const ContractConfig& config, const ProvingBackend& verifier);

  Receipt Apply(const Transaction& tx);

  Receipt Register(const std::optional<Address>& origin, const std::vector<Address>& addresses);
  Receipt Commit(const std::optional<Address>& origin, const Commitment& commitment);
  Receipt SubmitRandomness(const std::optional<Address>& origin, const SubmitRandomnessCall& call);
  Receipt Disclose(const std::optional<Address>& origin, const DiscloseCall& call);

  PublicView Snapshot() const;

  Phase phase() const { return phase_; }
  const EventId& event_id() const { return config_.event_id; }
  CommitmentMode commitment_mode() const { return config_.commitments; }
  const SparseMerkleTree& participants() const { return participants_; }
  const SparseMerkleTree& commitments() const { return commitments_; }
  const std::vector<SenderEntry>& senders() const { return senders_; }
  size_t participant_count() const { return registered_.size(); }
  bool IsParticipant(const Address& address) const;

 private:
  ContractConfig config_;
  const ProvingBackend& verifier_;
  Phase phase_ = Phase::kSetup;
  SparseMerkleTree participants_;
  SparseMerkleTree commitments_;
  std::vector<Address> registered_;
  std::vector<Address> committed_;
  std::vector<SenderEntry> senders_;
  std::set<Nullifier> spent_nullifiers_;
  std::vector<Address> disclosed_receivers_;
};

}  // namespace zkss

#endif  // ZKSS_CONTRACT_H_
