#include "zkss/contract.h"

#include <algorithm>
#include <array>

#include "zkss/errors.h"

namespace zkss {
namespace {

constexpr std::array<std::pair<Phase, std::string_view>, 5> kPhaseNames = {{
    {Phase::kSetup, "SETUP"},
    {Phase::kCommit, "COMMIT"},
    {Phase::kDetermine, "DETERMINE"},
    {Phase::kDisclose, "DISCLOSE"},
    {Phase::kComplete, "COMPLETE"},
}};

constexpr std::array<std::pair<RevertReason, std::string_view>, 16> kReasonNames = {{
    {RevertReason::kPhase, "phase"},
    {RevertReason::kDuplicate, "duplicate"},
    {RevertReason::kTooFew, "too-few"},
    {RevertReason::kNotParticipant, "not-participant"},
    {RevertReason::kAlreadyCommitted, "already-committed"},
    {RevertReason::kNullifierSpent, "nullifier-spent"},
    {RevertReason::kStaleRoot, "stale-root"},
    {RevertReason::kBadProof, "bad-proof"},
    {RevertReason::kNotRelayed, "not-relayed"},
    {RevertReason::kCollision, "collision"},
    {RevertReason::kAlreadyDisclosed, "already-disclosed"},
    {RevertReason::kNoSuchSender, "no-such-sender"},
    {RevertReason::kWrongEvent, "wrong-event"},
    {RevertReason::kOriginMismatch, "origin-mismatch"},
    {RevertReason::kMissingOrigin, "missing-origin"},
    {RevertReason::kRandomnessMismatch, "randomness-mismatch"},
}};

template <typename T>
bool ContainsValue(const std::vector<T>& items, const T& value) {
  return std::find(items.begin(), items.end(), value) != items.end();
}

nlohmann::json OptionalAddress(const std::optional<Address>& address) {
  return address ? nlohmann::json(address->ToHex()) : nlohmann::json(nullptr);
}

std::optional<Address> OptionalAddressFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return Address::FromHex(j.get<std::string>());
}

nlohmann::json AddressList(const std::vector<Address>& addresses) {
  nlohmann::json out = nlohmann::json::array();
  for (const Address& a : addresses) out.push_back(a.ToHex());
  return out;
}

std::vector<Address> AddressListFromJson(const nlohmann::json& j) {
  std::vector<Address> out;
  for (const auto& a : j) out.push_back(Address::FromHex(a.get<std::string>()));
  return out;
}

nlohmann::json RsaKeyJson(const std::optional<RsaPublicKey>& key) {
  return key ? nlohmann::json(ToBase64(key->Encode())) : nlohmann::json(nullptr);
}

std::optional<RsaPublicKey> RsaKeyFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return RsaPublicKey::Decode(FromBase64(j.get<std::string>()));
}

nlohmann::json EnvelopeJson(const std::optional<DeliveryEnvelope>& envelope) {
  return envelope ? ToJson(*envelope) : nlohmann::json(nullptr);
}

std::optional<DeliveryEnvelope> EnvelopeFromJson(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return DeliveryEnvelopeFromJson(j);
}

}  // namespace

std::string_view PhaseName(Phase phase) {
  for (const auto& [p, name] : kPhaseNames) {
    if (p == phase) return name;
  }
  throw ParseError("unknown phase");
}

Phase PhaseFromName(std::string_view name) {
  for (const auto& [p, n] : kPhaseNames) {
    if (n == name) return p;
  }
  throw ParseError("unknown phase '" + std::string(name) + "'");
}

std::string_view RevertReasonName(RevertReason reason) {
  for (const auto& [r, name] : kReasonNames) {
    if (r == reason) return name;
  }
  throw ParseError("unknown revert reason");
}

RevertReason RevertReasonFromName(std::string_view name) {
  for (const auto& [r, n] : kReasonNames) {
    if (n == name) return r;
  }
  throw ParseError("unknown revert reason '" + std::string(name) + "'");
}

std::string Receipt::ToString() const {
  if (accepted()) return "ACCEPTED";
  return "REVERTED(" + std::string(RevertReasonName(*reverted)) + ")";
}

std::string_view CallName(const Call& call) {
  static constexpr std::array<std::string_view, 4> kNames = {"register", "commit",
                                                             "submitRandomness", "disclose"};
  return kNames[call.index()];
}

nlohmann::json ToJson(const Transaction& tx) {
  nlohmann::json args;
  std::visit(
      [&args](const auto& call) {
        using T = std::decay_t<decltype(call)>;
        if constexpr (std::is_same_v<T, RegisterCall>) {
          args = {{"addresses", AddressList(call.addresses)}};
        } else if constexpr (std::is_same_v<T, CommitCall>) {
          args = {{"commitment", call.commitment.value.ToHex()}};
        } else if constexpr (std::is_same_v<T, SubmitRandomnessCall>) {
          args = {{"proof", ToJson(call.proof)},
                  {"publics", ToJson(call.publics)},
                  {"rsaPublicKey", RsaKeyJson(call.rsa_public_key)}};
        } else {
          args = {{"proof", ToJson(call.proof)},
                  {"publics", ToJson(call.publics)},
                  {"encryptedDeliveryAddress", EnvelopeJson(call.encrypted_delivery_address)}};
        }
      },
      tx.call);
  return {{"origin", OptionalAddress(tx.origin)},
          {"call", std::string(CallName(tx.call))},
          {"args", args}};
}

Transaction TransactionFromJson(const nlohmann::json& j) {
  Transaction tx;
  tx.origin = OptionalAddressFromJson(j.at("origin"));
  const std::string call = j.at("call").get<std::string>();
  const nlohmann::json& args = j.at("args");
  if (call == "register") {
    tx.call = RegisterCall{AddressListFromJson(args.at("addresses"))};
  } else if (call == "commit") {
    tx.call = CommitCall{Commitment{FieldElement::FromHex(args.at("commitment").get<std::string>())}};
  } else if (call == "submitRandomness") {
    tx.call = SubmitRandomnessCall{ProofFromJson(args.at("proof")),
                                   SenderPublicInputsFromJson(args.at("publics")),
                                   RsaKeyFromJson(args.at("rsaPublicKey"))};
  } else if (call == "disclose") {
    tx.call = DiscloseCall{ProofFromJson(args.at("proof")),
                           ReceiverPublicInputsFromJson(args.at("publics")),
                           EnvelopeFromJson(args.at("encryptedDeliveryAddress"))};
  } else {
    throw ParseError("unknown call '" + call + "'");
  }
  return tx;
}

nlohmann::json ToJson(const Receipt& receipt) {
  if (receipt.accepted()) return {{"status", "ACCEPTED"}, {"reason", nullptr}};
  return {{"status", "REVERTED"}, {"reason", std::string(RevertReasonName(*receipt.reverted))}};
}

Receipt ReceiptFromJson(const nlohmann::json& j) {
  const std::string status = j.at("status").get<std::string>();
  if (status == "ACCEPTED") return Receipt::Accepted();
  if (status != "REVERTED") throw ParseError("unknown receipt status '" + status + "'");
  return Receipt::Reverted(RevertReasonFromName(j.at("reason").get<std::string>()));
}

nlohmann::json ToJson(const PublicView& view) {
  nlohmann::json senders = nlohmann::json::array();
  for (const SenderEntry& e : view.senders) {
    senders.push_back({{"randomness", e.randomness.ToHex()},
                       {"nullifier", e.nullifier.value.ToHex()},
                       {"rsaPublicKey", RsaKeyJson(e.rsa_public_key)},
                       {"assignedReceiver", OptionalAddress(e.assigned_receiver)},
                       {"encryptedDeliveryAddress", EnvelopeJson(e.encrypted_delivery_address)}});
  }
  nlohmann::json spent = nlohmann::json::array();
  for (const Nullifier& n : view.spent_nullifiers) spent.push_back(n.value.ToHex());
  return {{"eventId", view.event_id.ToHex()},
          {"phase", std::string(PhaseName(view.phase))},
          {"commitmentStep", view.commitments == CommitmentMode::kRequired},
          {"treeDepth", view.tree_depth},
          {"rootP", view.root_p.ToHex()},
          {"rootC", view.root_c.ToHex()},
          {"participants", AddressList(view.participants)},
          {"committed", AddressList(view.committed)},
          {"senders", senders},
          {"spentNullifiers", spent},
          {"disclosedReceivers", AddressList(view.disclosed_receivers)}};
}

PublicView PublicViewFromJson(const nlohmann::json& j) {
  PublicView view;
  view.event_id = EventId::FromHex(j.at("eventId").get<std::string>());
  view.phase = PhaseFromName(j.at("phase").get<std::string>());
  view.commitments =
      j.at("commitmentStep").get<bool>() ? CommitmentMode::kRequired : CommitmentMode::kDisabled;
  view.tree_depth = j.at("treeDepth").get<int>();
  view.root_p = FieldElement::FromHex(j.at("rootP").get<std::string>());
  view.root_c = FieldElement::FromHex(j.at("rootC").get<std::string>());
  view.participants = AddressListFromJson(j.at("participants"));
  view.committed = AddressListFromJson(j.at("committed"));
  for (const auto& e : j.at("senders")) {
    SenderEntry entry;
    entry.randomness = FieldElement::FromHex(e.at("randomness").get<std::string>());
    entry.nullifier = Nullifier{FieldElement::FromHex(e.at("nullifier").get<std::string>())};
    entry.rsa_public_key = RsaKeyFromJson(e.at("rsaPublicKey"));
    entry.assigned_receiver = OptionalAddressFromJson(e.at("assignedReceiver"));
    entry.encrypted_delivery_address = EnvelopeFromJson(e.at("encryptedDeliveryAddress"));
    view.senders.push_back(std::move(entry));
  }
  for (const auto& n : j.at("spentNullifiers")) {
    view.spent_nullifiers.push_back(Nullifier{FieldElement::FromHex(n.get<std::string>())});
  }
  view.disclosed_receivers = AddressListFromJson(j.at("disclosedReceivers"));
  return view;
}

Contract::Contract(const ContractConfig& config, const ProvingBackend& verifier)
    : config_(config),
      verifier_(verifier),
      participants_(config.tree_depth),
      commitments_(config.tree_depth) {}

Receipt Contract::Apply(const Transaction& tx) {
  return std::visit(
      [this, &tx](const auto& call) -> Receipt {
        using T = std::decay_t<decltype(call)>;
        if constexpr (std::is_same_v<T, RegisterCall>) {
          return Register(tx.origin, call.addresses);
        } else if constexpr (std::is_same_v<T, CommitCall>) {
          return Commit(tx.origin, call.commitment);
        } else if constexpr (std::is_same_v<T, SubmitRandomnessCall>) {
          return SubmitRandomness(tx.origin, call);
        } else {
          return Disclose(tx.origin, call);
        }
      },
      tx.call);
}

bool Contract::IsParticipant(const Address& address) const {
  return participants_.Contains(HashToField(address.bytes()));
}

Receipt Contract::Register(const std::optional<Address>& /*origin*/,
                           const std::vector<Address>& addresses) {
  if (phase_ != Phase::kSetup) return Receipt::Reverted(RevertReason::kPhase);
  std::set<Address> unique(addresses.begin(), addresses.end());
  if (unique.size() != addresses.size()) return Receipt::Reverted(RevertReason::kDuplicate);
  if (addresses.size() < 2) return Receipt::Reverted(RevertReason::kTooFew);

  SparseMerkleTree tree(config_.tree_depth);
  try {
    for (const Address& address : addresses) {
      FieldElement leaf = HashToField(address.bytes());
      tree.Insert(leaf, leaf);
    }
  } catch (const DuplicateKeyError&) {
    return Receipt::Reverted(RevertReason::kDuplicate);
  }
  participants_ = std::move(tree);
  registered_ = addresses;
  phase_ = config_.commitments == CommitmentMode::kRequired ? Phase::kCommit : Phase::kDetermine;
  return Receipt::Accepted();
}

Receipt Contract::Commit(const std::optional<Address>& origin, const Commitment& commitment) {
  if (phase_ != Phase::kCommit) return Receipt::Reverted(RevertReason::kPhase);
  if (!origin) return Receipt::Reverted(RevertReason::kMissingOrigin);
  if (!IsParticipant(*origin)) return Receipt::Reverted(RevertReason::kNotParticipant);
  if (ContainsValue(committed_, *origin)) return Receipt::Reverted(RevertReason::kAlreadyCommitted);
  try {
    commitments_.Insert(commitment.value, commitment.value);
  } catch (const DuplicateKeyError&) {
    return Receipt::Reverted(RevertReason::kDuplicate);
  }
  committed_.push_back(*origin);
  if (committed_.size() == registered_.size()) phase_ = Phase::kDetermine;
  return Receipt::Accepted();
}

Receipt Contract::SubmitRandomness(const std::optional<Address>& origin,
                                   const SubmitRandomnessCall& call) {
  const SenderPublicInputs& x = call.publics;
  // A spent nullifier stays spent after the step closes.
  if (spent_nullifiers_.contains(x.null_s)) return Receipt::Reverted(RevertReason::kNullifierSpent);
  if (phase_ != Phase::kDetermine) return Receipt::Reverted(RevertReason::kPhase);
  if (origin) return Receipt::Reverted(RevertReason::kNotRelayed);
  if (x.event_id != config_.event_id) return Receipt::Reverted(RevertReason::kWrongEvent);
  if (x.root_p != participants_.root() || x.root_c != commitments_.root()) {
    return Receipt::Reverted(RevertReason::kStaleRoot);
  }
  if (call.rsa_public_key && call.rsa_public_key->Fingerprint() != x.r) {
    return Receipt::Reverted(RevertReason::kRandomnessMismatch);
  }
  bool valid = false;
  try {
    valid = Verify(call.proof, x, verifier_, config_.commitments);
  } catch (const Error&) {
    valid = false;
  }
  if (!valid) return Receipt::Reverted(RevertReason::kBadProof);

  senders_.push_back(SenderEntry{x.r, call.rsa_public_key, x.null_s, std::nullopt, std::nullopt});
  spent_nullifiers_.insert(x.null_s);
  if (senders_.size() == registered_.size()) phase_ = Phase::kDisclose;
  return Receipt::Accepted();
}

Receipt Contract::Disclose(const std::optional<Address>& origin, const DiscloseCall& call) {
  if (phase_ != Phase::kDisclose) return Receipt::Reverted(RevertReason::kPhase);
  if (!origin) return Receipt::Reverted(RevertReason::kMissingOrigin);
  const ReceiverPublicInputs& x = call.publics;
  if (*origin != x.address) return Receipt::Reverted(RevertReason::kOriginMismatch);
  if (x.event_id != config_.event_id) return Receipt::Reverted(RevertReason::kWrongEvent);
  if (!IsParticipant(*origin)) return Receipt::Reverted(RevertReason::kNotParticipant);
  if (ContainsValue(disclosed_receivers_, *origin)) {
    return Receipt::Reverted(RevertReason::kAlreadyDisclosed);
  }
  auto target = std::find_if(senders_.begin(), senders_.end(),
                             [&x](const SenderEntry& e) { return e.nullifier == x.null_s; });
  if (target == senders_.end()) return Receipt::Reverted(RevertReason::kNoSuchSender);
  bool valid = false;
  try {
    valid = Verify(call.proof, x, verifier_);
  } catch (const Error&) {
    valid = false;
  }
  if (!valid) return Receipt::Reverted(RevertReason::kBadProof);
  if (target->assigned_receiver) return Receipt::Reverted(RevertReason::kCollision);

  target->assigned_receiver = *origin;
  target->encrypted_delivery_address = call.encrypted_delivery_address;
  disclosed_receivers_.push_back(*origin);
  bool all_assigned = std::all_of(senders_.begin(), senders_.end(),
                                  [](const SenderEntry& e) { return e.assigned_receiver.has_value(); });
  if (all_assigned) phase_ = Phase::kComplete;
  return Receipt::Accepted();
}

PublicView Contract::Snapshot() const {
  PublicView view;
  view.event_id = config_.event_id;
  view.phase = phase_;
  view.commitments = config_.commitments;
  view.tree_depth = config_.tree_depth;
  view.root_p = participants_.root();
  view.root_c = commitments_.root();
  view.participants = registered_;
  view.committed = committed_;
  view.senders = senders_;
  for (const SenderEntry& e : senders_) view.spent_nullifiers.push_back(e.nullifier);
  view.disclosed_receivers = disclosed_receivers_;
  return view;
}

}  // namespace zkss
