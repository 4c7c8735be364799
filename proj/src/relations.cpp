#include "zkss/relations.h"

#include <array>
#include <optional>

#include "zkss/errors.h"

namespace zkss {
namespace {

constexpr size_t kMaxProofDepth = SparseMerkleTree::kMaxDepth;

Bytes ToBytes(ByteSpan span) { return Bytes(span.begin(), span.end()); }

bool ValidProofShape(const MerkleProof& proof) {
  return !proof.siblings.empty() && proof.siblings.size() <= kMaxProofDepth;
}

RelationResult Unsatisfied(int clause, std::string detail) {
  return RelationResult{RelationStatus::kUnsatisfied, clause, std::move(detail)};
}

// Clause shared by both relations: the signature recovers to `address`
// over address || eventId.
std::optional<std::string> CheckSigner(const Signature& sig, const Address& address,
                                       const EventId& event_id) {
  try {
    if (Ecrecover(sig, BuildMessage(address, event_id)) != address) {
      return "recovered address differs";
    }
  } catch (const MalleabilityError& e) {
    return std::string("rejected: ") + e.what();
  } catch (const RecoveryError& e) {
    return std::string("rejected: ") + e.what();
  }
  return std::nullopt;
}

}  // namespace

std::string_view RelationTagName(RelationTag tag) {
  switch (tag) {
    case RelationTag::kSender:
      return "sender";
    case RelationTag::kSenderUncommitted:
      return "sender-uncommitted";
    case RelationTag::kReceiver:
      return "receiver";
  }
  throw MalformedInputError("unknown relation tag " + std::to_string(static_cast<int>(tag)));
}

RelationTag RelationTagFromName(std::string_view name) {
  for (RelationTag tag :
       {RelationTag::kSender, RelationTag::kSenderUncommitted, RelationTag::kReceiver}) {
    if (RelationTagName(tag) == name) return tag;
  }
  throw MalformedInputError("unknown relation tag '" + std::string(name) + "'");
}

RelationTag SenderTag(CommitmentMode mode) {
  return mode == CommitmentMode::kRequired ? RelationTag::kSender
                                           : RelationTag::kSenderUncommitted;
}

PublicInputs Serialize(const SenderPublicInputs& x) {
  return {ToBytes(x.r.bytes()), ToBytes(x.event_id.Encode()), ToBytes(x.root_p.bytes()),
          ToBytes(x.root_c.bytes()), ToBytes(x.null_s.value.bytes())};
}

PublicInputs Serialize(const ReceiverPublicInputs& x) {
  return {ToBytes(x.address.bytes()), ToBytes(x.event_id.Encode()),
          ToBytes(x.null_s.value.bytes())};
}

nlohmann::json ToJson(const SenderPublicInputs& x) {
  return {{"r", x.r.ToHex()},
          {"eventId", x.event_id.ToHex()},
          {"rootP", x.root_p.ToHex()},
          {"rootC", x.root_c.ToHex()},
          {"nullS", x.null_s.value.ToHex()}};
}

nlohmann::json ToJson(const ReceiverPublicInputs& x) {
  return {{"address", x.address.ToHex()},
          {"eventId", x.event_id.ToHex()},
          {"nullS", x.null_s.value.ToHex()}};
}

SenderPublicInputs SenderPublicInputsFromJson(const nlohmann::json& j) {
  SenderPublicInputs x;
  x.r = FieldElement::FromHex(j.at("r").get<std::string>());
  x.event_id = EventId::FromHex(j.at("eventId").get<std::string>());
  x.root_p = FieldElement::FromHex(j.at("rootP").get<std::string>());
  x.root_c = FieldElement::FromHex(j.at("rootC").get<std::string>());
  x.null_s = Nullifier{FieldElement::FromHex(j.at("nullS").get<std::string>())};
  return x;
}

ReceiverPublicInputs ReceiverPublicInputsFromJson(const nlohmann::json& j) {
  ReceiverPublicInputs x;
  x.address = Address::FromHex(j.at("address").get<std::string>());
  x.event_id = EventId::FromHex(j.at("eventId").get<std::string>());
  x.null_s = Nullifier{FieldElement::FromHex(j.at("nullS").get<std::string>())};
  return x;
}

SenderRelationResult CheckSenderRelation(const SenderWitness& w, const SenderPublicInputs& x,
                                         CommitmentMode mode) {
  SenderRelationResult result;
  if (!w.sig.IsWellFormed()) {
    result.detail = "signature components out of range";
    return result;
  }
  if (!ValidProofShape(w.participant_proof)) {
    result.detail = "participant proof has invalid length";
    return result;
  }
  if (mode == CommitmentMode::kRequired &&
      (!ValidProofShape(w.commitment_proof) ||
       w.commitment_proof.siblings.size() != w.participant_proof.siblings.size())) {
    result.detail = "commitment proof length does not match participant proof";
    return result;
  }

  result.nullifier = DeriveNullifier(w.sig);
  // (5) anchoring: r is squared and bound into the transcript. Not an
  // equality constraint.
  result.anchor = x.r.Square();

  auto fail = [&result](const RelationResult& r) {
    static_cast<RelationResult&>(result) = r;
    return result;
  };
  if (result.nullifier != x.null_s) {
    return fail(Unsatisfied(1, "nullifier does not match hash(sig.s)"));
  }
  if (auto error = CheckSigner(w.sig, w.address, x.event_id)) {
    return fail(Unsatisfied(2, *error));
  }
  FieldElement address_leaf = HashToField(w.address.bytes());
  if (!MerkleVerify(address_leaf, w.participant_proof, x.root_p)) {
    return fail(Unsatisfied(3, "address not included under root_p"));
  }
  if (mode == CommitmentMode::kRequired &&
      !MerkleVerify(CommitmentHash(w.sig).value, w.commitment_proof, x.root_c)) {
    return fail(Unsatisfied(4, "signature commitment not included under root_c"));
  }
  result.status = RelationStatus::kSatisfied;
  result.failed_clause = 0;
  result.detail.clear();
  return result;
}

RelationResult CheckReceiverRelation(const ReceiverWitness& w, const ReceiverPublicInputs& x) {
  if (!w.sig.IsWellFormed()) {
    return RelationResult{RelationStatus::kMalformed, 0, "signature components out of range"};
  }
  Nullifier null_r = DeriveNullifier(w.sig);
  if (auto error = CheckSigner(w.sig, x.address, x.event_id)) {
    return Unsatisfied(2, *error);
  }
  if (null_r == x.null_s) {
    return Unsatisfied(3, "receiver nullifier equals the chosen sender nullifier");
  }
  return RelationResult{RelationStatus::kSatisfied, 0, ""};
}

nlohmann::json ToJson(const Proof& proof) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const Bytes& input : proof.public_inputs) inputs.push_back(ToHex(input));
  return {{"relation", std::string(RelationTagName(proof.relation))},
          {"publicInputs", inputs},
          {"blob", ToHex(proof.blob)}};
}

Proof ProofFromJson(const nlohmann::json& j) {
  Proof proof;
  proof.relation = RelationTagFromName(j.at("relation").get<std::string>());
  for (const auto& input : j.at("publicInputs")) {
    proof.public_inputs.push_back(FromHex(input.get<std::string>()));
  }
  proof.blob = FromHex(j.at("blob").get<std::string>());
  return proof;
}

Bytes TransparentBackend::Attest(RelationTag tag, const PublicInputs& inputs) const {
  Bytes transcript;
  Append(transcript, AsBytes("zkss/transparent-proof/v1"));
  transcript.push_back(static_cast<uint8_t>(tag));
  for (const Bytes& input : inputs) {
    transcript.push_back(static_cast<uint8_t>(input.size() >> 8));
    transcript.push_back(static_cast<uint8_t>(input.size() & 0xff));
    Append(transcript, input);
  }
  if (tag != RelationTag::kReceiver) {
    if (inputs.empty() || inputs[0].size() != FieldElement::kSize) {
      throw MalformedInputError("sender public inputs must start with r");
    }
    FieldElement anchor = FieldElement::FromCanonical(inputs[0]).Square();
    Append(transcript, anchor.bytes());
  }
  Append(transcript, secret_);
  FieldElement blob = HashToField(transcript);
  return Bytes(blob.bytes().begin(), blob.bytes().end());
}

Proof TransparentBackend::ProveSender(const SenderWitness& w, const SenderPublicInputs& x,
                                      CommitmentMode mode) const {
  SenderRelationResult check = CheckSenderRelation(w, x, mode);
  if (check.status == RelationStatus::kMalformed) throw MalformedInputError(check.detail);
  if (!check.satisfied()) {
    throw ProverRefusedError("sender relation clause " + std::to_string(check.failed_clause) +
                             " unsatisfied: " + check.detail);
  }
  Proof proof;
  proof.relation = SenderTag(mode);
  proof.public_inputs = Serialize(x);
  proof.blob = Attest(proof.relation, proof.public_inputs);
  return proof;
}

Proof TransparentBackend::ProveReceiver(const ReceiverWitness& w,
                                        const ReceiverPublicInputs& x) const {
  RelationResult check = CheckReceiverRelation(w, x);
  if (check.status == RelationStatus::kMalformed) throw MalformedInputError(check.detail);
  if (!check.satisfied()) {
    throw ProverRefusedError("receiver relation clause " + std::to_string(check.failed_clause) +
                             " unsatisfied: " + check.detail);
  }
  Proof proof;
  proof.relation = RelationTag::kReceiver;
  proof.public_inputs = Serialize(x);
  proof.blob = Attest(proof.relation, proof.public_inputs);
  return proof;
}

bool TransparentBackend::VerifyProof(const Proof& proof) const {
  RelationTagName(proof.relation);  // throws on unknown tags
  const size_t expected_inputs = proof.relation == RelationTag::kReceiver ? 3 : 5;
  if (proof.public_inputs.size() != expected_inputs) return false;
  if (proof.relation != RelationTag::kReceiver &&
      proof.public_inputs[0].size() != FieldElement::kSize) {
    return false;
  }
  try {
    return Attest(proof.relation, proof.public_inputs) == proof.blob;
  } catch (const Error&) {
    return false;
  }
}

Proof Prove(const SenderWitness& w, const SenderPublicInputs& x, const ProvingBackend& backend,
            CommitmentMode mode) {
  return backend.ProveSender(w, x, mode);
}

Proof Prove(const ReceiverWitness& w, const ReceiverPublicInputs& x,
            const ProvingBackend& backend) {
  return backend.ProveReceiver(w, x);
}

bool Verify(const Proof& proof, const SenderPublicInputs& expected, const ProvingBackend& backend,
            CommitmentMode mode) {
  RelationTagName(proof.relation);
  if (proof.relation != SenderTag(mode)) return false;
  if (proof.public_inputs != Serialize(expected)) return false;
  return backend.VerifyProof(proof);
}

bool Verify(const Proof& proof, const ReceiverPublicInputs& expected,
            const ProvingBackend& backend) {
  RelationTagName(proof.relation);
  if (proof.relation != RelationTag::kReceiver) return false;
  if (proof.public_inputs != Serialize(expected)) return false;
  return backend.VerifyProof(proof);
}

}  // namespace zkss
