#ifndef ZKSS_RELATIONS_H_
#define ZKSS_RELATIONS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zkss/hash.h"
#include "zkss/primitives.h"
#include "zkss/signing.h"
#include "zkss/smt.h"

namespace zkss {

enum class RelationTag : uint8_t {
  kSender = 1,
  // Sender relation without the commitment-membership clause. Only used to
  // demonstrate the non-deterministic signature attack.
  kSenderUncommitted = 2,
  kReceiver = 3,
};

// Throw MalformedInputError for unknown tags / names.
std::string_view RelationTagName(RelationTag tag);
RelationTag RelationTagFromName(std::string_view name);

enum class CommitmentMode { kRequired, kDisabled };

struct SenderWitness {
  Signature sig;
  Address address;
  MerkleProof participant_proof;
  MerkleProof commitment_proof;
};

struct SenderPublicInputs {
  FieldElement r;
  EventId event_id;
  FieldElement root_p;
  FieldElement root_c;
  Nullifier null_s;

  bool operator==(const SenderPublicInputs&) const = default;
};

struct ReceiverWitness {
  Signature sig;
};

struct ReceiverPublicInputs {
  Address address;
  EventId event_id;
  Nullifier null_s;

  bool operator==(const ReceiverPublicInputs&) const = default;
};

// Ordered byte encodings of the public inputs.
using PublicInputs = std::vector<Bytes>;

// (r, eventId, root_p, root_c, null_s)
PublicInputs Serialize(const SenderPublicInputs& x);
// (address, eventId, null_s)
PublicInputs Serialize(const ReceiverPublicInputs& x);

nlohmann::json ToJson(const SenderPublicInputs& x);
nlohmann::json ToJson(const ReceiverPublicInputs& x);
SenderPublicInputs SenderPublicInputsFromJson(const nlohmann::json& j);
ReceiverPublicInputs ReceiverPublicInputsFromJson(const nlohmann::json& j);

enum class RelationStatus { kSatisfied, kUnsatisfied, kMalformed };

struct RelationResult {
  RelationStatus status = RelationStatus::kMalformed;
  int failed_clause = 0;  // 0 when satisfied or malformed
  std::string detail;

  bool satisfied() const { return status == RelationStatus::kSatisfied; }
};

struct SenderRelationResult : RelationResult {
  Nullifier nullifier;  // hashToField(sig.s), derived from the witness
  FieldElement anchor;  // r * r, bound into the proof transcript
};

// Clauses: (1) hash(sig.s) == null_s; (2) ecrecover(sig, address || eventId)
// == address; (3) participant membership under root_p; (4) commitment
// membership of hash(sig) under root_c (skipped when mode is kDisabled);
// (5) anchor = r * r.
SenderRelationResult CheckSenderRelation(const SenderWitness& w, const SenderPublicInputs& x,
                                         CommitmentMode mode = CommitmentMode::kRequired);

// Clauses: (1) null_r = hash(sig.s); (2) ecrecover(sig, address || eventId)
// == address; (3) null_r != null_s. null_r never leaves this function.
RelationResult CheckReceiverRelation(const ReceiverWitness& w, const ReceiverPublicInputs& x);

struct Proof {
  RelationTag relation = RelationTag::kSender;
  PublicInputs public_inputs;
  Bytes blob;

  bool operator==(const Proof&) const = default;
};

nlohmann::json ToJson(const Proof& proof);
// Throws MalformedInputError for unknown relation names, ParseError for bad hex.
Proof ProofFromJson(const nlohmann::json& j);

// Proving system seam. A backend must refuse to prove unsatisfied relations
// (ProverRefusedError) and reject malformed inputs (MalformedInputError).
class ProvingBackend {
 public:
  virtual ~ProvingBackend() = default;

  virtual std::string_view name() const = 0;
  virtual Proof ProveSender(const SenderWitness& w, const SenderPublicInputs& x,
                            CommitmentMode mode) const = 0;
  virtual Proof ProveReceiver(const ReceiverWitness& w, const ReceiverPublicInputs& x) const = 0;
  // Checks the proof against the public inputs it carries.
  virtual bool VerifyProof(const Proof& proof) const = 0;
};

// Desk-scale stand-in for a SNARK. Proving runs the relation check directly;
// the blob is hashToField(tag || public inputs || anchor || backend secret),
// so it carries no witness bytes and cannot be produced without the secret.
class TransparentBackend : public ProvingBackend {
 public:
  explicit TransparentBackend(const Digest& secret) : secret_(secret) {}

  std::string_view name() const override { return "transparent"; }
  Proof ProveSender(const SenderWitness& w, const SenderPublicInputs& x,
                    CommitmentMode mode) const override;
  Proof ProveReceiver(const ReceiverWitness& w, const ReceiverPublicInputs& x) const override;
  bool VerifyProof(const Proof& proof) const override;

 private:
  Bytes Attest(RelationTag tag, const PublicInputs& inputs) const;

  Digest secret_;
};

RelationTag SenderTag(CommitmentMode mode);

Proof Prove(const SenderWitness& w, const SenderPublicInputs& x, const ProvingBackend& backend,
            CommitmentMode mode = CommitmentMode::kRequired);
Proof Prove(const ReceiverWitness& w, const ReceiverPublicInputs& x,
            const ProvingBackend& backend);

// True iff the proof carries the expected relation tag, exactly the expected
// public inputs in order, and the backend accepts it.
bool Verify(const Proof& proof, const SenderPublicInputs& expected, const ProvingBackend& backend,
            CommitmentMode mode = CommitmentMode::kRequired);
bool Verify(const Proof& proof, const ReceiverPublicInputs& expected,
            const ProvingBackend& backend);

}  // namespace zkss

#endif  // ZKSS_RELATIONS_H_
