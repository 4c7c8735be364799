#include <gtest/gtest.h>

#include "test_support.h"
#include "zkss/contract.h"
#include "zkss/drbg.h"
#include "zkss/errors.h"

namespace zkss {
namespace {

class ContractTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Drbg rng("contract-test", 1);
    event_ = EventId::Create(Address::FromHex("0x5fbdb2315678afecb367f032d93f642f64180aa3"), 1);
    for (int i = 0; i < kPlayers; ++i) {
      keys_.push_back(KeyPair::Generate(rng));
      sigs_.push_back(SignDeterministic(keys_.back(), BuildMessage(keys_.back().address(), event_)));
    }
    Drbg outsider_rng("contract-test", 2);
    outsider_ = KeyPair::Generate(outsider_rng).address();
  }

  static constexpr int kPlayers = 3;

  std::vector<Address> Addresses() const {
    std::vector<Address> out;
    for (const auto& k : keys_) out.push_back(k.address());
    return out;
  }

  Contract MakeContract(CommitmentMode mode = CommitmentMode::kRequired) const {
    return Contract(ContractConfig{event_, 160, mode}, backend_);
  }

  void RegisterAll(Contract& c) const { ASSERT_TRUE(c.Register(keys_[0].address(), Addresses()).accepted()); }

  void CommitAll(Contract& c) const {
    for (int i = 0; i < kPlayers; ++i) {
      ASSERT_TRUE(c.Commit(keys_[i].address(), CommitmentHash(sigs_[i])).accepted());
    }
  }

  SubmitRandomnessCall Submission(const Contract& c, int i, uint64_t r = 0) const {
    SenderPublicInputs x{FieldElement::FromUint64(r ? r : 100 + i), event_, c.participants().root(),
                         c.commitments().root(), DeriveNullifier(sigs_[i])};
    SenderWitness w{sigs_[i], keys_[i].address(),
                    c.participants().Prove(HashToField(keys_[i].address().bytes())), MerkleProof{}};
    if (c.commitment_mode() == CommitmentMode::kRequired) {
      w.commitment_proof = c.commitments().Prove(CommitmentHash(sigs_[i]).value);
    }
    return SubmitRandomnessCall{Prove(w, x, backend_, c.commitment_mode()), x, std::nullopt};
  }

  void SubmitAll(Contract& c) const {
    for (int i = 0; i < kPlayers; ++i) ASSERT_TRUE(c.SubmitRandomness(std::nullopt, Submission(c, i)).accepted());
  }

  DiscloseCall Disclosure(int receiver, int sender) const {
    ReceiverPublicInputs x{keys_[receiver].address(), event_, DeriveNullifier(sigs_[sender])};
    return DiscloseCall{Prove(ReceiverWitness{sigs_[receiver]}, x, backend_), x, std::nullopt};
  }

  EventId event_;
  std::vector<KeyPair> keys_;
  std::vector<Signature> sigs_;
  Address outsider_;
  TransparentBackend backend_{Sha256(AsBytes("contract-test"))};
};

TEST_F(ContractTest, RegisterRules) {
  Contract c = MakeContract();
  EXPECT_TRUE(c.Register(keys_[0].address(), {keys_[0].address()}).Is(RevertReason::kTooFew));
  auto dup = Addresses();
  dup.push_back(dup[0]);
  EXPECT_TRUE(c.Register(keys_[0].address(), dup).Is(RevertReason::kDuplicate));
  EXPECT_EQ(c.phase(), Phase::kSetup);
  EXPECT_EQ(c.participants().root(), SparseMerkleTree::EmptyRoot(160));
  RegisterAll(c);
  EXPECT_EQ(c.phase(), Phase::kCommit);
  EXPECT_EQ(c.participant_count(), 3u);
  EXPECT_TRUE(c.Register(keys_[0].address(), Addresses()).Is(RevertReason::kPhase));
  for (const auto& k : keys_) EXPECT_TRUE(c.IsParticipant(k.address()));
  EXPECT_FALSE(c.IsParticipant(outsider_));

  Contract direct = MakeContract(CommitmentMode::kDisabled);
  RegisterAll(direct);
  EXPECT_EQ(direct.phase(), Phase::kDetermine);
}

TEST_F(ContractTest, CommitRules) {
  Contract c = MakeContract();
  EXPECT_TRUE(c.Commit(keys_[0].address(), CommitmentHash(sigs_[0])).Is(RevertReason::kPhase));
  RegisterAll(c);
  EXPECT_TRUE(c.Commit(std::nullopt, CommitmentHash(sigs_[0])).Is(RevertReason::kMissingOrigin));
  EXPECT_TRUE(c.Commit(outsider_, CommitmentHash(sigs_[0])).Is(RevertReason::kNotParticipant));
  ASSERT_TRUE(c.Commit(keys_[0].address(), CommitmentHash(sigs_[0])).accepted());
  EXPECT_TRUE(c.Commit(keys_[0].address(), CommitmentHash(sigs_[1])).Is(RevertReason::kAlreadyCommitted));
  EXPECT_TRUE(c.Commit(keys_[1].address(), CommitmentHash(sigs_[0])).Is(RevertReason::kDuplicate));
  ASSERT_TRUE(c.Commit(keys_[1].address(), CommitmentHash(sigs_[1])).accepted());
  EXPECT_EQ(c.phase(), Phase::kCommit);
  ASSERT_TRUE(c.Commit(keys_[2].address(), CommitmentHash(sigs_[2])).accepted());
  EXPECT_EQ(c.phase(), Phase::kDetermine);
}

TEST_F(ContractTest, SubmitRules) {
  Contract c = MakeContract();
  RegisterAll(c);
  for (int i = 0; i < 2; ++i) ASSERT_TRUE(c.Commit(keys_[i].address(), CommitmentHash(sigs_[i])).accepted());
  SubmitRandomnessCall early = Submission(c, 0);
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, early).Is(RevertReason::kPhase));
  ASSERT_TRUE(c.Commit(keys_[2].address(), CommitmentHash(sigs_[2])).accepted());
  // Proof built before the last commitment.
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, early).Is(RevertReason::kStaleRoot));

  SubmitRandomnessCall call = Submission(c, 0);
  EXPECT_TRUE(c.SubmitRandomness(keys_[0].address(), call).Is(RevertReason::kNotRelayed));

  SubmitRandomnessCall wrong_event = call;
  wrong_event.publics.event_id = EventId::Create(event_.contract(), 2);
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, wrong_event).Is(RevertReason::kWrongEvent));

  SubmitRandomnessCall forged = call;
  forged.publics.r = FieldElement::FromUint64(5);
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, forged).Is(RevertReason::kBadProof));

  Drbg rsa_rng("contract-test-rsa", 1);
  SubmitRandomnessCall mismatched = call;
  mismatched.rsa_public_key = RsaKeyPair::Generate(rsa_rng).public_key;
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, mismatched).Is(RevertReason::kRandomnessMismatch));

  PublicView before = c.Snapshot();
  EXPECT_TRUE(before.senders.empty());
  ASSERT_TRUE(c.SubmitRandomness(std::nullopt, call).accepted());
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, call).Is(RevertReason::kNullifierSpent));
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, Submission(c, 0, 999)).Is(RevertReason::kNullifierSpent));

  ASSERT_TRUE(c.SubmitRandomness(std::nullopt, Submission(c, 1)).accepted());
  ASSERT_TRUE(c.SubmitRandomness(std::nullopt, Submission(c, 2)).accepted());
  EXPECT_EQ(c.phase(), Phase::kDisclose);
  // Still nullifier-spent once the step is closed.
  EXPECT_TRUE(c.SubmitRandomness(std::nullopt, call).Is(RevertReason::kNullifierSpent));
}

TEST_F(ContractTest, SubmitWithMatchingRsaKey) {
  Contract c = MakeContract(CommitmentMode::kDisabled);
  RegisterAll(c);
  Drbg rsa_rng("contract-test-rsa", 2);
  RsaPublicKey key = RsaKeyPair::Generate(rsa_rng).public_key;
  SubmitRandomnessCall call = Submission(c, 0);
  call.publics.r = key.Fingerprint();
  SenderWitness w{sigs_[0], keys_[0].address(),
                  c.participants().Prove(HashToField(keys_[0].address().bytes())), MerkleProof{}};
  call.proof = Prove(w, call.publics, backend_, CommitmentMode::kDisabled);
  call.rsa_public_key = key;
  ASSERT_TRUE(c.SubmitRandomness(std::nullopt, call).accepted());
  EXPECT_EQ(c.senders()[0].rsa_public_key, key);
}

TEST_F(ContractTest, RejectedTransactionsLeaveStateUntouched) {
  Contract c = MakeContract();
  RegisterAll(c);
  CommitAll(c);
  PublicView before = c.Snapshot();
  SubmitRandomnessCall call = Submission(c, 0);
  call.proof.blob[3] ^= 1;
  EXPECT_FALSE(c.SubmitRandomness(std::nullopt, call).accepted());
  EXPECT_FALSE(c.Commit(keys_[0].address(), CommitmentHash(sigs_[0])).accepted());
  EXPECT_FALSE(c.Register(keys_[0].address(), Addresses()).accepted());
  EXPECT_EQ(c.Snapshot(), before);
}

TEST_F(ContractTest, DiscloseRules) {
  Contract c = MakeContract();
  RegisterAll(c);
  CommitAll(c);
  EXPECT_TRUE(c.Disclose(keys_[0].address(), Disclosure(0, 1)).Is(RevertReason::kPhase));
  SubmitAll(c);

  EXPECT_TRUE(c.Disclose(std::nullopt, Disclosure(0, 1)).Is(RevertReason::kMissingOrigin));
  EXPECT_TRUE(c.Disclose(keys_[1].address(), Disclosure(0, 1)).Is(RevertReason::kOriginMismatch));

  DiscloseCall wrong_event = Disclosure(0, 1);
  wrong_event.publics.event_id = EventId::Create(event_.contract(), 3);
  EXPECT_TRUE(c.Disclose(keys_[0].address(), wrong_event).Is(RevertReason::kWrongEvent));

  DiscloseCall outsider = Disclosure(0, 1);
  outsider.publics.address = outsider_;
  EXPECT_TRUE(c.Disclose(outsider_, outsider).Is(RevertReason::kNotParticipant));

  DiscloseCall unknown = Disclosure(0, 1);
  unknown.publics.null_s = Nullifier{FieldElement::FromUint64(42)};
  EXPECT_TRUE(c.Disclose(keys_[0].address(), unknown).Is(RevertReason::kNoSuchSender));

  // Self-pick with a copied blob from a legitimate proof.
  DiscloseCall self = Disclosure(0, 1);
  self.publics.null_s = DeriveNullifier(sigs_[0]);
  EXPECT_TRUE(c.Disclose(keys_[0].address(), self).Is(RevertReason::kBadProof));

  ASSERT_TRUE(c.Disclose(keys_[0].address(), Disclosure(0, 1)).accepted());
  EXPECT_TRUE(c.Disclose(keys_[0].address(), Disclosure(0, 2)).Is(RevertReason::kAlreadyDisclosed));
  EXPECT_TRUE(c.Disclose(keys_[2].address(), Disclosure(2, 1)).Is(RevertReason::kCollision));
  ASSERT_TRUE(c.Disclose(keys_[1].address(), Disclosure(1, 2)).accepted());
  EXPECT_EQ(c.phase(), Phase::kDisclose);
  ASSERT_TRUE(c.Disclose(keys_[2].address(), Disclosure(2, 0)).accepted());
  EXPECT_EQ(c.phase(), Phase::kComplete);
  EXPECT_TRUE(c.Disclose(keys_[2].address(), Disclosure(2, 0)).Is(RevertReason::kPhase));
}

TEST_F(ContractTest, SnapshotHasNoSenderAddresses) {
  Contract c = MakeContract();
  RegisterAll(c);
  CommitAll(c);
  SubmitAll(c);
  PublicView view = c.Snapshot();
  ASSERT_EQ(view.senders.size(), 3u);
  nlohmann::json senders = ToJson(view)["senders"];
  for (size_t s = 0; s < view.senders.size(); ++s) {
    for (const auto& k : keys_) {
      EXPECT_EQ(senders[s].dump().find(k.address().ToHex().substr(2)), std::string::npos);
    }
    EXPECT_FALSE(view.senders[s].assigned_receiver);
  }
  EXPECT_EQ(PublicViewFromJson(ToJson(view)), view);
}

TEST_F(ContractTest, TransactionAndReceiptJson) {
  Contract c = MakeContract();
  RegisterAll(c);
  CommitAll(c);
  std::vector<Transaction> txs = {
      Transaction{keys_[0].address(), RegisterCall{Addresses()}},
      Transaction{keys_[1].address(), CommitCall{CommitmentHash(sigs_[1])}},
      Transaction{std::nullopt, Submission(c, 2)},
      Transaction{keys_[0].address(), Disclosure(0, 1)},
  };
  for (const Transaction& tx : txs) {
    nlohmann::json j = ToJson(tx);
    EXPECT_EQ(ToJson(TransactionFromJson(j)), j);
  }
  EXPECT_EQ(CallName(txs[2].call), "submitRandomness");
  EXPECT_EQ(Receipt::Accepted().ToString(), "ACCEPTED");
  EXPECT_EQ(Receipt::Reverted(RevertReason::kNullifierSpent).ToString(), "REVERTED(nullifier-spent)");
  Receipt r = Receipt::Reverted(RevertReason::kStaleRoot);
  EXPECT_EQ(ReceiptFromJson(ToJson(r)), r);
  EXPECT_EQ(PhaseFromName(PhaseName(Phase::kDisclose)), Phase::kDisclose);
  EXPECT_EQ(RevertReasonFromName("collision"), RevertReason::kCollision);
}

TEST_F(ContractTest, ApplyDispatches) {
  Contract c = MakeContract();
  EXPECT_TRUE(c.Apply(Transaction{keys_[0].address(), RegisterCall{Addresses()}}).accepted());
  EXPECT_TRUE(c.Apply(Transaction{keys_[0].address(), CommitCall{CommitmentHash(sigs_[0])}}).accepted());
  EXPECT_TRUE(c.Apply(Transaction{keys_[0].address(), CommitCall{CommitmentHash(sigs_[0])}})
                  .Is(RevertReason::kAlreadyCommitted));
}

}  // namespace
}  // namespace zkss
