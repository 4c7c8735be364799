#ifndef ZKSS_RELAYER_H_
#define ZKSS_RELAYER_H_

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zkss/contract.h"

namespace zkss {

// Step-2 payload handed to the relayer. Has no field that can carry a
// participant address.
struct RelayRequest {
  Proof proof;
  SenderPublicInputs publics;
  std::optional<RsaPublicKey> rsa_public_key;
  uint64_t submission_time = 0;
};

nlohmann::json ToJson(const RelayRequest& request);

struct PendingTransaction {
  uint64_t id = 0;
  Transaction tx;
};

// Public fields of a pending transaction, as any mempool watcher sees them.
struct PendingSummary {
  uint64_t id = 0;
  std::string call;
  std::optional<Address> origin;
  std::optional<FieldElement> randomness;  // submitRandomness
  std::optional<Nullifier> nullifier;      // submitRandomness: null_s; disclose: target null_s
};

struct Ticket {
  uint64_t id = 0;
  size_t position = 0;
};

// FIFO of pending transactions. Enqueue is safe from concurrent producers;
// draining into the contract is single-threaded.
class Mempool {
 public:
  Ticket Enqueue(Transaction tx);
  // Adversary hook: queue `tx` directly ahead of pending transaction
  // `ahead_of`. Throws NotFoundError if that transaction is not pending.
  Ticket InjectAhead(Transaction tx, uint64_t ahead_of);

  std::vector<PendingSummary> Peek() const;
  std::optional<PendingTransaction> PopFront();

  size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  mutable std::mutex mu_;
  std::deque<PendingTransaction> queue_;
  uint64_t next_id_ = 0;
};

// Honest-but-curious relayer: forwards step-2 submissions with the origin
// stripped and keeps a log of what it forwarded.
class Relayer {
 public:
  // Returns the queued position.
  size_t Relay(const RelayRequest& request, Mempool& mempool);

  const std::vector<nlohmann::json>& log() const { return log_; }
  std::string LogJsonLines() const;

 private:
  std::vector<nlohmann::json> log_;
};

}  // namespace zkss

#endif  // ZKSS_RELAYER_H_
