#include "zkss/relayer.h"

#include <algorithm>

#include "zkss/errors.h"

namespace zkss {

nlohmann::json ToJson(const RelayRequest& request) {
  return {{"proof", ToJson(request.proof)},
          {"publics", ToJson(request.publics)},
          {"rsaPublicKey", request.rsa_public_key
                               ? nlohmann::json(ToBase64(request.rsa_public_key->Encode()))
                               : nlohmann::json(nullptr)},
          {"submissionTime", request.submission_time}};
}

Ticket Mempool::Enqueue(Transaction tx) {
  std::lock_guard<std::mutex> lock(mu_);
  Ticket ticket{next_id_++, queue_.size()};
  queue_.push_back(PendingTransaction{ticket.id, std::move(tx)});
  return ticket;
}

Ticket Mempool::InjectAhead(Transaction tx, uint64_t ahead_of) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = std::find_if(queue_.begin(), queue_.end(),
                         [ahead_of](const PendingTransaction& p) { return p.id == ahead_of; });
  if (it == queue_.end()) throw NotFoundError("transaction is not pending");
  Ticket ticket{next_id_++, static_cast<size_t>(it - queue_.begin())};
  queue_.insert(it, PendingTransaction{ticket.id, std::move(tx)});
  return ticket;
}

std::vector<PendingSummary> Mempool::Peek() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<PendingSummary> out;
  out.reserve(queue_.size());
  for (const PendingTransaction& pending : queue_) {
    PendingSummary summary;
    summary.id = pending.id;
    summary.call = std::string(CallName(pending.tx.call));
    summary.origin = pending.tx.origin;
    if (const auto* submit = std::get_if<SubmitRandomnessCall>(&pending.tx.call)) {
      summary.randomness = submit->publics.r;
      summary.nullifier = submit->publics.null_s;
    } else if (const auto* disclose = std::get_if<DiscloseCall>(&pending.tx.call)) {
      summary.nullifier = disclose->publics.null_s;
    }
    out.push_back(std::move(summary));
  }
  return out;
}

std::optional<PendingTransaction> Mempool::PopFront() {
  std::lock_guard<std::mutex> lock(mu_);
  if (queue_.empty()) return std::nullopt;
  PendingTransaction front = std::move(queue_.front());
  queue_.pop_front();
  return front;
}

size_t Mempool::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queue_.size();
}

size_t Relayer::Relay(const RelayRequest& request, Mempool& mempool) {
  Transaction tx{std::nullopt,
                 SubmitRandomnessCall{request.proof, request.publics, request.rsa_public_key}};
  Ticket ticket = mempool.Enqueue(std::move(tx));
  nlohmann::json entry = ToJson(request);
  entry["position"] = ticket.position;
  log_.push_back(std::move(entry));
  return ticket.position;
}

std::string Relayer::LogJsonLines() const {
  std::string out;
  for (const nlohmann::json& entry : log_) {
    out += entry.dump();
    out += '\n';
  }
  return out;
}

}  // namespace zkss
