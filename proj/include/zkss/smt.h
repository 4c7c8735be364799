#ifndef ZKSS_SMT_H_
#define ZKSS_SMT_H_

#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "zkss/primitives.h"

namespace zkss {

// Inclusion proof. `siblings` runs leaf-to-root; bit i of `index` (least
// significant first) says whether the running hash is the right child at
// level i.
struct MerkleProof {
  FieldElement index;
  std::vector<FieldElement> siblings;

  bool operator==(const MerkleProof&) const = default;
};

nlohmann::json ToJson(const MerkleProof& proof);
MerkleProof MerkleProofFromJson(const nlohmann::json& j);

// hash(0x00 || index || value)
FieldElement SmtLeafHash(const FieldElement& index, const FieldElement& value);
// hash(0x01 || left || right)
FieldElement SmtNodeHash(const FieldElement& left, const FieldElement& right);

bool MerkleVerify(const FieldElement& x, const MerkleProof& proof, const FieldElement& root);

// Fixed-depth sparse Merkle tree. Leaves are addressed by the low `depth`
// bits of their index; empty subtrees hash to per-level default values with
// an all-zero empty leaf. Insert-only.
class SparseMerkleTree {
 public:
  static constexpr int kDefaultDepth = 160;
  static constexpr int kMaxDepth = 256;

  explicit SparseMerkleTree(int depth = kDefaultDepth);

  // Throws DuplicateKeyError if the index path is already occupied.
  void Insert(const FieldElement& index, const FieldElement& value);

  bool Contains(const FieldElement& index) const;
  std::optional<FieldElement> Get(const FieldElement& index) const;

  // Throws NotFoundError for an absent index.
  MerkleProof Prove(const FieldElement& index) const;

  const FieldElement& root() const { return root_; }
  int depth() const { return depth_; }
  size_t size() const { return leaves_.size(); }

  // Root recomputed from the leaf set alone, ignoring cached interior nodes.
  FieldElement RecomputeRoot() const;
  bool AuditRoot() const { return RecomputeRoot() == root_; }

  // Hash of an empty subtree whose root sits `level` levels above the leaves.
  static const FieldElement& DefaultHash(int level);
  static FieldElement EmptyRoot(int depth) { return DefaultHash(depth); }

 private:
  friend class SparseMerkleTreeTestPeer;

  using Path = FieldElement::Repr;
  struct Leaf {
    FieldElement index;
    FieldElement value;
  };

  Path PathOf(const FieldElement& index) const;
  const FieldElement& NodeAt(int level, const Path& key) const;

  int depth_;
  std::map<Path, Leaf> leaves_;
  // nodes_[level][key]: non-default node hashes; level 0 holds leaf hashes.
  std::vector<std::map<Path, FieldElement>> nodes_;
  FieldElement root_;
};

}  // namespace zkss

#endif  // ZKSS_SMT_H_
