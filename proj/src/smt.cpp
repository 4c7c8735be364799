#include "zkss/smt.h"

#include <array>
#include <string>

#include "zkss/errors.h"
#include "zkss/hash.h"

namespace zkss {
namespace {

using Path = FieldElement::Repr;

bool LowBit(const Path& p) { return (p.back() & 1) != 0; }

bool BitAt(const Path& p, int i) { return ((p[p.size() - 1 - i / 8] >> (i % 8)) & 1) != 0; }

Path ShiftRight1(const Path& p) {
  Path out{};
  uint8_t carry = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    out[i] = static_cast<uint8_t>((p[i] >> 1) | (carry << 7));
    carry = p[i] & 1;
  }
  return out;
}

Path FlipLowBit(Path p) {
  p.back() ^= 1;
  return p;
}

Path MaskLowBits(const Path& p, int bits) {
  Path out{};
  for (int i = 0; i < bits; ++i) {
    if (BitAt(p, i)) out[out.size() - 1 - i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }
  return out;
}

std::vector<FieldElement> ComputeDefaults() {
  std::vector<FieldElement> defaults;
  defaults.reserve(SparseMerkleTree::kMaxDepth + 1);
  defaults.push_back(FieldElement());
  for (int level = 0; level < SparseMerkleTree::kMaxDepth; ++level) {
    defaults.push_back(SmtNodeHash(defaults.back(), defaults.back()));
  }
  return defaults;
}

}  // namespace

nlohmann::json ToJson(const MerkleProof& proof) {
  nlohmann::json siblings = nlohmann::json::array();
  for (const FieldElement& s : proof.siblings) siblings.push_back(s.ToHex());
  return {{"index", proof.index.ToHex()}, {"siblings", siblings}};
}

MerkleProof MerkleProofFromJson(const nlohmann::json& j) {
  MerkleProof proof;
  proof.index = FieldElement::FromHex(j.at("index").get<std::string>());
  for (const auto& s : j.at("siblings")) {
    proof.siblings.push_back(FieldElement::FromHex(s.get<std::string>()));
  }
  return proof;
}

FieldElement SmtLeafHash(const FieldElement& index, const FieldElement& value) {
  static constexpr std::array<uint8_t, 1> kLeafTag = {0x00};
  return FieldElement::Reduce(Sha256({kLeafTag, index.bytes(), value.bytes()}));
}

FieldElement SmtNodeHash(const FieldElement& left, const FieldElement& right) {
  static constexpr std::array<uint8_t, 1> kNodeTag = {0x01};
  return FieldElement::Reduce(Sha256({kNodeTag, left.bytes(), right.bytes()}));
}

bool MerkleVerify(const FieldElement& x, const MerkleProof& proof, const FieldElement& root) {
  if (proof.siblings.size() > static_cast<size_t>(SparseMerkleTree::kMaxDepth)) return false;
  FieldElement running = SmtLeafHash(proof.index, x);
  const Path& bits = proof.index.bytes();
  for (size_t level = 0; level < proof.siblings.size(); ++level) {
    const FieldElement& sibling = proof.siblings[level];
    running = BitAt(bits, static_cast<int>(level)) ? SmtNodeHash(sibling, running)
                                                   : SmtNodeHash(running, sibling);
  }
  return running == root;
}

const FieldElement& SparseMerkleTree::DefaultHash(int level) {
  static const std::vector<FieldElement> defaults = ComputeDefaults();
  return defaults.at(static_cast<size_t>(level));
}

SparseMerkleTree::SparseMerkleTree(int depth)
    : depth_(depth), nodes_(static_cast<size_t>(depth) + 1) {
  if (depth < 1 || depth > kMaxDepth) {
    throw RangeError("tree depth must be in [1, 256], got " + std::to_string(depth));
  }
  root_ = DefaultHash(depth);
}

SparseMerkleTree::Path SparseMerkleTree::PathOf(const FieldElement& index) const {
  return MaskLowBits(index.bytes(), depth_);
}

const FieldElement& SparseMerkleTree::NodeAt(int level, const Path& key) const {
  const auto& layer = nodes_[static_cast<size_t>(level)];
  auto it = layer.find(key);
  return it == layer.end() ? DefaultHash(level) : it->second;
}

void SparseMerkleTree::Insert(const FieldElement& index, const FieldElement& value) {
  Path key = PathOf(index);
  if (leaves_.contains(key)) {
    throw DuplicateKeyError("index already occupied: " + index.ToHex());
  }
  leaves_.emplace(key, Leaf{index, value});

  FieldElement running = SmtLeafHash(index, value);
  nodes_[0][key] = running;
  for (int level = 0; level < depth_; ++level) {
    const FieldElement& sibling = NodeAt(level, FlipLowBit(key));
    running = LowBit(key) ? SmtNodeHash(sibling, running) : SmtNodeHash(running, sibling);
    key = ShiftRight1(key);
    nodes_[static_cast<size_t>(level) + 1][key] = running;
  }
  root_ = running;
}

bool SparseMerkleTree::Contains(const FieldElement& index) const {
  auto it = leaves_.find(PathOf(index));
  return it != leaves_.end() && it->second.index == index;
}

std::optional<FieldElement> SparseMerkleTree::Get(const FieldElement& index) const {
  auto it = leaves_.find(PathOf(index));
  if (it == leaves_.end() || it->second.index != index) return std::nullopt;
  return it->second.value;
}

MerkleProof SparseMerkleTree::Prove(const FieldElement& index) const {
  if (!Contains(index)) throw NotFoundError("no leaf at index " + index.ToHex());
  MerkleProof proof;
  proof.index = index;
  proof.siblings.reserve(static_cast<size_t>(depth_));
  Path key = PathOf(index);
  for (int level = 0; level < depth_; ++level) {
    proof.siblings.push_back(NodeAt(level, FlipLowBit(key)));
    key = ShiftRight1(key);
  }
  return proof;
}

FieldElement SparseMerkleTree::RecomputeRoot() const {
  std::map<Path, FieldElement> layer;
  for (const auto& [path, leaf] : leaves_) layer[path] = SmtLeafHash(leaf.index, leaf.value);
  for (int level = 0; level < depth_; ++level) {
    std::map<Path, FieldElement> parents;
    for (const auto& [key, hash] : layer) {
      Path parent = ShiftRight1(key);
      if (parents.contains(parent)) continue;
      auto sibling_it = layer.find(FlipLowBit(key));
      const FieldElement& sibling =
          sibling_it == layer.end() ? DefaultHash(level) : sibling_it->second;
      parents[parent] = LowBit(key) ? SmtNodeHash(sibling, hash) : SmtNodeHash(hash, sibling);
    }
    layer = std::move(parents);
  }
  return layer.empty() ? DefaultHash(depth_) : layer.begin()->second;
}

}  // namespace zkss
