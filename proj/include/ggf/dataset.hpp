#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ggf/matrix.hpp"

namespace ggf {

// Whose preference an evaluation instance measures.
enum class Role : std::uint8_t { kGroup = 0, kMember = 1 };

// One held-out positive. An empty candidate list means the positive is ranked
// against every item (full-ranking protocol).
struct EvalInstance {
  Role role = Role::kGroup;
  Index subject = 0;
  Index positive = 0;
  std::vector<Index> candidates;

  bool all_items() const { return candidates.empty(); }
  friend bool operator==(const EvalInstance&, const EvalInstance&) = default;
};

// Binary training interactions plus held-out evaluation instances.
//
//   member_item  R_u  |U| × |I|
//   group_item   R_g  |G| × |I|
//   membership   M    |G| × |U|,  M[g, u] = 1 iff member u belongs to group g
struct Dataset {
  Index n_members = 0;
  Index n_items = 0;
  Index n_groups = 0;
  SparseMatrixd member_item;
  SparseMatrixd group_item;
  SparseMatrixd membership;
  std::vector<EvalInstance> val;
  std::vector<EvalInstance> test;

  // Throws SchemaError / ValidationError on the first violated invariant.
  void validate() const;

  // Training row of a subject as a dense signal over items.
  DenseRowd signal(Role role, Index subject) const;
  const SparseMatrixd& train(Role role) const {
    return role == Role::kGroup ? group_item : member_item;
  }
  Index n_subjects(Role role) const { return role == Role::kGroup ? n_groups : n_members; }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct DatasetStats {
  Index members = 0;
  Index items = 0;
  Index groups = 0;
  // Training interactions plus held-out positives.
  Index member_item_interactions = 0;
  Index group_item_interactions = 0;
};

DatasetStats stats(const Dataset& ds);
std::string format_stats(const DatasetStats& s);

// Reads the directory layout used by the public group-recommendation
// benchmarks:
//   groupMember.txt                  "g m1,m2,..."
//   {group,user}RatingTrain.txt      "id item [ignored...]"
//   {group,user}RatingVal.txt        optional, same layout
//   {group,user}RatingTest.txt       optional for members
//   {group,user}Rating[Test]Negative.txt, {group,user}RatingValNegative.txt
//                                    optional, "(id,item) neg1 neg2 ..."
Dataset load_agree_format(const std::filesystem::path& dir);

// Canonical interchange:
//   ggf-v1 <n_members> <n_items> <n_groups>
//   #membership     group \t member
//   #member-item    member \t item
//   #group-item     group \t item
//   #val / #test    role \t subject \t positive [\t candidate ...]
// role is 0 for groups and 1 for members; an instance without candidates is
// ranked against all items.
struct CanonicalLoad {
  Dataset dataset;
  std::size_t duplicates_dropped = 0;
};

CanonicalLoad read_canonical(std::istream& in, const std::string& name = "<stream>");
CanonicalLoad load_canonical(const std::filesystem::path& path);
void write_canonical(std::ostream& out, const Dataset& ds);
void save_canonical(const Dataset& ds, const std::filesystem::path& path);

// Replaces every instance's candidates with the positive followed by
// `per_positive` items drawn uniformly without replacement from those the
// subject has neither trained on nor holds out as any positive.
Dataset sample_negatives(const Dataset& ds, Index per_positive, std::uint64_t seed);

// Drops candidate lists so every instance is ranked against all items.
Dataset with_full_ranking(const Dataset& ds);

std::vector<EvalInstance> select_role(const std::vector<EvalInstance>& instances, Role role);

// Stable hash of the training matrices, which fully determine the graphs.
std::uint64_t dataset_hash(const Dataset& ds);

}  // namespace ggf
