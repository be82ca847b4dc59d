#include "ggf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>

#include <fmt/core.h>

#include "ggf/matrix_io.hpp"
#include "ggf/rng.hpp"

namespace ggf {
namespace {

// Ids beyond this are treated as corrupt rather than as a huge dataset.
constexpr std::int64_t kMaxId = (std::int64_t{1} << 31) - 1;

std::vector<std::string_view> split(std::string_view line, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && seps.find(line[i]) != std::string_view::npos) ++i;
    std::size_t j = i;
    while (j < line.size() && seps.find(line[j]) == std::string_view::npos) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, name_, line_no_); }

  Index parse_id(std::string_view tok) const {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec == std::errc::result_out_of_range) {
      throw SchemaError(fmt::format("{}:{}: index '{}' overflows", name_, line_no_, tok));
    }
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      fail(fmt::format("expected an integer id, got '{}'", tok));
    }
    if (v < 0) throw SchemaError(fmt::format("{}:{}: negative index {}", name_, line_no_, v));
    if (v > kMaxId) throw SchemaError(fmt::format("{}:{}: index {} overflows", name_, line_no_, v));
    return static_cast<Index>(v);
  }

  const std::string& name() const { return name_; }
  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

using Pairs = std::vector<std::pair<Index, Index>>;

SparseMatrixd binary_matrix(Index rows, Index cols, const Pairs& pairs, std::size_t* dups = nullptr) {
  std::vector<Triplet<double>> entries;
  entries.reserve(pairs.size());
  for (const auto& [r, c] : pairs) {
    if (r >= rows || c >= cols) {
      throw SchemaError(fmt::format("interaction ({}, {}) outside declared {}x{}", r, c, rows, cols));
    }
    entries.push_back({r, c, 1.0});
  }
  return SparseMatrixd::from_triplets(rows, cols, std::move(entries), Duplicates::kKeep, dups);
}

bool has_entry(const SparseMatrixd& m, Index r, Index c) {
  const auto cols = m.row_cols(r);
  return std::binary_search(cols.begin(), cols.end(), static_cast<ColIndex>(c));
}

const char* section_name(Role role) { return role == Role::kGroup ? "group" : "member"; }

// Sorted positives of every subject of one role across val and test.
std::vector<std::vector<Index>> held_out_positives(const Dataset& ds, Role role) {
  std::vector<std::vector<Index>> out(ds.n_subjects(role));
  for (const auto* list : {&ds.val, &ds.test}) {
    for (const auto& inst : *list) {
      if (inst.role == role && inst.subject < out.size()) out[inst.subject].push_back(inst.positive);
    }
  }
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

}  // namespace

void Dataset::validate() const {
  auto check_shape = [](const SparseMatrixd& m, Index rows, Index cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
      throw SchemaError(fmt::format("{} is {}x{}, expected {}x{}", what, m.rows(), m.cols(), rows, cols));
    }
  };
  check_shape(member_item, n_members, n_items, "member-item matrix");
  check_shape(group_item, n_groups, n_items, "group-item matrix");
  check_shape(membership, n_groups, n_members, "membership matrix");
  for (const auto* m : {&member_item, &group_item, &membership}) {
    for (const double v : m->values()) {
      if (v != 1.0) throw ValidationError("interaction matrices must be binary");
    }
  }
  for (Index g = 0; g < n_groups; ++g) {
    if (membership.row_nnz(g) == 0) throw ValidationError(fmt::format("group {} has no members", g));
  }
  for (const auto* list : {&val, &test}) {
    const char* split_name = list == &val ? "val" : "test";
    for (const auto& inst : *list) {
      const Index n_subj = n_subjects(inst.role);
      if (inst.subject >= n_subj) {
        throw SchemaError(fmt::format("{} instance: {} {} out of range", split_name,
                                      section_name(inst.role), inst.subject));
      }
      if (inst.positive >= n_items) {
        throw SchemaError(fmt::format("{} instance: item {} out of range", split_name, inst.positive));
      }
      const auto& tr = train(inst.role);
      if (has_entry(tr, inst.subject, inst.positive)) {
        throw ValidationError(fmt::format("{} positive ({} {}, item {}) also appears in training data",
                                          split_name, section_name(inst.role), inst.subject,
                                          inst.positive));
      }
      if (inst.candidates.empty()) continue;
      std::vector<Index> sorted = inst.candidates;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError(fmt::format("{} instance ({} {}, item {}) has duplicate candidates",
                                          split_name, section_name(inst.role), inst.subject,
                                          inst.positive));
      }
      if (!std::binary_search(sorted.begin(), sorted.end(), inst.positive)) {
        throw ValidationError(fmt::format("{} instance ({} {}, item {}) omits its positive",
                                          split_name, section_name(inst.role), inst.subject,
                                          inst.positive));
      }
      for (const Index c : sorted) {
        if (c >= n_items) throw SchemaError(fmt::format("candidate item {} out of range", c));
        if (c != inst.positive && has_entry(tr, inst.subject, c)) {
          throw ValidationError(fmt::format("{} negative item {} was trained on by {} {}", split_name,
                                            c, section_name(inst.role), inst.subject));
        }
      }
    }
  }
}

DenseRowd Dataset::signal(Role role, Index subject) const {
  const auto& m = train(role);
  if (subject >= m.rows()) {
    throw IndexError(fmt::format("{} {} out of range ({} total)", section_name(role), subject, m.rows()));
  }
  DenseRowd out = DenseRowd::Zero(static_cast<Eigen::Index>(n_items));
  const auto cols = m.row_cols(subject);
  const auto vals = m.row_values(subject);
  for (std::size_t p = 0; p < cols.size(); ++p) out[cols[p]] = vals[p];
  return out;
}

DatasetStats stats(const Dataset& ds) {
  DatasetStats s;
  s.members = ds.n_members;
  s.items = ds.n_items;
  s.groups = ds.n_groups;
  s.member_item_interactions = ds.member_item.nnz();
  s.group_item_interactions = ds.group_item.nnz();
  for (const auto* list : {&ds.val, &ds.test}) {
    for (const auto& inst : *list) {
      (inst.role == Role::kGroup ? s.group_item_interactions : s.member_item_interactions) += 1;
    }
  }
  return s;
}

std::string format_stats(const DatasetStats& s) {
  return fmt::format("members={} items={} groups={} m-i={} g-i={}", s.members, s.items, s.groups,
                     s.member_item_interactions, s.group_item_interactions);
}

// ---------------------------------------------------------------------------
// Benchmark directory layout

namespace {

struct RawRole {
  Pairs train;
  std::vector<EvalInstance> val;
  std::vector<EvalInstance> test;
};

std::optional<std::ifstream> open_optional(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) return std::nullopt;
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

Pairs read_pairs(const std::filesystem::path& p) {
  auto in = open_optional(p);
  if (!in) return {};
  LineReader reader(*in, p.filename().string());
  Pairs out;
  std::string line;
  while (reader.next(line)) {
    const auto toks = split(line, " \t,");
    if (toks.size() < 2) reader.fail("expected 'id item ...'");
    out.emplace_back(reader.parse_id(toks[0]), reader.parse_id(toks[1]));
  }
  return out;
}

// "(id,item) neg1 neg2 ..."
std::map<std::pair<Index, Index>, std::vector<Index>> read_negatives(const std::filesystem::path& p) {
  std::map<std::pair<Index, Index>, std::vector<Index>> out;
  auto in = open_optional(p);
  if (!in) return out;
  LineReader reader(*in, p.filename().string());
  std::string line;
  while (reader.next(line)) {
    const auto toks = split(line, " \t,()");
    if (toks.size() < 2) reader.fail("expected '(id,item) neg ...'");
    const std::pair<Index, Index> key{reader.parse_id(toks[0]), reader.parse_id(toks[1])};
    std::vector<Index> negs;
    for (std::size_t k = 2; k < toks.size(); ++k) negs.push_back(reader.parse_id(toks[k]));
    out[key] = std::move(negs);
  }
  return out;
}

std::vector<EvalInstance> to_instances(Role role, const Pairs& pairs,
                                       const std::map<std::pair<Index, Index>, std::vector<Index>>& negs) {
  std::vector<EvalInstance> out;
  out.reserve(pairs.size());
  for (const auto& [s, i] : pairs) {
    EvalInstance inst{role, s, i, {}};
    if (const auto it = negs.find({s, i}); it != negs.end()) {
      inst.candidates.push_back(i);
      inst.candidates.insert(inst.candidates.end(), it->second.begin(), it->second.end());
    }
    out.push_back(std::move(inst));
  }
  return out;
}

RawRole read_role(const std::filesystem::path& dir, const std::string& prefix, Role role) {
  RawRole raw;
  raw.train = read_pairs(dir / (prefix + "RatingTrain.txt"));
  auto test_negs = read_negatives(dir / (prefix + "RatingTestNegative.txt"));
  if (test_negs.empty()) test_negs = read_negatives(dir / (prefix + "RatingNegative.txt"));
  const auto val_negs = read_negatives(dir / (prefix + "RatingValNegative.txt"));
  raw.val = to_instances(role, read_pairs(dir / (prefix + "RatingVal.txt")), val_negs);
  raw.test = to_instances(role, read_pairs(dir / (prefix + "RatingTest.txt")), test_negs);
  return raw;
}

}  // namespace

Dataset load_agree_format(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  for (const char* required : {"groupMember.txt", "groupRatingTrain.txt"}) {
    if (!std::filesystem::exists(dir / required)) {
      throw IoError(fmt::format("{} is missing {}", dir.string(), required));
    }
  }

  Pairs membership;
  {
    std::ifstream in(dir / "groupMember.txt");
    LineReader reader(in, "groupMember.txt");
    std::string line;
    while (reader.next(line)) {
      const auto toks = split(line, " \t,");
      if (toks.size() < 2) reader.fail("expected 'group member1,member2,...'");
      const Index g = reader.parse_id(toks[0]);
      for (std::size_t k = 1; k < toks.size(); ++k) membership.emplace_back(g, reader.parse_id(toks[k]));
    }
  }
  const RawRole groups = read_role(dir, "group", Role::kGroup);
  const RawRole members = read_role(dir, "user", Role::kMember);

  Dataset ds;
  auto grow = [](Index& n, Index id) { n = std::max(n, id + 1); };
  for (const auto& [g, u] : membership) {
    grow(ds.n_groups, g);
    grow(ds.n_members, u);
  }
  auto scan = [&](const RawRole& raw, Index& n_subj) {
    for (const auto& [s, i] : raw.train) {
      grow(n_subj, s);
      grow(ds.n_items, i);
    }
    for (const auto* list : {&raw.val, &raw.test}) {
      for (const auto& inst : *list) {
        grow(n_subj, inst.subject);
        grow(ds.n_items, inst.positive);
        for (const Index c : inst.candidates) grow(ds.n_items, c);
      }
    }
  };
  scan(groups, ds.n_groups);
  scan(members, ds.n_members);

  ds.membership = binary_matrix(ds.n_groups, ds.n_members, membership);
  ds.group_item = binary_matrix(ds.n_groups, ds.n_items, groups.train);
  ds.member_item = binary_matrix(ds.n_members, ds.n_items, members.train);
  for (const RawRole* raw : {&groups, &members}) {
    ds.val.insert(ds.val.end(), raw->val.begin(), raw->val.end());
    ds.test.insert(ds.test.end(), raw->test.begin(), raw->test.end());
  }
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// Canonical interchange

CanonicalLoad read_canonical(std::istream& in, const std::string& name) {
  LineReader reader(in, name);
  std::string line;
  if (!reader.next(line)) reader.fail("empty file");
  const auto header = split(line, " \t");
  if (header.empty() || header[0] != "ggf-v1") {
    reader.fail(fmt::format("unsupported format header '{}' (expected ggf-v1)",
                            header.empty() ? std::string_view{} : header[0]));
  }
  if (header.size() != 4) reader.fail("header must be 'ggf-v1 <n_members> <n_items> <n_groups>'");
  Dataset ds;
  ds.n_members = reader.parse_id(header[1]);
  ds.n_items = reader.parse_id(header[2]);
  ds.n_groups = reader.parse_id(header[3]);

  enum class Section { kNone, kMembership, kMemberItem, kGroupItem, kVal, kTest };
  Section section = Section::kNone;
  Pairs membership;
  Pairs member_item;
  Pairs group_item;
  while (reader.next(line)) {
    if (line[0] == '#') {
      const std::string_view tag = split(line, " \t").front();
      if (tag == "#membership") section = Section::kMembership;
      else if (tag == "#member-item") section = Section::kMemberItem;
      else if (tag == "#group-item") section = Section::kGroupItem;
      else if (tag == "#val") section = Section::kVal;
      else if (tag == "#test") section = Section::kTest;
      else reader.fail(fmt::format("unknown section '{}'", tag));
      continue;
    }
    const auto toks = split(line, "\t ");
    auto need = [&](std::size_t n) {
      if (toks.size() != n) reader.fail(fmt::format("expected {} fields, got {}", n, toks.size()));
    };
    auto check = [&](Index id, Index n, const char* what) {
      if (id >= n) throw SchemaError(fmt::format("{}:{}: {} {} out of range ({} declared)",
                                                 reader.name(), reader.line_no(), what, id, n));
      return id;
    };
    switch (section) {
      case Section::kNone:
        reader.fail("data row before any section header");
      case Section::kMembership:
        need(2);
        membership.emplace_back(check(reader.parse_id(toks[0]), ds.n_groups, "group"),
                                check(reader.parse_id(toks[1]), ds.n_members, "member"));
        break;
      case Section::kMemberItem:
        need(2);
        member_item.emplace_back(check(reader.parse_id(toks[0]), ds.n_members, "member"),
                                 check(reader.parse_id(toks[1]), ds.n_items, "item"));
        break;
      case Section::kGroupItem:
        need(2);
        group_item.emplace_back(check(reader.parse_id(toks[0]), ds.n_groups, "group"),
                                check(reader.parse_id(toks[1]), ds.n_items, "item"));
        break;
      case Section::kVal:
      case Section::kTest: {
        if (toks.size() < 3) reader.fail("expected 'role subject positive [candidates...]'");
        const Index role_code = reader.parse_id(toks[0]);
        if (role_code > 1) reader.fail(fmt::format("unknown role {}", role_code));
        EvalInstance inst;
        inst.role = static_cast<Role>(role_code);
        inst.subject = check(reader.parse_id(toks[1]), ds.n_subjects(inst.role), section_name(inst.role));
        inst.positive = check(reader.parse_id(toks[2]), ds.n_items, "item");
        for (std::size_t k = 3; k < toks.size(); ++k) {
          inst.candidates.push_back(check(reader.parse_id(toks[k]), ds.n_items, "item"));
        }
        (section == Section::kVal ? ds.val : ds.test).push_back(std::move(inst));
        break;
      }
    }
  }
  CanonicalLoad out;
  std::size_t dups = 0;
  ds.membership = binary_matrix(ds.n_groups, ds.n_members, membership, &dups);
  out.duplicates_dropped += dups;
  ds.member_item = binary_matrix(ds.n_members, ds.n_items, member_item, &dups);
  out.duplicates_dropped += dups;
  ds.group_item = binary_matrix(ds.n_groups, ds.n_items, group_item, &dups);
  out.duplicates_dropped += dups;
  ds.validate();
  out.dataset = std::move(ds);
  return out;
}

CanonicalLoad load_canonical(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_canonical(in, path.filename().string());
}

void write_canonical(std::ostream& out, const Dataset& ds) {
  out << "ggf-v1 " << ds.n_members << ' ' << ds.n_items << ' ' << ds.n_groups << '\n';
  auto dump = [&](const char* tag, const SparseMatrixd& m) {
    out << tag << '\n';
    for (Index r = 0; r < m.rows(); ++r) {
      for (const ColIndex c : m.row_cols(r)) out << r << '\t' << c << '\n';
    }
  };
  dump("#membership", ds.membership);
  dump("#member-item", ds.member_item);
  dump("#group-item", ds.group_item);
  for (const auto* list : {&ds.val, &ds.test}) {
    out << (list == &ds.val ? "#val" : "#test") << '\n';
    for (const auto& inst : *list) {
      out << static_cast<int>(inst.role) << '\t' << inst.subject << '\t' << inst.positive;
      for (const Index c : inst.candidates) out << '\t' << c;
      out << '\n';
    }
  }
}

void save_canonical(const Dataset& ds, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    write_canonical(out, ds);
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------

Dataset sample_negatives(const Dataset& ds, Index per_positive, std::uint64_t seed) {
  if (per_positive < 1) throw ParameterError("negatives per positive must be >= 1");
  const std::vector<std::vector<Index>> held[2] = {held_out_positives(ds, Role::kGroup),
                                                   held_out_positives(ds, Role::kMember)};
  Dataset out = ds;
  std::uint64_t stream = 0;
  std::vector<Index> eligible;
  for (auto* list : {&out.val, &out.test}) {
    for (auto& inst : *list) {
      const auto& tr = ds.train(inst.role);
      const auto& pos = held[static_cast<int>(inst.role)][inst.subject];
      const auto seen = tr.row_cols(inst.subject);
      eligible.clear();
      std::size_t a = 0;
      std::size_t b = 0;
      for (Index i = 0; i < ds.n_items; ++i) {
        while (a < seen.size() && seen[a] < i) ++a;
        while (b < pos.size() && pos[b] < i) ++b;
        const bool excluded = (a < seen.size() && seen[a] == i) || (b < pos.size() && pos[b] == i);
        if (!excluded) eligible.push_back(i);
      }
      if (eligible.size() < per_positive) {
        throw ProtocolError(fmt::format("{} {} has only {} eligible negatives, {} requested",
                                        section_name(inst.role), inst.subject, eligible.size(),
                                        per_positive));
      }
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(stream++)));
      inst.candidates.assign(1, inst.positive);
      for (Index k = 0; k < per_positive; ++k) {
        const auto j = k + static_cast<Index>(uniform_below(rng, eligible.size() - k));
        std::swap(eligible[k], eligible[j]);
        inst.candidates.push_back(eligible[k]);
      }
    }
  }
  return out;
}

Dataset with_full_ranking(const Dataset& ds) {
  Dataset out = ds;
  for (auto* list : {&out.val, &out.test}) {
    for (auto& inst : *list) inst.candidates.clear();
  }
  return out;
}

std::vector<EvalInstance> select_role(const std::vector<EvalInstance>& instances, Role role) {
  std::vector<EvalInstance> out;
  std::copy_if(instances.begin(), instances.end(), std::back_inserter(out),
               [role](const EvalInstance& inst) { return inst.role == role; });
  return out;
}

std::uint64_t dataset_hash(const Dataset& ds) {
  Fnv1a h;
  h.update(ds.membership);
  h.update(ds.member_item);
  h.update(ds.group_item);
  return h.digest();
}

}  // namespace ggf
