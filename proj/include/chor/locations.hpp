#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <chor/error.hpp>

namespace chor {

/// A party's name. Compared by exact equality; the runtime identity
/// used for routing.
using LocationId = std::string;

/// An ordered, duplicate-free list of locations. Order is significant
/// and observable: fanOut/fanIn iterate in this order, and share
/// labeling follows it.
class LocationList {
 public:
  LocationList() = default;

  LocationList(std::initializer_list<LocationId> entries)
      : LocationList(std::vector<LocationId>(entries)) {}

  explicit LocationList(std::vector<LocationId> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].empty()) throw witness_error("location names must be nonempty");
      for (std::size_t j = i + 1; j < entries_.size(); ++j) {
        if (entries_[i] == entries_[j])
          throw witness_error("duplicate location in list: " + entries_[i]);
      }
    }
  }

  const std::vector<LocationId>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const LocationId& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool contains(const LocationId& x) const {
    return std::find(entries_.begin(), entries_.end(), x) != entries_.end();
  }

  std::optional<std::size_t> index_of(const LocationId& x) const {
    auto it = std::find(entries_.begin(), entries_.end(), x);
    if (it == entries_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - entries_.begin());
  }

  /// A new list with `x` prepended.
  LocationList with_front(const LocationId& x) const {
    std::vector<LocationId> es;
    es.reserve(entries_.size() + 1);
    es.push_back(x);
    es.insert(es.end(), entries_.begin(), entries_.end());
    return LocationList(std::move(es));
  }

  friend bool operator==(const LocationList& a, const LocationList& b) {
    return a.entries_ == b.entries_;
  }
  friend bool operator!=(const LocationList& a, const LocationList& b) { return !(a == b); }

 private:
  std::vector<LocationId> entries_;
};

/// Proof that a location occurs in a list; doubles as the identifier
/// for that location. context()[index()] == subject() always holds.
class MemberWitness {
 public:
  MemberWitness(LocationList context, std::size_t index)
      : context_(std::move(context)), index_(index) {
    if (index_ >= context_.size())
      throw witness_error("member index out of range for context");
  }

  const LocationId& subject() const { return context_[index_]; }
  const LocationList& context() const { return context_; }
  std::size_t index() const { return index_; }

  friend bool operator==(const MemberWitness& a, const MemberWitness& b) {
    return a.index_ == b.index_ && a.context_ == b.context_;
  }

 private:
  LocationList context_;
  std::size_t index_;
};

/// Proof that one location list is contained in another; doubles as the
/// identifier for the smaller list within the larger context.
class SubsetWitness {
 public:
  SubsetWitness(LocationList subject, LocationList context)
      : subject_(std::move(subject)), context_(std::move(context)) {
    for (const auto& x : subject_) {
      if (!context_.contains(x))
        throw witness_error("subset violation: " + x + " not in context");
    }
  }

  const LocationList& subject() const { return subject_; }
  const LocationList& context() const { return context_; }

  friend bool operator==(const SubsetWitness& a, const SubsetWitness& b) {
    return a.subject_ == b.subject_ && a.context_ == b.context_;
  }

 private:
  LocationList subject_;
  LocationList context_;
};

/// Member x [x]: a party in the list containing just themselves.
inline MemberWitness singleton(const LocationId& x) {
  return MemberWitness(LocationList{x}, 0);
}

/// Member x xs, when x actually occurs in xs.
inline MemberWitness explicit_member(const LocationId& x, const LocationList& xs) {
  auto idx = xs.index_of(x);
  if (!idx) throw witness_error("explicit_member: " + x + " not in context");
  return MemberWitness(xs, *idx);
}

inline MemberWitness listed_nth(const LocationList& xs, std::size_t n) {
  return MemberWitness(xs, n);
}
inline MemberWitness listed_first(const LocationList& xs) { return listed_nth(xs, 0); }
inline MemberWitness listed_second(const LocationList& xs) { return listed_nth(xs, 1); }
inline MemberWitness listed_third(const LocationList& xs) { return listed_nth(xs, 2); }
inline MemberWitness listed_fourth(const LocationList& xs) { return listed_nth(xs, 3); }
inline MemberWitness listed_fifth(const LocationList& xs) { return listed_nth(xs, 4); }
inline MemberWitness listed_sixth(const LocationList& xs) { return listed_nth(xs, 5); }

/// Subset [] ys.
inline SubsetWitness nobody(const LocationList& ys) {
  return SubsetWitness(LocationList{}, ys);
}

/// The list-cons of subset proofs: Member x ys -> Subset xs ys -> Subset (x:xs) ys.
/// Both witnesses must share the same context.
inline SubsetWitness cons(const MemberWitness& m, const SubsetWitness& s) {
  if (m.context() != s.context())
    throw witness_error("cons: witness contexts differ");
  return SubsetWitness(s.subject().with_front(m.subject()), s.context());
}

/// Subset xs ys -> Member x ys -> Subset (x:xs) ys.
inline SubsetWitness cons_sub(const SubsetWitness& s, const MemberWitness& m) {
  return cons(m, s);
}

inline SubsetWitness refl(const LocationList& xs) { return SubsetWitness(xs, xs); }

/// Subset ps ps for a census ps.
inline SubsetWitness allof(const LocationList& ps) { return refl(ps); }

inline SubsetWitness transitive(const SubsetWitness& a, const SubsetWitness& b) {
  if (a.context() != b.subject())
    throw witness_error("transitive: middle lists differ");
  return SubsetWitness(a.subject(), b.context());
}

/// Subset xs (x:xs).
inline SubsetWitness cons_set(const LocationId& x, const LocationList& xs) {
  return SubsetWitness(xs, xs.with_front(x));
}

/// Subset xs ys -> Subset xs (y:ys).
inline SubsetWitness cons_super(const SubsetWitness& s, const LocationId& y) {
  return SubsetWitness(s.subject(), s.context().with_front(y));
}

/// Subset xs ys, when containment actually holds.
inline SubsetWitness explicit_subset(const LocationList& xs, const LocationList& ys) {
  return SubsetWitness(xs, ys);
}

/// Transport membership into a larger context. The subject is unchanged.
inline MemberWitness in_super(const SubsetWitness& s, const MemberWitness& m) {
  if (m.context() != s.subject())
    throw witness_error("in_super: member context is not the subset's subject");
  auto idx = s.context().index_of(m.subject());
  if (!idx) throw witness_error("in_super: subject missing from context");  // unreachable
  return MemberWitness(s.context(), *idx);
}

inline const LocationId& to_loc_tm(const MemberWitness& m) { return m.subject(); }
inline const std::vector<LocationId>& to_locs(const SubsetWitness& s) {
  return s.subject().entries();
}

}  // namespace chor
