#pragma once

#include <map>
#include <optional>
#include <utility>

#include <chor/error.hpp>
#include <chor/locations.hpp>

namespace chor {

/// One value identically known to every owner; opaque elsewhere.
/// In centralized execution the payload is present. In projected
/// execution at party p it is present iff p is an owner; everywhere
/// else it is an explicit empty marker, so program structure is
/// identical at all parties and only payloads differ.
template <class A>
class Located {
 public:
  using value_type = A;

  static Located all(LocationList owners, A value) {
    return Located(std::move(owners), std::optional<A>(std::move(value)));
  }
  static Located absent(LocationList owners) {
    return Located(std::move(owners), std::nullopt);
  }

  const LocationList& owners() const { return owners_; }
  bool has_payload() const { return payload_.has_value(); }

  /// Unchecked payload access; interpreters and tokens gate all reads.
  const A& payload() const {
    if (!payload_) throw empty_read_error("read of empty Located payload");
    return *payload_;
  }

 private:
  Located(LocationList owners, std::optional<A> payload)
      : owners_(std::move(owners)), payload_(std::move(payload)) {}

  LocationList owners_;
  std::optional<A> payload_;
};

/// Per-owner possibly-distinct values of a common type. Centralized
/// execution holds one facet per owner; projected execution at p holds
/// at most p's facet.
template <class A>
class Faceted {
 public:
  using value_type = A;

  explicit Faceted(LocationList owners, std::map<LocationId, A> facets = {})
      : owners_(std::move(owners)), facets_(std::move(facets)) {
    for (const auto& [name, _] : facets_) {
      if (!owners_.contains(name))
        throw empty_read_error("facet for non-owner " + name);
    }
  }

  const LocationList& owners() const { return owners_; }
  const std::map<LocationId, A>& facets() const { return facets_; }
  bool has_facet(const LocationId& p) const { return facets_.count(p) != 0; }

  const A& facet(const LocationId& p) const {
    auto it = facets_.find(p);
    if (it == facets_.end())
      throw empty_read_error("read of empty facet at " + p);
    return it->second;
  }

  void set_facet(const LocationId& p, A value) {
    if (!owners_.contains(p)) throw empty_read_error("facet for non-owner " + p);
    facets_.insert_or_assign(p, std::move(value));
  }

 private:
  LocationList owners_;
  std::map<LocationId, A> facets_;
};

/// The capability, scoped to a parallel body, for one party to extract
/// payloads from values it owns. Works on both Located and Faceted.
class UnwrapToken {
 public:
  explicit UnwrapToken(LocationId self) : self_(std::move(self)) {}

  const LocationId& self() const { return self_; }

  template <class A>
  const A& operator()(const MemberWitness& m, const Located<A>& v) const {
    check(m, v.owners());
    return v.payload();
  }

  template <class A>
  const A& operator()(const MemberWitness& m, const Faceted<A>& v) const {
    check(m, v.owners());
    return v.facet(self_);
  }

 private:
  void check(const MemberWitness& m, const LocationList& owners) const {
    if (m.subject() != self_)
      throw witness_error("unwrap: witness subject " + m.subject() +
                          " is not the acting party " + self_);
    if (m.context() != owners)
      throw witness_error("unwrap: witness context is not the value's owner list");
  }

  LocationId self_;
};

/// The capability, scoped to a congruently body, for a set of parties
/// to extract a shared payload. Works only on Located values; Faceted
/// payloads are not congruent.
class UnwrapsToken {
 public:
  explicit UnwrapsToken(LocationList subject) : subject_(std::move(subject)) {}

  const LocationList& subject() const { return subject_; }

  template <class A>
  const A& operator()(const SubsetWitness& s, const Located<A>& v) const {
    if (s.subject() != subject_)
      throw witness_error("unwraps: witness subject is not the acting party set");
    if (s.context() != v.owners())
      throw witness_error("unwraps: witness context is not the value's owner list");
    return v.payload();
  }

 private:
  LocationList subject_;
};

/// Un-nests Located layers to parties listed in both layers.
template <class A>
Located<A> flatten(const SubsetWitness& ls_in_ms, const SubsetWitness& ls_in_ns,
                   const Located<Located<A>>& v) {
  if (ls_in_ms.subject() != ls_in_ns.subject())
    throw witness_error("flatten: subset subjects differ");
  if (ls_in_ms.context() != v.owners())
    throw witness_error("flatten: outer owner list mismatch");
  if (!v.has_payload() || !v.payload().has_payload())
    return Located<A>::absent(ls_in_ms.subject());
  if (ls_in_ns.context() != v.payload().owners())
    throw witness_error("flatten: inner owner list mismatch");
  return Located<A>::all(ls_in_ms.subject(), v.payload().payload());
}

/// Repackage one party's facet as a singleton Located.
template <class A>
Located<A> localize(const MemberWitness& m, const Faceted<A>& f) {
  if (m.context() != f.owners())
    throw witness_error("localize: witness context is not the owner list");
  LocationList just{m.subject()};
  if (!f.has_facet(m.subject())) return Located<A>::absent(just);
  return Located<A>::all(just, f.facet(m.subject()));
}

/// Reinterpret a shared value as a Faceted whose facets are all equal.
template <class A>
Faceted<A> fracture(const Located<A>& v) {
  Faceted<A> f(v.owners());
  if (v.has_payload()) {
    for (const auto& owner : v.owners()) f.set_facet(owner, v.payload());
  }
  return f;
}

}  // namespace chor
