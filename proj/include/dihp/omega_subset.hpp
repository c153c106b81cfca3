#pragma once

#include "matching_space.hpp"

#include <boost/dynamic_bitset.hpp>

namespace dihp {

using Bitset = boost::dynamic_bitset<>;

// subset of Omega_base, stored as a bitset over the canonical enumeration of
// the whole space
class OmegaSubset {
 public:
  OmegaSubset(SpacePtr space, Restriction base, Bitset members)
      : space_(std::move(space)), base_(std::move(base)), members_(std::move(members)) {
    if (members_.size() != space_->size()) throw std::invalid_argument("bitset size does not match space");
    space_->space().check_restriction(base_);
    for (auto i = members_.find_first(); i != Bitset::npos; i = members_.find_next(i))
      if (!agrees(space_->at(i), base_))
        throw std::domain_error("member " + space_->at(i).str() + " disagrees with base " + base_.str());
  }

  OmegaSubset(SpacePtr space, Bitset members) : OmegaSubset(space, Restriction{}, std::move(members)) {}

  static OmegaSubset full(SpacePtr space, const Restriction& base = {}) {
    Bitset b(space->size());
    for (std::size_t i = 0; i < space->size(); ++i)
      if (agrees(space->at(i), base)) b.set(i);
    return OmegaSubset(space, base, std::move(b));
  }

  template <class Pred>
  static OmegaSubset where(SpacePtr space, Pred pred, const Restriction& base = {}) {
    Bitset b(space->size());
    for (std::size_t i = 0; i < space->size(); ++i)
      if (agrees(space->at(i), base) && pred(space->at(i))) b.set(i);
    return OmegaSubset(space, base, std::move(b));
  }

  const SpacePtr& space() const { return space_; }
  const Restriction& base() const { return base_; }
  const Bitset& members() const { return members_; }

  std::size_t size() const { return members_.count(); }
  bool empty() const { return members_.none(); }
  bool contains(std::size_t i) const { return members_.test(i); }
  bool contains(const LabeledMatching& y) const {
    auto i = space_->find(y);
    return i && members_.test(*i);
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (auto i = members_.find_first(); i != Bitset::npos; i = members_.find_next(i)) out.push_back(i);
    return out;
  }

  BigInt base_size() const { return space_->space().restricted_size(base_); }

  // |A| / |Omega_base|
  Rational density() const { return Rational(BigInt(size()), base_size()); }

  OmegaSubset with_base(const Restriction& z) const { return OmegaSubset(space_, z, members_); }

  OmegaSubset intersect(const Bitset& other) const { return OmegaSubset(space_, base_, members_ & other); }

  friend bool operator==(const OmegaSubset& a, const OmegaSubset& b) {
    return a.base_ == b.base_ && a.members_ == b.members_;
  }

 private:
  SpacePtr space_;
  Restriction base_;
  Bitset members_;
};

}  // namespace dihp
