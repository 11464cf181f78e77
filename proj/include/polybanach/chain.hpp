#pragma once

#include "polybanach/amalgam.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polybanach {

struct OracleLogEntry {
  std::size_t new_stage;
  Eigen::Index extension_dimension;  // dimension of the space served
  Rational delta;
};

/// An increasing chain of polyhedral spaces with exact isometric inclusions,
/// standing in for a separable space by its finite presentation. Extension
/// requests append stages; a chain is a single-writer value.
class ChainSpace {
 public:
  ChainSpace(std::vector<PolyhedralSpace> stages, std::vector<LinearMap> inclusions)
      : stages_(std::move(stages)), inclusions_(std::move(inclusions)) {
    if (stages_.empty()) throw std::invalid_argument("ChainSpace: at least one stage required");
    if (inclusions_.size() + 1 != stages_.size())
      throw std::invalid_argument("ChainSpace: need exactly one inclusion per consecutive stage pair");
    for (std::size_t i = 0; i < inclusions_.size(); ++i) validate_inclusion(i, inclusions_[i]);
    presentation_size_ = stages_.size();
  }

  explicit ChainSpace(PolyhedralSpace stage0) : ChainSpace(std::vector<PolyhedralSpace>{std::move(stage0)}, {}) {}

  std::size_t size() const { return stages_.size(); }
  std::size_t presentation_size() const { return presentation_size_; }
  const PolyhedralSpace& stage(std::size_t i) const { return stages_.at(i); }
  const PolyhedralSpace& top() const { return stages_.back(); }
  const LinearMap& inclusion(std::size_t i) const { return inclusions_.at(i); }
  const std::vector<OracleLogEntry>& oracle_log() const { return oracle_log_; }

  /// Composed inclusion stage `from` -> stage `to`.
  LinearMap embedding(std::size_t from, std::size_t to) const {
    if (from > to || to >= stages_.size()) throw std::invalid_argument("ChainSpace::embedding: bad stage indices");
    Mat m = Mat::Identity(stages_[from].dimension(), stages_[from].dimension());
    for (std::size_t i = from; i < to; ++i) m = inclusions_[i].matrix() * m;
    return LinearMap(stages_[from], stages_[to], m);
  }

  LinearMap embedding_to_top(std::size_t from) const { return embedding(from, stages_.size() - 1); }

  void append_stage(PolyhedralSpace next, LinearMap inclusion_from_top) {
    validate_inclusion(stages_.size() - 1, inclusion_from_top, next);
    stages_.push_back(std::move(next));
    inclusions_.push_back(std::move(inclusion_from_top));
  }

  void log_extension(Eigen::Index ext_dim, Rational delta) {
    oracle_log_.push_back(OracleLogEntry{stages_.size() - 1, ext_dim, std::move(delta)});
  }

 private:
  void validate_inclusion(std::size_t i, const LinearMap& inc) const { validate_inclusion(i, inc, stages_[i + 1]); }

  void validate_inclusion(std::size_t i, const LinearMap& inc, const PolyhedralSpace& target) const {
    if (!inc.domain().same_space(stages_[i]) || !inc.codomain().same_space(target))
      throw std::invalid_argument("ChainSpace: inclusion " + std::to_string(i) + " connects the wrong stages");
    if (!inc.exact_isometry())
      throw std::invalid_argument("ChainSpace: inclusion " + std::to_string(i) + " is not an exact isometry");
  }

  std::vector<PolyhedralSpace> stages_;
  std::vector<LinearMap> inclusions_;
  std::size_t presentation_size_ = 0;
  std::vector<OracleLogEntry> oracle_log_;
};

/// Serves an extension request against the chain: X sits in the top stage via
/// incl_x and in Z via the exact isometry k; a new stage W is appended with
/// an exact isometric inclusion of the old top, and the returned h: Z -> W
/// satisfies h o k = (inclusion of X into W) exactly. h is itself an exact
/// isometry, which meets the delta-isometry contract for every delta > 0.
inline LinearMap gurarii_extend(ChainSpace& chain, const PolyhedralSpace& X, const LinearMap& incl_x,
                                const PolyhedralSpace& Z, const LinearMap& k, const Rational& delta) {
  if (!(delta > 0)) throw std::invalid_argument("gurarii_extend: delta must be positive");
  if (!k.domain().same_space(X) || !k.codomain().same_space(Z))
    throw std::invalid_argument("gurarii_extend: k does not run X -> Z");
  if (!k.exact_isometry()) throw std::invalid_argument("gurarii_extend: k is not an exact isometry");
  if (!incl_x.domain().same_space(X) || !incl_x.codomain().same_space(chain.top()))
    throw std::invalid_argument("gurarii_extend: X does not sit in the chain top");
  if (!incl_x.exact_isometry()) throw std::invalid_argument("gurarii_extend: X is not isometric in the chain top");

  ExtensionResult ext = extend_isometry(X, chain.top(), incl_x, Z, k, delta);
  if (ext.distance != 0) throw std::logic_error("gurarii_extend: exact service failed");
  chain.append_stage(ext.Y1, ext.g);
  chain.log_extension(Z.dimension(), delta);
  return ext.y_embed;  // h: Z -> new top
}

}  // namespace polybanach
