#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "relq/catalog.hpp"
#include "relq/rel_node.hpp"

namespace relq {

class Memo;

struct RuleContext {
  Memo* memo = nullptr;  // null in tree mode
  const Catalog* catalog = nullptr;
  int rootGroup = -1;

  /// The matched root's own equivalence group (memo mode) or the root node
  /// itself (tree mode); what a converter rule wraps.
  RelNodePtr selfRef(const RelNodePtr& root) const;
};

/// A pattern over (kind, convention) with optional child sub-patterns, plus
/// a semantics-preserving rewrite. Every produced node's row multiset equals
/// the matched root's; the planner registers products into the matched
/// root's equivalence group. Directed rules strictly simplify and are the
/// only ones the exhaustive engine accepts.
class Rule {
 public:
  struct ChildPattern {
    int inputIndex = 0;
    std::function<bool(const RelNode&)> predicate;
  };

  Rule(std::string name, bool directed) : name_(std::move(name)), directed_(directed) {}
  virtual ~Rule() = default;

  const std::string& name() const { return name_; }
  bool directed() const { return directed_; }

  virtual bool matchesRoot(const RelNode& node) const = 0;
  virtual const std::vector<ChildPattern>& childPatterns() const;
  /// `bound` holds the member expression matched for each child pattern.
  /// May return zero nodes (the binding turned out not to apply).
  virtual std::vector<RelNodePtr> apply(RuleContext& ctx, const RelNodePtr& root,
                                        const std::vector<RelNodePtr>& bound) const = 0;

 private:
  std::string name_;
  bool directed_;
};

using RulePtr = std::shared_ptr<const Rule>;

/// Generic rule assembled from closures.
class LambdaRule : public Rule {
 public:
  using MatchFn = std::function<bool(const RelNode&)>;
  using ApplyFn = std::function<std::vector<RelNodePtr>(
      RuleContext&, const RelNodePtr&, const std::vector<RelNodePtr>&)>;

  LambdaRule(std::string name, bool directed, MatchFn match,
             std::vector<ChildPattern> children, ApplyFn apply)
      : Rule(std::move(name), directed),
        match_(std::move(match)),
        children_(std::move(children)),
        apply_(std::move(apply)) {}

  bool matchesRoot(const RelNode& node) const override { return match_(node); }
  const std::vector<ChildPattern>& childPatterns() const override { return children_; }
  std::vector<RelNodePtr> apply(RuleContext& ctx, const RelNodePtr& root,
                                const std::vector<RelNodePtr>& bound) const override {
    return apply_(ctx, root, bound);
  }

 private:
  MatchFn match_;
  std::vector<ChildPattern> children_;
  ApplyFn apply_;
};

// Built-in transformation rules.
RulePtr filterIntoJoinRule();        // FILTER_INTO_JOIN
RulePtr filterMergeRule();           // FILTER_MERGE
RulePtr filterTrivialRemovalRule();  // FILTER_TRIVIAL_REMOVAL
RulePtr projectPushdownRule();       // PROJECT_PUSHDOWN
RulePtr sortRemovalRule();           // SORT_REMOVAL

/// ENUM_FILTER, ENUM_PROJECT, ENUM_JOIN, ENUM_AGGREGATE, ENUM_SORT,
/// ENUM_VALUES: one converter rule per kind binding the iterator
/// implementation.
std::vector<RulePtr> enumerableConverterRules();

// Adapter-contributed rules; names carry the schema ("CSV_SCAN:s").
RulePtr adapterScanRule(const std::string& adapterKind, const std::string& schemaName);
RulePtr toEnumerableRule(const std::string& adapterKind, const std::string& schemaName);
std::vector<RulePtr> remotePushdownRules(const std::string& schemaName,
                                         const Capabilities& caps);

/// Transformation rules, enumerable converters, then adapter rules in
/// catalog order; `disabled` filters by rule name.
std::vector<RulePtr> defaultRuleSet(const Catalog& catalog,
                                    const std::vector<std::string>& disabled = {});

}  // namespace relq
