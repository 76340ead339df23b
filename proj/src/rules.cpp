#include "relq/rules.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

#include "relq/error.hpp"
#include "relq/memo.hpp"

namespace relq {

RelNodePtr RuleContext::selfRef(const RelNodePtr& root) const {
  if (memo) return memo->groupRefNode(rootGroup);
  return root;
}

const std::vector<Rule::ChildPattern>& Rule::childPatterns() const {
  static const std::vector<ChildPattern> kNone;
  return kNone;
}

namespace {

bool isLogical(const RelNode& node) { return node.traits().convention.isLogical(); }

// Conjunct classification for FilterIntoJoin.
enum class Side { Left, Right, Mixed };

Side classifyConjunct(const ExprPtr& conjunct, int leftArity) {
  std::vector<int> cols;
  conjunct->collectColumns(cols);
  if (cols.empty()) return Side::Left;  // constant: push with the driving side
  bool allLeft = true, allRight = true;
  for (int c : cols) {
    allLeft = allLeft && c < leftArity;
    allRight = allRight && c >= leftArity;
  }
  if (allLeft) return Side::Left;
  if (allRight) return Side::Right;
  return Side::Mixed;
}

}  // namespace

RulePtr filterIntoJoinRule() {
  std::vector<Rule::ChildPattern> children{
      {0, [](const RelNode& n) { return n.kind() == RelKind::Join && isLogical(n); }}};
  return std::make_shared<LambdaRule>(
      "FILTER_INTO_JOIN", /*directed=*/true,
      [](const RelNode& n) { return n.kind() == RelKind::Filter && isLogical(n); },
      std::move(children),
      [](RuleContext&, const RelNodePtr& root,
         const std::vector<RelNodePtr>& bound) -> std::vector<RelNodePtr> {
        const RelNodePtr& join = bound[0];
        int leftArity = static_cast<int>(join->input(0)->rowType().size());
        JoinType type = join->join().type;

        std::vector<ExprPtr> lefts, rights, residual;
        bool folded = false, dropped = false;
        std::vector<ExprPtr> joinConjuncts = conjunctsOf(join->join().condition);
        for (const auto& conjunct : conjunctsOf(root->filter().condition)) {
          if (conjunct->isLiteralTrue()) {
            dropped = true;
            continue;
          }
          switch (classifyConjunct(conjunct, leftArity)) {
            case Side::Left:
              lefts.push_back(conjunct);
              break;
            case Side::Right:
              // Below a LEFT join the right side NULL-extends; keep above.
              if (type == JoinType::Left) {
                residual.push_back(conjunct);
              } else {
                rights.push_back(conjunct->shiftColumns(-leftArity));
              }
              break;
            case Side::Mixed:
              if (type == JoinType::Inner) {
                joinConjuncts.push_back(conjunct);
                folded = true;
              } else {
                residual.push_back(conjunct);
              }
              break;
          }
        }
        if (lefts.empty() && rights.empty() && !folded && !dropped) return {};

        RelNodePtr left = join->input(0);
        RelNodePtr right = join->input(1);
        if (!lefts.empty()) left = makeFilter(left, makeConjunction(std::move(lefts)));
        if (!rights.empty()) right = makeFilter(right, makeConjunction(std::move(rights)));
        RelNodePtr newJoin =
            makeJoin(type, makeConjunction(std::move(joinConjuncts)), left, right);
        if (residual.empty()) return {newJoin};
        return {makeFilter(newJoin, makeConjunction(std::move(residual)))};
      });
}

RulePtr filterMergeRule() {
  std::vector<Rule::ChildPattern> children{
      {0, [](const RelNode& n) { return n.kind() == RelKind::Filter && isLogical(n); }}};
  return std::make_shared<LambdaRule>(
      "FILTER_MERGE", /*directed=*/true,
      [](const RelNode& n) { return n.kind() == RelKind::Filter && isLogical(n); },
      std::move(children),
      [](RuleContext&, const RelNodePtr& root,
         const std::vector<RelNodePtr>& bound) -> std::vector<RelNodePtr> {
        const RelNodePtr& inner = bound[0];
        ExprPtr merged = ex::and_(root->filter().condition, inner->filter().condition);
        return {makeFilter(inner->input(0), std::move(merged))};
      });
}

RulePtr filterTrivialRemovalRule() {
  return std::make_shared<LambdaRule>(
      "FILTER_TRIVIAL_REMOVAL", /*directed=*/true,
      [](const RelNode& n) {
        return n.kind() == RelKind::Filter && isLogical(n) &&
               n.filter().condition->isLiteralTrue();
      },
      std::vector<Rule::ChildPattern>{},
      [](RuleContext&, const RelNodePtr& root,
         const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
        return {root->input(0)};
      });
}

RulePtr projectPushdownRule() {
  std::vector<Rule::ChildPattern> children{
      {0, [](const RelNode& n) {
         return n.kind() == RelKind::TableScan && isLogical(n) &&
                n.scan().table->capabilities().projection;
       }}};
  return std::make_shared<LambdaRule>(
      "PROJECT_PUSHDOWN", /*directed=*/true,
      [](const RelNode& n) { return n.kind() == RelKind::Project && isLogical(n); },
      std::move(children),
      [](RuleContext&, const RelNodePtr& root,
         const std::vector<RelNodePtr>& bound) -> std::vector<RelNodePtr> {
        const RelNodePtr& scanNode = bound[0];
        const auto& scan = scanNode->scan();
        size_t tableArity = scan.table->rowType().size();
        auto toTableColumn = [&](int i) {
          return scan.columns.empty() ? i : scan.columns[i];
        };
        size_t scanArity = scan.columns.empty() ? tableArity : scan.columns.size();

        const auto& exprs = root->project().exprs;
        bool allRefs = std::all_of(exprs.begin(), exprs.end(), [](const ExprPtr& e) {
          return e->variant() == ScalarExpr::Variant::ColumnRef;
        });
        if (allRefs) {
          std::vector<int> newColumns;
          newColumns.reserve(exprs.size());
          for (const auto& e : exprs) newColumns.push_back(toTableColumn(e->index()));
          std::vector<int> unique = newColumns;
          std::sort(unique.begin(), unique.end());
          bool duplicated =
              std::adjacent_find(unique.begin(), unique.end()) != unique.end();
          if (!duplicated) {  // a subset/permutation the scan can produce itself
            bool identity = newColumns.size() == tableArity;
            for (size_t i = 0; identity && i < newColumns.size(); ++i) {
              identity = newColumns[i] == static_cast<int>(i);
            }
            if (identity) return {scanNode};  // identity projection disappears
            return {makeScan(scan.table, std::move(newColumns))};
          }
        }

        // Computed expressions: prune the scan to the referenced columns and
        // keep the projection on top.
        std::vector<int> used;
        for (const auto& e : exprs) e->collectColumns(used);
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        if (used.size() >= scanArity) return {};
        std::vector<int> newColumns;
        newColumns.reserve(used.size());
        for (int i : used) newColumns.push_back(toTableColumn(i));
        RelNodePtr pruned = makeScan(scan.table, std::move(newColumns));
        std::vector<ExprPtr> remapped;
        remapped.reserve(exprs.size());
        for (const auto& e : exprs) {
          remapped.push_back(e->remapColumns([&](int i) {
            return static_cast<int>(std::find(used.begin(), used.end(), i) -
                                    used.begin());
          }));
        }
        std::vector<std::string> names;
        for (const auto& f : root->rowType().fields()) names.push_back(f.name);
        return {makeProject(std::move(pruned), std::move(remapped), std::move(names))};
      });
}

RulePtr sortRemovalRule() {
  std::vector<Rule::ChildPattern> children{
      {0, [](const RelNode& n) {
         return n.kind() != RelKind::GroupRef && !n.traits().collation.empty();
       }}};
  return std::make_shared<LambdaRule>(
      "SORT_REMOVAL", /*directed=*/true,
      [](const RelNode& n) {
        return n.kind() == RelKind::Sort && isLogical(n) && !n.sort().keys.empty();
      },
      std::move(children),
      [](RuleContext&, const RelNodePtr& root,
         const std::vector<RelNodePtr>& bound) -> std::vector<RelNodePtr> {
        const auto& sort = root->sort();
        const Collation& provided = bound[0]->traits().collation;
        if (!collationSatisfies(provided, sort.keys)) return {};
        if (!sort.fetch && !sort.offset) return {bound[0]};
        // Keys are already enforced by the input; keep only the limit.
        return {makeSort(root->input(0), {}, sort.fetch, sort.offset,
                         TraitSet{Convention::logical(), provided})};
      });
}

namespace {

RulePtr enumerableRuleFor(RelKind kind, const std::string& name) {
  return std::make_shared<LambdaRule>(
      name, /*directed=*/false,
      [kind](const RelNode& n) { return n.kind() == kind && isLogical(n); },
      std::vector<Rule::ChildPattern>{},
      [](RuleContext&, const RelNodePtr& root,
         const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
        return {makeOperator(
            root->kind(), root->attrs(), root->inputs(),
            TraitSet{Convention::enumerable(), root->traits().collation})};
      });
}

}  // namespace

std::vector<RulePtr> enumerableConverterRules() {
  return {
      enumerableRuleFor(RelKind::Filter, "ENUM_FILTER"),
      enumerableRuleFor(RelKind::Project, "ENUM_PROJECT"),
      enumerableRuleFor(RelKind::Join, "ENUM_JOIN"),
      enumerableRuleFor(RelKind::Aggregate, "ENUM_AGGREGATE"),
      enumerableRuleFor(RelKind::Sort, "ENUM_SORT"),
      enumerableRuleFor(RelKind::Values, "ENUM_VALUES"),
  };
}

RulePtr adapterScanRule(const std::string& adapterKind, const std::string& schemaName) {
  Convention conv = Convention::adapter(adapterKind, schemaName);
  std::string schema = schemaName;
  return std::make_shared<LambdaRule>(
      fmt::format("{}_SCAN:{}", toUpper(adapterKind), schemaName), /*directed=*/false,
      [schema](const RelNode& n) {
        if (!isLogical(n)) return false;
        if (n.kind() == RelKind::TableScan) {
          return toLower(n.scan().table->schemaName()) == toLower(schema);
        }
        if (n.kind() == RelKind::ViewScan) {
          return toLower(n.viewScan().backing->schemaName()) == toLower(schema);
        }
        return false;
      },
      std::vector<Rule::ChildPattern>{},
      [conv](RuleContext&, const RelNodePtr& root,
             const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
        return {root->withTraits(TraitSet{conv, root->traits().collation})};
      });
}

RulePtr toEnumerableRule(const std::string& adapterKind, const std::string& schemaName) {
  Convention conv = Convention::adapter(adapterKind, schemaName);
  return std::make_shared<LambdaRule>(
      fmt::format("TO_ENUMERABLE:{}", schemaName), /*directed=*/false,
      [conv](const RelNode& n) {
        return n.traits().convention == conv && n.kind() != RelKind::Converter &&
               n.kind() != RelKind::GroupRef;
      },
      std::vector<Rule::ChildPattern>{},
      [conv](RuleContext& ctx, const RelNodePtr& root,
             const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
        TraitSet target{Convention::enumerable(), root->traits().collation};
        return {makeOperator(RelKind::Converter, ConverterAttrs{target, conv},
                             {ctx.selfRef(root)})};
      });
}

std::vector<RulePtr> remotePushdownRules(const std::string& schemaName,
                                         const Capabilities& caps) {
  Convention conv = Convention::adapter("remote", schemaName);
  auto childInConv = [conv]() {
    return std::vector<Rule::ChildPattern>{
        {0, [conv](const RelNode& n) { return n.traits().convention == conv; }}};
  };
  std::vector<RulePtr> rules;

  if (caps.filter) {
    rules.push_back(std::make_shared<LambdaRule>(
        fmt::format("REMOTE_FILTER:{}", schemaName), false,
        [](const RelNode& n) { return n.kind() == RelKind::Filter && isLogical(n); },
        childInConv(),
        [conv](RuleContext&, const RelNodePtr& root,
               const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
          return {makeOperator(RelKind::Filter, root->attrs(), root->inputs(),
                               TraitSet{conv, root->traits().collation})};
        }));
  }
  if (caps.projection) {
    rules.push_back(std::make_shared<LambdaRule>(
        fmt::format("REMOTE_PROJECT:{}", schemaName), false,
        [](const RelNode& n) { return n.kind() == RelKind::Project && isLogical(n); },
        childInConv(),
        [conv](RuleContext&, const RelNodePtr& root,
               const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
          return {makeOperator(RelKind::Project, root->attrs(), root->inputs(),
                               TraitSet{conv, root->traits().collation})};
        }));
  }
  if (caps.sort) {
    rules.push_back(std::make_shared<LambdaRule>(
        fmt::format("REMOTE_SORT:{}", schemaName), false,
        [](const RelNode& n) {
          // The generated dialect has LIMIT but no OFFSET.
          return n.kind() == RelKind::Sort && isLogical(n) && !n.sort().offset;
        },
        childInConv(),
        [conv](RuleContext&, const RelNodePtr& root,
               const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
          return {makeOperator(RelKind::Sort, root->attrs(), root->inputs(),
                               TraitSet{conv, root->traits().collation})};
        }));
  }
  if (caps.aggregate) {
    rules.push_back(std::make_shared<LambdaRule>(
        fmt::format("REMOTE_AGGREGATE:{}", schemaName), false,
        [](const RelNode& n) { return n.kind() == RelKind::Aggregate && isLogical(n); },
        childInConv(),
        [conv](RuleContext&, const RelNodePtr& root,
               const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
          return {makeOperator(RelKind::Aggregate, root->attrs(), root->inputs(),
                               TraitSet{conv, root->traits().collation})};
        }));
  }
  if (caps.joinWithinBackend) {
    std::vector<Rule::ChildPattern> both{
        {0, [conv](const RelNode& n) { return n.traits().convention == conv; }},
        {1, [conv](const RelNode& n) { return n.traits().convention == conv; }}};
    rules.push_back(std::make_shared<LambdaRule>(
        fmt::format("REMOTE_JOIN:{}", schemaName), false,
        [](const RelNode& n) { return n.kind() == RelKind::Join && isLogical(n); },
        std::move(both),
        [conv](RuleContext&, const RelNodePtr& root,
               const std::vector<RelNodePtr>&) -> std::vector<RelNodePtr> {
          return {makeOperator(RelKind::Join, root->attrs(), root->inputs(),
                               TraitSet{conv, root->traits().collation})};
        }));
  }
  return rules;
}

std::vector<RulePtr> defaultRuleSet(const Catalog& catalog,
                                    const std::vector<std::string>& disabled) {
  std::vector<RulePtr> rules = {
      filterIntoJoinRule(),   filterMergeRule(), filterTrivialRemovalRule(),
      projectPushdownRule(),  sortRemovalRule(),
  };
  for (auto& r : enumerableConverterRules()) rules.push_back(std::move(r));
  for (auto& r : catalog.adapterRules()) rules.push_back(r);

  std::set<std::string> off(disabled.begin(), disabled.end());
  std::vector<RulePtr> enabled;
  for (auto& r : rules) {
    if (off.count(r->name()) == 0) enabled.push_back(std::move(r));
  }
  return enabled;
}

}  // namespace relq
