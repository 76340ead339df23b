#include "relq/matview.hpp"

#include <fmt/format.h>

#include <map>
#include <set>

#include "relq/error.hpp"
#include "relq/sql/parser.hpp"
#include "relq/sql/translator.hpp"

namespace relq {

MaterializationPtr registerMaterialization(Catalog& catalog, const std::string& viewSql,
                                           const std::string& backingTable) {
  sql::Statement stmt = sql::parseStatement(viewSql);
  RelNodePtr viewPlan = sql::translateQuery(*stmt.query, catalog);

  std::string schemaName;
  std::string tableName = backingTable;
  auto dot = backingTable.find('.');
  if (dot != std::string::npos) {
    schemaName = backingTable.substr(0, dot);
    tableName = backingTable.substr(dot + 1);
  }
  TablePtr backing = catalog.findTable(schemaName, tableName);
  if (!backing) {
    raise(ErrorCode::ValidationError,
          fmt::format("materialization backing table '{}' does not exist",
                      backingTable));
  }
  if (!backing->rowType().equivalent(viewPlan->rowType())) {
    raise(ErrorCode::RowTypeMismatch,
          fmt::format("backing table row type {} does not match view row type {}",
                      backing->rowType().render(), viewPlan->rowType().render()));
  }

  std::string planDigest = viewPlan->digest();
  for (const auto& existing : catalog.materializations()) {
    if (existing->viewPlan()->digest() == planDigest &&
        existing->backingTable() == backing) {
      return existing;  // idempotent re-registration
    }
  }
  auto mat = std::make_shared<Materialization>(
      fmt::format("m{}", catalog.materializations().size()), viewSql,
      std::move(viewPlan), std::move(backing));
  catalog.addMaterialization(mat);
  return mat;
}

namespace {

std::set<std::string> conjunctDigests(const ExprPtr& predicate) {
  std::set<std::string> out;
  for (const auto& conjunct : conjunctsOf(predicate)) out.insert(conjunct->digest());
  return out;
}

/// The view's projection inverted: source column -> view output column, for
/// plain column references only.
std::map<int, int> projectionInverse(const std::vector<ExprPtr>& exprs) {
  std::map<int, int> out;
  for (size_t j = 0; j < exprs.size(); ++j) {
    if (exprs[j]->variant() == ScalarExpr::Variant::ColumnRef) {
      out.emplace(exprs[j]->index(), static_cast<int>(j));
    }
  }
  return out;
}

/// Rewrites `expr` from the view-input scope to the view-output scope;
/// nullptr when a referenced column is not exposed by the view.
ExprPtr remapThroughView(const ExprPtr& expr, const std::map<int, int>& inverse) {
  std::vector<int> used;
  expr->collectColumns(used);
  for (int c : used) {
    if (inverse.count(c) == 0) return nullptr;
  }
  return expr->remapColumns([&](int c) { return inverse.at(c); });
}

/// Splits the query predicate into (covered, residual) against the view's
/// conjuncts; covered is true when every view conjunct appears in the query
/// (the query strictly implies the view under conjunct-subset implication).
bool splitResidual(const ExprPtr& queryPred, const ExprPtr& viewPred,
                   std::vector<ExprPtr>& residual) {
  std::set<std::string> viewConjuncts = conjunctDigests(viewPred);
  std::set<std::string> queryConjuncts;
  for (const auto& conjunct : conjunctsOf(queryPred)) {
    queryConjuncts.insert(conjunct->digest());
    if (viewConjuncts.count(conjunct->digest()) == 0) residual.push_back(conjunct);
  }
  for (const auto& vc : viewConjuncts) {
    if (queryConjuncts.count(vc) == 0) return false;
  }
  return true;
}

/// Replacement for `node` itself, or nullptr. Cases follow the rewrite
/// algorithm: exact digest match; a Filter/Project tower over an input that
/// unifies with the view's, with the view keeping a conjunct subset and the
/// leftovers becoming residual operators above the ViewScan.
RelNodePtr unifyRoot(const RelNodePtr& node, const Materialization& mat,
                     const std::string& viewDigest) {
  if (node->digest() == viewDigest) {
    return makeViewScan(mat.id(), mat.backingTable());
  }
  const RelNodePtr& viewPlan = mat.viewPlan();

  // Bare-filter form (programmatic plans).
  if (node->kind() == RelKind::Filter && viewPlan->kind() == RelKind::Filter &&
      node->input(0)->digest() == viewPlan->input(0)->digest()) {
    std::vector<ExprPtr> residual;
    if (splitResidual(node->filter().condition, viewPlan->filter().condition, residual)) {
      RelNodePtr scan = makeViewScan(mat.id(), mat.backingTable());
      if (residual.empty()) return scan;
      return makeFilter(std::move(scan), makeConjunction(std::move(residual)));
    }
    return nullptr;
  }

  // Translated queries carry a Project at the top: unify
  //   Q = Project(pq, [Filter(cq,] X [)])   with
  //   V = Project(pv, [Filter(cv,] X [)])
  // rewriting Q's expressions through the view's projected columns.
  if (node->kind() != RelKind::Project || viewPlan->kind() != RelKind::Project) {
    return nullptr;
  }
  RelNodePtr queryInput = node->input(0);
  RelNodePtr viewInput = viewPlan->input(0);
  ExprPtr queryPred;
  ExprPtr viewPred;
  if (queryInput->kind() == RelKind::Filter) {
    queryPred = queryInput->filter().condition;
    queryInput = queryInput->input(0);
  }
  if (viewInput->kind() == RelKind::Filter) {
    viewPred = viewInput->filter().condition;
    viewInput = viewInput->input(0);
  }
  if (queryInput->digest() != viewInput->digest()) return nullptr;

  std::vector<ExprPtr> residual;
  if (viewPred) {
    if (!queryPred) return nullptr;  // the view filters more than the query
    if (!splitResidual(queryPred, viewPred, residual)) return nullptr;
  } else if (queryPred) {
    residual = conjunctsOf(queryPred);
  }

  std::map<int, int> inverse = projectionInverse(viewPlan->project().exprs);
  std::vector<ExprPtr> remappedResidual;
  for (const auto& conjunct : residual) {
    ExprPtr remapped = remapThroughView(conjunct, inverse);
    if (!remapped) return nullptr;
    remappedResidual.push_back(std::move(remapped));
  }
  std::vector<ExprPtr> projections;
  for (const auto& e : node->project().exprs) {
    ExprPtr remapped = remapThroughView(e, inverse);
    if (!remapped) return nullptr;
    projections.push_back(std::move(remapped));
  }

  RelNodePtr plan = makeViewScan(mat.id(), mat.backingTable());
  if (!remappedResidual.empty()) {
    plan = makeFilter(std::move(plan), makeConjunction(std::move(remappedResidual)));
  }
  std::vector<std::string> names;
  for (const auto& field : node->rowType().fields()) names.push_back(field.name);
  return makeProject(std::move(plan), std::move(projections), std::move(names));
}

/// Bottom-up rewrite; nullptr when nothing under `node` unified.
RelNodePtr rewrite(const RelNodePtr& node, const Materialization& mat,
                   const std::string& viewDigest) {
  if (RelNodePtr replaced = unifyRoot(node, mat, viewDigest)) return replaced;
  bool changed = false;
  std::vector<RelNodePtr> inputs;
  inputs.reserve(node->inputs().size());
  for (const auto& input : node->inputs()) {
    if (RelNodePtr replaced = rewrite(input, mat, viewDigest)) {
      inputs.push_back(replaced);
      changed = true;
    } else {
      inputs.push_back(input);
    }
  }
  if (!changed) return nullptr;
  return node->withInputs(std::move(inputs));
}

}  // namespace

std::vector<RelNodePtr> substitute(const RelNodePtr& queryPlan,
                                   const std::vector<MaterializationPtr>& materializations) {
  std::vector<RelNodePtr> out;
  for (const auto& mat : materializations) {
    if (!mat->enabled()) continue;
    std::string viewDigest = mat->viewPlan()->digest();
    if (RelNodePtr rewritten = rewrite(queryPlan, *mat, viewDigest)) {
      out.push_back(rewritten);
    }
  }
  return out;
}

}  // namespace relq
