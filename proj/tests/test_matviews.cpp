#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <fmt/format.h>

#include "relq/adapters/model.hpp"
#include "relq/engine.hpp"
#include "relq/error.hpp"
#include "relq/exec.hpp"
#include "relq/matview.hpp"
#include "relq/planner.hpp"
#include "relq/rules.hpp"
#include "relq/sql/parser.hpp"
#include "relq/sql/translator.hpp"
#include "testutil.hpp"

using namespace relq;
using namespace relq::test;

namespace {

const char* kSumViewSql = "SELECT deptno, SUM(sal) AS s FROM emps GROUP BY deptno";
const char* kFilterViewSql = "SELECT empid, deptno FROM emps WHERE sal > 900";

RelNodePtr queryPlan(const Catalog& catalog, const std::string& sql) {
  return sql::translateQuery(*sql::parseStatement(sql).query, catalog);
}

struct Fixture {
  Catalog catalog;
  std::shared_ptr<MemTable> emps;
  std::shared_ptr<MemTable> sumBacking;
  std::shared_ptr<MemTable> filterBacking;

  Fixture() : catalog(hrCatalog()) {
    emps = std::const_pointer_cast<MemTable>(
        std::dynamic_pointer_cast<const MemTable>(catalog.findTable("hr", "emps")));
    // The harness populates every backing table by oracle-evaluating the
    // view SQL; that is what licenses the rewrite-soundness assertions.
    sumBacking = populate(kSumViewSql, "EMPS_SUM");
    filterBacking = populate(kFilterViewSql, "EMPS_HI");
  }

  std::shared_ptr<MemTable> populate(const std::string& viewSql, const std::string& name) {
    RelNodePtr plan = queryPlan(catalog, viewSql);
    return addMemTableTo(catalog, "hr", name, plan->rowType(), naiveExecute(plan));
  }

  QueryResult run(const std::string& sql, bool useMats = true) {
    Engine engine(catalog);
    QueryOptions options;
    options.noMaterializations = !useMats;
    return engine.run(sql, options);
  }
};

}  // namespace

TEST_CASE("register_materialization: checks, idempotence") {
  Fixture f;
  auto mat = registerMaterialization(f.catalog, kSumViewSql, "hr.EMPS_SUM");
  CHECK(mat->id() == "m0");
  CHECK(mat->backingTable()->name() == "EMPS_SUM");
  CHECK(f.catalog.materializations().size() == 1);

  SUBCASE("registering twice with the same definition is idempotent") {
    auto again = registerMaterialization(f.catalog, kSumViewSql, "hr.EMPS_SUM");
    CHECK(again == mat);
    CHECK(f.catalog.materializations().size() == 1);
  }
  SUBCASE("mismatched backing row type") {
    addMemTableTo(f.catalog, "hr", "WRONG", RowType({{"x", ScalarType::int64()}}), {});
    try {
      registerMaterialization(f.catalog, kSumViewSql, "hr.WRONG");
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::RowTypeMismatch);
    }
  }
  SUBCASE("missing backing table") {
    CHECK_THROWS_AS(registerMaterialization(f.catalog, kSumViewSql, "hr.NOPE"), Error);
  }
  SUBCASE("invalid view SQL") {
    CHECK_THROWS_AS(registerMaterialization(f.catalog, "SELECT nope FROM emps", "hr.EMPS_SUM"),
                    Error);
  }
}

TEST_CASE("substitute: exact, residual, and non-matching cases") {
  Fixture f;
  auto sumMat = registerMaterialization(f.catalog, kSumViewSql, "hr.EMPS_SUM");
  auto filterMat = registerMaterialization(f.catalog, kFilterViewSql, "hr.EMPS_HI");

  SUBCASE("exact match replaces the whole plan") {
    auto alts = substitute(queryPlan(f.catalog, kSumViewSql), {sumMat});
    REQUIRE(alts.size() == 1);
    CHECK(alts[0]->kind() == RelKind::ViewScan);
  }
  SUBCASE("the query's extra conjunct survives as a residual filter") {
    RelNodePtr q = queryPlan(
        f.catalog, "SELECT empid, deptno FROM emps WHERE sal > 900 AND deptno = 10");
    auto alts = substitute(q, {filterMat});
    REQUIRE(alts.size() == 1);
    std::string text = alts[0]->renderTree();
    CHECK(text.find("ViewScan[view=m1, table=hr.EMPS_HI") != std::string::npos);
    CHECK(text.find("Filter[cond=$1 = 10") != std::string::npos);
    CHECK(text.find("TableScan[table=hr.emps") == std::string::npos);
    // Oracle soundness of the rewrite, backing populated by the oracle.
    CHECK(multisetEquals(naiveExecute(alts[0]), naiveExecute(q)));
  }
  SUBCASE("a match below the query's own operators rebuilds the ancestors") {
    RelNodePtr q = queryPlan(
        f.catalog,
        "SELECT deptno, SUM(sal) AS s FROM emps GROUP BY deptno ORDER BY deptno");
    auto alts = substitute(q, {sumMat});
    REQUIRE(alts.size() == 1);
    CHECK(alts[0]->kind() == RelKind::Sort);
    CHECK(alts[0]->renderTree().find("ViewScan[view=m0") != std::string::npos);
    CHECK(sequenceEquals(naiveExecute(alts[0]), naiveExecute(q)));
  }
  SUBCASE("a different aggregate does not unify") {
    RelNodePtr q =
        queryPlan(f.catalog, "SELECT deptno, MIN(sal) AS s FROM emps GROUP BY deptno");
    CHECK(substitute(q, {sumMat}).empty());
  }
  SUBCASE("a query filtering less than the view does not unify") {
    RelNodePtr q = queryPlan(f.catalog, "SELECT empid, deptno FROM emps");
    CHECK(substitute(q, {filterMat}).empty());
  }
}

TEST_CASE("the optimizer substitutes and the cost model decides") {
  Fixture f;
  registerMaterialization(f.catalog, kSumViewSql, "hr.EMPS_SUM");

  SUBCASE("exact-match query scans the materialization") {
    auto result = f.run(kSumViewSql);
    CHECK(result.planText.find("ViewScan[view=m0, table=hr.EMPS_SUM") !=
          std::string::npos);
    CHECK(result.planText.find("hr.emps,") == std::string::npos);
    CHECK(multisetEquals(result.rows,
                         naiveExecute(queryPlan(f.catalog, kSumViewSql))));
  }
  SUBCASE("--no-materializations uses the base table") {
    auto result = f.run(kSumViewSql, /*useMats=*/false);
    CHECK(result.planText.find("ViewScan") == std::string::npos);
    CHECK(result.planText.find("TableScan[table=hr.emps") != std::string::npos);
  }
  SUBCASE("non-regression: enabling materializations never raises the cost") {
    const char* queries[] = {
        kSumViewSql,
        "SELECT deptno, SUM(sal) AS s FROM emps GROUP BY deptno ORDER BY s DESC",
        "SELECT name FROM emps WHERE sal > 1000",
        "SELECT e.name, d.dname FROM emps e JOIN depts d ON e.deptno = d.deptno",
    };
    for (const char* sql : queries) {
      PlannerConfig with;
      with.ruleSet = defaultRuleSet(f.catalog);
      PlannerConfig without = with;
      without.useMaterializations = false;
      OptimizedPlan a = optimizeCostFull(queryPlan(f.catalog, sql), with, f.catalog);
      OptimizedPlan b = optimizeCostFull(queryPlan(f.catalog, sql), without, f.catalog);
      CHECK_MESSAGE(a.scalar <= b.scalar + 1e-9, sql);
    }
  }
}

TEST_CASE("materializations declared in the model file register at load") {
  TempDir dir;
  Catalog catalog = loadModelText(R"({
    "defaultSchema": "hr",
    "schemas": [
      {"name": "hr", "adapter": "mem", "tables": [
        {"name": "emps", "columns": [
          {"name": "deptno", "type": "BIGINT", "nullable": false},
          {"name": "sal", "type": "BIGINT", "nullable": false}],
         "rows": [[10, 100], [10, 200], [20, 300]]},
        {"name": "EMPS_SUM", "columns": [
          {"name": "deptno", "type": "BIGINT", "nullable": false},
          {"name": "s", "type": "BIGINT"}],
         "rows": [[10, 300], [20, 300]]}
      ]}
    ],
    "materializations": [
      {"sql": "SELECT deptno, SUM(sal) AS s FROM emps GROUP BY deptno",
       "table": "hr.EMPS_SUM"}
    ]
  })",
                                  dir.path());
  REQUIRE(catalog.materializations().size() == 1);
  Engine engine(catalog);
  auto result = engine.run("SELECT deptno, SUM(sal) AS s FROM emps GROUP BY deptno");
  CHECK(result.planText.find("ViewScan[view=m0, table=hr.EMPS_SUM") != std::string::npos);
  CHECK(multisetEquals(result.rows, {{Value::int64(10), Value::int64(300)},
                                     {Value::int64(20), Value::int64(300)}}));
}

TEST_CASE("staleness is visible: the rewrite really reads the backing table") {
  Fixture f;
  registerMaterialization(f.catalog, kSumViewSql, "hr.EMPS_SUM");

  // Mutate the base data without repopulating the materialization.
  auto rows = f.emps->scanAll();
  rows.push_back({Value::int64(150), Value::int64(10), Value::string("Zed"),
                  Value::int64(999), Value::null()});
  f.emps->setRows(rows);

  auto viaView = f.run(kSumViewSql).rows;
  auto fresh = naiveExecute(queryPlan(f.catalog, kSumViewSql));
  CHECK_FALSE(multisetEquals(viaView, fresh));  // divergence proves the rewrite

  // Repopulating the backing table re-aligns them.
  f.sumBacking->setRows(fresh);
  CHECK(multisetEquals(f.run(kSumViewSql).rows, fresh));
}
