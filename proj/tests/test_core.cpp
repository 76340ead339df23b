#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relq/builder.hpp"
#include "relq/error.hpp"
#include "relq/exec.hpp"
#include "relq/memo.hpp"
#include "relq/rel_node.hpp"
#include "testutil.hpp"

using namespace relq;
using namespace relq::test;

namespace {

#define CHECK_ERROR(expr, expectedCode)              \
  do {                                               \
    bool caught = false;                             \
    try {                                            \
      (void)(expr);                                  \
    } catch (const Error& e) {                       \
      caught = true;                                 \
      CHECK(e.code() == (expectedCode));             \
    }                                                \
    CHECK_MESSAGE(caught, "expected " #expectedCode);\
  } while (0)

TablePtr table(const Catalog& catalog, const std::string& name) {
  TablePtr t = catalog.findTable("", name);
  REQUIRE(t != nullptr);
  return t;
}

}  // namespace

TEST_CASE("values: rendering and key semantics") {
  CHECK(Value::int64(42).render() == "42");
  CHECK(Value::float64(1.0).render() == "1.0");
  CHECK(Value::float64(0.1).render() == "0.1");
  CHECK(Value::string("it's").render() == "'it''s'");
  CHECK(Value::null().render() == "NULL");
  CHECK(Value::array({Value::int64(1), Value::float64(2.5)}).render() == "[1, 2.5]");

  // -0.0 normalizes to 0.0 in keys; INT and FLOAT are distinct key kinds.
  CHECK(Value::float64(-0.0).keyEquals(Value::float64(0.0)));
  CHECK(Value::float64(-0.0).keyHash() == Value::float64(0.0).keyHash());
  CHECK_FALSE(Value::int64(1).keyEquals(Value::float64(1.0)));
  CHECK(Value::null().keyEquals(Value::null()));

  CHECK(Value::int64(1).compare(Value::float64(1.5)) < 0);
  CHECK(Value::string("a").compare(Value::string("b")) < 0);
  CHECK_ERROR(Value::string("a").compare(Value::int64(1)), ErrorCode::TypeMismatch);
}

TEST_CASE("row types: unique names, case-insensitive") {
  CHECK_ERROR(RowType({{"a", ScalarType::int64()}, {"A", ScalarType::string()}}),
              ErrorCode::ValidationError);
  RowType joined = concatRowTypes(
      RowType({{"name", ScalarType::string()}, {"id", ScalarType::int64()}}),
      RowType({{"name", ScalarType::string()}}), /*rightNullable=*/true);
  CHECK(joined.field(2).name == "name0");
  CHECK(joined.field(2).type.nullable());
  CHECK(joined.indexOf("NAME") == 0);
}

TEST_CASE("make_operator: examples and errors") {
  Catalog hr = hrCatalog();
  RelNodePtr emps = makeScan(table(hr, "emps"));

  SUBCASE("filter preserves schema") {
    RelNodePtr filter = makeFilter(emps, ex::gt(ex::col(1), ex::lit(int64_t{10})));
    CHECK(filter->rowType().equivalent(emps->rowType()));
  }
  SUBCASE("join concatenates row types") {
    RelNodePtr a = makeScan(table(hr, "depts"));
    RelNodePtr b = makeScan(table(hr, "employee_data"));
    RelNodePtr join = makeJoin(JoinType::Inner, ex::eq(ex::col(0), ex::col(2)), a, b);
    CHECK(join->rowType().size() == 4);
    CHECK(join->rowType().field(0).name == "deptno");
    CHECK(join->rowType().field(2).name == "deptno0");
  }
  SUBCASE("column out of range") {
    RelNodePtr two = makeScan(table(hr, "employee_data"));
    CHECK_ERROR(makeFilter(two, ex::gt(ex::col(7), ex::lit(int64_t{10}))),
                ErrorCode::ColumnOutOfRange);
  }
  SUBCASE("filter predicate must be boolean") {
    CHECK_ERROR(makeFilter(emps, ex::plus(ex::col(1), ex::lit(int64_t{1}))),
                ErrorCode::TypeMismatch);
  }
  SUBCASE("join arity") {
    CHECK_ERROR(makeOperator(RelKind::Join, JoinAttrs{JoinType::Inner, ex::lit(true)},
                             {emps}),
                ErrorCode::ArityError);
  }
}

TEST_CASE("derive_row_type: aggregate, project, sort") {
  Catalog hr = hrCatalog();
  RelNodePtr scan = makeScan(table(hr, "employee_data"));

  // The builder example: groupKey(deptno), COUNT() AS c, SUM(sal) AS s.
  RelNodePtr agg = makeAggregate(
      scan, {0}, {{AggFunc::CountStar, -1, "c"}, {AggFunc::Sum, 1, "s"}});
  REQUIRE(agg->rowType().size() == 3);
  CHECK(agg->rowType().field(0).name == "deptno");
  CHECK(agg->rowType().field(1).name == "c");
  CHECK(agg->rowType().field(1).type.kind() == ScalarType::Kind::Int64);
  CHECK(agg->rowType().field(2).name == "s");
  CHECK(agg->rowType().field(2).type.kind() == ScalarType::Kind::Int64);

  RelNodePtr emps = makeScan(table(hr, "emps"));
  RelNodePtr project = makeProject(emps, {ex::col(0)}, {"empid"});
  CHECK(project->rowType().size() == 1);

  RelNodePtr sort = makeSort(emps, {{0, Direction::Ascending}});
  CHECK(sort->rowType().equivalent(emps->rowType()));

  // Row-type stability: repeated derivation is structurally equal.
  RowType again = deriveRowType(RelKind::Aggregate, agg->attrs(), agg->inputs());
  CHECK(again.equivalent(agg->rowType()));
}

TEST_CASE("digest: structural determinism and canonicalization") {
  Catalog hr = hrCatalog();
  RelNodePtr scan1 = makeScan(table(hr, "emps"));
  RelNodePtr scan2 = makeScan(table(hr, "emps"));
  ExprPtr pred1 = ex::gt(ex::col(1), ex::lit(int64_t{10}));
  ExprPtr pred2 = ex::gt(ex::col(1), ex::lit(int64_t{10}));
  CHECK(makeFilter(scan1, pred1)->digest() == makeFilter(scan2, pred2)->digest());

  SUBCASE("traits are part of identity") {
    RelNodePtr plain = makeScan(table(hr, "emps"));
    RelNodePtr collated = plain->withTraits(
        TraitSet{Convention::logical(), {{0, Direction::Ascending}}});
    CHECK(plain->digest() != collated->digest());
  }
  SUBCASE("commutative operands dedupe") {
    ExprPtr a = ex::gt(ex::col(1), ex::lit(int64_t{10}));
    ExprPtr b = ex::isNotNull(ex::col(4));
    CHECK(ex::and_(a, b)->digest() == ex::and_(b, a)->digest());
    CHECK(ex::and_(ex::and_(a, b), pred1)->digest() ==
          ex::and_(a, ex::and_(b, pred1))->digest());
    CHECK(ex::eq(ex::col(0), ex::lit(int64_t{1}))->digest() ==
          ex::eq(ex::lit(int64_t{1}), ex::col(0))->digest());
    CHECK(ex::minus(ex::col(0), ex::lit(int64_t{1}))->digest() !=
          ex::minus(ex::lit(int64_t{1}), ex::col(0))->digest());
  }
  SUBCASE("int and float literals never collide") {
    CHECK(ex::lit(int64_t{1})->digest() != ex::lit(1.0)->digest());
  }
  SUBCASE("filters over different groups have different digests") {
    Memo memo;
    int g1 = memo.registerNode(makeScan(table(hr, "emps"))).first;
    int g2 = memo.registerNode(makeScan(table(hr, "depts"))).first;
    RelNodePtr overG1 = makeFilter(memo.groupRefNode(g1), ex::isNotNull(ex::col(0)));
    RelNodePtr overG2 = makeFilter(memo.groupRefNode(g2), ex::isNotNull(ex::col(0)));
    CHECK(memo.memoDigest(*overG1) != memo.memoDigest(*overG2));
  }
}

TEST_CASE("digest soundness: commuted twins execute identically") {
  Catalog m = memFixtureCatalog();
  std::mt19937 rng(7);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    RelNodePtr scan = makeScan(table(m, "T1"));
    ExprPtr a = randomPredicate(rng, scan->rowType());
    ExprPtr b = randomPredicate(rng, scan->rowType());
    RelNodePtr original = makeFilter(scan, ex::and_(a, b));
    RelNodePtr commuted = makeFilter(scan, ex::and_(b, a));
    if (original->digest() == commuted->digest()) {
      checked++;
      CHECK(multisetEquals(naiveExecute(original), naiveExecute(commuted)));
    }
  }
  CHECK(checked > 100);  // AND canonicalization makes nearly all pairs collide
}

TEST_CASE("plan text rendering") {
  Catalog hr = hrCatalog();
  RelNodePtr scan = makeScan(table(hr, "employee_data"));
  RelNodePtr filter = makeFilter(scan, ex::gt(ex::col(1), ex::lit(int64_t{150})));
  RelNodePtr sort = makeSort(filter, {{0, Direction::Ascending}}, int64_t{2});
  CHECK(sort->renderTree() ==
        "Sort[keys=[0 ASC], fetch=2, traits=LOGICAL.[0 ASC]]\n"
        "  Filter[cond=$1 > 150, traits=LOGICAL.[]]\n"
        "    TableScan[table=hr.employee_data, traits=LOGICAL.[]]\n");
}

TEST_CASE("builder: paper listing and constructor equivalence") {
  Catalog hr = hrCatalog();

  RelBuilder b(hr);
  b.scan("employee_data");
  RelNodePtr built = b.aggregate(b.groupKey({"deptno"}),
                                 {b.countStar("c"), b.sum("sal", "s")})
                         .build();

  RelNodePtr manual = makeAggregate(
      makeScan(table(hr, "employee_data")), {0},
      {{AggFunc::CountStar, -1, "c"}, {AggFunc::Sum, 1, "s"}});
  CHECK(built->digest() == manual->digest());
  REQUIRE(built->rowType().size() == 3);
  CHECK(built->rowType().field(0).name == "deptno");

  // Running it: employee_data groups to (10, 2, 300), (20, 1, 300).
  auto rows = naiveExecute(built);
  CHECK(multisetEquals(rows, {{Value::int64(10), Value::int64(2), Value::int64(300)},
                              {Value::int64(20), Value::int64(1), Value::int64(300)}}));

  SUBCASE("bare scan") {
    RelBuilder b2(hr);
    RelNodePtr scan = b2.scan("emps").build();
    CHECK(scan->kind() == RelKind::TableScan);
  }
  SUBCASE("join pops two") {
    RelBuilder b2(hr);
    b2.scan("emps");
    CHECK_ERROR(b2.join(JoinType::Inner, ex::lit(true)), ErrorCode::EmptyStack);
  }
  SUBCASE("unknown table") {
    RelBuilder b2(hr);
    CHECK_ERROR(b2.scan("nope"), ErrorCode::UnknownTable);
  }
  SUBCASE("values frames") {
    RelBuilder b2(hr);
    RowType rowType({{"x", ScalarType::int64(false)}});
    RelNodePtr tree = b2.values(rowType, {{Value::int64(4)}, {Value::int64(5)}})
                          .filter(ex::gt(b2.field("x"), ex::lit(int64_t{4})))
                          .build();
    CHECK(multisetEquals(naiveExecute(tree), {{Value::int64(5)}}));
  }
  SUBCASE("builder join equivalence") {
    RelBuilder b2(hr);
    b2.scan("emps");
    b2.scan("depts");
    ExprPtr cond = ex::eq(b2.field(0, "deptno"), b2.field(1, "deptno"));
    RelNodePtr joined = b2.join(JoinType::Inner, cond)
                            .filter(ex::gt(b2.field("sal"), ex::lit(int64_t{1000})))
                            .build();
    RelNodePtr manualJoin = makeFilter(
        makeJoin(JoinType::Inner, ex::eq(ex::col(1), ex::col(5)),
                 makeScan(table(hr, "emps")), makeScan(table(hr, "depts"))),
        ex::gt(ex::col(3), ex::lit(int64_t{1000})));
    CHECK(joined->digest() == manualJoin->digest());
  }
}

TEST_CASE("window nodes model, render and digest without executing") {
  Catalog hr = hrCatalog();
  RelNodePtr scan = makeScan(table(hr, "emps"));
  WindowAttrs attrs;
  attrs.partitionKeys = {1};
  attrs.orderKeys = {{0, Direction::Ascending}};
  attrs.calls = {{AggFunc::Sum, 3, "running_sal"}};
  RelNodePtr window = makeWindow(scan, attrs);
  CHECK(window->rowType().size() == scan->rowType().size() + 1);
  CHECK(window->renderLine() ==
        "Window[partition=[1], order=[0 ASC], calls=[SUM($3) AS running_sal], "
        "frame=UNBOUNDED PRECEDING..CURRENT ROW, traits=LOGICAL.[]]");
  CHECK(window->digest() == makeWindow(makeScan(table(hr, "emps")), attrs)->digest());
  CHECK_ERROR(naiveExecute(window), ErrorCode::UnsupportedNode);
}

TEST_CASE("trait neutrality: identity converters do not change results") {
  Catalog m = memFixtureCatalog();
  std::mt19937 rng(11);
  for (int i = 0; i < 40; ++i) {
    RelNodePtr plan = randomLogicalPlan(rng, m);
    std::vector<Row> expected = naiveExecute(plan);
    // Re-wrap the root and every scan in converters that only change traits.
    std::function<RelNodePtr(const RelNodePtr&)> wrap =
        [&](const RelNodePtr& node) -> RelNodePtr {
      std::vector<RelNodePtr> inputs;
      for (const auto& input : node->inputs()) inputs.push_back(wrap(input));
      RelNodePtr rebuilt = node->inputs().empty() ? node : node->withInputs(inputs);
      if (rebuilt->kind() == RelKind::TableScan) {
        return makeConverter(rebuilt, TraitSet{Convention::logical(),
                                               rebuilt->traits().collation});
      }
      return rebuilt;
    };
    CHECK(multisetEquals(naiveExecute(wrap(plan)), expected));
  }
}
