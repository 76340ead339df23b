#include "testutil.hpp"

#include <fmt/format.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <functional>

#include "relq/adapters/mem_adapter.hpp"
#include "relq/adapters/model.hpp"
#include "relq/rules.hpp"

namespace relq::test {

namespace {

int counter = 0;

std::vector<Row> rowsOf(std::initializer_list<Row> rows) { return rows; }

void addMemTable(Catalog& catalog, const std::string& schemaName,
                 const std::string& tableName, RowType rowType, std::vector<Row> rows,
                 Collation collation = {}, double rowCount = -1) {
  addMemTableTo(catalog, schemaName, tableName, std::move(rowType), std::move(rows),
                std::move(collation), rowCount);
}

}  // namespace

std::shared_ptr<MemTable> addMemTableTo(Catalog& catalog, const std::string& schemaName,
                                        const std::string& tableName, RowType rowType,
                                        std::vector<Row> rows, Collation collation,
                                        double rowCount) {
  auto schema = catalog.findSchema(schemaName);
  if (!schema) {
    schema = std::make_shared<AdapterSchema>(schemaName, "mem",
                                             std::map<std::string, std::string>{});
    schema->addRule(adapterScanRule("mem", schemaName));
    schema->addRule(toEnumerableRule("mem", schemaName));
    catalog.addSchema(schema);
  }
  Statistics stats;
  stats.rowCount = rowCount < 0 ? static_cast<double>(rows.size()) : rowCount;
  Capabilities caps;
  caps.projection = true;
  auto table = std::make_shared<MemTable>(schemaName, tableName, std::move(rowType),
                                          stats, std::move(collation), caps,
                                          std::move(rows));
  schema->addTable(table);
  return table;
}

TempDir::TempDir() {
  path_ = std::filesystem::temp_directory_path() /
          fmt::format("relq_test_{}_{}", ::getpid(), counter++);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path TempDir::write(const std::string& name,
                                     const std::string& content) const {
  std::filesystem::path file = path_ / name;
  std::ofstream out(file);
  out << content;
  return file;
}

std::string renderRows(const std::vector<Row>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += renderRow(row);
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::string> canonicalRows(const std::vector<Row>& rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(renderRow(row));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool multisetEquals(const std::vector<Row>& a, const std::vector<Row>& b) {
  return canonicalRows(a) == canonicalRows(b);
}

bool sequenceEquals(const std::vector<Row>& a, const std::vector<Row>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (renderRow(a[i]) != renderRow(b[i])) return false;
  }
  return true;
}

bool resultsMatch(const RelNodePtr& logicalRoot, const std::vector<Row>& expected,
                  const std::vector<Row>& actual) {
  bool ordered = logicalRoot->kind() == RelKind::Sort && !logicalRoot->sort().keys.empty();
  return ordered ? sequenceEquals(expected, actual) : multisetEquals(expected, actual);
}

Catalog memFixtureCatalog() {
  Catalog catalog;
  RowType t1({{"a", ScalarType::int64(false)}, {"b", ScalarType::string(false)}});
  addMemTable(catalog, "m", "T1", t1,
              rowsOf({{Value::int64(1), Value::string("x")},
                      {Value::int64(2), Value::string("y")},
                      {Value::int64(3), Value::string("x")},
                      {Value::int64(4), Value::string("z")},
                      {Value::int64(2), Value::string("w")}}));
  RowType t2({{"a", ScalarType::int64(false)}, {"c", ScalarType::float64(true)}});
  addMemTable(catalog, "m", "T2", t2,
              rowsOf({{Value::int64(1), Value::float64(0.5)},
                      {Value::int64(2), Value::null()},
                      {Value::int64(3), Value::float64(2.25)},
                      {Value::int64(5), Value::float64(-1.5)}}));
  RowType t3({{"k", ScalarType::string(false)}, {"v", ScalarType::int64(true)}});
  addMemTable(catalog, "m", "T3", t3,
              rowsOf({{Value::string("x"), Value::int64(10)},
                      {Value::string("y"), Value::null()},
                      {Value::string("z"), Value::int64(30)},
                      {Value::string("x"), Value::int64(40)}}));
  return catalog;
}

const char* kSalesByNameSql =
    "SELECT products.name, COUNT(*) "
    "FROM sales JOIN products USING (productId) "
    "WHERE sales.discount IS NOT NULL "
    "GROUP BY products.name "
    "ORDER BY COUNT(*) DESC";

namespace {

const char* kSalesCsv =
    "productId,units,discount\n"
    "p1,5,\n"
    "p1,7,0.1\n"
    "p2,3,0.2\n";

const char* kProductsCsv =
    "productId,name\n"
    "p1,A\n"
    "p2,B\n";

const char* kSortedCsv =
    "a,b\n"
    "1,x\n"
    "2,y\n"
    "3,z\n";

std::vector<Row> salesRows() {
  return rowsOf({{Value::string("p1"), Value::int64(5), Value::null()},
                 {Value::string("p1"), Value::int64(7), Value::float64(0.1)},
                 {Value::string("p2"), Value::int64(3), Value::float64(0.2)}});
}

std::vector<Row> productsRows() {
  return rowsOf({{Value::string("p1"), Value::string("A")},
                 {Value::string("p2"), Value::string("B")}});
}

RowType salesRowType() {
  return RowType({{"productId", ScalarType::string(false)},
                  {"units", ScalarType::int64(false)},
                  {"discount", ScalarType::float64(true)}});
}

RowType productsRowType() {
  return RowType(
      {{"productId", ScalarType::string(false)}, {"name", ScalarType::string(false)}});
}

}  // namespace

Catalog salesCatalog(const TempDir& dir) {
  dir.write("sales.csv", kSalesCsv);
  dir.write("products.csv", kProductsCsv);
  dir.write("sorted.csv", kSortedCsv);
  std::string model = fmt::format(R"({{
    "defaultSchema": "s",
    "schemas": [
      {{"name": "s", "adapter": "csv", "tables": [
        {{"name": "sales", "path": "sales.csv", "rowCount": 100, "columns": [
          {{"name": "productId", "type": "VARCHAR", "nullable": false}},
          {{"name": "units", "type": "BIGINT", "nullable": false}},
          {{"name": "discount", "type": "DOUBLE"}}]}},
        {{"name": "products", "path": "products.csv", "rowCount": 50, "columns": [
          {{"name": "productId", "type": "VARCHAR", "nullable": false}},
          {{"name": "name", "type": "VARCHAR", "nullable": false}}]}},
        {{"name": "sorted_t", "path": "sorted.csv", "rowCount": 20,
          "collation": [{{"column": "a", "direction": "ASC"}},
                        {{"column": "b", "direction": "ASC"}}],
          "columns": [
            {{"name": "a", "type": "BIGINT", "nullable": false}},
            {{"name": "b", "type": "VARCHAR", "nullable": false}}]}}
      ]}}
    ]
  }})");
  Catalog catalog = loadModelText(model, dir.path());
  addMemTable(catalog, "mm", "sales", salesRowType(), salesRows(), {}, 100);
  addMemTable(catalog, "mm", "products", productsRowType(), productsRows(), {}, 50);
  return catalog;
}

Catalog hrCatalog() {
  Catalog catalog;
  RowType emps({{"empid", ScalarType::int64(false)},
                {"deptno", ScalarType::int64(false)},
                {"name", ScalarType::string(false)},
                {"sal", ScalarType::int64(false)},
                {"commission", ScalarType::int64(true)}});
  addMemTable(catalog, "hr", "emps", emps,
              rowsOf({{Value::int64(100), Value::int64(10), Value::string("Alice"),
                       Value::int64(1000), Value::int64(10)},
                      {Value::int64(110), Value::int64(10), Value::string("Bob"),
                       Value::int64(1200), Value::null()},
                      {Value::int64(120), Value::int64(20), Value::string("Cara"),
                       Value::int64(1500), Value::int64(20)},
                      {Value::int64(130), Value::int64(30), Value::string("Dave"),
                       Value::int64(800), Value::null()},
                      {Value::int64(140), Value::int64(20), Value::string("Eve"),
                       Value::int64(1500), Value::int64(5)}}));
  RowType depts({{"deptno", ScalarType::int64(false)}, {"dname", ScalarType::string(false)}});
  addMemTable(catalog, "hr", "depts", depts,
              rowsOf({{Value::int64(10), Value::string("Sales")},
                      {Value::int64(20), Value::string("Eng")},
                      {Value::int64(30), Value::string("Ops")},
                      {Value::int64(40), Value::string("Empty")}}));
  RowType employeeData(
      {{"deptno", ScalarType::int64(false)}, {"sal", ScalarType::int64(false)}});
  addMemTable(catalog, "hr", "employee_data", employeeData,
              rowsOf({{Value::int64(10), Value::int64(100)},
                      {Value::int64(10), Value::int64(200)},
                      {Value::int64(20), Value::int64(300)}}));
  return catalog;
}

namespace {

const char* kZipsDocs = R"({"city":"AMSTERDAM","loc":[4.9,52.3],"pop":820000}
{"city":"ROTTERDAM","loc":[4.5,51.9],"pop":620000}
{"city":"UTRECHT","loc":[5.1,52.1],"pop":360000}
)";

}  // namespace

Catalog zipsCatalog(const TempDir& dir) {
  dir.write("zips.json", kZipsDocs);
  std::string model = R"({
    "defaultSchema": "mongo_raw",
    "schemas": [
      {"name": "mongo_raw", "adapter": "doc", "tables": [
        {"name": "zips", "path": "zips.json", "rowCount": 3}
      ]}
    ],
    "views": [
      {"name": "zips_view",
       "sql": "SELECT CAST(_MAP['city'] AS VARCHAR(20)) AS city, CAST(_MAP['loc'][0] AS DOUBLE) AS longitude, CAST(_MAP['loc'][1] AS DOUBLE) AS latitude FROM mongo_raw.zips"}
    ]
  })";
  return loadModelText(model, dir.path());
}

namespace {

const char* kOrdersCsv =
    "orderId,productId,units\n"
    "1,p1,10\n"
    "2,p2,30\n"
    "3,p1,40\n"
    "4,p3,25\n";

const char* kRemoteProductsCsv =
    "productId,pname\n"
    "p1,X\n"
    "p2,Y\n"
    "p3,Z\n";

}  // namespace

Catalog federatedCatalog(const TempDir& dir) {
  dir.write("sales.csv", kSalesCsv);
  dir.write("products.csv", kProductsCsv);
  dir.write("sorted.csv", kSortedCsv);
  dir.write("orders.csv", kOrdersCsv);
  dir.write("rproducts.csv", kRemoteProductsCsv);
  std::string model = R"({
    "defaultSchema": "s",
    "schemas": [
      {"name": "s", "adapter": "csv", "tables": [
        {"name": "sales", "path": "sales.csv", "rowCount": 100, "columns": [
          {"name": "productId", "type": "VARCHAR", "nullable": false},
          {"name": "units", "type": "BIGINT", "nullable": false},
          {"name": "discount", "type": "DOUBLE"}]},
        {"name": "products", "path": "products.csv", "rowCount": 50, "columns": [
          {"name": "productId", "type": "VARCHAR", "nullable": false},
          {"name": "name", "type": "VARCHAR", "nullable": false}]}
      ]},
      {"name": "r", "adapter": "remote",
       "options": {"capabilities": "filter,projection,sort"},
       "tables": [
        {"name": "Orders", "path": "orders.csv", "rowCount": 1000, "columns": [
          {"name": "orderId", "type": "BIGINT", "nullable": false},
          {"name": "productId", "type": "VARCHAR", "nullable": false},
          {"name": "units", "type": "BIGINT", "nullable": false}]}
      ]},
      {"name": "rj", "adapter": "remote",
       "options": {"capabilities": "filter,projection,sort,aggregate,join"},
       "tables": [
        {"name": "Orders", "path": "orders.csv", "rowCount": 1000, "columns": [
          {"name": "orderId", "type": "BIGINT", "nullable": false},
          {"name": "productId", "type": "VARCHAR", "nullable": false},
          {"name": "units", "type": "BIGINT", "nullable": false}]},
        {"name": "Products", "path": "rproducts.csv", "rowCount": 100, "columns": [
          {"name": "productId", "type": "VARCHAR", "nullable": false},
          {"name": "pname", "type": "VARCHAR", "nullable": false}]}
      ]}
    ]
  })";
  return loadModelText(model, dir.path());
}

// ---------------------------------------------------------------------------
// Random plans
// ---------------------------------------------------------------------------

namespace {

int pick(std::mt19937& rng, int bound) {
  return static_cast<int>(rng() % static_cast<unsigned>(bound));
}

std::vector<int> columnsOfKind(const RowType& rowType, ScalarType::Kind kind) {
  std::vector<int> out;
  for (size_t i = 0; i < rowType.size(); ++i) {
    if (rowType.field(i).type.kind() == kind) out.push_back(static_cast<int>(i));
  }
  return out;
}

ExprPtr randomComparison(std::mt19937& rng, const RowType& rowType) {
  std::vector<int> ints = columnsOfKind(rowType, ScalarType::Kind::Int64);
  std::vector<int> floats = columnsOfKind(rowType, ScalarType::Kind::Float64);
  std::vector<int> strings = columnsOfKind(rowType, ScalarType::Kind::String);
  OpKind ops[] = {OpKind::Eq, OpKind::Ne, OpKind::Lt, OpKind::Le, OpKind::Gt, OpKind::Ge};
  OpKind op = ops[pick(rng, 6)];
  if (!ints.empty() && (floats.empty() || pick(rng, 2) == 0)) {
    ExprPtr col = ex::col(ints[pick(rng, static_cast<int>(ints.size()))]);
    ExprPtr lit = ex::lit(static_cast<int64_t>(pick(rng, 6)));
    return pick(rng, 4) == 0 ? ScalarExpr::call(op, {lit, col})
                             : ScalarExpr::call(op, {col, lit});
  }
  if (!floats.empty()) {
    ExprPtr col = ex::col(floats[pick(rng, static_cast<int>(floats.size()))]);
    return ScalarExpr::call(op, {col, ex::lit(static_cast<double>(pick(rng, 5)) - 1.0)});
  }
  if (!strings.empty()) {
    const char* lits[] = {"x", "y", "p1", "w"};
    ExprPtr col = ex::col(strings[pick(rng, static_cast<int>(strings.size()))]);
    return ScalarExpr::call(op, {col, ex::lit(lits[pick(rng, 4)])});
  }
  return ex::lit(true);
}

}  // namespace

ExprPtr randomPredicate(std::mt19937& rng, const RowType& rowType) {
  int shape = pick(rng, 10);
  if (shape < 4) return randomComparison(rng, rowType);
  if (shape < 6) {
    int col = pick(rng, static_cast<int>(rowType.size()));
    return pick(rng, 2) == 0 ? ex::isNull(ex::col(col)) : ex::isNotNull(ex::col(col));
  }
  if (shape < 8) {
    return ex::and_(randomComparison(rng, rowType), randomComparison(rng, rowType));
  }
  if (shape < 9) {
    return ex::or_(randomComparison(rng, rowType), randomComparison(rng, rowType));
  }
  return ex::not_(randomComparison(rng, rowType));
}

RelNodePtr randomLogicalPlan(std::mt19937& rng, const Catalog& catalog,
                             const PlanGenOptions& options) {
  auto schema = catalog.schemas().front();
  const auto& tables = schema->tables();

  std::function<RelNodePtr(int)> gen = [&](int depth) -> RelNodePtr {
    if (depth <= 0) {
      return makeScan(tables[pick(rng, static_cast<int>(tables.size()))]);
    }
    int choice = pick(rng, 10);
    if (choice < 2) {
      return makeScan(tables[pick(rng, static_cast<int>(tables.size()))]);
    }
    if (choice < 5) {
      RelNodePtr input = gen(depth - 1);
      return makeFilter(input, randomPredicate(rng, input->rowType()));
    }
    if (choice < 7) {
      RelNodePtr input = gen(depth - 1);
      const RowType& rowType = input->rowType();
      std::vector<ExprPtr> exprs;
      std::vector<std::string> names;
      int count = 1 + pick(rng, static_cast<int>(rowType.size()));
      for (int i = 0; i < count; ++i) {
        int col = pick(rng, static_cast<int>(rowType.size()));
        exprs.push_back(ex::col(col));
        names.push_back(fmt::format("c{}", i));
      }
      std::vector<int> ints = columnsOfKind(rowType, ScalarType::Kind::Int64);
      if (!ints.empty() && pick(rng, 3) == 0) {
        exprs.push_back(ex::plus(ex::col(ints[pick(rng, static_cast<int>(ints.size()))]),
                                 ex::lit(static_cast<int64_t>(1 + pick(rng, 3)))));
        names.push_back(fmt::format("c{}", count));
      }
      return makeProject(input, std::move(exprs), std::move(names));
    }
    if (choice < 8 && options.allowJoin && depth >= 2) {
      RelNodePtr left = gen(depth - 2);
      RelNodePtr right = gen(depth - 2);
      std::vector<int> leftInts = columnsOfKind(left->rowType(), ScalarType::Kind::Int64);
      std::vector<int> rightInts = columnsOfKind(right->rowType(), ScalarType::Kind::Int64);
      ExprPtr cond = ex::lit(true);
      if (!leftInts.empty() && !rightInts.empty()) {
        int l = leftInts[pick(rng, static_cast<int>(leftInts.size()))];
        int r = rightInts[pick(rng, static_cast<int>(rightInts.size()))];
        cond = ex::eq(ex::col(l),
                      ex::col(static_cast<int>(left->rowType().size()) + r));
      }
      JoinType type = pick(rng, 3) == 0 ? JoinType::Left : JoinType::Inner;
      return makeJoin(type, cond, left, right);
    }
    if (choice < 9 && options.allowAggregate) {
      RelNodePtr input = gen(depth - 1);
      const RowType& rowType = input->rowType();
      std::vector<int> keys;
      int keyCount = pick(rng, 3);  // 0..2 group keys
      for (int i = 0; i < keyCount; ++i) {
        int k = pick(rng, static_cast<int>(rowType.size()));
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
      }
      std::vector<AggCall> calls{{AggFunc::CountStar, -1, "cnt"}};
      std::vector<int> ints = columnsOfKind(rowType, ScalarType::Kind::Int64);
      std::vector<int> floats = columnsOfKind(rowType, ScalarType::Kind::Float64);
      std::vector<int> numerics = ints;
      numerics.insert(numerics.end(), floats.begin(), floats.end());
      if (!numerics.empty()) {
        int arg = numerics[pick(rng, static_cast<int>(numerics.size()))];
        AggFunc funcs[] = {AggFunc::Sum, AggFunc::Min, AggFunc::Max};
        calls.push_back({funcs[pick(rng, 3)], arg, "agg1"});
      }
      return makeAggregate(input, std::move(keys), std::move(calls));
    }
    if (options.allowSort) {
      RelNodePtr input = gen(depth - 1);
      const RowType& rowType = input->rowType();
      Collation keys;
      int keyCount = 1 + pick(rng, 2);
      for (int i = 0; i < keyCount; ++i) {
        keys.push_back({pick(rng, static_cast<int>(rowType.size())),
                        pick(rng, 2) == 0 ? Direction::Ascending
                                          : Direction::Descending});
      }
      std::optional<int64_t> fetch;
      if (pick(rng, 4) == 0) fetch = 1 + pick(rng, 4);
      return makeSort(input, std::move(keys), fetch);
    }
    RelNodePtr input = gen(depth - 1);
    return makeFilter(input, randomPredicate(rng, input->rowType()));
  };

  return gen(options.maxDepth);
}

}  // namespace relq::test
