#include "relq/exec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <unordered_map>

#include "relq/adapters/remote_adapter.hpp"
#include "relq/adapters/sql_gen.hpp"
#include "relq/error.hpp"
#include "relq/eval.hpp"

namespace relq {

namespace {

[[noreturn]] void rethrowWithContext(const Error& e, const RelNode& node) {
  if (e.pos()) throw e;
  throw Error(e.code(), fmt::format("{} (in {})", e.rawMessage(), relKindName(node.kind())));
}

// ---------------------------------------------------------------------------
// Shared operator semantics (used by both engines so tie-breaking stays
// identical): sort comparator, aggregate accumulation, join key extraction.
// ---------------------------------------------------------------------------

// NULLS LAST for ASC, NULLS FIRST for DESC.
bool rowLess(const Row& a, const Row& b, const Collation& keys) {
  for (const auto& key : keys) {
    const Value& x = a[key.field];
    const Value& y = b[key.field];
    bool asc = key.direction == Direction::Ascending;
    if (x.isNull() || y.isNull()) {
      if (x.isNull() && y.isNull()) continue;
      bool nullFirst = !asc;
      if (x.isNull()) return nullFirst;
      return !nullFirst;
    }
    int c = x.compare(y);
    if (c != 0) return asc ? c < 0 : c > 0;
  }
  return false;
}

void applySortLimit(std::vector<Row>& rows, const SortAttrs& attrs) {
  if (!attrs.keys.empty()) {
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
      return rowLess(a, b, attrs.keys);
    });
  }
  size_t offset = attrs.offset ? static_cast<size_t>(*attrs.offset) : 0;
  if (offset > 0) {
    rows.erase(rows.begin(),
               rows.begin() + std::min(offset, rows.size()));
  }
  if (attrs.fetch && rows.size() > static_cast<size_t>(*attrs.fetch)) {
    rows.resize(static_cast<size_t>(*attrs.fetch));
  }
}

struct Accumulator {
  int64_t count = 0;
  Value value;  // running SUM / MIN / MAX; NULL until a non-NULL arrives
};

void accumulate(Accumulator& acc, const AggCall& call, const Row& row) {
  switch (call.func) {
    case AggFunc::CountStar:
      acc.count++;
      return;
    case AggFunc::Count:
      if (!row[call.arg].isNull()) acc.count++;
      return;
    case AggFunc::Sum: {
      const Value& v = row[call.arg];
      if (v.isNull()) return;
      if (acc.value.isNull()) {
        acc.value = v;
      } else if (acc.value.kind() == Value::Kind::Int && v.kind() == Value::Kind::Int) {
        acc.value = Value::int64(acc.value.asInt() + v.asInt());
      } else {
        acc.value = Value::float64(acc.value.asFloat() + v.asFloat());
      }
      return;
    }
    case AggFunc::Min:
    case AggFunc::Max: {
      const Value& v = row[call.arg];
      if (v.isNull()) return;
      if (acc.value.isNull()) {
        acc.value = v;
      } else {
        int c = v.compare(acc.value);
        if ((call.func == AggFunc::Min && c < 0) || (call.func == AggFunc::Max && c > 0)) {
          acc.value = v;
        }
      }
      return;
    }
  }
}

Value accumulatorResult(const Accumulator& acc, const AggCall& call) {
  switch (call.func) {
    case AggFunc::CountStar:
    case AggFunc::Count:
      return Value::int64(acc.count);
    default:
      return acc.value;  // SUM/MIN/MAX over no rows is NULL
  }
}

struct KeyHash {
  size_t operator()(const Row& key) const {
    size_t h = 0x811c9dc5;
    for (const auto& v : key) h = h * 31 + v.keyHash();
    return h;
  }
};

struct KeyEq {
  bool operator()(const Row& a, const Row& b) const {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (!a[i].keyEquals(b[i])) return false;
    }
    return true;
  }
};

// Grouping with first-seen emission order; shared by both engines so that
// ties under a later sort break identically.
std::vector<Row> runAggregate(const std::vector<Row>& input, const AggregateAttrs& attrs) {
  struct Group {
    Row keys;
    std::vector<Accumulator> accs;
  };
  std::vector<Group> groups;
  std::unordered_map<Row, size_t, KeyHash, KeyEq> index;

  bool global = attrs.groupKeys.empty();
  if (global) {
    groups.push_back({Row{}, std::vector<Accumulator>(attrs.calls.size())});
  }
  for (const auto& row : input) {
    size_t slot;
    if (global) {
      slot = 0;
    } else {
      Row key;
      key.reserve(attrs.groupKeys.size());
      for (int k : attrs.groupKeys) key.push_back(row[k]);
      auto it = index.find(key);
      if (it == index.end()) {
        slot = groups.size();
        index.emplace(key, slot);
        groups.push_back({std::move(key), std::vector<Accumulator>(attrs.calls.size())});
      } else {
        slot = it->second;
      }
    }
    for (size_t c = 0; c < attrs.calls.size(); ++c) {
      accumulate(groups[slot].accs[c], attrs.calls[c], row);
    }
  }

  std::vector<Row> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    Row row = g.keys;
    for (size_t c = 0; c < attrs.calls.size(); ++c) {
      row.push_back(accumulatorResult(g.accs[c], attrs.calls[c]));
    }
    out.push_back(std::move(row));
  }
  return out;
}

// Splits a join condition into equi-key pairs (left expr, right expr in
// right-local indexes) plus a residual over the combined row.
struct JoinKeys {
  std::vector<ExprPtr> left;
  std::vector<ExprPtr> right;
  ExprPtr residual;  // may be literal TRUE
};

JoinKeys splitJoinCondition(const ExprPtr& condition, size_t leftArity) {
  JoinKeys out;
  std::vector<ExprPtr> residuals;
  for (const auto& conjunct : conjunctsOf(condition)) {
    if (conjunct->variant() == ScalarExpr::Variant::Call && conjunct->op() == OpKind::Eq) {
      const auto& a = conjunct->args()[0];
      const auto& b = conjunct->args()[1];
      auto sideOf = [&](const ExprPtr& e) -> int {
        std::vector<int> cols;
        e->collectColumns(cols);
        if (cols.empty()) return -1;  // constant: not a key
        bool allLeft = true, allRight = true;
        for (int c : cols) {
          allLeft = allLeft && c < static_cast<int>(leftArity);
          allRight = allRight && c >= static_cast<int>(leftArity);
        }
        return allLeft ? 0 : (allRight ? 1 : -1);
      };
      int sa = sideOf(a), sb = sideOf(b);
      if (sa == 0 && sb == 1) {
        out.left.push_back(a);
        out.right.push_back(b->shiftColumns(-static_cast<int>(leftArity)));
        continue;
      }
      if (sa == 1 && sb == 0) {
        out.left.push_back(b);
        out.right.push_back(a->shiftColumns(-static_cast<int>(leftArity)));
        continue;
      }
    }
    residuals.push_back(conjunct);
  }
  out.residual = makeConjunction(std::move(residuals));
  return out;
}

Row concatRows(const Row& left, const Row& right) {
  Row out = left;
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

Row nullPad(const Row& left, size_t rightArity) {
  Row out = left;
  out.resize(out.size() + rightArity);
  return out;
}

// ---------------------------------------------------------------------------
// Enumerable streams
// ---------------------------------------------------------------------------

class VectorStream : public RowStream {
 public:
  explicit VectorStream(std::vector<Row> rows) : rows_(std::move(rows)) {}
  std::optional<Row> next() override {
    if (pos_ >= rows_.size()) return std::nullopt;
    return rows_[pos_++];
  }

 private:
  std::vector<Row> rows_;
  size_t pos_ = 0;
};

class FilterStream : public RowStream {
 public:
  FilterStream(std::unique_ptr<RowStream> input, const RelNode& node)
      : input_(std::move(input)), node_(node) {}
  std::optional<Row> next() override {
    while (auto row = input_->next()) {
      bool keep;
      try {
        keep = evalPredicate(*node_.filter().condition, *row, node_.input(0)->rowType());
      } catch (const Error& e) {
        rethrowWithContext(e, node_);
      }
      if (keep) return row;
    }
    return std::nullopt;
  }

 private:
  std::unique_ptr<RowStream> input_;
  const RelNode& node_;
};

class ProjectStream : public RowStream {
 public:
  ProjectStream(std::unique_ptr<RowStream> input, const RelNode& node)
      : input_(std::move(input)), node_(node) {}
  std::optional<Row> next() override {
    auto row = input_->next();
    if (!row) return std::nullopt;
    Row out;
    out.reserve(node_.project().exprs.size());
    try {
      for (const auto& e : node_.project().exprs) {
        out.push_back(evalExpr(*e, *row, node_.input(0)->rowType()));
      }
    } catch (const Error& e) {
      rethrowWithContext(e, node_);
    }
    return out;
  }

 private:
  std::unique_ptr<RowStream> input_;
  const RelNode& node_;
};

// Hash join: build side is always the right input; rows are collected from
// the child streams and joined on the equality conjuncts of the condition,
// with any residual evaluated after the probe. NULL keys never match.
class HashJoinStream : public RowStream {
 public:
  HashJoinStream(std::unique_ptr<RowStream> left, std::vector<Row> rightRows,
                 const RelNode& node)
      : left_(std::move(left)),
        node_(node),
        keys_(splitJoinCondition(node.join().condition, node.input(0)->rowType().size())),
        rightArity_(node.input(1)->rowType().size()),
        combined_(concatRowTypes(node.input(0)->rowType(), node.input(1)->rowType(), false)) {
    const RowType& rightType = node_.input(1)->rowType();
    for (auto& row : rightRows) {
      Row key = makeKey(row, keys_.right, rightType);
      if (key.empty()) continue;  // NULL key: unmatched forever
      auto [it, inserted] = table_.try_emplace(std::move(key));
      it->second.push_back(std::move(row));
    }
  }

  std::optional<Row> next() override {
    while (true) {
      if (matches_ && matchPos_ < matches_->size()) {
        const Row& right = (*matches_)[matchPos_++];
        Row combined = concatRows(*probe_, right);
        bool ok;
        try {
          ok = evalPredicate(*keys_.residual, combined, combined_);
        } catch (const Error& e) {
          rethrowWithContext(e, node_);
        }
        if (!ok) continue;
        emitted_ = true;
        return combined;
      }
      if (matches_ && node_.join().type == JoinType::Left && !emitted_) {
        matches_ = nullptr;
        return nullPad(*probe_, rightArity_);
      }
      probe_ = left_->next();
      if (!probe_) return std::nullopt;
      emitted_ = false;
      matchPos_ = 0;
      Row key = makeKey(*probe_, keys_.left, node_.input(0)->rowType());
      if (key.empty()) {
        matches_ = &kEmpty;
      } else {
        auto it = table_.find(key);
        matches_ = it == table_.end() ? &kEmpty : &it->second;
      }
    }
  }

 private:
  // Empty result means "contains NULL" (never matches).
  Row makeKey(const Row& row, const std::vector<ExprPtr>& exprs, const RowType& type) {
    Row key;
    key.reserve(exprs.size());
    for (const auto& e : exprs) {
      Value v;
      try {
        v = evalExpr(*e, row, type);
      } catch (const Error& err) {
        rethrowWithContext(err, node_);
      }
      if (v.isNull()) return {};
      key.push_back(std::move(v));
    }
    return key;
  }

  inline static const std::vector<Row> kEmpty{};

  std::unique_ptr<RowStream> left_;
  const RelNode& node_;
  JoinKeys keys_;
  size_t rightArity_;
  RowType combined_;
  std::unordered_map<Row, std::vector<Row>, KeyHash, KeyEq> table_;
  std::optional<Row> probe_;
  const std::vector<Row>* matches_ = nullptr;
  size_t matchPos_ = 0;
  bool emitted_ = false;
};

// Fallback for non-equi conditions; also forced by ExecOptions in tests.
class NestedLoopJoinStream : public RowStream {
 public:
  NestedLoopJoinStream(std::unique_ptr<RowStream> left, std::vector<Row> rightRows,
                       const RelNode& node)
      : left_(std::move(left)),
        right_(std::move(rightRows)),
        node_(node),
        rightArity_(node.input(1)->rowType().size()),
        combined_(concatRowTypes(node.input(0)->rowType(), node.input(1)->rowType(), false)) {}

  std::optional<Row> next() override {
    while (true) {
      if (!probe_) {
        probe_ = left_->next();
        if (!probe_) return std::nullopt;
        rightPos_ = 0;
        emitted_ = false;
      }
      while (rightPos_ < right_.size()) {
        Row combined = concatRows(*probe_, right_[rightPos_++]);
        bool ok;
        try {
          ok = evalPredicate(*node_.join().condition, combined, combined_);
        } catch (const Error& e) {
          rethrowWithContext(e, node_);
        }
        if (ok) {
          emitted_ = true;
          return combined;
        }
      }
      bool pad = node_.join().type == JoinType::Left && !emitted_;
      Row left = *probe_;
      probe_.reset();
      if (pad) return nullPad(left, rightArity_);
    }
  }

 private:
  std::unique_ptr<RowStream> left_;
  std::vector<Row> right_;
  const RelNode& node_;
  size_t rightArity_;
  RowType combined_;
  std::optional<Row> probe_;
  size_t rightPos_ = 0;
  bool emitted_ = false;
};

std::vector<Row> drain(RowStream& stream) {
  std::vector<Row> out;
  while (auto row = stream.next()) out.push_back(std::move(*row));
  return out;
}

std::unique_ptr<RowStream> buildStream(const RelNodePtr& node, const ExecOptions& options);

std::vector<Row> materialize(const RelNodePtr& node, const ExecOptions& options) {
  auto stream = buildStream(node, options);
  return drain(*stream);
}

RemoteBackendPtr findBackend(const RelNodePtr& node) {
  if (node->kind() == RelKind::TableScan) {
    auto remote = std::dynamic_pointer_cast<const RemoteTable>(node->scan().table);
    if (remote) return remote->backend();
  }
  for (const auto& input : node->inputs()) {
    if (input->kind() == RelKind::GroupRef) continue;
    return findBackend(input);
  }
  raise(ErrorCode::UnsupportedNode, "remote subtree contains no remote table scan");
}

std::unique_ptr<RowStream> buildStream(const RelNodePtr& node, const ExecOptions& options) {
  switch (node->kind()) {
    case RelKind::TableScan:
      return std::make_unique<VectorStream>(node->scan().table->scan(node->scan().columns));
    case RelKind::ViewScan:
      return std::make_unique<VectorStream>(node->viewScan().backing->scanAll());
    case RelKind::Values:
      return std::make_unique<VectorStream>(node->values().tuples);
    case RelKind::Filter:
      return std::make_unique<FilterStream>(buildStream(node->input(0), options), *node);
    case RelKind::Project:
      return std::make_unique<ProjectStream>(buildStream(node->input(0), options), *node);
    case RelKind::Join: {
      auto left = buildStream(node->input(0), options);
      std::vector<Row> right = materialize(node->input(1), options);
      JoinKeys keys = splitJoinCondition(node->join().condition,
                                         node->input(0)->rowType().size());
      if (keys.left.empty() || options.forceNestedLoop) {
        return std::make_unique<NestedLoopJoinStream>(std::move(left), std::move(right),
                                                      *node);
      }
      return std::make_unique<HashJoinStream>(std::move(left), std::move(right), *node);
    }
    case RelKind::Aggregate: {
      std::vector<Row> input = materialize(node->input(0), options);
      return std::make_unique<VectorStream>(runAggregate(input, node->aggregate()));
    }
    case RelKind::Sort: {
      std::vector<Row> rows = materialize(node->input(0), options);
      applySortLimit(rows, node->sort());
      return std::make_unique<VectorStream>(std::move(rows));
    }
    case RelKind::Converter: {
      // A remote-boundary converter sends generated SQL to the backend and
      // streams the results; other converters are identity over rows.
      if (node->converter().source.isRemote()) {
        RemoteBackendPtr backend = findBackend(node->input(0));
        std::string sql = generateRemoteSql(node->input(0));
        return std::make_unique<VectorStream>(backend->executeSql(sql));
      }
      return buildStream(node->input(0), options);
    }
    case RelKind::Window:
      raise(ErrorCode::UnsupportedNode, "window execution is not provided");
    case RelKind::GroupRef:
      raise(ErrorCode::UnsupportedNode, "cannot execute a group placeholder");
  }
  raise(ErrorCode::UnsupportedNode, "unknown node kind");
}

void checkExecutable(const RelNode& node) {
  if (node.traits().convention.isLogical()) {
    raise(ErrorCode::UnsupportedNode,
          fmt::format("plan contains a LOGICAL {} node; optimize it first",
                      relKindName(node.kind())));
  }
  // Below a non-remote converter sits a bare adapter scan; below a remote
  // one, a remote subtree executed by the backend. Either way the subtree's
  // conventions are the adapter's business, not this engine's.
  if (node.kind() == RelKind::Converter) return;
  for (const auto& input : node.inputs()) checkExecutable(*input);
}

}  // namespace

std::unique_ptr<RowStream> openStream(const RelNodePtr& plan, const ExecOptions& options) {
  checkExecutable(*plan);
  return buildStream(plan, options);
}

std::vector<Row> execute(const RelNodePtr& plan, const ExecOptions& options) {
  auto stream = openStream(plan, options);
  return drain(*stream);
}

std::vector<Row> naiveExecute(const RelNodePtr& plan) {
  const RelNode& node = *plan;
  switch (node.kind()) {
    case RelKind::TableScan: {
      std::vector<Row> rows = node.scan().table->scanAll();
      const auto& columns = node.scan().columns;
      if (columns.empty()) return rows;
      std::vector<Row> out;
      out.reserve(rows.size());
      for (const auto& row : rows) {
        Row pruned;
        for (int c : columns) pruned.push_back(row[c]);
        out.push_back(std::move(pruned));
      }
      return out;
    }
    case RelKind::ViewScan:
      return node.viewScan().backing->scanAll();
    case RelKind::Values:
      return node.values().tuples;
    case RelKind::Filter: {
      std::vector<Row> input = naiveExecute(node.input(0));
      std::vector<Row> out;
      for (const auto& row : input) {
        if (evalPredicate(*node.filter().condition, row, node.input(0)->rowType())) {
          out.push_back(row);
        }
      }
      return out;
    }
    case RelKind::Project: {
      std::vector<Row> input = naiveExecute(node.input(0));
      std::vector<Row> out;
      out.reserve(input.size());
      for (const auto& row : input) {
        Row projected;
        projected.reserve(node.project().exprs.size());
        for (const auto& e : node.project().exprs) {
          projected.push_back(evalExpr(*e, row, node.input(0)->rowType()));
        }
        out.push_back(std::move(projected));
      }
      return out;
    }
    case RelKind::Join: {
      std::vector<Row> left = naiveExecute(node.input(0));
      std::vector<Row> right = naiveExecute(node.input(1));
      RowType combined =
          concatRowTypes(node.input(0)->rowType(), node.input(1)->rowType(), false);
      std::vector<Row> out;
      for (const auto& l : left) {
        bool matched = false;
        for (const auto& r : right) {
          Row row = concatRows(l, r);
          if (evalPredicate(*node.join().condition, row, combined)) {
            matched = true;
            out.push_back(std::move(row));
          }
        }
        if (!matched && node.join().type == JoinType::Left) {
          out.push_back(nullPad(l, node.input(1)->rowType().size()));
        }
      }
      return out;
    }
    case RelKind::Aggregate:
      return runAggregate(naiveExecute(node.input(0)), node.aggregate());
    case RelKind::Sort: {
      std::vector<Row> rows = naiveExecute(node.input(0));
      applySortLimit(rows, node.sort());
      return rows;
    }
    case RelKind::Converter:
      return naiveExecute(node.input(0));
    case RelKind::Window:
      raise(ErrorCode::UnsupportedNode, "window execution is not provided");
    case RelKind::GroupRef:
      raise(ErrorCode::UnsupportedNode, "cannot execute a group placeholder");
  }
  raise(ErrorCode::UnsupportedNode, "unknown node kind");
}

}  // namespace relq
