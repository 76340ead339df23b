#include "relq/metadata.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "relq/error.hpp"
#include "relq/memo.hpp"

namespace relq {

namespace {

double selectivityOf(const ScalarExpr& pred) {
  switch (pred.variant()) {
    case ScalarExpr::Variant::Literal:
      if (pred.isLiteralTrue()) return 1.0;
      if (pred.isLiteralFalse()) return 0.0;
      if (pred.value().isNull()) return 0.25;
      if (pred.value().kind() != Value::Kind::Bool) {
        raise(ErrorCode::TypeMismatch, "selectivity requires a BOOLEAN predicate");
      }
      return pred.value().asBool() ? 1.0 : 0.0;
    case ScalarExpr::Variant::ColumnRef:
      return 0.25;  // unknown boolean column
    case ScalarExpr::Variant::Call:
      break;
  }
  switch (pred.op()) {
    case OpKind::Eq: return 0.15;
    case OpKind::Ne: return 0.85;
    case OpKind::Lt:
    case OpKind::Le:
    case OpKind::Gt:
    case OpKind::Ge:
      return 0.5;
    case OpKind::IsNull: return 0.1;
    case OpKind::IsNotNull: return 0.9;
    case OpKind::And:
      return selectivityOf(*pred.args()[0]) * selectivityOf(*pred.args()[1]);
    case OpKind::Or: {
      double a = selectivityOf(*pred.args()[0]);
      double b = selectivityOf(*pred.args()[1]);
      return a + b - a * b;
    }
    case OpKind::Not:
      return 1.0 - selectivityOf(*pred.args()[0]);
    case OpKind::Cast:
    case OpKind::Item:
      return 0.25;
    default:
      raise(ErrorCode::TypeMismatch,
            fmt::format("selectivity requires a BOOLEAN predicate, got operator {}",
                        opName(pred.op())));
  }
}

double rowCountHandler(MetadataProvider& md, const RelNodePtr& node, const MdArgs&) {
  switch (node->kind()) {
    case RelKind::TableScan:
      return node->scan().table->statistics().rowCount;
    case RelKind::ViewScan:
      return node->viewScan().backing->statistics().rowCount;
    case RelKind::Values:
      return static_cast<double>(node->values().tuples.size());
    case RelKind::Filter: {
      double input = md.query("rowCount", md.inputNode(node, 0));
      double sel = md.query("selectivity", node, MdArgs{node->filter().condition});
      return input * sel;
    }
    case RelKind::Join: {
      double left = md.query("rowCount", md.inputNode(node, 0));
      double right = md.query("rowCount", md.inputNode(node, 1));
      double sel = md.query("selectivity", node, MdArgs{node->join().condition});
      return left * right * sel;
    }
    case RelKind::Aggregate: {
      double input = md.query("rowCount", md.inputNode(node, 0));
      size_t keys = node->aggregate().groupKeys.size();
      if (keys == 0) return 1.0;  // global aggregate emits exactly one row
      double estimate = input * std::pow(0.25, static_cast<double>(keys));
      return std::max(1.0, estimate);
    }
    case RelKind::Project:
    case RelKind::Sort:
    case RelKind::Converter:
    case RelKind::Window:
      return md.query("rowCount", md.inputNode(node, 0));
    case RelKind::GroupRef:
      return md.query("rowCount", md.resolveNode(node));
  }
  return 100.0;
}

double selectivityHandler(MetadataProvider&, const RelNodePtr&, const MdArgs& args) {
  if (!args.expr) {
    raise(ErrorCode::TypeMismatch, "selectivity requires a predicate argument");
  }
  double s = selectivityOf(*args.expr);
  return std::clamp(s, 0.0, 1.0);
}

double avgRowSizeHandler(MetadataProvider& md, const RelNodePtr& node, const MdArgs&) {
  constexpr double kField = MetadataProvider::kDefaultFieldSize;
  switch (node->kind()) {
    case RelKind::TableScan: {
      const auto& stats = node->scan().table->statistics();
      const auto& columns = node->scan().columns;
      if (columns.empty()) {
        return stats.avgRowSize(node->scan().table->rowType().size());
      }
      double total = 0;
      for (int c : columns) total += stats.fieldSize(static_cast<size_t>(c));
      return total;
    }
    case RelKind::ViewScan:
      return node->viewScan().backing->statistics().avgRowSize(
          node->viewScan().backing->rowType().size());
    case RelKind::Filter:
    case RelKind::Sort:
    case RelKind::Converter:
      return md.query("avgRowSize", md.inputNode(node, 0));
    case RelKind::Join:
      return md.query("avgRowSize", md.inputNode(node, 0)) +
             md.query("avgRowSize", md.inputNode(node, 1));
    default:
      return kField * static_cast<double>(node->rowType().size());
  }
}

double maxParallelismHandler(MetadataProvider&, const RelNodePtr&, const MdArgs&) {
  return 1.0;  // single-threaded engine; kind exists for interface completeness
}

}  // namespace

MetadataProvider::MetadataProvider() {
  registerKind("rowCount", rowCountHandler, 100.0);
  registerKind("selectivity", selectivityHandler, 0.25);
  registerKind("avgRowSize", avgRowSizeHandler, kDefaultFieldSize);
  registerKind("maxParallelism", maxParallelismHandler, 1.0);
}

void MetadataProvider::registerKind(const std::string& kind, MdHandler handler,
                                    double fallback) {
  kinds_[kind] = Kind{std::move(handler), fallback};
}

bool MetadataProvider::hasKind(const std::string& kind) const {
  return kinds_.count(kind) > 0;
}

RelNodePtr MetadataProvider::resolveNode(const RelNodePtr& expr) const {
  if (expr && expr->kind() == RelKind::GroupRef && memo_) {
    return memo_->seedNode(expr->groupRef().groupId);
  }
  return expr;
}

RelNodePtr MetadataProvider::inputNode(const RelNodePtr& expr, size_t index) const {
  return resolveNode(expr->input(index));
}

std::string MetadataProvider::exprKey(const RelNodePtr& expr) const {
  RelNodePtr resolved = resolveNode(expr);
  if (!resolved) return "-";
  if (memo_) return memo_->memoDigest(*resolved);
  return resolved->digest();
}

uint64_t MetadataProvider::currentVersion(const RelNodePtr& expr) const {
  if (!memo_ || !expr) return 0;
  return memo_->versionOfDigest(exprKey(expr));
}

double MetadataProvider::conventionDiscount(const Convention& convention) const {
  if (!convention.isRemote()) return 1.0;
  double discount = 0.1;
  if (catalog_) {
    auto colon = convention.name.find(':');
    auto schema = catalog_->findSchema(convention.name.substr(colon + 1));
    if (schema) {
      auto it = schema->options().find("io_discount");
      if (it != schema->options().end()) discount = std::stod(it->second);
    }
  }
  return discount;
}

double MetadataProvider::query(const std::string& kind, const RelNodePtr& expr,
                               const MdArgs& args) {
  auto kindIt = kinds_.find(kind);
  if (kindIt == kinds_.end()) {
    raise(ErrorCode::UnknownMetadataKind, fmt::format("no metadata kind '{}'", kind));
  }
  std::string key = fmt::format("{}|{}|{}", exprKey(expr), kind, args.key());
  uint64_t version = currentVersion(expr);

  auto cached = cache_.find(key);
  if (cached != cache_.end() && cached->second.version == version) {
    stats_.hits++;
    return cached->second.value;
  }
  stats_.misses++;

  // A re-entrant request for a key in flight is a cycle; the registered
  // fallback breaks it.
  if (inProgress_.count(key) > 0) return kindIt->second.fallback;
  inProgress_.insert(key);
  double value;
  try {
    value = kindIt->second.handler(*this, expr, args);
  } catch (...) {
    inProgress_.erase(key);
    throw;
  }
  inProgress_.erase(key);
  cache_[key] = Entry{value, version};
  return value;
}

double rowCount(MetadataProvider& provider, const RelNodePtr& expr) {
  return provider.query("rowCount", expr);
}

double selectivity(MetadataProvider& provider, const ExprPtr& predicate) {
  return provider.query("selectivity", nullptr, MdArgs{predicate});
}

double avgRowSize(MetadataProvider& provider, const RelNodePtr& expr) {
  return provider.query("avgRowSize", expr);
}

}  // namespace relq
