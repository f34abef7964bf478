#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ccql/adapter.hpp"
#include "ccql/ast.hpp"
#include "ccql/errors.hpp"
#include "ccql/parse.hpp"
#include "ccql/schema.hpp"
#include "ccql/value.hpp"

namespace ccql {

// ---------------------------------------------------------------------------
// Result table
// ---------------------------------------------------------------------------

struct Column {
    std::string name;  // <sourceIndex>.<ClassName>.<attrName>
    ValueKind kind = ValueKind::String;
    Multiplicity multiplicity = Multiplicity::Single;

    bool operator==(const Column&) const = default;
};

// Ordered, source-prefixed columns of typed values. Column order is source
// order (outer) x query-attribute order (inner); immutable once built.
struct ResultTable {
    std::vector<Column> columns;
    std::vector<std::vector<Value>> rows;

    bool operator==(const ResultTable&) const = default;
};

// A filter resolved against table columns; right side is a literal or
// another column. Used directly by property tests.
struct TableFilter {
    std::size_t left = 0;
    Comparison cmp = Comparison::Eq;
    std::variant<Value, std::size_t> rhs;
};

// ---------------------------------------------------------------------------
// Typed comparison rules
// ---------------------------------------------------------------------------

namespace compare_detail {

inline bool is_numeric(ValueKind k) {
    return k == ValueKind::Int || k == ValueKind::Timestamp || k == ValueKind::Amount;
}

inline bool is_hex_kind(ValueKind k) {
    return k == ValueKind::Hash || k == ValueKind::Address;
}

inline Amount as_amount(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return Amount(*i);
    return std::get<Amount>(v);
}

inline bool apply_order(int c, Comparison cmp) {
    switch (cmp) {
        case Comparison::Eq: return c == 0;
        case Comparison::Neq: return c != 0;
        case Comparison::Lt: return c < 0;
        case Comparison::Lte: return c <= 0;
        case Comparison::Gt: return c > 0;
        case Comparison::Gte: return c >= 0;
    }
    return false;
}

inline bool equality_only(Comparison cmp) {
    return cmp == Comparison::Eq || cmp == Comparison::Neq;
}

}  // namespace compare_detail

// Evaluates one comparison between a typed cell and a typed right side.
// kind_r is nullopt when the right side is a literal. Null never satisfies
// any comparison, including null = null. Throws TypeMismatch for operator
// and kind combinations outside the comparison rules.
inline bool compare_values(ValueKind kind_l, const Value& left, Comparison cmp,
                           std::optional<ValueKind> kind_r, const Value& right) {
    namespace cd = compare_detail;

    // kind-level admissibility first, so that a bad filter fails even on
    // all-null data
    if (cd::is_numeric(kind_l)) {
        if (kind_r && !cd::is_numeric(*kind_r)) {
            throw TypeMismatch("numeric attribute compared with " + std::string(kind_name(*kind_r)));
        }
        if (!kind_r && !std::holds_alternative<std::int64_t>(right) &&
            !std::holds_alternative<Amount>(right) && !is_null(right)) {
            throw TypeMismatch("numeric attribute compared with a non-numeric literal");
        }
        if (is_null(left) || is_null(right)) return false;
        Amount l = cd::as_amount(left), r = cd::as_amount(right);
        return cd::apply_order(l == r ? 0 : (l < r ? -1 : 1), cmp);
    }

    if (cd::is_hex_kind(kind_l)) {
        if (!cd::equality_only(cmp)) {
            throw TypeMismatch(std::string(comparison_token(cmp)) + " on " + kind_name(kind_l));
        }
        if (kind_r && !cd::is_hex_kind(*kind_r)) {
            throw TypeMismatch(std::string(kind_name(kind_l)) + " compared with " +
                               kind_name(*kind_r));
        }
        if (!kind_r && !std::holds_alternative<std::string>(right) && !is_null(right)) {
            throw TypeMismatch(std::string(kind_name(kind_l)) + " compared with a non-string literal");
        }
        if (is_null(left) || is_null(right)) return false;
        bool eq = to_lower(std::get<std::string>(left)) == to_lower(std::get<std::string>(right));
        return cmp == Comparison::Eq ? eq : !eq;
    }

    switch (kind_l) {
        case ValueKind::String: {
            if (!cd::equality_only(cmp)) throw TypeMismatch("ordering on STRING");
            if (kind_r && *kind_r != ValueKind::String) {
                throw TypeMismatch("STRING compared with " + std::string(kind_name(*kind_r)));
            }
            if (!kind_r && !std::holds_alternative<std::string>(right) && !is_null(right)) {
                throw TypeMismatch("STRING compared with a non-string literal");
            }
            if (is_null(left) || is_null(right)) return false;
            bool eq = std::get<std::string>(left) == std::get<std::string>(right);
            return cmp == Comparison::Eq ? eq : !eq;
        }
        case ValueKind::Bool: {
            if (!cd::equality_only(cmp)) throw TypeMismatch("ordering on BOOL");
            if (kind_r && *kind_r != ValueKind::Bool) {
                throw TypeMismatch("BOOL compared with " + std::string(kind_name(*kind_r)));
            }
            if (!kind_r && !std::holds_alternative<bool>(right) && !is_null(right)) {
                throw TypeMismatch("BOOL compared with a non-boolean literal");
            }
            if (is_null(left) || is_null(right)) return false;
            bool eq = std::get<bool>(left) == std::get<bool>(right);
            return cmp == Comparison::Eq ? eq : !eq;
        }
        case ValueKind::Bytes: {
            if (!cd::equality_only(cmp)) throw TypeMismatch("ordering on BYTES");
            if (kind_r && *kind_r != ValueKind::Bytes) {
                throw TypeMismatch("BYTES compared with " + std::string(kind_name(*kind_r)));
            }
            if (!kind_r && !std::holds_alternative<std::string>(right) && !is_null(right)) {
                throw TypeMismatch("BYTES compared with a non-string literal");
            }
            if (is_null(left) || is_null(right)) return false;
            std::string l = hex_from_bytes(std::get<Bytes>(left));
            std::string r = kind_r ? hex_from_bytes(std::get<Bytes>(right))
                                   : to_lower(std::get<std::string>(right));
            return cmp == Comparison::Eq ? l == r : l != r;
        }
        case ValueKind::HashList:
        case ValueKind::RefList: {
            // list-valued attributes support = against a literal as a
            // membership test; nothing else
            if (cmp != Comparison::Eq || kind_r) {
                throw TypeMismatch("lists only support = against a literal");
            }
            if (!std::holds_alternative<std::string>(right) && !is_null(right)) {
                throw TypeMismatch("list membership needs a string literal");
            }
            if (is_null(left) || is_null(right)) return false;
            const auto& list = std::get<StringList>(left);
            const std::string& probe = std::get<std::string>(right);
            if (kind_l == ValueKind::HashList) {
                std::string lowered = to_lower(probe);
                return std::any_of(list.begin(), list.end(), [&](const std::string& e) {
                    return to_lower(e) == lowered;
                });
            }
            return std::find(list.begin(), list.end(), probe) != list.end();
        }
        default:
            throw TypeMismatch("unsupported comparison");
    }
}

// Order-preserving subset of rows satisfying the filter.
inline ResultTable apply_filter(const ResultTable& table, const TableFilter& filter) {
    if (filter.left >= table.columns.size()) {
        throw UnknownColumn("filter column index " + std::to_string(filter.left));
    }
    const std::size_t* rhs_col = std::get_if<std::size_t>(&filter.rhs);
    if (rhs_col != nullptr && *rhs_col >= table.columns.size()) {
        throw UnknownColumn("filter column index " + std::to_string(*rhs_col));
    }
    ValueKind kind_l = table.columns[filter.left].kind;
    std::optional<ValueKind> kind_r;
    if (rhs_col != nullptr) kind_r = table.columns[*rhs_col].kind;

    ResultTable out;
    out.columns = table.columns;
    for (const auto& row : table.rows) {
        const Value& left = row[filter.left];
        const Value& right = rhs_col != nullptr ? row[*rhs_col] : std::get<Value>(filter.rhs);
        if (compare_values(kind_l, left, filter.cmp, kind_r, right)) {
            out.rows.push_back(row);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

struct SourceBinding {
    int source_index = 0;  // 1-based
    SourceSpec spec;
    std::shared_ptr<Adapter> adapter;
};

// A filter with both sides bound to a source and canonical class names.
struct BoundFilterAttr {
    int source = 0;
    std::string class_name;
    std::string attr_name;
};

struct ResolvedFilter {
    BoundFilterAttr left;
    Comparison cmp = Comparison::Eq;
    std::variant<Value, BoundFilterAttr> right;
};

struct ExecutionPlan {
    QueryStatement statement;
    std::vector<SourceBinding> bindings;
    // canonicalized query attributes applicable per source, in Q-clause order
    std::map<int, std::vector<AttrSpec>> per_source_attrs;
    // finest class referenced per source along the containment order
    std::map<int, std::string> grain_class;
    std::vector<ResolvedFilter> filters;
};

namespace engine_detail {

// Containment/fineness rank used to pick the row grain. Descriptor classes
// share the grain of the entity they describe.
inline int grain_rank(const std::string& class_name) {
    if (class_name == "Chain" || class_name == "Network" || class_name == "ChainDescriptor")
        return 0;
    if (class_name == "Block" || class_name == "BlockDescriptor" ||
        class_name == "ValidationDescriptor")
        return 10;
    if (class_name == "Transaction" || class_name == "TransactionDescriptor") return 20;
    if (class_name == "UTXO") return 30;
    if (class_name == "Account") return 40;
    if (class_name == "Asset") return 50;
    if (class_name == "Token") return 51;
    if (class_name == "Data") return 52;
    if (class_name == "ValidatorDescriptor") return 60;
    return 0;
}

// Row entity implied by the grain class.
enum class RowEntity { Source, Block, Transaction, Utxo, Account, Asset, Token, Data, Validator };

inline RowEntity row_entity(const std::string& grain_class) {
    switch (grain_rank(grain_class)) {
        case 0: return RowEntity::Source;
        case 10: return RowEntity::Block;
        case 20: return RowEntity::Transaction;
        case 30: return RowEntity::Utxo;
        case 40: return RowEntity::Account;
        case 50: return RowEntity::Asset;
        case 51: return RowEntity::Token;
        case 52: return RowEntity::Data;
        default: return RowEntity::Validator;
    }
}

inline std::string canonical_class_or_throw(const std::string& name) {
    const std::string* canonical = SchemaCatalog::instance().canonical_class(name);
    if (canonical == nullptr) throw UnknownClass(name);
    return *canonical;
}

}  // namespace engine_detail

// Validates a parsed statement against the catalog and the source registry
// and produces the execution plan: adapter bindings, per-source applicable
// attributes, per-source grain class and resolved filters.
inline ExecutionPlan plan(const QueryStatement& stmt, const SourceRegistry& registry) {
    namespace ed = engine_detail;
    ExecutionPlan out;
    out.statement = stmt;

    // canonicalize and validate query attributes
    std::vector<AttrSpec> canonical_attrs;
    for (const AttrSpec& attr : stmt.query_attrs) {
        std::string cls = ed::canonical_class_or_throw(attr.class_name);
        SchemaCatalog::instance().resolve_attr(cls, attr.attr_name);
        canonical_attrs.push_back({cls, attr.attr_name});
    }

    // bind each source to an adapter
    for (std::size_t i = 0; i < stmt.sources.size(); ++i) {
        SourceBinding binding;
        binding.source_index = static_cast<int>(i) + 1;
        binding.spec = stmt.sources[i];
        binding.adapter = registry.bind(stmt.sources[i]);
        out.bindings.push_back(std::move(binding));
    }

    // applicable attributes: those whose class the source's chain model emits
    std::vector<bool> attr_used(canonical_attrs.size(), false);
    for (const SourceBinding& b : out.bindings) {
        std::vector<AttrSpec> applicable;
        for (std::size_t a = 0; a < canonical_attrs.size(); ++a) {
            if (class_applicable(b.adapter->chain_id(), b.adapter->chain_descriptor_id(),
                                 canonical_attrs[a].class_name)) {
                applicable.push_back(canonical_attrs[a]);
                attr_used[a] = true;
            }
        }
        out.per_source_attrs[b.source_index] = std::move(applicable);
    }
    for (std::size_t a = 0; a < canonical_attrs.size(); ++a) {
        if (!attr_used[a]) {
            throw InapplicableAttribute(stmt.query_attrs[a].class_name + "." +
                                        stmt.query_attrs[a].attr_name);
        }
    }

    // resolve filter attribute references to sources
    auto resolve_side = [&](const FilterAttr& fa) -> BoundFilterAttr {
        BoundFilterAttr bound;
        bound.class_name = ed::canonical_class_or_throw(fa.class_name);
        bound.attr_name = fa.attr_name;
        SchemaCatalog::instance().resolve_attr(bound.class_name, fa.attr_name);
        std::string display = fa.class_name + "." + fa.attr_name;
        if (fa.source_index) {
            if (*fa.source_index < 1 ||
                *fa.source_index > static_cast<int>(out.bindings.size())) {
                throw UnknownColumn("filter references source " +
                                    std::to_string(*fa.source_index) + " but the statement has " +
                                    std::to_string(out.bindings.size()) + " source(s)");
            }
            const SourceBinding& b = out.bindings[*fa.source_index - 1];
            if (!class_applicable(b.adapter->chain_id(), b.adapter->chain_descriptor_id(),
                                  bound.class_name)) {
                throw InapplicableAttribute(std::to_string(*fa.source_index) + "." + display);
            }
            bound.source = *fa.source_index;
            return bound;
        }
        std::vector<int> candidates;
        for (const SourceBinding& b : out.bindings) {
            if (class_applicable(b.adapter->chain_id(), b.adapter->chain_descriptor_id(),
                                 bound.class_name)) {
                candidates.push_back(b.source_index);
            }
        }
        if (candidates.empty()) throw InapplicableAttribute(display);
        if (candidates.size() > 1) throw AmbiguousFilterAttribute(display);
        bound.source = candidates.front();
        return bound;
    };
    for (const FilterSpec& f : stmt.filters) {
        ResolvedFilter rf;
        rf.left = resolve_side(f.left);
        rf.cmp = f.cmp;
        if (const auto* attr = std::get_if<FilterAttr>(&f.right)) {
            rf.right = resolve_side(*attr);
        } else {
            rf.right = std::get<Value>(f.right);
        }
        out.filters.push_back(std::move(rf));
    }

    // grain: finest class referenced per source, query attributes first
    for (const SourceBinding& b : out.bindings) {
        std::string grain = "Chain";
        int best = -1;
        for (const AttrSpec& attr : out.per_source_attrs[b.source_index]) {
            int rank = ed::grain_rank(attr.class_name);
            if (rank > best) {
                best = rank;
                grain = attr.class_name;
            }
        }
        for (const ResolvedFilter& f : out.filters) {
            auto consider = [&](const BoundFilterAttr& side) {
                if (side.source != b.source_index) return;
                int rank = ed::grain_rank(side.class_name);
                if (rank > best) {
                    best = rank;
                    grain = side.class_name;
                }
            };
            consider(f.left);
            if (const auto* rhs = std::get_if<BoundFilterAttr>(&f.right)) consider(*rhs);
        }
        if (best < 0) grain = "Chain";
        out.grain_class[b.source_index] = grain;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace engine_detail {

struct SourceData {
    ChainInfo info;
    std::vector<BlockBundle> blocks;
    std::vector<TransactionBundle> txs;
    std::vector<AccountBundle> accounts;
};

struct ReferencedClasses {
    std::set<std::string> classes;

    bool any_of(std::initializer_list<const char*> names) const {
        for (const char* n : names) {
            if (classes.count(n) != 0) return true;
        }
        return false;
    }
};

inline ReferencedClasses referenced_classes(const ExecutionPlan& plan, int source) {
    ReferencedClasses out;
    for (const AttrSpec& attr : plan.per_source_attrs.at(source)) {
        out.classes.insert(attr.class_name);
    }
    for (const ResolvedFilter& f : plan.filters) {
        if (f.left.source == source) out.classes.insert(f.left.class_name);
        if (const auto* rhs = std::get_if<BoundFilterAttr>(&f.right)) {
            if (rhs->source == source) out.classes.insert(rhs->class_name);
        }
    }
    return out;
}

// Fetches the anchored entity and the transitive instances the source's
// referenced classes need.
inline SourceData fetch_source(const SourceBinding& binding, const ReferencedClasses& refs) {
    const Adapter& adapter = *binding.adapter;
    SourceData data;
    data.info = adapter.chain_info();

    bool want_block_branch =
        refs.any_of({"Block", "BlockDescriptor", "ValidationDescriptor", "ValidatorDescriptor"});
    bool want_owned = refs.any_of({"Asset", "Token", "Data"});
    bool want_txs =
        refs.any_of({"Transaction", "TransactionDescriptor", "UTXO"}) || want_owned;
    bool want_accounts =
        (refs.any_of({"Account"}) || want_owned) &&
        class_applicable(adapter.chain_id(), adapter.chain_descriptor_id(), "Account");

    auto fetch_txs_of_block = [&](const std::string& block_id) {
        for (const std::string& txid : adapter.transaction_ids(block_id)) {
            data.txs.push_back(adapter.transaction({AnchorKind::Transaction, txid}));
        }
    };

    if (binding.spec.anchor) {
        const EntityAnchor& anchor = *binding.spec.anchor;
        switch (anchor.kind) {
            case AnchorKind::Block: {
                BlockBundle b = adapter.block(anchor);
                std::string block_id = std::get<std::string>(b.block.attr("id"));
                data.blocks.push_back(std::move(b));
                if (want_txs) fetch_txs_of_block(block_id);
                break;
            }
            case AnchorKind::Transaction: {
                TransactionBundle t = adapter.transaction(anchor);
                if (want_block_branch && !t.block_id.empty()) {
                    data.blocks.push_back(adapter.block({AnchorKind::Block, t.block_id}));
                }
                data.txs.push_back(std::move(t));
                break;
            }
            case AnchorKind::Account: {
                data.accounts.push_back(adapter.account(anchor));
                break;
            }
        }
        return data;
    }

    if (want_block_branch || want_txs) {
        for (const std::string& block_id : adapter.block_ids()) {
            data.blocks.push_back(adapter.block({AnchorKind::Block, block_id}));
            if (want_txs) fetch_txs_of_block(block_id);
        }
    }
    if (want_accounts) {
        for (const std::string& addr : adapter.account_ids()) {
            data.accounts.push_back(adapter.account({AnchorKind::Account, addr}));
        }
    }
    return data;
}

inline void stamp_source(SourceData& data, int source) {
    auto stamp = [source](Instance& inst) { inst.source_index = source; };
    stamp(data.info.chain);
    stamp(data.info.network);
    stamp(data.info.chain_descriptor);
    for (BlockBundle& b : data.blocks) {
        stamp(b.block);
        stamp(b.descriptor);
        if (b.validation) stamp(*b.validation);
        for (Instance& v : b.validators) stamp(v);
    }
    for (TransactionBundle& t : data.txs) {
        stamp(t.tx);
        stamp(t.descriptor);
        for (Instance& i : t.utxos) stamp(i);
        for (Instance& i : t.assets) stamp(i);
        for (Instance& i : t.tokens) stamp(i);
        for (Instance& i : t.data) stamp(i);
    }
    for (AccountBundle& a : data.accounts) {
        stamp(a.account);
        for (Instance& i : a.tokens) stamp(i);
        for (Instance& i : a.assets) stamp(i);
        for (Instance& i : a.data) stamp(i);
    }
}

inline void collect_instances(const SourceData& data, InstanceSet& set) {
    set.add(data.info.chain);
    set.add(data.info.network);
    set.add(data.info.chain_descriptor);
    for (const BlockBundle& b : data.blocks) {
        set.add(b.block);
        set.add(b.descriptor);
        if (b.validation) set.add(*b.validation);
        for (const Instance& v : b.validators) set.add(v);
    }
    for (const TransactionBundle& t : data.txs) {
        set.add(t.tx);
        set.add(t.descriptor);
        for (const Instance& i : t.utxos) set.add(i);
        for (const Instance& i : t.assets) set.add(i);
        for (const Instance& i : t.tokens) set.add(i);
        for (const Instance& i : t.data) set.add(i);
    }
    for (const AccountBundle& a : data.accounts) {
        set.add(a.account);
        for (const Instance& i : a.tokens) set.add(i);
        for (const Instance& i : a.assets) set.add(i);
        for (const Instance& i : a.data) set.add(i);
    }
}

// One result row of one source: the grain instance plus every containment
// ancestor, keyed by class name.
using RowContext = std::map<std::string, const Instance*>;

inline RowContext base_context(const SourceData& data) {
    return {{"Chain", &data.info.chain},
            {"Network", &data.info.network},
            {"ChainDescriptor", &data.info.chain_descriptor}};
}

inline void add_block_to_context(RowContext& ctx, const BlockBundle& b) {
    ctx["Block"] = &b.block;
    ctx["BlockDescriptor"] = &b.descriptor;
    if (b.validation) ctx["ValidationDescriptor"] = &*b.validation;
}

inline std::vector<RowContext> build_rows(const SourceData& data, RowEntity entity) {
    std::vector<RowContext> rows;
    // block bundles by id, for transaction ancestors
    std::map<std::string, const BlockBundle*> blocks_by_id;
    for (const BlockBundle& b : data.blocks) {
        const std::string* id = b.block.id();
        if (id != nullptr) blocks_by_id.emplace(*id, &b);
    }
    auto tx_context = [&](const TransactionBundle& t) {
        RowContext ctx = base_context(data);
        auto blk = blocks_by_id.find(t.block_id);
        if (blk != blocks_by_id.end()) add_block_to_context(ctx, *blk->second);
        ctx["Transaction"] = &t.tx;
        ctx["TransactionDescriptor"] = &t.descriptor;
        return ctx;
    };

    switch (entity) {
        case RowEntity::Source:
            rows.push_back(base_context(data));
            break;
        case RowEntity::Block:
            for (const BlockBundle& b : data.blocks) {
                RowContext ctx = base_context(data);
                add_block_to_context(ctx, b);
                rows.push_back(std::move(ctx));
            }
            break;
        case RowEntity::Transaction:
            for (const TransactionBundle& t : data.txs) rows.push_back(tx_context(t));
            break;
        case RowEntity::Utxo:
            for (const TransactionBundle& t : data.txs) {
                for (const Instance& u : t.utxos) {
                    RowContext ctx = tx_context(t);
                    ctx["UTXO"] = &u;
                    rows.push_back(std::move(ctx));
                }
            }
            break;
        case RowEntity::Account:
            for (const AccountBundle& a : data.accounts) {
                RowContext ctx = base_context(data);
                ctx["Account"] = &a.account;
                rows.push_back(std::move(ctx));
            }
            break;
        case RowEntity::Asset:
        case RowEntity::Token:
        case RowEntity::Data: {
            const char* cls = entity == RowEntity::Asset   ? "Asset"
                              : entity == RowEntity::Token ? "Token"
                                                           : "Data";
            auto pick = [&](const TransactionBundle& t) -> const std::vector<Instance>& {
                return entity == RowEntity::Asset ? t.assets
                       : entity == RowEntity::Token ? t.tokens
                                                    : t.data;
            };
            auto pick_acc = [&](const AccountBundle& a) -> const std::vector<Instance>& {
                return entity == RowEntity::Asset ? a.assets
                       : entity == RowEntity::Token ? a.tokens
                                                    : a.data;
            };
            for (const TransactionBundle& t : data.txs) {
                for (const Instance& inst : pick(t)) {
                    RowContext ctx = tx_context(t);
                    ctx[cls] = &inst;
                    rows.push_back(std::move(ctx));
                }
            }
            for (const AccountBundle& a : data.accounts) {
                for (const Instance& inst : pick_acc(a)) {
                    RowContext ctx = base_context(data);
                    ctx["Account"] = &a.account;
                    ctx[cls] = &inst;
                    rows.push_back(std::move(ctx));
                }
            }
            break;
        }
        case RowEntity::Validator:
            for (const BlockBundle& b : data.blocks) {
                for (const Instance& v : b.validators) {
                    RowContext ctx = base_context(data);
                    add_block_to_context(ctx, b);
                    ctx["ValidatorDescriptor"] = &v;
                    rows.push_back(std::move(ctx));
                }
            }
            break;
    }
    return rows;
}

struct WorkingColumn {
    int source = 0;
    std::string class_name;
    std::string attr_name;
    bool visible = true;
};

}  // namespace engine_detail

// Runs the plan: fetch per source (concurrently when several sources are
// bound), form rows at each source's grain, combine sources by Cartesian
// product in source order, apply filters in statement order, and drop any
// hidden filter columns. Fully deterministic over fixture backends.
inline ResultTable execute(const ExecutionPlan& plan) {
    namespace ed = engine_detail;
    const std::size_t n_sources = plan.bindings.size();

    // fetch
    std::vector<ed::SourceData> data(n_sources);
    if (n_sources > 1) {
        std::vector<std::future<ed::SourceData>> futures;
        futures.reserve(n_sources);
        for (const SourceBinding& b : plan.bindings) {
            futures.push_back(std::async(std::launch::async, [&b, &plan] {
                return ed::fetch_source(b, ed::referenced_classes(plan, b.source_index));
            }));
        }
        for (std::size_t i = 0; i < n_sources; ++i) data[i] = futures[i].get();
    } else if (n_sources == 1) {
        data[0] = ed::fetch_source(plan.bindings[0],
                                   ed::referenced_classes(plan, plan.bindings[0].source_index));
    }
    for (std::size_t i = 0; i < n_sources; ++i) {
        ed::stamp_source(data[i], plan.bindings[i].source_index);
    }

    InstanceSet instances;
    for (const ed::SourceData& d : data) ed::collect_instances(d, instances);

    // per-source rows at grain
    std::vector<std::vector<ed::RowContext>> source_rows(n_sources);
    for (std::size_t i = 0; i < n_sources; ++i) {
        int idx = plan.bindings[i].source_index;
        source_rows[i] =
            ed::build_rows(data[i], ed::row_entity(plan.grain_class.at(idx)));
    }

    // working columns: projected ones first, then hidden filter columns
    std::vector<ed::WorkingColumn> working;
    std::vector<Column> descriptors;
    auto add_column = [&](int source, const std::string& cls, const std::string& attr,
                          bool visible) {
        const AttrDef& def = SchemaCatalog::instance().resolve_attr(cls, attr);
        working.push_back({source, cls, attr, visible});
        descriptors.push_back({std::to_string(source) + "." + cls + "." + attr, def.kind,
                               def.multiplicity});
        return working.size() - 1;
    };
    for (const SourceBinding& b : plan.bindings) {
        for (const AttrSpec& attr : plan.per_source_attrs.at(b.source_index)) {
            add_column(b.source_index, attr.class_name, attr.attr_name, true);
        }
    }
    auto find_or_add = [&](const BoundFilterAttr& side) -> std::size_t {
        for (std::size_t c = 0; c < working.size(); ++c) {
            if (working[c].source == side.source && working[c].class_name == side.class_name &&
                working[c].attr_name == side.attr_name) {
                return c;
            }
        }
        return add_column(side.source, side.class_name, side.attr_name, false);
    };
    std::vector<TableFilter> table_filters;
    for (const ResolvedFilter& f : plan.filters) {
        TableFilter tf;
        tf.left = find_or_add(f.left);
        tf.cmp = f.cmp;
        if (const auto* rhs = std::get_if<BoundFilterAttr>(&f.right)) {
            tf.rhs = find_or_add(*rhs);
        } else {
            tf.rhs = std::get<Value>(f.right);
        }
        table_filters.push_back(std::move(tf));
    }

    // source index -> position in bindings
    std::map<int, std::size_t> source_pos;
    for (std::size_t i = 0; i < n_sources; ++i) {
        source_pos[plan.bindings[i].source_index] = i;
    }

    auto cell = [&](const ed::RowContext& ctx, const ed::WorkingColumn& col) -> Value {
        auto it = ctx.find(col.class_name);
        const Instance* inst = it != ctx.end() ? it->second : nullptr;
        if (inst == nullptr) {
            // not on this row's containment path: fall back to the source's
            // unique instance of the class when there is exactly one
            const std::vector<Instance>* list = instances.list(col.source, col.class_name);
            if (list != nullptr && list->size() == 1) inst = &list->front();
        }
        return inst != nullptr ? inst->attr(col.attr_name) : Value();
    };

    // Cartesian product in source order, lexicographic over row indices
    ResultTable table;
    table.columns = descriptors;
    bool any_empty = false;
    for (const auto& rows : source_rows) any_empty = any_empty || rows.empty();
    if (!any_empty && n_sources > 0) {
        std::vector<std::size_t> odo(n_sources, 0);
        bool done = false;
        while (!done) {
            std::vector<Value> row;
            row.reserve(working.size());
            for (const ed::WorkingColumn& col : working) {
                std::size_t pos = source_pos.at(col.source);
                row.push_back(cell(source_rows[pos][odo[pos]], col));
            }
            table.rows.push_back(std::move(row));
            // advance odometer, last source fastest
            std::size_t pos = n_sources;
            while (true) {
                if (pos == 0) {
                    done = true;
                    break;
                }
                --pos;
                if (++odo[pos] < source_rows[pos].size()) break;
                odo[pos] = 0;
            }
        }
    }

    // filters in statement order
    for (const TableFilter& tf : table_filters) {
        table = apply_filter(table, tf);
    }

    // drop hidden columns
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < working.size(); ++c) {
        if (working[c].visible) keep.push_back(c);
    }
    if (keep.size() != working.size()) {
        ResultTable trimmed;
        for (std::size_t c : keep) trimmed.columns.push_back(table.columns[c]);
        for (const auto& row : table.rows) {
            std::vector<Value> out;
            out.reserve(keep.size());
            for (std::size_t c : keep) out.push_back(row[c]);
            trimmed.rows.push_back(std::move(out));
        }
        table = std::move(trimmed);
    }
    return table;
}

// Convenience entry point: parse, plan, execute.
inline ResultTable run_statement(std::string_view text, const SourceRegistry& registry) {
    return execute(plan(parse(text), registry));
}

}  // namespace ccql
