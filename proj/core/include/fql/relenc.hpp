#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fql/migrate.hpp"
#include "fql/query.hpp"

namespace fql {

// A classical relational schema: ordered relations with ordered column
// names, all columns drawn from one base type.
struct RelationalSchema {
  std::vector<std::pair<std::string, std::vector<std::string>>> relations;
  BaseType domain = BaseType::String;
};

// Tables as bags of tuples, in declaration order per relation.
struct RelationalInstance {
  RelationalSchema schema;
  std::map<std::string, std::vector<std::vector<Value>>> tables;
};

// The pointed encoding: one node per relation, one shared node D carrying
// the single attribute A (the active domain), and one edge per column,
// named "{relation}__{column}", pointing into D.
SigPtr encode_schema(const RelationalSchema& R);

// Rows of D = the values appearing anywhere, with A reading each back;
// rows of a relation node = one fresh ID per tuple, columns as edges.
Instance encode_rel_instance(const RelationalInstance& db);

// Inverse direction, for any instance whose signature has the pointed
// shape: one attributed node, every edge pointing into it from elsewhere,
// no equations. Column names drop the "{relation}__" prefix when present.
// Throws NotPointedError when the signature is not of this shape.
RelationalInstance decode_rel_instance(const Instance& I);

// SELECT P FROM entries WHERE W, over one schema. Columns are addressed by
// flat index into the concatenation of the FROM entries' columns.
struct SpcQuery {
  std::vector<std::string> from;           // relation name per entry
  std::vector<std::pair<int, int>> where;  // pairs of flat column indices
  std::vector<int> select;                 // output position -> flat column
  bool set_semantics = false;              // SELECT DISTINCT
};

// The migration form of an SPC query: span S -F-> T <-G- U where S holds
// one node per FROM entry, T one edge per WHERE-equivalence class of
// columns, U one edge per output position (relation node "B", domain node
// "D", attribute "A" throughout). The query itself is the pullback along G
// after the right pushforward along F, renormalized into a single triple.
struct SpcSetup {
  SigPtr S, T, U;
  TypedSignatureMorphism F;        // S -> T
  TypedSignatureMorphism G;        // U -> T
  TypedSignatureMorphism entries;  // S -> encode_schema(schema)
  Query query;                     // source S, target U
  bool relationalize_after = false;
};

SpcSetup translate_spc(const RelationalSchema& schema, const SpcQuery& q,
                       const EvalOptions& opts = {});

// Encode, pull onto the FROM entries, run the translated query, decode.
// Bag semantics is exact (multiplicities match the WHERE-filtered
// product); set semantics quotients observably equal rows first.
std::vector<std::vector<Value>> eval_spc(const RelationalInstance& db,
                                         const SpcQuery& q, KeyGen& keys,
                                         const EvalOptions& opts = {});

// A union of SPC arms of equal output arity. Arms are evaluated as bags,
// combined pairwise as instance coproducts (rekey, lay side by side,
// push forward along the fold), then optionally quotiented.
struct SpcuQuery {
  std::vector<SpcQuery> arms;
  bool set_semantics = false;
};

std::vector<std::vector<Value>> eval_spcu(const RelationalInstance& db,
                                          const SpcuQuery& q, KeyGen& keys,
                                          const EvalOptions& opts = {});

// Bags compare as multisets.
bool bag_equal(std::vector<std::vector<Value>> a,
               std::vector<std::vector<Value>> b);

// Header row of column names, then one line per tuple.
std::string rel_table_csv(const std::vector<std::string>& columns,
                          const std::vector<std::vector<Value>>& rows);

// Strict inverse at the given base type; quoting per RFC-ish CSV rules.
std::pair<std::vector<std::string>, std::vector<std::vector<Value>>>
rel_table_from_csv(const std::string& text, BaseType domain);

}  // namespace fql
