#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fql/instance.hpp"
#include "fql/query.hpp"

namespace fql {

// Text form of the engine's objects:
//
//   schema S = {
//     nodes Emp, Dept;
//     edges worksIn: Emp -> Dept;
//     equations Emp.manager.worksIn = Emp.worksIn;
//     attributes Emp.last : String;
//   }
//   mapping F : S -> T = {
//     node Emp -> Person;
//     edge worksIn -> Person.dept;
//     attr last -> surname;
//   }
//   query Q = sigma H pi G delta F;
//   instance I on S = {
//     node Emp { 101, 102 }
//     edge worksIn { 101 -> q10 }
//     attr last { 101 -> "Steinbach" }
//   }
//   instance J on S from "people.json";
//
// "--" starts a line comment. Every name must be declared before it is
// used, which also keeps declarations acyclic.

struct SchemaDecl {
  std::string name;
  SigPtr sig;
};

struct MappingDecl {
  std::string name;
  std::string source, target;  // schema names
  TypedSignatureMorphism morphism;
};

struct QueryDecl {
  std::string name;
  std::string sigma_name, pi_name, delta_name;  // mapping names
  Query query;  // endpoint-checked at parse time, profiled when run
};

struct InstanceDecl {
  std::string name;
  std::string schema;
  Instance instance;
  std::optional<std::string> from_file;
};

enum class DeclKind { Schema, Mapping, Query, Instance };

struct Program {
  std::vector<std::pair<DeclKind, std::string>> order;
  std::map<std::string, SchemaDecl> schemas;
  std::map<std::string, MappingDecl> mappings;
  std::map<std::string, QueryDecl> queries;
  std::map<std::string, InstanceDecl> instances;
};

// Reads referenced files ("instance ... from") and, in run_eval, instance
// arguments that name files. Receives the path as written; returns the file
// content.
using FileLoader = std::function<std::string(const std::string&)>;

// Throws ParseError with position for syntax problems; structural problems
// (bad equation, invalid mapping) are rethrown as ParseError at the
// declaration, keeping the original description.
Program parse_program(const std::string& text, const FileLoader& loader = {},
                      int fuel = kDefaultFuel);

// Canonical text: parsing it back yields an equal program.
std::string print_program(const Program& p);

bool programs_equal(const Program& a, const Program& b);

struct RunOptions {
  int fuel = kDefaultFuel;
  std::uint64_t seed = 0;
  std::string format = "json";  // "json" or "csv"
  std::string out_dir;          // empty: write to the output stream
  FileLoader loader;
};

// Exit codes shared by all runners: 0 fine, 1 a validation or evaluation
// failure, 2 a fuel-bounded procedure gave up (answer unknown), 3 bad
// usage (unknown names, unusable flags).

// One line per declaration; problems printed beneath.
int run_check(const Program& p, std::ostream& out, std::ostream& err,
              const RunOptions& opts = {});

// Evaluates a declared query on a declared instance (or, with a loader, on
// a JSON file) and writes the result.
int run_eval(const Program& p, const std::string& query_name,
             const std::string& instance_name, std::ostream& out,
             std::ostream& err, const RunOptions& opts = {});

// Composes two declared queries (inner first) and prints the composite as
// a program fragment: new intermediate schemas, the three legs, the query.
int run_compose(const Program& p, const std::string& outer_name,
                const std::string& inner_name, const std::string& result_name,
                std::ostream& out, std::ostream& err,
                const RunOptions& opts = {});

// Compiles a declared query to SQL text (or its JSON plan).
int run_sql(const Program& p, const std::string& query_name, bool plan,
            std::ostream& out, std::ostream& err,
            const RunOptions& opts = {});

}  // namespace fql
