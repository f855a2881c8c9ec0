// fql — command line driver for the migration engine.
//
// Subcommands:
//   check PROGRAM...                     validate every declaration
//   eval PROGRAM -q QUERY -i INSTANCE    run a query on an instance
//   compose PROGRAM -o OUTER -i INNER    print the combined query
//   sql PROGRAM -q QUERY [--plan]        print the generated SQL (or plan)
//   encode --in FILE.csv...              pointed encoding of plain tables
//
// Exit codes: 0 fine, 1 a declaration or input failed validation,
// 2 a fuel-bounded check gave up, 3 bad usage.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fql/instance_io.hpp"
#include "fql/program.hpp"
#include "fql/relenc.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot read '" + p.string() + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Paths named inside a program resolve against the program's own directory
// first, then against the working directory.
fql::FileLoader loader_for(const fs::path& program_path) {
  fs::path dir = program_path.parent_path();
  return [dir](const std::string& name) -> std::string {
    fs::path p(name);
    if (!p.is_absolute() && !dir.empty()) {
      fs::path local = dir / p;
      std::error_code ec;
      if (fs::exists(local, ec)) return read_file(local);
    }
    return read_file(p);
  };
}

struct LoadedProgram {
  fs::path path;
  fql::Program program;
};

// 3 = unreadable file (usage), 1 = text does not parse (validation).
int load_program(const std::string& path, int fuel, LoadedProgram& out) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  try {
    out.path = path;
    out.program = fql::parse_program(text, loader_for(path), fuel);
  } catch (const fql::ParseError& e) {
    std::cerr << path << ":" << e.line << ":" << e.col << ": " << e.what()
              << "\n";
    return 1;
  } catch (const fql::FqlError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

fql::BaseType domain_from(const std::string& name) {
  if (name == "String") return fql::BaseType::String;
  if (name == "Nat") return fql::BaseType::Nat;
  if (name == "Int") return fql::BaseType::Int;
  throw CLI::ValidationError("--domain must be String, Nat or Int");
}

int run_encode(const std::vector<std::string>& inputs,
               const std::string& domain_name, const std::string& format,
               const std::string& out_dir) {
  fql::RelationalSchema schema;
  schema.domain = domain_from(domain_name);
  fql::RelationalInstance db;
  try {
    for (const std::string& in : inputs) {
      fs::path p(in);
      std::string rel = p.stem().string();
      auto [cols, rows] = fql::rel_table_from_csv(read_file(p), schema.domain);
      schema.relations.emplace_back(rel, cols);
      db.tables[rel] = std::move(rows);
    }
    db.schema = schema;
    fql::Instance pointed = fql::encode_rel_instance(db);

    if (format == "json") {
      std::string text = fql::instance_to_json(pointed).dump(2);
      if (out_dir.empty()) {
        std::cout << text << "\n";
      } else {
        fs::create_directories(out_dir);
        fs::path dest = fs::path(out_dir) / "instance.json";
        std::ofstream f(dest);
        f << text << "\n";
        std::cout << "wrote " << dest.string() << "\n";
      }
    } else if (format == "csv") {
      // Round-trips through the pointed form, proving it kept every tuple.
      fql::RelationalInstance back = fql::decode_rel_instance(pointed);
      for (const auto& [rel, cols] : back.schema.relations) {
        std::string text = fql::rel_table_csv(cols, back.tables.at(rel));
        if (out_dir.empty()) {
          std::cout << "-- " << rel << "\n" << text;
        } else {
          fs::create_directories(out_dir);
          fs::path dest = fs::path(out_dir) / (rel + ".csv");
          std::ofstream f(dest);
          f << text;
          std::cout << "wrote " << dest.string() << "\n";
        }
      }
    } else {
      std::cerr << "unknown format '" << format << "' (json or csv)\n";
      return 3;
    }
  } catch (const fql::ParseError& e) {
    std::cerr << "csv parse error at line " << e.line << ": " << e.what()
              << "\n";
    return 1;
  } catch (const fql::FqlError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functorial data migration engine"};
  app.require_subcommand(1);
  app.fallthrough();

  int fuel = fql::kDefaultFuel;
  unsigned long seed = 0;
  std::string format = "json";
  std::string out_dir;
  app.add_option("--fuel", fuel,
                 "rewriting and enumeration step budget")
      ->envname("FQL_FUEL");
  app.add_option("--seed", seed, "seed for generated row IDs");
  app.add_option("--format", format, "output format: json or csv");
  app.add_option("--out", out_dir, "write results into this directory");

  auto opts_for = [&](const fs::path& program_path) {
    fql::RunOptions o;
    o.fuel = fuel;
    o.seed = seed;
    o.format = format;
    o.out_dir = out_dir;
    o.loader = loader_for(program_path);
    return o;
  };

  std::vector<std::string> check_files;
  CLI::App* check = app.add_subcommand("check", "validate every declaration");
  check->add_option("program", check_files, "program files")
      ->required()
      ->expected(-1);

  std::string eval_file, eval_query, eval_instance;
  CLI::App* eval = app.add_subcommand("eval", "run a query on an instance");
  eval->add_option("program", eval_file, "program file")->required();
  eval->add_option("-q,--query", eval_query, "query to run")->required();
  eval->add_option("-i,--instance", eval_instance,
                   "instance name, or a JSON file path")
      ->required();

  std::string comp_file, comp_outer, comp_inner, comp_name = "composed";
  CLI::App* comp =
      app.add_subcommand("compose", "combine two queries into one");
  comp->add_option("program", comp_file, "program file")->required();
  comp->add_option("-o,--outer", comp_outer, "query applied second")
      ->required();
  comp->add_option("-i,--inner", comp_inner, "query applied first")
      ->required();
  comp->add_option("-n,--name", comp_name, "name for the combined query");

  std::string sql_file, sql_query_name;
  bool sql_plan = false;
  CLI::App* sql = app.add_subcommand("sql", "print the SQL for a query");
  sql->add_option("program", sql_file, "program file")->required();
  sql->add_option("-q,--query", sql_query_name, "query to translate")
      ->required();
  sql->add_flag("--plan", sql_plan, "print the operator plan as JSON");

  std::vector<std::string> enc_inputs;
  std::string enc_domain = "String";
  CLI::App* enc = app.add_subcommand(
      "encode", "turn CSV tables into one pointed instance");
  enc->add_option("--in", enc_inputs,
                  "CSV file; the relation is named after the file")
      ->required()
      ->expected(-1);
  enc->add_option("--domain", enc_domain,
                  "base type of every cell: String, Nat or Int");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }

  if (check->parsed()) {
    bool bad = false, gave_up = false;
    for (const std::string& f : check_files) {
      LoadedProgram lp;
      int rc = load_program(f, fuel, lp);
      if (rc == 3) return 3;
      if (rc != 0) {
        bad = true;
        continue;
      }
      if (check_files.size() > 1) std::cout << "== " << f << "\n";
      rc = fql::run_check(lp.program, std::cout, std::cerr, opts_for(f));
      if (rc == 1) bad = true;
      if (rc == 2) gave_up = true;
    }
    return bad ? 1 : gave_up ? 2 : 0;
  }
  if (eval->parsed()) {
    LoadedProgram lp;
    int rc = load_program(eval_file, fuel, lp);
    if (rc != 0) return rc;
    return fql::run_eval(lp.program, eval_query, eval_instance, std::cout,
                         std::cerr, opts_for(eval_file));
  }
  if (comp->parsed()) {
    LoadedProgram lp;
    int rc = load_program(comp_file, fuel, lp);
    if (rc != 0) return rc;
    return fql::run_compose(lp.program, comp_outer, comp_inner, comp_name,
                            std::cout, std::cerr, opts_for(comp_file));
  }
  if (sql->parsed()) {
    LoadedProgram lp;
    int rc = load_program(sql_file, fuel, lp);
    if (rc != 0) return rc;
    return fql::run_sql(lp.program, sql_query_name, sql_plan, std::cout,
                        std::cerr, opts_for(sql_file));
  }
  if (enc->parsed()) {
    return run_encode(enc_inputs, enc_domain, format, out_dir);
  }
  return 3;
}
