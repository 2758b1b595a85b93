#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fts::toml {

// Minimal TOML subset: top-level and nested tables ([a.b]), arrays of tables
// ([[a.b]]), key = value with strings, booleans, integers, floats and
// (nested) arrays. No inline tables, no dates, no multi-line strings.

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Value {
  enum class Kind { Str, Bool, Int, Float, Array };
  Kind kind = Kind::Int;
  std::string str;
  bool b = false;
  long long i = 0;
  double f = 0.0;
  std::vector<Value> arr;

  double as_number() const;
  bool operator==(const Value& other) const;
};

struct Table {
  std::map<std::string, Value> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  const Value& at(const std::string& key) const;
  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& dflt) const;
  double get_num(const std::string& key) const;
  double get_num(const std::string& key, double dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_vec(const std::string& key) const;
  std::vector<std::vector<double>> get_mat(const std::string& key) const;
  bool operator==(const Table& other) const { return kv == other.kv; }
};

struct Document {
  // Dotted path -> occurrences. Plain tables are single-element vectors;
  // [[path]] appends. Root keys live under path "".
  std::map<std::string, std::vector<Table>> tables;
  // Path order of first appearance, for faithful serialization.
  std::vector<std::string> order;

  const Table* get(const std::string& path) const;
  const std::vector<Table>* get_array(const std::string& path) const;
  bool operator==(const Document& other) const {
    return tables == other.tables;
  }
};

Document parse(const std::string& text);
Document parse_file(const std::string& path);
std::string serialize(const Document& doc);

}  // namespace fts::toml
