#include "fts/toml.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fts::toml {

double Value::as_number() const {
  switch (kind) {
    case Kind::Int:
      return static_cast<double>(i);
    case Kind::Float:
      return f;
    default:
      throw ParseError("value is not a number");
  }
}

bool Value::operator==(const Value& other) const {
  if (kind != other.kind) {
    // Integers and floats compare by numeric value so that a round-trip
    // through serialization stays equal.
    bool num = (kind == Kind::Int || kind == Kind::Float) &&
               (other.kind == Kind::Int || other.kind == Kind::Float);
    return num && as_number() == other.as_number();
  }
  switch (kind) {
    case Kind::Str:
      return str == other.str;
    case Kind::Bool:
      return b == other.b;
    case Kind::Int:
      return i == other.i;
    case Kind::Float:
      return f == other.f;
    case Kind::Array:
      return arr == other.arr;
  }
  return false;
}

const Value& Table::at(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("missing key '" + key + "'");
  return it->second;
}

std::string Table::get_str(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::Str)
    throw ParseError("key '" + key + "' is not a string");
  return v.str;
}

std::string Table::get_str(const std::string& key,
                           const std::string& dflt) const {
  return has(key) ? get_str(key) : dflt;
}

double Table::get_num(const std::string& key) const {
  return at(key).as_number();
}

double Table::get_num(const std::string& key, double dflt) const {
  return has(key) ? get_num(key) : dflt;
}

long long Table::get_int(const std::string& key, long long dflt) const {
  if (!has(key)) return dflt;
  const Value& v = at(key);
  if (v.kind != Value::Kind::Int)
    throw ParseError("key '" + key + "' is not an integer");
  return v.i;
}

bool Table::get_bool(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  const Value& v = at(key);
  if (v.kind != Value::Kind::Bool)
    throw ParseError("key '" + key + "' is not a boolean");
  return v.b;
}

std::vector<double> Table::get_vec(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::Array)
    throw ParseError("key '" + key + "' is not an array");
  std::vector<double> out;
  for (const Value& e : v.arr) out.push_back(e.as_number());
  return out;
}

std::vector<std::vector<double>> Table::get_mat(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::Array)
    throw ParseError("key '" + key + "' is not an array");
  std::vector<std::vector<double>> out;
  for (const Value& row : v.arr) {
    if (row.kind != Value::Kind::Array)
      throw ParseError("key '" + key + "' is not a nested array");
    std::vector<double> r;
    for (const Value& e : row.arr) r.push_back(e.as_number());
    out.push_back(std::move(r));
  }
  return out;
}

const Table* Document::get(const std::string& path) const {
  auto it = tables.find(path);
  if (it == tables.end() || it->second.empty()) return nullptr;
  return &it->second.front();
}

const std::vector<Table>* Document::get_array(const std::string& path) const {
  auto it = tables.find(path);
  return it == tables.end() ? nullptr : &it->second;
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  char take() {
    char c = s[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
  }
};

void skip_ws_and_comments(Cursor& c) {
  while (!c.eof()) {
    char ch = c.peek();
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      c.take();
    } else if (ch == '#') {
      while (!c.eof() && c.peek() != '\n') c.take();
    } else {
      break;
    }
  }
}

std::string parse_key(Cursor& c) {
  std::string key;
  while (!c.eof() &&
         (std::isalnum(static_cast<unsigned char>(c.peek())) ||
          c.peek() == '_' || c.peek() == '-' || c.peek() == '.')) {
    key += c.take();
  }
  if (key.empty()) c.fail("expected key");
  return key;
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::Array;
  c.take();  // '['
  for (;;) {
    skip_ws_and_comments(c);
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      break;
    }
    v.arr.push_back(parse_value(c));
    skip_ws_and_comments(c);
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ',') {
      c.take();
    } else if (c.peek() != ']') {
      c.fail("expected ',' or ']' in array");
    }
  }
  return v;
}

Value parse_value(Cursor& c) {
  c.skip_ws_inline();
  if (c.eof()) c.fail("expected value");
  char ch = c.peek();
  Value v;
  if (ch == '"') {
    c.take();
    v.kind = Value::Kind::Str;
    while (!c.eof() && c.peek() != '"') {
      char d = c.take();
      if (d == '\\' && !c.eof()) {
        char e = c.take();
        switch (e) {
          case 'n': v.str += '\n'; break;
          case 't': v.str += '\t'; break;
          case '"': v.str += '"'; break;
          case '\\': v.str += '\\'; break;
          default: c.fail("unsupported escape");
        }
      } else {
        v.str += d;
      }
    }
    if (c.eof()) c.fail("unterminated string");
    c.take();
    return v;
  }
  if (ch == '[') return parse_array(c);
  std::string tok;
  while (!c.eof() && c.peek() != '\n' && c.peek() != ',' && c.peek() != ']' &&
         c.peek() != '#' && c.peek() != '\r') {
    tok += c.take();
  }
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t'))
    tok.pop_back();
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::Bool;
    v.b = (tok == "true");
    return v;
  }
  if (tok.empty()) c.fail("expected value");
  // Number: integer unless it carries a fractional/exponent marker.
  bool is_float = tok.find('.') != std::string::npos ||
                  tok.find('e') != std::string::npos ||
                  tok.find('E') != std::string::npos ||
                  tok == "inf" || tok == "-inf" || tok == "nan";
  try {
    std::size_t used = 0;
    if (is_float) {
      v.kind = Value::Kind::Float;
      v.f = std::stod(tok, &used);
    } else {
      v.kind = Value::Kind::Int;
      v.i = std::stoll(tok, &used);
    }
    if (used != tok.size()) c.fail("malformed number '" + tok + "'");
  } catch (const std::exception&) {
    c.fail("malformed value '" + tok + "'");
  }
  return v;
}

}  // namespace

Document parse(const std::string& text) {
  Document doc;
  Cursor c{text};
  std::string current_path;

  auto table_for = [&](const std::string& path, bool array) -> Table& {
    auto& vec = doc.tables[path];
    if (std::find(doc.order.begin(), doc.order.end(), path) ==
        doc.order.end())
      doc.order.push_back(path);
    if (array || vec.empty()) vec.emplace_back();
    return vec.back();
  };
  // root table
  doc.tables[""];
  doc.order.push_back("");
  doc.tables[""].emplace_back();

  for (;;) {
    skip_ws_and_comments(c);
    if (c.eof()) break;
    if (c.peek() == '[') {
      c.take();
      bool array = false;
      if (!c.eof() && c.peek() == '[') {
        array = true;
        c.take();
      }
      c.skip_ws_inline();
      std::string path = parse_key(c);
      c.skip_ws_inline();
      if (c.eof() || c.take() != ']') c.fail("expected ']'");
      if (array && (c.eof() || c.take() != ']')) c.fail("expected ']]'");
      current_path = path;
      table_for(path, array);
    } else {
      std::string key = parse_key(c);
      c.skip_ws_inline();
      if (c.eof() || c.take() != '=') c.fail("expected '='");
      Value v = parse_value(c);
      Table& t = doc.tables[current_path].back();
      if (t.kv.count(key)) c.fail("duplicate key '" + key + "'");
      t.kv[key] = std::move(v);
    }
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

void serialize_value(const Value& v, std::ostream& os) {
  switch (v.kind) {
    case Value::Kind::Str: {
      os << '"';
      for (char ch : v.str) {
        if (ch == '"' || ch == '\\') os << '\\';
        os << ch;
      }
      os << '"';
      break;
    }
    case Value::Kind::Bool:
      os << (v.b ? "true" : "false");
      break;
    case Value::Kind::Int:
      os << v.i;
      break;
    case Value::Kind::Float: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << v.f;
      std::string s = tmp.str();
      if (s.find('.') == std::string::npos &&
          s.find('e') == std::string::npos &&
          s.find("inf") == std::string::npos &&
          s.find("nan") == std::string::npos)
        s += ".0";
      os << s;
      break;
    }
    case Value::Kind::Array: {
      os << '[';
      for (std::size_t i = 0; i < v.arr.size(); ++i) {
        if (i) os << ", ";
        serialize_value(v.arr[i], os);
      }
      os << ']';
      break;
    }
  }
}

void serialize_table(const Table& t, std::ostream& os) {
  for (const auto& [k, v] : t.kv) {
    os << k << " = ";
    serialize_value(v, os);
    os << "\n";
  }
}

}  // namespace

std::string serialize(const Document& doc) {
  std::ostringstream os;
  for (const std::string& path : doc.order) {
    auto it = doc.tables.find(path);
    if (it == doc.tables.end()) continue;
    const auto& occurrences = it->second;
    bool array = occurrences.size() > 1;
    for (const Table& t : occurrences) {
      if (!path.empty()) {
        os << (array ? "[[" : "[") << path << (array ? "]]\n" : "]\n");
      }
      serialize_table(t, os);
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace fts::toml
