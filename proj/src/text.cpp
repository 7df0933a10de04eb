#include "logdiff/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace logdiff {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  [[noreturn]] void fail(const std::string& what) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    raise(Errc::SyntaxError, "at " + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip();
    return pos_ >= src_.size();
  }
  char peek() {
    skip();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  // Keyword followed by a non-letter.
  bool accept_word(std::string_view w) {
    skip();
    if (src_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < src_.size() && std::isalpha(static_cast<unsigned char>(src_[end]))) return false;
    pos_ = end;
    return true;
  }
  bool peek_word(std::string_view w) {
    const std::size_t save = pos_;
    const bool ok = accept_word(w);
    pos_ = save;
    return ok;
  }
  bool peek_digit() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  }

  BigInt integer() {
    skip();
    const std::size_t start = pos_;
    if (pos_ < src_.size() && src_[pos_] == '-') ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("expected integer");
    }
    return BigInt(std::string(src_.substr(start, pos_ - start)));
  }

  std::vector<std::int64_t> int_list(char close) {
    std::vector<std::int64_t> out;
    if (accept(close)) return out;
    do {
      const BigInt v = integer();
      if (!v.fits_slong_p()) fail("integer out of range");
      out.push_back(v.get_si());
    } while (accept(','));
    expect(close);
    return out;
  }

  MultiIndex multi_index() {
    expect('[');
    std::vector<int> e;
    for (std::int64_t v : int_list(']')) {
      if (v < 0 || v > (1 << 20)) fail("multi-index entries must be non-negative");
      e.push_back(static_cast<int>(v));
    }
    return MultiIndex(std::move(e));
  }

  // One monomial c*x[v], c, or x[v].
  AlgElem term(const Chart& chart) {
    std::int64_t mod = chart.modulus();
    BigInt c = 1;
    bool have_c = false;
    if (peek_digit() || peek() == '-') {
      c = integer();
      have_c = true;
    }
    if (have_c && !accept('*')) return chart.constant(reduce_residue(c, mod));
    if (have_c && peek_word("wedge")) {
      // "c * wedge": the coefficient was a bare constant.
      pos_ -= 1;
      while (pos_ > 0 && src_[pos_] != '*') --pos_;
      return chart.constant(reduce_residue(c, mod));
    }
    if (have_c && peek_word("E")) {
      pos_ -= 1;
      while (pos_ > 0 && src_[pos_] != '*') --pos_;
      return chart.constant(reduce_residue(c, mod));
    }
    const std::size_t at = pos_;
    if (!accept_word("x")) fail("expected monomial x[...]");
    expect('[');
    std::vector<std::int64_t> v = int_list(']');
    if (v.size() != chart.ambient_rank()) {
      pos_ = at;
      raise(Errc::ArityMismatch, "exponent x[...] has " + std::to_string(v.size()) + " entries, chart has " +
                                     std::to_string(chart.ambient_rank()));
    }
    const AlgElem out = chart.monomial(v, reduce_residue(c, mod));
    chart.validate(out);
    return out;
  }

  AlgElem element(const Chart& chart) {
    AlgElem out = chart.zero();
    bool negative = accept('-');
    for (;;) {
      AlgElem t = term(chart);
      out += negative ? -t : t;
      if (accept('+')) {
        negative = false;
      } else if (accept('-')) {
        negative = true;
      } else {
        break;
      }
    }
    return out;
  }

  // Coefficient of an operator or pparts term.
  AlgElem coefficient(const Chart& chart) {
    if (accept('(')) {
      AlgElem a = element(chart);
      expect(')');
      accept('*');
      return a;
    }
    return term(chart);
  }

  std::size_t pos() const noexcept { return pos_; }
  void set_pos(std::size_t p) noexcept { pos_ = p; }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

void check_arity(Parser& ps, const MultiIndex& k, std::size_t rank) {
  (void)ps;
  if (k.arity() != rank)
    raise(Errc::ArityMismatch, "multi-index " + k.str() + " has arity " + std::to_string(k.arity()) +
                                   ", chart rank is " + std::to_string(rank));
}

template <class Add>
void parse_operator_terms(std::string_view src, const BasisPtr& basis, const char* symbol, Add add) {
  Parser ps(src);
  const Chart& chart = *basis->chart();
  const std::size_t r = basis->rank();
  if (ps.at_end()) ps.fail("empty operator");
  bool negative = ps.accept('-');
  for (;;) {
    AlgElem c = chart.one();
    if (!ps.peek_word(symbol)) c = ps.coefficient(chart);
    MultiIndex k(r);
    if (ps.accept_word(symbol)) {
      k = ps.multi_index();
      check_arity(ps, k, r);
    } else if (std::string_view(symbol) == "d" && ps.peek_word("db")) {
      ps.fail("flat symbol db in a log operator");
    }
    add(k, negative ? -c : c);
    if (ps.accept('+')) {
      negative = false;
    } else if (ps.accept('-')) {
      negative = true;
    } else {
      break;
    }
  }
  if (!ps.at_end()) ps.fail("unexpected input");
}

bool is_number(const nlohmann::json& j) { return j.is_number_integer() || j.is_string(); }

}  // namespace

// ---------------------------------------------------------------------------
// Parsers

MultiIndex parse_multi_index(std::string_view src) {
  Parser ps(src);
  MultiIndex k = ps.multi_index();
  if (!ps.at_end()) ps.fail("unexpected input");
  return k;
}

AlgElem parse_element(std::string_view src, const Chart& chart) {
  Parser ps(src);
  if (ps.at_end()) ps.fail("empty element");
  AlgElem a = ps.element(chart);
  if (!ps.at_end()) ps.fail("unexpected input");
  return a;
}

DiffOp parse_operator(std::string_view src, const BasisPtr& basis) {
  DiffOp out(basis);
  parse_operator_terms(src, basis, "d", [&](const MultiIndex& k, const AlgElem& a) { out.add_term(k, a); });
  return out;
}

FlatOp parse_flat(std::string_view src, const BasisPtr& basis) {
  FlatOp out(basis);
  parse_operator_terms(src, basis, "db", [&](const MultiIndex& k, const AlgElem& a) { out.add_term(k, a); });
  return out;
}

PPartsElem parse_pparts(std::string_view src, const Chart& chart, const std::vector<int>& orders) {
  Parser ps(src);
  const std::size_t r = chart.rank();
  PPartsElem out(chart.params(), chart.ambient_rank(), r, orders);
  if (ps.at_end()) ps.fail("empty element");
  bool negative = ps.accept('-');
  for (;;) {
    AlgElem c = chart.one();
    if (!ps.peek_word("E")) {
      c = ps.coefficient(chart);
      ps.accept('*');
    }
    std::vector<int> key;
    if (ps.accept_word("E")) {
      ps.expect('[');
      std::size_t factors = 0;
      for (;;) {
        std::vector<int> part;
        if (ps.peek() != ';' && ps.peek() != ']') {
          do {
            const BigInt v = ps.integer();
            if (v < 0 || !v.fits_sint_p()) ps.fail("multi-index entries must be non-negative");
            part.push_back(static_cast<int>(v.get_si()));
          } while (ps.accept(','));
        }
        if (part.size() != r)
          raise(Errc::ArityMismatch, "tensor factor has arity " + std::to_string(part.size()) + ", chart rank is " +
                                         std::to_string(r));
        key.insert(key.end(), part.begin(), part.end());
        ++factors;
        if (ps.accept(';')) continue;
        ps.expect(']');
        break;
      }
      if (factors != orders.size())
        raise(Errc::ArityMismatch, "expected " + std::to_string(orders.size()) + " tensor factors");
    } else {
      key.assign(r * orders.size(), 0);
    }
    MultiIndex k(std::move(key));
    if (!out.within_orders(k)) raise(Errc::OrderIncrease, "E" + k.str() + " exceeds the truncation order");
    out.add_term(k, negative ? -c : c);
    if (ps.accept('+')) {
      negative = false;
    } else if (ps.accept('-')) {
      negative = true;
    } else {
      break;
    }
  }
  if (!ps.at_end()) ps.fail("unexpected input");
  return out;
}

OmegaElement parse_omega(std::string_view src, const BasisPtr& basis) {
  Parser ps(src);
  const Chart& chart = *basis->chart();
  AlgElem a = chart.one();
  if (ps.at_end()) ps.fail("empty form");
  if (!ps.peek_word("wedge")) {
    a = ps.peek() == '(' ? ps.coefficient(chart) : ps.element(chart);
    ps.accept('*');
  }
  if (!ps.accept_word("wedge")) ps.fail("expected 'wedge'");
  if (!ps.at_end()) ps.fail("unexpected input");
  return {basis, a};
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json chart_to_json(const Chart& chart) {
  return {{"p", chart.params().p()},
          {"nilpotency", chart.params().nilpotency()},
          {"level", chart.params().level()},
          {"monoid", to_json(chart.monoid())},
          {"basis_map", to_json(chart.basis_map())},
          {"group_mode", chart.group_mode()}};
}

ChartPtr chart_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_object()) raise(Errc::SchemaError, "expected object at " + pointer);
  for (const char* key : {"p", "nilpotency", "level", "monoid", "basis_map"})
    if (!j.contains(key)) raise(Errc::SchemaError, "missing " + pointer + "/" + key);
  const std::int64_t p = json_int(j["p"], pointer + "/p");
  const std::int64_t nil = json_int(j["nilpotency"], pointer + "/nilpotency");
  const std::int64_t level = json_int(j["level"], pointer + "/level");
  if (!is_prime(p)) raise(Errc::SchemaError, "p = " + std::to_string(p) + " is not prime at " + pointer + "/p");
  std::optional<RingParams> params;
  try {
    params.emplace(p, static_cast<int>(nil), static_cast<int>(level));
  } catch (const Error& e) {
    raise(Errc::SchemaError, std::string(e.what()) + " at " + pointer);
  }
  bool group = false;
  if (j.contains("group_mode")) {
    if (!j["group_mode"].is_boolean()) raise(Errc::SchemaError, "expected boolean at " + pointer + "/group_mode");
    group = j["group_mode"].get<bool>();
  }
  AffineMonoid monoid = monoid_from_json(j["monoid"], pointer + "/monoid");
  LatticeMap map = map_from_json(j["basis_map"], pointer + "/basis_map");
  return Chart::make(*params, std::move(monoid), std::move(map), group);
}

nlohmann::json table_to_json(const StratTable& table) {
  nlohmann::json entries = nlohmann::json::array();
  for (const MultiIndex& k : table.indices()) {
    nlohmann::json m = nlohmann::json::array();
    for (const auto& row : table.at(k)) {
      nlohmann::json r = nlohmann::json::array();
      for (const AlgElem& a : row) r.push_back(a.str());
      m.push_back(std::move(r));
    }
    entries.push_back({{"k", k.str()}, {"matrix", std::move(m)}});
  }
  return {{"rank", table.rank()}, {"order", table.order()}, {"entries", std::move(entries)}};
}

StratTable table_from_json(const nlohmann::json& j, const ChartPtr& chart, const std::string& pointer) {
  if (!j.is_object()) raise(Errc::SchemaError, "expected object at " + pointer);
  for (const char* key : {"rank", "order", "entries"})
    if (!j.contains(key)) raise(Errc::SchemaError, "missing " + pointer + "/" + key);
  const std::int64_t s = json_int(j["rank"], pointer + "/rank");
  const std::int64_t n = json_int(j["order"], pointer + "/order");
  if (s < 0 || n < 0) raise(Errc::SchemaError, "negative size at " + pointer);
  StratTable t(chart, static_cast<std::size_t>(s), static_cast<int>(n));
  const auto& entries = j["entries"];
  if (!entries.is_array()) raise(Errc::SchemaError, "expected array at " + pointer + "/entries");
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string ep = pointer + "/entries/" + std::to_string(e);
    const auto& item = entries[e];
    if (!item.is_object() || !item.contains("k") || !item["k"].is_string() || !item.contains("matrix"))
      raise(Errc::SchemaError, "expected {k, matrix} at " + ep);
    const MultiIndex k = parse_multi_index(item["k"].get<std::string>());
    const auto& m = item["matrix"];
    if (!m.is_array() || m.size() != t.rank()) raise(Errc::SchemaError, "matrix has wrong size at " + ep + "/matrix");
    AlgMatrix mat;
    for (std::size_t l = 0; l < m.size(); ++l) {
      const std::string rp = ep + "/matrix/" + std::to_string(l);
      if (!m[l].is_array() || m[l].size() != t.rank()) raise(Errc::SchemaError, "row has wrong size at " + rp);
      std::vector<AlgElem> row;
      for (std::size_t c = 0; c < m[l].size(); ++c) {
        if (!m[l][c].is_string()) raise(Errc::SchemaError, "expected element text at " + rp + "/" + std::to_string(c));
        row.push_back(parse_element(m[l][c].get<std::string>(), *chart));
      }
      mat.push_back(std::move(row));
    }
    t.set(k, std::move(mat));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Session

std::string value_kind(const Value& v) {
  switch (v.index()) {
    case 0: return "element";
    case 1: return "operator";
    case 2: return "omega";
    default: return "pparts";
  }
}

std::string value_text(const Value& v) {
  return std::visit([](const auto& x) { return x.str(); }, v);
}

Session::Session(ChartPtr chart) : chart_(std::move(chart)), basis_(LogBasis::canonical(chart_)) {}

void Session::bind(const std::string& name, Value v) {
  if (name.empty()) raise(Errc::SchemaError, "binding names must be non-empty");
  bindings_.insert_or_assign(name, std::move(v));
}

const Value& Session::lookup(const std::string& name) const {
  auto it = bindings_.find(name);
  if (it == bindings_.end()) raise(Errc::SchemaError, "no binding named '" + name + "'");
  return it->second;
}

nlohmann::json Session::to_json() const {
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [name, v] : bindings_) {
    nlohmann::json item = {{"kind", value_kind(v)}, {"value", value_text(v)}};
    if (const auto* pp = std::get_if<PPartsElem>(&v)) item["orders"] = pp->orders();
    b[name] = std::move(item);
  }
  return {{"chart", chart_to_json(*chart_)}, {"bindings", std::move(b)}};
}

Session Session::from_json(const nlohmann::json& j) {
  if (!j.is_object()) raise(Errc::SchemaError, "expected object at ");
  if (!j.contains("chart")) raise(Errc::SchemaError, "missing /chart");
  Session s(chart_from_json(j["chart"], "/chart"));
  if (!j.contains("bindings")) return s;
  const auto& b = j["bindings"];
  if (!b.is_object()) raise(Errc::SchemaError, "expected object at /bindings");
  for (const auto& [name, item] : b.items()) {
    const std::string ptr = "/bindings/" + name;
    if (!item.is_object() || !item.contains("kind") || !item.contains("value") || !item["kind"].is_string() ||
        !item["value"].is_string())
      raise(Errc::SchemaError, "expected {kind, value} at " + ptr);
    const std::string kind = item["kind"].get<std::string>();
    const std::string text = item["value"].get<std::string>();
    try {
      if (kind == "element") {
        s.bind(name, parse_element(text, *s.chart_));
      } else if (kind == "operator") {
        s.bind(name, parse_operator(text, s.basis_));
      } else if (kind == "omega") {
        s.bind(name, parse_omega(text, s.basis_));
      } else if (kind == "pparts") {
        if (!item.contains("orders") || !item["orders"].is_array())
          raise(Errc::SchemaError, "missing " + ptr + "/orders");
        std::vector<int> orders;
        for (std::size_t i = 0; i < item["orders"].size(); ++i) {
          if (!is_number(item["orders"][i])) raise(Errc::SchemaError, "expected integer at " + ptr + "/orders");
          orders.push_back(static_cast<int>(json_int(item["orders"][i], ptr + "/orders/" + std::to_string(i))));
        }
        s.bind(name, parse_pparts(text, *s.chart_, orders));
      } else {
        raise(Errc::SchemaError, "unknown kind '" + kind + "' at " + ptr + "/kind");
      }
    } catch (const Error& e) {
      if (e.code() == Errc::SchemaError) throw;
      raise(Errc::SchemaError, std::string(e.what()) + " at " + ptr + "/value");
    }
  }
  return s;
}

Session Session::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::SchemaError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(Errc::SchemaError, "malformed JSON in " + path + ": " + e.what());
  }
  return from_json(j);
}

void Session::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) raise(Errc::SchemaError, "cannot write " + path);
  out << serialize() << "\n";
}

}  // namespace logdiff
