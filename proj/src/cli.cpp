#include "logdiff/cli.hpp"

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "logdiff/text.hpp"

namespace logdiff {

namespace {

struct Options {
  std::int64_t p = 2;
  int nilpotency = 2;
  int level = 0;
  int rank = 1;
  bool group = false;
  std::string chart_path;
  std::string map;
  std::string session_path;
  std::string bind_name;
  bool json = false;

  std::vector<std::string> args;
  std::string which;
  std::string k, i, a, b;
  std::string alpha;
  bool reduce = false;
  int order = 2;
  int target_level = 1;
  std::string matrix;
  std::string units;
  bool quick = false;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Context {
 public:
  explicit Context(const Options& o) : opt_(o) {}

  Session& session() {
    if (!session_) {
      if (!opt_.session_path.empty()) {
        session_.emplace(Session::load(opt_.session_path));
      } else {
        session_.emplace(chart());
      }
    }
    return *session_;
  }

  const BasisPtr& basis() { return session().basis(); }

  DiffOp op(const std::string& src) {
    if (const Value* v = bound(src)) {
      if (const auto* d = std::get_if<DiffOp>(v)) return *d;
      raise(Errc::SchemaError, "binding '" + src + "' is not an operator");
    }
    return parse_operator(src, basis());
  }
  AlgElem element(const std::string& src) {
    if (const Value* v = bound(src)) {
      if (const auto* a = std::get_if<AlgElem>(v)) return *a;
      raise(Errc::SchemaError, "binding '" + src + "' is not an element");
    }
    return parse_element(src, *basis()->chart());
  }
  OmegaElement omega(const std::string& src) {
    if (const Value* v = bound(src)) {
      if (const auto* w = std::get_if<OmegaElement>(v)) return *w;
      raise(Errc::SchemaError, "binding '" + src + "' is not a form");
    }
    return parse_omega(src, basis());
  }

  // Binds and saves when --bind is given.
  void keep(Value v) {
    if (opt_.bind_name.empty()) return;
    if (opt_.session_path.empty()) throw Usage("--bind needs --session");
    session().bind(opt_.bind_name, std::move(v));
    session().save(opt_.session_path);
  }

 private:
  ChartPtr chart() {
    const RingParams params(opt_.p, opt_.nilpotency, opt_.level);
    if (!opt_.chart_path.empty()) {
      std::ifstream in(opt_.chart_path);
      if (!in) raise(Errc::SchemaError, "cannot open " + opt_.chart_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const std::exception& e) {
        raise(Errc::SchemaError, std::string("malformed JSON: ") + e.what());
      }
      return chart_from_json(j);
    }
    if (!opt_.map.empty()) return Chart::free_with_map(params, parse_matrix(opt_.map), opt_.group);
    if (opt_.rank < 0) throw Usage("--rank must be non-negative");
    return Chart::identity(params, static_cast<std::size_t>(opt_.rank), opt_.group);
  }

  const Value* bound(const std::string& name) {
    if (opt_.session_path.empty() || !session().has(name)) return nullptr;
    return &session().lookup(name);
  }

  const Options& opt_;
  std::optional<Session> session_;
};

void need_args(const Options& o, std::size_t n, const std::string& usage) {
  if (o.args.size() != n) throw Usage("expected " + usage);
}

MultiIndex index_arg(const std::string& src, const char* flag) {
  if (src.empty()) throw Usage(std::string("missing ") + flag);
  if (src.front() == '[') return parse_multi_index(src);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(src, &used);
  } catch (const std::exception&) {
    throw Usage(std::string("bad value for ") + flag + ": " + src);
  }
  if (used != src.size() || v < 0) throw Usage(std::string("bad value for ") + flag + ": " + src);
  return MultiIndex{static_cast<int>(v)};
}

int int_arg(const std::string& src, const char* flag) {
  const MultiIndex k = index_arg(src, flag);
  if (k.arity() != 1) throw Usage(std::string(flag) + " takes a single integer");
  return k[0];
}

std::string residue_suffix(const BigRat& x, const RingParams& params, bool reduce) {
  if (!reduce) return "";
  return " = " + std::to_string(reduce_residue(x, params.modulus())) + " mod " + std::to_string(params.modulus());
}

std::string coeff(const Options& o) {
  const RingParams params(o.p, o.nilpotency, o.level);
  const std::string& w = o.which;
  if (w == "brace" || w == "angle") {
    const MultiIndex k = index_arg(o.k, "--k"), i = index_arg(o.i, "--i");
    if (k.arity() != i.arity()) raise(Errc::ArityMismatch, "--k and --i have different arities");
    const BigRat v = w == "brace" ? BigRat(brace_binom(k, i, params)) : angle_binom_exact(k, i, params);
    return v.get_str() + residue_suffix(v, params, o.reduce);
  }
  if (w == "compose") {
    const BigRat v = compose_coefficient(int_arg(o.a, "--a"), int_arg(o.b, "--b"), int_arg(o.k, "--k"), params);
    return v.get_str() + residue_suffix(v, params, o.reduce);
  }
  if (w == "transpose") {
    const BigInt v = transpose_coefficient(int_arg(o.k, "--k"), int_arg(o.i, "--i"), params);
    return v.get_str() + residue_suffix(BigRat(v), params, o.reduce);
  }
  if (w == "qfact") {
    const BigInt v = qfact(index_arg(o.k, "--k"), params);
    return v.get_str() + residue_suffix(BigRat(v), params, o.reduce);
  }
  if (w == "padic") {
    if (o.alpha.empty()) throw Usage("missing --alpha");
    BigRat alpha;
    if (alpha.set_str(o.alpha, 10) != 0) throw Usage("bad value for --alpha: " + o.alpha);
    alpha.canonicalize();
    const PRat v = padic_binom(PRat(alpha, o.p), int_arg(o.k, "--k"));
    return v.str() + residue_suffix(v.value(), params, o.reduce);
  }
  throw Usage("unknown coefficient '" + w + "'");
}

std::string join(const std::vector<BigInt>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) s += (j ? ", " : "") + v[j].get_str();
  return s;
}

std::string chart_check(const Options& o) {
  if (o.map.empty()) throw Usage("chart-check needs --map");
  const LatticeMap phi(parse_matrix(o.map));
  const RingParams params(o.p, 1, 0);
  const EtaleDecision d = is_log_etale_chart(phi, params.p());
  std::string out = std::string("log-etale: ") + (d.log_etale ? "true" : "false") + ", coker-order: " +
                    (d.coker_order ? d.coker_order->get_str() : "infinite");
  if (!d.kernel_trivial) out += ", kernel: nontrivial";
  return out;
}

std::string snf(const Options& o) {
  if (o.map.empty()) throw Usage("snf needs --map");
  const LatticeMap phi(parse_matrix(o.map));
  const SnfResult s = smith_normal_form(phi);
  const CokerInvariants c = coker_invariants(phi);
  return "divisors: [" + join(s.divisors) + "], coker: Z^" + std::to_string(c.free_rank) + " + [" +
         join(c.torsion) + "]";
}

std::vector<AlgElem> units_arg(Context& ctx, const std::string& src, std::size_t r) {
  std::vector<AlgElem> out;
  if (src.empty()) {
    out.assign(r, ctx.basis()->chart()->one());
    return out;
  }
  std::stringstream ss(src);
  std::string part;
  while (std::getline(ss, part, ';')) out.push_back(ctx.element(part));
  if (out.size() != r) raise(Errc::ArityMismatch, "expected " + std::to_string(r) + " units");
  return out;
}

std::string dispatch(const std::string& cmd, const Options& o) {
  if (cmd == "coeff") return coeff(o);
  if (cmd == "chart-check") return chart_check(o);
  if (cmd == "snf") return snf(o);

  Context ctx(o);
  if (cmd == "mul") {
    need_args(o, 2, "mul P Q");
    DiffOp r = mul(ctx.op(o.args[0]), ctx.op(o.args[1]));
    ctx.keep(r);
    return r.str();
  }
  if (cmd == "act") {
    need_args(o, 2, "act P f");
    AlgElem r = act(ctx.op(o.args[0]), ctx.element(o.args[1]));
    ctx.keep(r);
    return r.str();
  }
  if (cmd == "transpose") {
    need_args(o, 1, "transpose P");
    DiffOp r = transpose(ctx.op(o.args[0]));
    ctx.keep(r);
    return r.str();
  }
  if (cmd == "omega-act") {
    need_args(o, 2, "omega-act w P");
    OmegaElement r = omega_act(ctx.omega(o.args[0]), ctx.op(o.args[1]));
    ctx.keep(r);
    return r.str();
  }
  if (cmd == "taylor") {
    need_args(o, 1, "taylor f");
    if (o.order < 0) throw Usage("--order must be non-negative");
    PPartsElem r = taylor(ctx.basis()->chart(), ctx.element(o.args[0]), o.order);
    ctx.keep(r);
    return r.str();
  }
  if (cmd == "levelmap") {
    need_args(o, 1, "levelmap P");
    return level_incl(ctx.op(o.args[0]), o.target_level).str();
  }
  if (cmd == "rebase") {
    need_args(o, 1, "rebase P");
    const std::size_t r = ctx.basis()->rank();
    const IntMatrix m = o.matrix.empty() ? IntMatrix::identity(r) : parse_matrix(o.matrix);
    return rebase(ctx.op(o.args[0]), m, units_arg(ctx, o.units, r)).str();
  }
  throw Usage("unknown command '" + cmd + "'");
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& args) {
  Options o;
  CLI::App app{"Logarithmic differential operators of level m over Z/p^n", "logdiff"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--p", o.p, "prime")->check(CLI::Range(std::int64_t{2}, (std::int64_t{1} << 31) - 1));
  app.add_option("--nilpotency", o.nilpotency, "coefficients in Z/p^nilpotency");
  app.add_option("--level,--m", o.level, "divided-power level m");
  app.add_option("--rank", o.rank, "rank of the identity chart");
  app.add_flag("--group", o.group, "use the group algebra (negative exponents)");
  app.add_option("--chart", o.chart_path, "chart JSON file");
  app.add_option("--map", o.map, "chart map as [[row],...]");
  app.add_option("--session", o.session_path, "session JSON file");
  app.add_option("--bind", o.bind_name, "store the result under this name in the session");
  app.add_flag("--json", o.json, "JSON output");

  auto sub = [&](const char* name, const char* help, const char* args) {
    CLI::App* s = app.add_subcommand(name, help);
    if (args) s->add_option(args, o.args, "operands")->expected(0, -1);
    return s;
  };
  sub("mul", "product P Q", "operands");
  sub("act", "action P(f)", "operands");
  sub("transpose", "logarithmic transpose", "operands");
  sub("omega-act", "right action of P on w", "operands");
  sub("taylor", "Taylor development of f", "operands")->add_option("--order", o.order, "truncation order");
  sub("levelmap", "level inclusion", "operands")->add_option("--to", o.target_level, "target level");
  CLI::App* rb = sub("rebase", "change of log basis", "operands");
  rb->add_option("--matrix", o.matrix, "exponent matrix");
  rb->add_option("--units", o.units, "units separated by ';'");
  CLI::App* cf = sub("coeff", "combinatorial coefficients", nullptr);
  cf->add_option("which", o.which, "brace|angle|compose|transpose|qfact|padic")->required();
  cf->add_option("--k", o.k);
  cf->add_option("--i", o.i);
  cf->add_option("--a", o.a);
  cf->add_option("--b", o.b);
  cf->add_option("--alpha", o.alpha);
  cf->add_flag("--reduce", o.reduce, "also print the residue");
  sub("chart-check", "log-etale criterion for --map", nullptr);
  sub("snf", "Smith normal form of --map", nullptr);
  sub("selftest", "invariant suites", nullptr)->add_flag("--quick", o.quick);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  CommandResult res;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    res.out = app.help();
    return res;
  } catch (const CLI::ParseError& e) {
    res.exit_code = 2;
    res.err = std::string("usage error: ") + e.what() + "\n";
    return res;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  if (cmd == "selftest") {
    std::uint64_t seed = 20261016;
    if (const char* s = std::getenv("LOGDIFF_SEED")) seed = std::strtoull(s, nullptr, 10);
    const SelftestSummary r = run_selftest(seed, o.quick);
    res.exit_code = r.failed > 0 ? 1 : 0;
    res.out = o.json ? nlohmann::json{{"command", cmd}, {"passed", r.passed}, {"failed", r.failed}, {"report", r.report}}.dump() + "\n"
                     : r.report + "\n";
    return res;
  }

  try {
    const std::string out = dispatch(cmd, o);
    res.out = o.json ? nlohmann::json{{"command", cmd}, {"result", out}}.dump() + "\n" : out + "\n";
  } catch (const Usage& e) {
    res.exit_code = 2;
    res.err = std::string("usage error: ") + e.what() + "\n";
  } catch (const Error& e) {
    res.exit_code = 1;
    if (o.json) {
      res.out = nlohmann::json{{"command", cmd}, {"error", {{"code", std::string(code_name(e.code()))}, {"message", e.what()}}}}
                    .dump() +
                "\n";
    }
    res.err = std::string("error: ") + e.what() + "\n";
  }
  return res;
}

// ---------------------------------------------------------------------------
// selftest

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
  }

  AlgElem element(const Chart& c, int terms) {
    AlgElem f = c.zero();
    for (int t = 0; t < terms; ++t) {
      Exponent v(c.ambient_rank());
      for (auto& e : v) e = uniform(c.group_mode() ? -3 : 0, 3);
      if (c.contains(v)) f.add_term(v, uniform(1, c.modulus() - 1 + (c.modulus() == 1)));
    }
    return f;
  }

  DiffOp op(const BasisPtr& b, int max_order) {
    DiffOp p(b);
    for (int t = uniform(1, 3); t > 0; --t) {
      MultiIndex k(b->rank());
      int budget = static_cast<int>(uniform(0, max_order));
      for (std::size_t l = 0; l < b->rank(); ++l) {
        k[l] = l + 1 == b->rank() ? budget : static_cast<int>(uniform(0, budget));
        budget -= k[l];
      }
      p.add_term(k, element(*b->chart(), static_cast<int>(uniform(1, 2))));
    }
    return p;
  }

 private:
  std::mt19937_64 eng_;
};

struct Suite {
  std::string name;
  std::function<bool(Rng&, int)> run;
};

std::vector<BasisPtr> configs(bool group) {
  std::vector<BasisPtr> out;
  for (std::int64_t p : {2, 3, 5})
    for (int m : {0, 1, 2})
      out.push_back(LogBasis::canonical(Chart::identity(RingParams(p, 2, m), 1 + (p + m) % 2, group)));
  return out;
}

std::vector<Suite> suites() {
  return {
      {"ring-laws",
       [](Rng& g, int n) {
         for (const BasisPtr& b : configs(false))
           for (int t = 0; t < n; ++t) {
             const DiffOp x = g.op(b, 3), y = g.op(b, 3), z = g.op(b, 2);
             if (!(mul(mul(x, y), z) == mul(x, mul(y, z)))) return false;
             if (!(mul(x, y + z) == mul(x, y) + mul(x, z))) return false;
           }
         return true;
       }},
      {"product-routes",
       [](Rng& g, int n) {
         for (const BasisPtr& b : configs(false))
           for (int t = 0; t < n; ++t) {
             const DiffOp x = g.op(b, 4), y = g.op(b, 4);
             if (!(mul(x, y) == mul_via_comult(x, y))) return false;
             const AlgElem f = g.element(*b->chart(), 2);
             if (!(act(mul(x, y), f) == act(x, act(y, f)))) return false;
           }
         return true;
       }},
      {"transpose",
       [](Rng& g, int n) {
         for (const BasisPtr& b : configs(false))
           for (int t = 0; t < n; ++t) {
             const DiffOp x = g.op(b, 3), y = g.op(b, 3);
             if (!(transpose(transpose(x)) == x)) return false;
             if (!(transpose(mul(x, y)) == mul(transpose(y), transpose(x)))) return false;
           }
         return true;
       }},
      {"level-maps",
       [](Rng& g, int n) {
         for (const BasisPtr& b : configs(false)) {
           if (b->params().level() > 1) continue;
           const int to = b->params().level() + 1;
           for (int t = 0; t < n; ++t) {
             const DiffOp x = g.op(b, 3), y = g.op(b, 3);
             if (!(level_incl(mul(x, y), to) == mul(level_incl(x, to), level_incl(y, to)))) return false;
             if (!(level_incl(transpose(x), to) == transpose(level_incl(x, to)))) return false;
           }
         }
         return true;
       }},
      {"flat-dictionary",
       [](Rng& g, int n) {
         for (const BasisPtr& b : configs(true))
           for (int t = 0; t < n; ++t) {
             const DiffOp x = g.op(b, 3);
             if (!(from_flat(to_flat(x)) == x)) return false;
             if (!(transpose_via_flat(x) == transpose(x))) return false;
           }
         return true;
       }},
      {"cocycle",
       [](Rng& g, int) {
         for (const BasisPtr& b : configs(false)) {
           Exponent v(b->chart()->ambient_rank());
           for (auto& e : v) e = g.uniform(0, 3);
           const StratTable t = monomial_table(b->chart(), v, 4);
           for (int k = 0; k <= 4; ++k)
             if (!check_cocycle(t, k, 4 - k).ok) return false;
         }
         return true;
       }},
      {"integrality",
       [](Rng&, int n) {
         const int bound = n >= 10 ? 60 : 24;
         for (std::int64_t p : {2, 3, 5})
           for (int m = 0; m <= 3; ++m) {
             const RingParams params(p, 1, m);
             for (int k = 0; k <= bound; ++k)
               for (int i = 0; i <= k; ++i)
                 if (BigRat(brace_binom({k}, {i}, params)) * angle_binom_exact({k}, {i}, params) !=
                     BigRat(binomial(k, i)))
                   return false;
           }
         return true;
       }},
      {"text-round-trip",
       [](Rng& g, int n) {
         for (const BasisPtr& b : configs(true))
           for (int t = 0; t < n; ++t) {
             const DiffOp x = g.op(b, 4);
             if (!(parse_operator(x.str(), b) == x)) return false;
           }
         return true;
       }},
  };
}

}  // namespace

SelftestSummary run_selftest(std::uint64_t seed, bool quick) {
  SelftestSummary s;
  std::ostringstream os;
  Rng g(seed);
  const int n = quick ? 3 : 20;
  for (const Suite& suite : suites()) {
    bool ok = false;
    std::string note;
    try {
      ok = suite.run(g, n);
    } catch (const Error& e) {
      note = std::string(" (") + e.what() + ")";
    }
    (ok ? s.passed : s.failed) += 1;
    os << (ok ? "PASS " : "FAIL ") << suite.name << note << "\n";
  }
  os << "selftest: " << s.passed << " passed, " << s.failed << " failed (seed " << seed << ")";
  s.report = os.str();
  return s;
}

}  // namespace logdiff
