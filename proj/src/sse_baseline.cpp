#include "zdmtd/sse_baseline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "zdmtd/mdp_br.hpp"
#include "zdmtd/parallel.hpp"
#include "zdmtd/rng.hpp"

namespace zdmtd {

namespace {

std::string num(double v) {
  if (v == kLpInf) return "inf";
  if (v == -kLpInf) return "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string idx(const std::string& base, int a, int b, int c) {
  return base + "_" + std::to_string(a + 1) + "_" + std::to_string(b + 1) + "_" + std::to_string(c + 1);
}
std::string idx(const std::string& base, int a, int b) {
  return base + "_" + std::to_string(a + 1) + "_" + std::to_string(b + 1);
}

const char* rel_text(Relation r) {
  switch (r) {
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
    case Relation::eq: return "=";
  }
  return "=";
}

void write_terms(std::ostringstream& os, const std::vector<LinTerm>& lin) {
  for (const auto& t : lin) {
    os << (std::signbit(t.coef) ? " - " : " + ") << num(std::abs(t.coef)) << ' ' << t.var;
  }
}

}  // namespace

int MipModel::count_prefix(const std::string& prefix) const {
  std::set<std::string> seen;
  auto see = [&](const std::string& v) {
    if (v.rfind(prefix, 0) == 0) seen.insert(v);
  };
  for (const auto& t : objective) see(t.var);
  for (const auto& r : rows) {
    for (const auto& t : r.lin) see(t.var);
    for (const auto& q : r.quad) {
      see(q.a);
      see(q.b);
    }
  }
  for (const auto& b : bounds) see(b.var);
  for (const auto& b : binaries) see(b);
  return static_cast<int>(seen.size());
}

double big_m(const GameSpec& g) {
  double m = 0.0;
  for (int k = 0; k < g.K; ++k)
    m = std::max({m, std::abs(g.u_d_cov[k]), std::abs(g.u_d_unc[k]), std::abs(g.u_a_cov[k]),
                  std::abs(g.u_a_unc[k])});
  return 10.0 * (1.0 + m) * g.K * g.K;
}

MipModel build_mip(const GameSpec& g) {
  g.validate();
  const int K = g.K;
  const double Z = big_m(g);
  MipModel m;
  m.comments = {" Memory-one SSE program for a repeated security game",
                " K = " + std::to_string(K), " Z = " + num(Z),
                " pid_k_i_j = pi_d(k|i,j), pia_k_i_j = pi_a(k|i,j); i defender, j attacker previous actions"};
  m.sense = Sense::maximize;
  m.objective = {{1.0, "Vd"}};
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int a = 0; a < K; ++a) {
        // Families share the pi_d-weighted sums; only the player and the
        // big-M relaxation differ.
        for (int fam = 0; fam < 3; ++fam) {
          const bool def = fam == 2;
          MipRow r;
          r.name = std::string(fam == 0 ? "br_up" : fam == 1 ? "br_lo" : "val") + "_" + std::to_string(i + 1) + "_" +
                   std::to_string(j + 1) + "_" + std::to_string(a + 1);
          for (int d = 0; d < K; ++d) {
            const UtilityPair u = one_shot_utilities(g, d, a);
            r.lin.push_back({def ? u.u_d : u.u_a, idx("pid", d, i, j)});
          }
          r.lin.push_back({-1.0, def ? "Vd" : "Va"});
          r.lin.push_back({-1.0, idx(def ? "W" : "Q", i, j)});
          for (int d = 0; d < K; ++d) r.quad.push_back({1.0, idx("pid", d, i, j), idx(def ? "W" : "Q", d, a)});
          if (fam == 0) {
            r.rel = Relation::le;
            r.rhs = 0.0;
          } else {
            r.lin.push_back({-Z, idx("pia", a, i, j)});
            r.rel = Relation::ge;
            r.rhs = -Z;
          }
          m.rows.push_back(std::move(r));
        }
      }
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      MipRow sa{idx("simplex_a", i, j), {}, {}, Relation::eq, 1.0};
      MipRow sd{idx("simplex_d", i, j), {}, {}, Relation::eq, 1.0};
      for (int k = 0; k < K; ++k) {
        sa.lin.push_back({1.0, idx("pia", k, i, j)});
        sd.lin.push_back({1.0, idx("pid", k, i, j)});
      }
      m.rows.push_back(std::move(sa));
      m.rows.push_back(std::move(sd));
    }
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) m.bounds.push_back({idx("pid", k, i, j), false, 0.0, 1.0});
  m.bounds.push_back({"Vd", true});
  m.bounds.push_back({"Va", true});
  for (const char* base : {"Q", "W"})
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) m.bounds.push_back({idx(base, i, j), true});
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) m.binaries.push_back(idx("pia", k, i, j));
  return m;
}

std::string write_lp(const MipModel& m) {
  std::ostringstream os;
  for (const auto& c : m.comments) os << '\\' << c << '\n';
  os << (m.sense == Sense::maximize ? "Maximize" : "Minimize") << '\n';
  os << ' ' << m.objective_name << ':';
  write_terms(os, m.objective);
  os << '\n' << "Subject To" << '\n';
  for (const auto& r : m.rows) {
    os << ' ' << r.name << ':';
    write_terms(os, r.lin);
    if (!r.quad.empty()) {
      os << " + [";
      for (std::size_t q = 0; q < r.quad.size(); ++q) {
        const auto& t = r.quad[q];
        if (q == 0)
          os << (std::signbit(t.coef) ? " - " : " ");
        else
          os << (std::signbit(t.coef) ? " - " : " + ");
        os << num(std::abs(t.coef)) << ' ' << t.a << " * " << t.b;
      }
      os << " ]";
    }
    os << ' ' << rel_text(r.rel) << ' ' << num(r.rhs) << '\n';
  }
  os << "Bounds" << '\n';
  for (const auto& b : m.bounds) {
    if (b.free)
      os << ' ' << b.var << " free" << '\n';
    else
      os << ' ' << num(b.lo) << " <= " << b.var << " <= " << num(b.hi) << '\n';
  }
  os << "Binaries" << '\n';
  for (const auto& b : m.binaries) os << ' ' << b << '\n';
  os << "End" << '\n';
  return os.str();
}

namespace {

struct Tokenizer {
  std::vector<std::pair<std::string, int>> toks;  // (token, line)
  std::size_t pos = 0;

  const std::string& peek() const {
    static const std::string eof;
    return pos < toks.size() ? toks[pos].first : eof;
  }
  int line() const { return pos < toks.size() ? toks[pos].second : (toks.empty() ? 0 : toks.back().second); }
  std::string next() {
    if (pos >= toks.size()) fail("unexpected end of input");
    return toks[pos++].first;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("LP parse error at line " + std::to_string(line()) + ": " + what);
  }
  void expect(const std::string& t) {
    if (next() != t) {
      --pos;
      fail("expected '" + t + "', got '" + peek() + "'");
    }
  }
};

double parse_num(Tokenizer& tk, const std::string& t) {
  if (t == "inf" || t == "+inf") return kLpInf;
  if (t == "-inf") return -kLpInf;
  double v = 0.0;
  const char* b = t.data();
  const char* e = b + t.size();
  if (!t.empty() && t[0] == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) {
    --tk.pos;
    tk.fail("expected a number, got '" + t + "'");
  }
  return v;
}

bool is_rel(const std::string& t) { return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>"; }

Relation to_rel(const std::string& t) {
  if (t == "<=" || t == "=<") return Relation::le;
  if (t == ">=" || t == "=>") return Relation::ge;
  return Relation::eq;
}

// Reads "+ c name" / "- c name" terms until a relation, ']' or section end.
void read_linear(Tokenizer& tk, std::vector<LinTerm>& lin, std::vector<QuadTerm>* quad) {
  while (true) {
    const std::string& t = tk.peek();
    if (t.empty() || is_rel(t)) return;
    if (t == "Subject" || t == "Bounds") return;
    std::string sign = tk.next();
    if (sign != "+" && sign != "-") {
      --tk.pos;
      tk.fail("expected '+' or '-', got '" + sign + "'");
    }
    if (tk.peek() == "[") {
      if (!quad) tk.fail("quadratic terms are only supported in constraints");
      if (sign != "+") tk.fail("quadratic block must be added");
      tk.next();
      bool first = true;
      while (tk.peek() != "]") {
        double s = 1.0;
        if (!first || tk.peek() == "-" || tk.peek() == "+") {
          const std::string sg = tk.next();
          if (sg == "-")
            s = -1.0;
          else if (sg != "+")
            tk.fail("expected sign in quadratic block");
        }
        first = false;
        const double c = parse_num(tk, tk.next());
        const std::string a = tk.next();
        tk.expect("*");
        const std::string b = tk.next();
        quad->push_back({s * c, a, b});
      }
      tk.next();
      continue;
    }
    const double c = parse_num(tk, tk.next());
    lin.push_back({sign == "-" ? -c : c, tk.next()});
  }
}

}  // namespace

MipModel parse_lp(const std::string& text) {
  MipModel m;
  Tokenizer tk;
  {
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    bool in_header = true;
    while (std::getline(in, line)) {
      ++ln;
      if (!line.empty() && line[0] == '\\') {
        if (in_header) m.comments.push_back(line.substr(1));
        continue;
      }
      in_header = false;
      std::string cur;
      auto flush = [&] {
        if (!cur.empty()) tk.toks.emplace_back(cur, ln);
        cur.clear();
      };
      for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
          flush();
        } else if (c == '[' || c == ']' || c == '*') {
          flush();
          tk.toks.emplace_back(std::string(1, c), ln);
        } else if (c == ':' ) {
          cur += c;
          flush();
        } else {
          cur += c;
        }
      }
      flush();
    }
  }
  const std::string sense = tk.next();
  if (sense == "Maximize")
    m.sense = Sense::maximize;
  else if (sense == "Minimize")
    m.sense = Sense::minimize;
  else {
    tk.pos = 0;
    tk.fail("expected Maximize or Minimize");
  }
  std::string name = tk.next();
  if (name.size() < 2 || name.back() != ':') tk.fail("expected objective name");
  m.objective_name = name.substr(0, name.size() - 1);
  read_linear(tk, m.objective, nullptr);
  tk.expect("Subject");
  tk.expect("To");
  while (tk.peek() != "Bounds") {
    MipRow r;
    std::string rn = tk.next();
    if (rn.size() < 2 || rn.back() != ':') {
      --tk.pos;
      tk.fail("expected row name, got '" + rn + "'");
    }
    r.name = rn.substr(0, rn.size() - 1);
    read_linear(tk, r.lin, &r.quad);
    const std::string rel = tk.next();
    if (!is_rel(rel)) tk.fail("expected relation");
    r.rel = to_rel(rel);
    r.rhs = parse_num(tk, tk.next());
    m.rows.push_back(std::move(r));
  }
  tk.expect("Bounds");
  while (tk.peek() != "Binaries" && tk.peek() != "End") {
    const std::string first = tk.next();
    if (tk.peek() == "free") {
      tk.next();
      m.bounds.push_back({first, true});
      continue;
    }
    MipBound b;
    b.lo = parse_num(tk, first);
    tk.expect("<=");
    b.var = tk.next();
    tk.expect("<=");
    b.hi = parse_num(tk, tk.next());
    m.bounds.push_back(b);
  }
  if (tk.peek() == "Binaries") {
    tk.next();
    while (tk.peek() != "End") m.binaries.push_back(tk.next());
  }
  tk.expect("End");
  if (tk.pos != tk.toks.size()) tk.fail("trailing input after End");
  return m;
}

OneShotSse oneshot_sse(const GameSpec& g) {
  g.validate();
  const int K = g.K;
  OneShotSse best;
  for (int a = 0; a < K; ++a) {
    LinearProgram lp(K);
    lp.sense = Sense::maximize;
    lp.objective.assign(K, 0.0);
    lp.objective[a] = g.u_d_cov[a] - g.u_d_unc[a];
    lp.add(std::vector<double>(K, 1.0), Relation::eq, 1.0);
    // Attacker utility at a is at least that at every other target.
    for (int b = 0; b < K; ++b) {
      if (b == a) continue;
      std::vector<double> row(K, 0.0);
      row[a] += g.u_a_cov[a] - g.u_a_unc[a];
      row[b] -= g.u_a_cov[b] - g.u_a_unc[b];
      lp.add(row, Relation::ge, g.u_a_unc[b] - g.u_a_unc[a]);
    }
    const LpOutcome out = solve_lp(lp);
    if (out.status != LpStatus::optimal) continue;
    const double value = out.objective + g.u_d_unc[a];
    if (best.attacked < 0 || value > best.value + 1e-12) {
      best.attacked = a;
      best.value = value;
      best.x = out.x;
      for (double& v : best.x) v = std::max(v, 0.0);
      double s = 0.0;
      for (double v : best.x) s += v;
      for (double& v : best.x) v /= s;
    }
  }
  if (best.attacked < 0) throw std::logic_error("oneshot_sse: no attacked target admits a coverage");
  return best;
}

double sse_upper_bound(const GameSpec& g) {
  g.validate();
  return *std::max_element(g.u_d_cov.begin(), g.u_d_cov.end());
}

namespace {

double score(const GameSpec& g, const MemoryOneStrategy& s, std::optional<double> tie = std::nullopt) {
  return defender_utility_under_br(g, s, tie).first.u_d;
}

}  // namespace

SearchResult search_sse(const GameSpec& g, int budget, uint64_t seed, const std::vector<SseSeed>& seeds) {
  g.validate();
  if (budget < 0) throw std::invalid_argument("search_sse: budget must be >= 0");
  const int K = g.K, n = K * K;
  SearchResult best;
  std::vector<double> seed_vals(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i].strategy.K != K) throw std::invalid_argument("search_sse: seed strategy has wrong K");
    seed_vals[i] = score(g, seeds[i].strategy, seeds[i].tie);
    if (best.best_seed < 0 || seed_vals[i] > best.value) {
      best.best_seed = static_cast<int>(i);
      best.value = seed_vals[i];
      best.strategy = seeds[i].strategy;
    }
  }
  best.evaluations = static_cast<int>(seeds.size());
  if (budget == 0) {
    if (seeds.empty()) {
      best.strategy = MemoryOneStrategy::uniform(K);
      best.value = score(g, best.strategy);
      best.evaluations = 1;
    }
    return best;
  }

  // Restarts: one per seed plus one uniform start; steps split evenly.
  const int restarts = static_cast<int>(seeds.size()) + 1;
  std::vector<SearchResult> runs(restarts);
  parallel_for(restarts, [&](int r) {
    const int steps = budget / restarts + (r < budget % restarts ? 1 : 0);
    Rng rng(seed, static_cast<uint64_t>(r));
    MemoryOneStrategy cur = r < static_cast<int>(seeds.size()) ? seeds[r].strategy : MemoryOneStrategy::uniform(K);
    double cur_val = r < static_cast<int>(seeds.size()) ? seed_vals[r] : score(g, cur);
    int evals = r < static_cast<int>(seeds.size()) ? 0 : 1;
    SearchResult out{cur, cur_val, 0, r < static_cast<int>(seeds.size()) ? r : -1};
    for (int t = 0; t < steps; ++t) {
      const double frac = steps > 1 ? static_cast<double>(t) / (steps - 1) : 1.0;
      const double kappa = std::pow(100.0, frac);  // 1 -> 100
      MemoryOneStrategy cand = cur;
      const int s = static_cast<int>(rng.below(n));
      std::vector<double> conc(K);
      for (int k = 0; k < K; ++k) conc[k] = kappa * cur.rows(s, k) + 0.1;
      const auto row = rng.dirichlet(conc);
      for (int k = 0; k < K; ++k) cand.rows(s, k) = row[k];
      const double v = score(g, cand);
      ++evals;
      if (v > cur_val) {
        cur = std::move(cand);
        cur_val = v;
        if (v > out.value) {
          out.value = v;
          out.strategy = cur;
          out.best_seed = -1;
        }
      }
    }
    out.evaluations = evals;
    runs[r] = std::move(out);
  });
  bool have = !seeds.empty();
  for (int r = 0; r < restarts; ++r) {
    best.evaluations += runs[r].evaluations;
    if (!have || runs[r].value > best.value) {
      have = true;
      best.value = runs[r].value;
      best.strategy = runs[r].strategy;
      best.best_seed = runs[r].best_seed;
    }
  }
  return best;
}

SearchResult exhaustive_sse(const GameSpec& g) {
  g.validate();
  const int K = g.K;
  if (K > 3) throw std::invalid_argument("exhaustive_sse: K must be <= 3");
  const long long count = policy_count(K);
  std::vector<double> vals(count);
  auto decode = [K](long long c) { return decode_policy(c, K); };
  parallel_for(static_cast<int>(count),
               [&](int c) { vals[c] = score(g, MemoryOneStrategy::deterministic(K, decode(c))); });
  long long pick = 0;
  for (long long c = 1; c < count; ++c)
    if (vals[c] > vals[pick]) pick = c;
  return {MemoryOneStrategy::deterministic(K, decode(pick)), vals[pick], static_cast<int>(count), -1};
}

}  // namespace zdmtd
