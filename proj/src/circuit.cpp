#include "entlab/circuit.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "entlab/error.hpp"

namespace entlab {

bool is_gate(Op op) noexcept {
  return op == Op::Not || op == Op::And || op == Op::Or || op == Op::Xor || op == Op::Maj;
}

namespace {

unsigned arity(Op op) {
  switch (op) {
    case Op::Not: return 1;
    case Op::And:
    case Op::Or:
    case Op::Xor: return 2;
    case Op::Maj: return 3;
    default: return 0;
  }
}

constexpr std::array<std::uint64_t, 6> kVarMasks = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

std::uint64_t row_mask(unsigned vars) {
  return vars >= 6 ? ~0ull : ((1ull << (1u << vars)) - 1);
}

void fill_variable(std::uint64_t* words, std::size_t count, unsigned position, std::uint64_t mask) {
  for (std::size_t w = 0; w < count; ++w) {
    if (position < 6) {
      words[w] = kVarMasks[position] & mask;
    } else {
      words[w] = ((w >> (position - 6)) & 1u) ? mask : 0;
    }
  }
}

}  // namespace

TruthTable::TruthTable(unsigned vars) : vars_(vars) {
  require(vars <= kMaxCircuitVars, ErrorKind::InvalidArgument, "truth table too wide");
  words_.assign(std::max<std::size_t>(1, rows() / 64), 0);
}

void TruthTable::set(std::size_t row, bool v) {
  const std::uint64_t bit = 1ull << (row & 63);
  if (v) {
    words_[row >> 6] |= bit;
  } else {
    words_[row >> 6] &= ~bit;
  }
}

std::size_t TruthTable::popcount() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

Circuit::Circuit(unsigned n, unsigned m, std::vector<Node> nodes, std::uint32_t output) : n_(n), m_(m) {
  require(n + m <= 62, ErrorKind::InvalidArgument, "circuit arity too large");
  require(output < nodes.size(), ErrorKind::RangeError, "output node out of range");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& node = nodes[i];
    if (node.op == Op::X) require(node.a < n, ErrorKind::RangeError, "x index out of range");
    if (node.op == Op::Z) require(node.a < m, ErrorKind::RangeError, "z index out of range");
    const unsigned k = arity(node.op);
    const std::uint32_t operands[3] = {node.a, node.b, node.c};
    for (unsigned o = 0; o < k; ++o) {
      require(operands[o] < i, ErrorKind::RangeError, "gate operand does not precede the gate (cycle)");
    }
  }
  std::vector<bool> live(nodes.size(), false);
  live[output] = true;
  for (std::size_t i = nodes.size(); i-- > 0;) {
    if (!live[i]) continue;
    const unsigned k = arity(nodes[i].op);
    if (k >= 1) live[nodes[i].a] = true;
    if (k >= 2) live[nodes[i].b] = true;
    if (k >= 3) live[nodes[i].c] = true;
  }
  std::vector<std::uint32_t> remap(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!live[i]) continue;
    Node node = nodes[i];
    const unsigned k = arity(node.op);
    if (k >= 1) node.a = remap[node.a];
    if (k >= 2) node.b = remap[node.b];
    if (k >= 3) node.c = remap[node.c];
    remap[i] = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(node);
    if (is_gate(node.op)) ++size_;
  }
  output_ = remap[output];
}

bool Circuit::eval(std::uint64_t x, std::uint64_t z) const {
  std::vector<std::uint8_t> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    switch (node.op) {
      case Op::X: v[i] = (x >> node.a) & 1u; break;
      case Op::Z: v[i] = (z >> node.a) & 1u; break;
      case Op::Const0: v[i] = 0; break;
      case Op::Const1: v[i] = 1; break;
      case Op::Not: v[i] = !v[node.a]; break;
      case Op::And: v[i] = v[node.a] & v[node.b]; break;
      case Op::Or: v[i] = v[node.a] | v[node.b]; break;
      case Op::Xor: v[i] = v[node.a] ^ v[node.b]; break;
      case Op::Maj: v[i] = (v[node.a] + v[node.b] + v[node.c]) >= 2; break;
    }
  }
  return v[output_] != 0;
}

TruthTable truth_table(const Circuit& c) {
  const unsigned vars = c.n() + c.m();
  TruthTable out(vars);
  const std::size_t words = out.words().size();
  const std::uint64_t mask = row_mask(vars);
  std::vector<std::uint64_t> val(c.nodes().size() * words);
  for (std::size_t i = 0; i < c.nodes().size(); ++i) {
    const Node& node = c.nodes()[i];
    std::uint64_t* dst = &val[i * words];
    const std::uint64_t* a = &val[node.a * words];
    const std::uint64_t* b = &val[node.b * words];
    const std::uint64_t* cc = &val[node.c * words];
    switch (node.op) {
      case Op::X: fill_variable(dst, words, c.m() + node.a, mask); break;
      case Op::Z: fill_variable(dst, words, node.a, mask); break;
      case Op::Const0: std::fill(dst, dst + words, 0); break;
      case Op::Const1: std::fill(dst, dst + words, mask); break;
      case Op::Not:
        for (std::size_t w = 0; w < words; ++w) dst[w] = ~a[w] & mask;
        break;
      case Op::And:
        for (std::size_t w = 0; w < words; ++w) dst[w] = a[w] & b[w];
        break;
      case Op::Or:
        for (std::size_t w = 0; w < words; ++w) dst[w] = a[w] | b[w];
        break;
      case Op::Xor:
        for (std::size_t w = 0; w < words; ++w) dst[w] = a[w] ^ b[w];
        break;
      case Op::Maj:
        for (std::size_t w = 0; w < words; ++w) dst[w] = (a[w] & b[w]) | (a[w] & cc[w]) | (b[w] & cc[w]);
        break;
    }
  }
  std::copy_n(&val[c.output() * words], words, out.words().begin());
  return out;
}

CircuitBuilder::CircuitBuilder(unsigned n, unsigned m, bool share) : n_(n), m_(m), share_(share) {}

std::uint32_t CircuitBuilder::add(Node node) {
  if (share_) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i] == node) return static_cast<std::uint32_t>(i);
    }
  }
  nodes_.push_back(node);
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t CircuitBuilder::x(unsigned i) {
  require(i < n_, ErrorKind::RangeError, "x index out of range");
  return add({Op::X, i, 0, 0});
}

std::uint32_t CircuitBuilder::z(unsigned j) {
  require(j < m_, ErrorKind::RangeError, "z index out of range");
  return add({Op::Z, j, 0, 0});
}

std::uint32_t CircuitBuilder::constant(bool v) { return add({v ? Op::Const1 : Op::Const0, 0, 0, 0}); }

std::uint32_t CircuitBuilder::not_(std::uint32_t a) {
  if (share_ && nodes_[a].op == Op::Const0) return constant(true);
  if (share_ && nodes_[a].op == Op::Const1) return constant(false);
  return add({Op::Not, a, 0, 0});
}

std::uint32_t CircuitBuilder::and_(std::uint32_t a, std::uint32_t b) {
  if (share_) {
    if (nodes_[a].op == Op::Const0 || nodes_[b].op == Op::Const0) return constant(false);
    if (nodes_[a].op == Op::Const1) return b;
    if (nodes_[b].op == Op::Const1) return a;
  }
  return add({Op::And, a, b, 0});
}

std::uint32_t CircuitBuilder::or_(std::uint32_t a, std::uint32_t b) {
  if (share_) {
    if (nodes_[a].op == Op::Const1 || nodes_[b].op == Op::Const1) return constant(true);
    if (nodes_[a].op == Op::Const0) return b;
    if (nodes_[b].op == Op::Const0) return a;
  }
  return add({Op::Or, a, b, 0});
}

std::uint32_t CircuitBuilder::xor_(std::uint32_t a, std::uint32_t b) { return add({Op::Xor, a, b, 0}); }

std::uint32_t CircuitBuilder::maj(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  return add({Op::Maj, a, b, c});
}

std::uint32_t CircuitBuilder::splice(const Circuit& c, const std::vector<std::uint32_t>& x_map,
                                     const std::vector<std::uint32_t>& z_map) {
  require(x_map.size() == c.n() && z_map.size() == c.m(), ErrorKind::DomainMismatch,
          "splice needs one target per circuit input");
  std::vector<std::uint32_t> remap(c.nodes().size());
  for (std::size_t i = 0; i < c.nodes().size(); ++i) {
    const Node& node = c.nodes()[i];
    switch (node.op) {
      case Op::X: remap[i] = x_map[node.a]; break;
      case Op::Z: remap[i] = z_map[node.a]; break;
      case Op::Const0:
      case Op::Const1: remap[i] = add({node.op, 0, 0, 0}); break;
      default: {
        Node copy = node;
        copy.a = remap[node.a];
        copy.b = arity(node.op) >= 2 ? remap[node.b] : 0;
        copy.c = arity(node.op) >= 3 ? remap[node.c] : 0;
        remap[i] = add(copy);
      }
    }
  }
  return remap[c.output()];
}

Circuit CircuitBuilder::build(std::uint32_t output) const { return Circuit(n_, m_, nodes_, output); }

namespace {

class Parser {
 public:
  Parser(std::string_view text, unsigned n, unsigned m) : text_(text), builder_(n, m, false), n_(n), m_(m) {}

  Circuit parse() {
    const std::uint32_t out = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return builder_.build(out);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::SyntaxError, what + " at position " + std::to_string(pos_) + " in '" +
                                            std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  unsigned number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an index");
    if (pos_ - start > 6) fail("index too long");
    return static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start))));
  }

  unsigned input_index() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '[') {
      ++pos_;
      const unsigned i = number();
      expect(']');
      return i;
    }
    return number();
  }

  // Hash-consing keyed by the canonical node so repeated subexpressions merge.
  std::uint32_t intern(Node node) {
    auto [it, inserted] = interned_.try_emplace(std::array<std::uint32_t, 4>{static_cast<std::uint32_t>(node.op),
                                                                           node.a, node.b, node.c},
                                                0);
    if (!inserted) return it->second;
    std::uint32_t id = 0;
    switch (node.op) {
      case Op::X: id = builder_.x(node.a); break;
      case Op::Z: id = builder_.z(node.a); break;
      case Op::Const0: id = builder_.constant(false); break;
      case Op::Const1: id = builder_.constant(true); break;
      case Op::Not: id = builder_.not_(node.a); break;
      case Op::And: id = builder_.and_(node.a, node.b); break;
      case Op::Or: id = builder_.or_(node.a, node.b); break;
      case Op::Xor: id = builder_.xor_(node.a, node.b); break;
      case Op::Maj: id = builder_.maj(node.a, node.b, node.c); break;
    }
    it->second = id;
    return id;
  }

  std::uint32_t expr() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '0' || c == '1') {
      ++pos_;
      return intern({c == '1' ? Op::Const1 : Op::Const0, 0, 0, 0});
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word == "x" || word == "z") {
      const std::size_t at = pos_;
      const unsigned i = input_index();
      const unsigned limit = word == "x" ? n_ : m_;
      if (i >= limit) {
        throw Error(ErrorKind::RangeError, std::string(word) + std::to_string(i) + " out of range (arity " +
                                               std::to_string(limit) + ") at position " + std::to_string(at));
      }
      return intern({word == "x" ? Op::X : Op::Z, i, 0, 0});
    }
    Op op;
    if (word == "not") {
      op = Op::Not;
    } else if (word == "and") {
      op = Op::And;
    } else if (word == "or") {
      op = Op::Or;
    } else if (word == "xor") {
      op = Op::Xor;
    } else if (word == "maj") {
      op = Op::Maj;
    } else {
      pos_ = start;
      fail(word.empty() ? "unexpected character" : "unknown operator '" + std::string(word) + "'");
    }
    expect('(');
    std::uint32_t args[3] = {0, 0, 0};
    const unsigned k = arity(op);
    for (unsigned i = 0; i < k; ++i) {
      if (i > 0) expect(',');
      args[i] = expr();
    }
    expect(')');
    return intern({op, args[0], args[1], args[2]});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  CircuitBuilder builder_;
  unsigned n_;
  unsigned m_;
  std::map<std::array<std::uint32_t, 4>, std::uint32_t> interned_;
};

void print_node(const Circuit& c, std::uint32_t id, std::string& out) {
  const Node& node = c.nodes()[id];
  switch (node.op) {
    case Op::X: out += "x" + std::to_string(node.a); return;
    case Op::Z: out += "z" + std::to_string(node.a); return;
    case Op::Const0: out += "0"; return;
    case Op::Const1: out += "1"; return;
    case Op::Not: out += "not("; break;
    case Op::And: out += "and("; break;
    case Op::Or: out += "or("; break;
    case Op::Xor: out += "xor("; break;
    case Op::Maj: out += "maj("; break;
  }
  print_node(c, node.a, out);
  if (arity(node.op) >= 2) {
    out += ",";
    print_node(c, node.b, out);
  }
  if (arity(node.op) >= 3) {
    out += ",";
    print_node(c, node.c, out);
  }
  out += ")";
}

}  // namespace

Circuit parse_circuit(std::string_view text, unsigned n, unsigned m) { return Parser(text, n, m).parse(); }

std::string print_circuit(const Circuit& c) {
  std::string out;
  print_node(c, c.output(), out);
  return out;
}

Circuit compose(const Circuit& outer, const std::vector<Circuit>& feeds) {
  require(feeds.size() == outer.n(), ErrorKind::DomainMismatch, "compose needs one feed per outer x input");
  require(!feeds.empty(), ErrorKind::InvalidArgument, "compose needs at least one feed");
  const unsigned n = feeds.front().n();
  const unsigned m = outer.m();
  CircuitBuilder b(n, m, false);
  std::vector<std::uint32_t> xs(n), zs(m);
  for (unsigned i = 0; i < n; ++i) xs[i] = b.x(i);
  for (unsigned j = 0; j < m; ++j) zs[j] = b.z(j);
  std::vector<std::uint32_t> outs;
  for (const auto& f : feeds) {
    require(f.n() == n && f.m() == m, ErrorKind::DomainMismatch, "feeds must share arity");
    outs.push_back(b.splice(f, xs, zs));
  }
  return b.build(b.splice(outer, outs, zs));
}

Circuit conjoin_copies(const Circuit& c, unsigned k) {
  require(k >= 1, ErrorKind::InvalidArgument, "need at least one copy");
  CircuitBuilder b(c.n() * k, c.m(), false);
  std::vector<std::uint32_t> zs(c.m());
  for (unsigned j = 0; j < c.m(); ++j) zs[j] = b.z(j);
  std::uint32_t acc = 0;
  for (unsigned copy = 0; copy < k; ++copy) {
    std::vector<std::uint32_t> xs(c.n());
    for (unsigned i = 0; i < c.n(); ++i) xs[i] = b.x(copy * c.n() + i);
    const std::uint32_t out = b.splice(c, xs, zs);
    acc = copy == 0 ? out : b.and_(acc, out);
  }
  return b.build(acc);
}

Circuit majority_circuit(unsigned r) {
  require(r >= 1, ErrorKind::InvalidArgument, "majority of zero inputs");
  const unsigned need = r / 2 + 1;
  CircuitBuilder b(r, 0, true);
  std::vector<std::uint32_t> at_least(need + 1, b.constant(false));
  at_least[0] = b.constant(true);
  for (unsigned i = 0; i < r; ++i) {
    const std::uint32_t bit = b.x(i);
    for (unsigned j = std::min(need, i + 1); j >= 1; --j) {
      at_least[j] = b.or_(at_least[j], b.and_(bit, at_least[j - 1]));
    }
  }
  return b.build(at_least[need]);
}

std::vector<Circuit> parse_dsl_lines(std::string_view text, unsigned n, unsigned m) {
  std::vector<Circuit> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back(parse_circuit(line, n, m));
    start = end + 1;
  }
  return out;
}

std::vector<Circuit> read_dsl_file(const std::filesystem::path& path, unsigned n, unsigned m) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dsl_lines(ss.str(), n, m);
}

namespace {

using Tab = std::array<std::uint64_t, 4>;

class Enumerator {
 public:
  explicit Enumerator(const EnumerateSpec& spec) : spec_(spec) {
    const unsigned vars = spec.n + spec.m;
    words_ = std::max<std::size_t>(1, (std::size_t{1} << vars) / 64);
    mask_ = row_mask(vars);
    push_base({Op::Const0, 0, 0, 0});
    push_base({Op::Const1, 0, 0, 0});
    for (unsigned i = 0; i < spec.n; ++i) push_base({Op::X, i, 0, 0});
    for (unsigned j = 0; j < spec.m; ++j) push_base({Op::Z, j, 0, 0});
    base_ = nodes_.size();
  }

  std::vector<Circuit> run() {
    for (std::size_t i = 0; i < base_; ++i) record(i);
    dfs(0);
    std::vector<std::pair<std::pair<std::size_t, Tab>, Circuit>> items;
    if (spec_.dedup) {
      for (auto& [tab, c] : best_) items.push_back({{c.size(), tab}, c});
    } else {
      for (auto& [key, c] : all_) items.push_back({{c.size(), key.second}, c});
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Circuit> out;
    out.reserve(items.size());
    for (auto& item : items) out.push_back(std::move(item.second));
    return out;
  }

 private:
  void push_base(Node node) {
    Tab t{};
    switch (node.op) {
      case Op::Const1: std::fill_n(t.begin(), words_, mask_); break;
      case Op::X: fill_variable(t.data(), words_, spec_.m + node.a, mask_); break;
      case Op::Z: fill_variable(t.data(), words_, node.a, mask_); break;
      default: break;
    }
    nodes_.push_back(node);
    tabs_.push_back(t);
  }

  Tab apply(const Node& node) const {
    Tab t{};
    const Tab& a = tabs_[node.a];
    const Tab& b = tabs_[node.b];
    const Tab& c = tabs_[node.c];
    for (std::size_t w = 0; w < words_; ++w) {
      switch (node.op) {
        case Op::Not: t[w] = ~a[w] & mask_; break;
        case Op::And: t[w] = a[w] & b[w]; break;
        case Op::Or: t[w] = a[w] | b[w]; break;
        case Op::Xor: t[w] = a[w] ^ b[w]; break;
        case Op::Maj: t[w] = (a[w] & b[w]) | (a[w] & c[w]) | (b[w] & c[w]); break;
        default: break;
      }
    }
    return t;
  }

  void record(std::size_t id) {
    Circuit c(spec_.n, spec_.m, nodes_, static_cast<std::uint32_t>(id));
    if (spec_.dedup) {
      auto it = best_.find(tabs_[id]);
      if (it == best_.end()) {
        best_.emplace(tabs_[id], std::move(c));
      } else if (c.size() < it->second.size()) {
        it->second = std::move(c);
      }
    } else {
      all_.try_emplace({print_circuit(c), tabs_[id]}, std::move(c));
    }
  }

  void try_gate(const Node& node, unsigned depth) {
    if (++expansions_ > spec_.budget) {
      throw Error(ErrorKind::BudgetExceeded, "circuit enumeration exceeded " + std::to_string(spec_.budget) +
                                                 " expansions");
    }
    const Tab t = apply(node);
    for (const auto& existing : tabs_) {
      if (existing == t) return;  // redundant gate; a smaller circuit already computes it
    }
    nodes_.push_back(node);
    tabs_.push_back(t);
    std::vector<Tab> key(tabs_.begin() + static_cast<std::ptrdiff_t>(base_), tabs_.end());
    std::sort(key.begin(), key.end());
    if (visited_.insert(std::move(key)).second) {
      record(nodes_.size() - 1);
      dfs(depth + 1);
    }
    nodes_.pop_back();
    tabs_.pop_back();
  }

  void dfs(unsigned depth) {
    if (depth >= spec_.max_size) return;
    const auto pool = static_cast<std::uint32_t>(nodes_.size());
    const GateSet& g = spec_.gates;
    for (std::uint32_t a = 0; a < pool; ++a) {
      if (g.not_) try_gate({Op::Not, a, 0, 0}, depth);
      for (std::uint32_t b = a + 1; b < pool; ++b) {
        if (g.and_) try_gate({Op::And, a, b, 0}, depth);
        if (g.or_) try_gate({Op::Or, a, b, 0}, depth);
        if (g.xor_) try_gate({Op::Xor, a, b, 0}, depth);
        if (g.maj) {
          for (std::uint32_t c = b + 1; c < pool; ++c) try_gate({Op::Maj, a, b, c}, depth);
        }
      }
    }
  }

  const EnumerateSpec& spec_;
  std::size_t words_ = 1;
  std::uint64_t mask_ = 0;
  std::size_t base_ = 0;
  std::vector<Node> nodes_;
  std::vector<Tab> tabs_;
  std::set<std::vector<Tab>> visited_;
  std::map<Tab, Circuit> best_;
  std::map<std::pair<std::string, Tab>, Circuit> all_;
  std::uint64_t expansions_ = 0;
};

}  // namespace

std::vector<Circuit> enumerate_circuits(const EnumerateSpec& spec) {
  require(spec.max_size <= kMaxEnumerateSize, ErrorKind::InvalidArgument,
          "enumeration guard: max size must be <= " + std::to_string(kMaxEnumerateSize));
  require(spec.n + spec.m <= kMaxEnumerateArity, ErrorKind::InvalidArgument,
          "enumeration guard: arity must be <= " + std::to_string(kMaxEnumerateArity));
  return Enumerator(spec).run();
}

}  // namespace entlab
