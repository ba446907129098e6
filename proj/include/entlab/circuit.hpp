#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace entlab {

enum class Op : std::uint8_t { X, Z, Const0, Const1, Not, And, Or, Xor, Maj };

bool is_gate(Op op) noexcept;

struct Node {
  Op op = Op::Const0;
  std::uint32_t a = 0;  // input index for X/Z, first operand otherwise
  std::uint32_t b = 0;
  std::uint32_t c = 0;
  friend bool operator==(const Node&, const Node&) = default;
};

/// Truth table over 2^(n+m) assignments in x-major order: row (x << m) | z.
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(unsigned vars);

  unsigned vars() const noexcept { return vars_; }
  std::size_t rows() const noexcept { return std::size_t{1} << vars_; }
  bool get(std::size_t row) const { return (words_[row >> 6] >> (row & 63)) & 1u; }
  void set(std::size_t row, bool v);
  std::size_t popcount() const;
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  std::vector<std::uint64_t>& words() noexcept { return words_; }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;
  friend auto operator<=>(const TruthTable& a, const TruthTable& b) { return a.words_ <=> b.words_; }

 private:
  unsigned vars_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Single-output boolean circuit over x[0..n) and z[0..m). Nodes are stored in
/// topological order; unreachable nodes are pruned on construction. Inputs and
/// constants are free; size counts NOT/AND/OR/XOR/MAJ nodes.
class Circuit {
 public:
  Circuit(unsigned n, unsigned m, std::vector<Node> nodes, std::uint32_t output);

  unsigned n() const noexcept { return n_; }
  unsigned m() const noexcept { return m_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::uint32_t output() const noexcept { return output_; }
  std::size_t size() const noexcept { return size_; }

  bool eval(std::uint64_t x, std::uint64_t z) const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  unsigned n_ = 0;
  unsigned m_ = 0;
  std::vector<Node> nodes_;
  std::uint32_t output_ = 0;
  std::size_t size_ = 0;
};

inline constexpr unsigned kMaxCircuitVars = 20;

/// Incremental construction with optional hash-consing of identical nodes.
class CircuitBuilder {
 public:
  CircuitBuilder(unsigned n, unsigned m, bool share = true);

  std::uint32_t x(unsigned i);
  std::uint32_t z(unsigned j);
  std::uint32_t constant(bool v);
  std::uint32_t not_(std::uint32_t a);
  std::uint32_t and_(std::uint32_t a, std::uint32_t b);
  std::uint32_t or_(std::uint32_t a, std::uint32_t b);
  std::uint32_t xor_(std::uint32_t a, std::uint32_t b);
  std::uint32_t maj(std::uint32_t a, std::uint32_t b, std::uint32_t c);

  /// Copies every node of `c` with x[i] remapped to x_map[i] and z[j] to z_map[j].
  std::uint32_t splice(const Circuit& c, const std::vector<std::uint32_t>& x_map,
                       const std::vector<std::uint32_t>& z_map);

  Circuit build(std::uint32_t output) const;

 private:
  std::uint32_t add(Node node);

  unsigned n_;
  unsigned m_;
  bool share_;
  std::vector<Node> nodes_;
};

/// Grammar: expr := x<i> | x[i] | z<j> | z[j] | 0 | 1 | not(e) | and(e,e) |
/// or(e,e) | xor(e,e) | maj(e,e,e). Identical subexpressions are merged.
/// Throws Error(SyntaxError) with the offending position, or Error(RangeError).
Circuit parse_circuit(std::string_view text, unsigned n, unsigned m);

/// Canonical text; parse_circuit(print_circuit(c)) reproduces c.
std::string print_circuit(const Circuit& c);

TruthTable truth_table(const Circuit& c);

/// outer's x[i] wired to feeds[i]'s output; z shared. No cross-merging, so
/// size(result) = size(outer) + sum size(feeds).
Circuit compose(const Circuit& outer, const std::vector<Circuit>& feeds);

/// D_1 AND ... AND D_k over k disjoint copies of the x input (z shared):
/// arity k*n, size k*size(c) + (k - 1).
Circuit conjoin_copies(const Circuit& c, unsigned k);

/// [popcount(x) > r/2] over r inputs, built from a running at-least-j table.
Circuit majority_circuit(unsigned r);

/// Reads a .dsl file: one circuit per line, '#' starts a comment.
std::vector<Circuit> read_dsl_file(const std::filesystem::path& path, unsigned n, unsigned m);
std::vector<Circuit> parse_dsl_lines(std::string_view text, unsigned n, unsigned m);

struct GateSet {
  bool not_ = true;
  bool and_ = true;
  bool or_ = true;
  bool xor_ = true;
  bool maj = false;
};

struct EnumerateSpec {
  unsigned n = 1;
  unsigned m = 0;
  unsigned max_size = 1;
  GateSet gates;
  bool dedup = true;
  std::uint64_t budget = 20'000'000;  // DFS expansions before BudgetExceeded
};

inline constexpr unsigned kMaxEnumerateSize = 4;
inline constexpr unsigned kMaxEnumerateArity = 8;

/// Every circuit of size <= max_size (DAG gate count). With dedup, one
/// smallest witness per truth table. Order: by size, then by table.
std::vector<Circuit> enumerate_circuits(const EnumerateSpec& spec);

}  // namespace entlab
