#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mllg/logic.hpp"

namespace mllg {

enum class Mode { Mll, Mix };

struct StructureGraph {
  enum class Kind { Literal, Tensor, Par };
  // Literal occurrence k (1-based) is node k-1; connective nodes follow.
  // Formulas of the sequent hang from extra "joiner" ℘ nodes, chained leftwards.
  int literals = 0;
  std::vector<Kind> kind;
  std::vector<int> parent;  // -1 at the root
  std::vector<std::pair<int, int>> kids;
  std::vector<int> depth;
  std::vector<std::vector<int>> path;  // sequent path of each node; empty for joiners
  std::vector<char> joiner;
  std::vector<std::pair<int, int>> axioms;  // node ids (positive, negative)
  std::vector<int> pars;                    // ids of ℘ nodes (joiners included)
  int root = -1;

  int size() const { return static_cast<int>(kind.size()); }
  // u ... lca ... v; empty if u == v
  std::vector<int> tree_path(int u, int v) const;
  int lca(int u, int v) const;
};

StructureGraph build_structure(const Sequent& s, const Linking& l);

std::uint64_t switching_count(const StructureGraph& g);  // 2^#℘, saturating
// Switching given as one bit per entry of g.pars (bit set = keep the right argument).
struct SwitchingStats {
  bool acyclic = true;
  int components = 0;
};
SwitchingStats analyse_switching(const StructureGraph& g, std::uint64_t switching);
std::vector<int> components(const StructureGraph& g, std::uint64_t switching);  // label per node

int switching_bound();  // max #℘ for enumeration, 20
bool is_mll_net(const Sequent& s, const Linking& l);
bool is_mix_net(const Sequent& s, const Linking& l);
// Acyclicity by direct search for a switching cycle; no switching bound.
bool has_switching_cycle(const Sequent& s, const Linking& l);
// Connectedness of one switching; equals all switchings once acyclic.
bool first_switching_connected(const Sequent& s, const Linking& l);

struct BlockGraph {
  std::vector<std::vector<int>> blocks;  // occurrences per block
  std::vector<int> block_of;             // occurrence -> block (index 0 unused)
  std::vector<std::pair<int, int>> edges;
};
BlockGraph block_graph(const Sequent& s, const Linking& l);
bool mdnf_fast_check(const Sequent& s, const Linking& l, Mode mode);

// A switching cycle: links traversed in order, each oriented (from, to)
// by occurrence; between consecutive links the cycle walks the parse tree.
struct SwitchingCycle {
  std::vector<std::pair<int, int>> steps;
  std::vector<int> vertices;  // node ids of build_structure on the current sequent

  std::vector<std::pair<int, int>> links() const;  // (lower, higher) occurrence, sorted
  std::vector<int> key() const;                     // sorted endpoint occurrences
};

// Recomputes the traversed vertices; nullopt if the steps do not form a switching cycle.
std::optional<std::vector<int>> route_cycle(const StructureGraph& g, const std::vector<std::pair<int, int>>& steps);
std::optional<SwitchingCycle> find_minimal_cycle(const Sequent& s, const Linking& l);
// ℘ nodes visited by the cycle
int par_vertices(const StructureGraph& g, const SwitchingCycle& c);

std::string to_dot(const Sequent& s, const Linking& l);

}  // namespace mllg
