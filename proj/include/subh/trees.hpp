#pragma once

#include <cstddef>
#include <vector>

#include "subh/trig_system.hpp"

namespace subh {

// Which component of the solution a line feeds: the phase correction, the
// action correction, or the free parameter correction.
enum class Branch : int { Phase = 0, Action = 1, Param = 2 };

char branch_name(Branch h);

// One node of a decorated expansion tree together with its exit line.
// children are ordered; each child's exit line enters this node.
// Invariants:
//   momentum = nu0*p + sigma0*q + sum of child momenta
//   momentum != 0 when h == Phase, momentum == 0 when h == Param
//   delta == 2 only when h == Phase
//   Param nodes satisfy r3 >= 2 or r1 + r2 >= 1
struct Tree {
  Branch h = Branch::Phase;
  int delta = 1;
  int momentum = 0;
  int nu0 = 0;
  int sigma0 = 0;
  std::vector<Tree> children;
};

// Number of lines whose branch is not Param; this is the expansion order the
// tree contributes to.
int tree_order(const Tree& theta);

int node_count(const Tree& theta);

// Product of line propagators and node factors. Node factors carry the
// multinomial weights, so summing over ordered trees reproduces the power
// series coefficients without symmetry counting.
cplx tree_value(const Tree& theta, const JetTable& jets,
                const ResonanceContext& ctx, double t0);

// All trees of the given order whose root line has the given branch and
// momentum. Throws EnumerationTooLarge when k exceeds the cap.
std::vector<Tree> enumerate_trees(const TrigSystem& sys,
                                  const ResonanceContext& ctx, int k, Branch h,
                                  int nu, int cap = 3);

cplx tree_sum(const TrigSystem& sys, const ResonanceContext& ctx, double t0,
              int k, Branch h, int nu, int cap = 3);

// Distinct tree topologies with all labels and child order erased.
std::size_t count_shapes(const std::vector<Tree>& trees);

}  // namespace subh
