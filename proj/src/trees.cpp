#include "subh/trees.hpp"

#include <algorithm>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "subh/errors.hpp"
#include "subh/melnikov.hpp"

namespace subh {

namespace {

// The node draws its jet from F exactly when the exit line inverts the phase
// equation directly: a degree-1 phase line, or the zero mode of the action.
bool uses_forcing_f(Branch h, int delta, int momentum) {
    if (h == Branch::Phase) return delta == 1;
    if (h == Branch::Action) return momentum == 0;
    return false;
}

// Trees of one order and branch, grouped by root momentum.
using Bucket = std::map<int, std::vector<Tree>>;

class Enumerator {
public:
    Enumerator(const TrigSystem& sys, const ResonanceContext& ctx)
        : sys_(sys), ctx_(ctx) {}

    const Bucket& trees_of(Branch h, int k) {
        auto key = std::make_pair(int(h), k);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Bucket bucket;
        build(h, k, bucket);
        return memo_.emplace(key, std::move(bucket)).first->second;
    }

private:
    // All trees whose root line is (h, delta in the admissible set) of the
    // given order. The child order budget excludes the root line itself for
    // Param roots, which do not count toward the order.
    void build(Branch h, int k, Bucket& out) {
        if (k < 1) return;
        if (h == Branch::Phase) {
            grow(h, 1, true, k - 1, out);
            grow(h, 2, false, k - 1, out);
        } else if (h == Branch::Action) {
            grow(h, 1, true, k - 1, out);
            grow(h, 1, false, k - 1, out);
        } else {
            grow(h, 1, false, k, out);
        }
    }

    // Emit every tree with root line (h, delta) whose node uses the F table
    // (want_f) or the G table, with child orders summing to budget.
    void grow(Branch h, int delta, bool want_f, int budget, Bucket& out) {
        const auto& modes = want_f ? sys_.f_modes() : sys_.g_modes();
        for (const Mode& m : modes) {
            for (int r1 = 0; r1 <= budget; ++r1) {
                if (r1 > 0 && m.nu0 == 0) break;
                for (int r2 = 0; r1 + r2 <= budget && r2 <= m.poly.degA(); ++r2) {
                    for (int r3 = 0; r1 + r2 + r3 <= budget && r3 <= m.poly.degC(); ++r3) {
                        if (h == Branch::Param && r3 < 2 && r1 + r2 < 1) continue;
                        int slots = r1 + r2 + r3;
                        if (slots == 0) {
                            if (budget == 0) emit(h, delta, want_f, m, {}, out);
                            continue;
                        }
                        if (budget < slots) continue;
                        std::vector<Tree> acc;
                        std::vector<int> orders(std::size_t(slots), 0);
                        compose(h, delta, want_f, m, r1, r2, budget, orders, 0, acc, out);
                    }
                }
            }
        }
    }

    // Distribute the remaining order over child slots slot.. (each at least 1),
    // then take the product over per-slot tree sets.
    void compose(Branch h, int delta, bool want_f, const Mode& m, int r1, int r2,
                 int remaining, std::vector<int>& orders, std::size_t slot,
                 std::vector<Tree>& acc, Bucket& out) {
        int slots_left = int(orders.size() - slot);
        if (slots_left == 0) {
            if (remaining == 0) fill_slot(h, delta, want_f, m, r1, r2, orders, 0, acc, out);
            return;
        }
        for (int kc = 1; kc <= remaining - (slots_left - 1); ++kc) {
            orders[slot] = kc;
            compose(h, delta, want_f, m, r1, r2, remaining - kc, orders, slot + 1, acc, out);
        }
    }

    void fill_slot(Branch h, int delta, bool want_f, const Mode& m, int r1, int r2,
                   const std::vector<int>& orders, std::size_t slot,
                   std::vector<Tree>& acc, Bucket& out) {
        if (slot == orders.size()) {
            emit(h, delta, want_f, m, acc, out);
            return;
        }
        Branch hc = slot < std::size_t(r1)        ? Branch::Phase
                    : slot < std::size_t(r1 + r2) ? Branch::Action
                                                  : Branch::Param;
        for (const auto& [nu, trees] : trees_of(hc, orders[slot])) {
            (void)nu;
            for (const Tree& sub : trees) {
                acc.push_back(sub);
                fill_slot(h, delta, want_f, m, r1, r2, orders, slot + 1, acc, out);
                acc.pop_back();
            }
        }
    }

    // Momentum is fixed bottom-up; the root filter keeps only combinations
    // consistent with the branch and the node's jet table.
    void emit(Branch h, int delta, bool want_f, const Mode& m,
              const std::vector<Tree>& children, Bucket& out) {
        int nu = m.nu0 * ctx_.p + m.sigma0 * ctx_.q;
        for (const Tree& c : children) nu += c.momentum;
        if (h == Branch::Phase && nu == 0) return;
        if (h == Branch::Param && nu != 0) return;
        if (h == Branch::Action && (nu == 0) != want_f) return;
        Tree t;
        t.h = h;
        t.delta = delta;
        t.momentum = nu;
        t.nu0 = m.nu0;
        t.sigma0 = m.sigma0;
        t.children = children;
        out[nu].push_back(std::move(t));
    }

    const TrigSystem& sys_;
    const ResonanceContext& ctx_;
    std::map<std::pair<int, int>, Bucket> memo_;
};

const JetTable::ModeJets* find_jets(const std::vector<JetTable::ModeJets>& table,
                                    int nu0, int sigma0) {
    for (const auto& m : table)
        if (m.nu0 == nu0 && m.sigma0 == sigma0) return &m;
    return nullptr;
}

cplx value_rec(const Tree& t, const JetTable& jets, const ResonanceContext& ctx,
               double t0, double D) {
    int r1 = 0, r2 = 0, r3 = 0;
    cplx prod{1.0, 0.0};
    for (const Tree& c : t.children) {
        if (c.h == Branch::Phase) ++r1;
        else if (c.h == Branch::Action) ++r2;
        else ++r3;
        prod *= value_rec(c, jets, ctx, t0, D);
    }
    const auto& table = uses_forcing_f(t.h, t.delta, t.momentum) ? jets.F() : jets.G();
    const JetTable::ModeJets* m = find_jets(table, t.nu0, t.sigma0);
    cplx nf = m ? m->jet(r2, r3) : cplx{0.0, 0.0};
    nf *= std::polar(1.0, t.sigma0 * t0);
    cplx pw{1.0, 0.0};
    double fac = 1.0;
    for (int j = 1; j <= r1; ++j) {
        pw *= cplx{0.0, double(t.nu0)};
        fac *= double(j);
    }
    nf *= pw / fac;
    cplx prop;
    if (t.h == Branch::Param) {
        prop = cplx{-1.0 / D, 0.0};
    } else if (t.h == Branch::Action && t.momentum == 0) {
        prop = cplx{-1.0 / ctx.omega_prime, 0.0};
    } else {
        cplx den{0.0, ctx.omega_base * double(t.momentum)};
        prop = (t.delta == 2) ? ctx.omega_prime / (den * den) : cplx{1.0, 0.0} / den;
    }
    return prop * nf * prod;
}

void shape_key(const Tree& t, std::string& out) {
    std::vector<std::string> parts;
    parts.reserve(t.children.size());
    for (const Tree& c : t.children) {
        std::string s;
        shape_key(c, s);
        parts.push_back(std::move(s));
    }
    std::sort(parts.begin(), parts.end());
    out += '(';
    for (const std::string& s : parts) out += s;
    out += ')';
}

}  // namespace

char branch_name(Branch h) {
    switch (h) {
        case Branch::Phase: return 'a';
        case Branch::Action: return 'A';
        default: return 'C';
    }
}

int tree_order(const Tree& theta) {
    int k = theta.h == Branch::Param ? 0 : 1;
    for (const Tree& c : theta.children) k += tree_order(c);
    return k;
}

int node_count(const Tree& theta) {
    int n = 1;
    for (const Tree& c : theta.children) n += node_count(c);
    return n;
}

cplx tree_value(const Tree& theta, const JetTable& jets,
                const ResonanceContext& ctx, double t0) {
    double D = 0.0;
    for (const auto& m : jets.G())
        if (m.nu0 * ctx.p + m.sigma0 * ctx.q == 0)
            D += (m.jet(0, 1) * std::polar(1.0, m.sigma0 * t0)).real();
    return value_rec(theta, jets, ctx, t0, D);
}

std::vector<Tree> enumerate_trees(const TrigSystem& sys,
                                  const ResonanceContext& ctx, int k, Branch h,
                                  int nu, int cap) {
    if (k < 1) throw ConfigError("tree order must be at least 1");
    if (k > cap)
        throw EnumerationTooLarge("tree enumeration requested at order " +
                                  std::to_string(k) + " exceeds the cap " +
                                  std::to_string(cap));
    if (h == Branch::Phase && nu == 0) return {};
    if (h == Branch::Param && nu != 0) return {};
    Enumerator en(sys, ctx);
    const Bucket& bucket = en.trees_of(h, k);
    auto it = bucket.find(nu);
    if (it == bucket.end()) return {};
    return it->second;
}

cplx tree_sum(const TrigSystem& sys, const ResonanceContext& ctx, double t0,
              int k, Branch h, int nu, int cap) {
    std::vector<Tree> trees = enumerate_trees(sys, ctx, k, h, nu, cap);
    if (trees.empty()) return {0.0, 0.0};
    C0Result root = solve_C0(sys, ctx, t0);
    JetTable jets = jets_at(sys, ctx, root.C0, k);
    cplx sum{0.0, 0.0};
    for (const Tree& t : trees) sum += tree_value(t, jets, ctx, t0);
    return sum;
}

std::size_t count_shapes(const std::vector<Tree>& trees) {
    std::set<std::string> shapes;
    for (const Tree& t : trees) {
        std::string s;
        shape_key(t, s);
        shapes.insert(std::move(s));
    }
    return shapes.size();
}

}  // namespace subh
