#include "typecsp/algebra.hpp"

#include "typecsp/errors.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace typecsp {

int FiniteAlgebra::index_of(const std::string& name) const {
    for (int i = 0; i < (int)ops.size(); ++i)
        if (ops[i].name == name) return i;
    return -1;
}

void FiniteAlgebra::validate() const {
    if (d < 1) throw ValidationError("algebra needs a nonempty domain");
    std::set<std::string> seen;
    for (const auto& op : ops) {
        if (op.name.empty()) throw ValidationError("operation names must be nonempty");
        if (!seen.insert(op.name).second)
            throw ValidationError("duplicate operation name '" + op.name + "'");
        op.table.validate();
        if (op.table.domain_size != d)
            throw ValidationError("operation '" + op.name + "' is over the wrong domain");
    }
}

namespace {

// closes a carrier mask under every operation
std::uint32_t close_mask(const FiniteAlgebra& a, std::uint32_t seed) {
    std::uint32_t mask = seed;
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<int> members;
        for (int x = 0; x < a.d; ++x)
            if (mask & (1u << x)) members.push_back(x);
        for (const auto& op : a.ops) {
            int k = op.table.arity;
            std::vector<std::size_t> odo(k, 0);
            std::vector<int> args(k);
            while (true) {
                for (int i = 0; i < k; ++i) args[i] = members[odo[i]];
                int out = op.table.values[op.table.index_of(args)];
                if (!(mask & (1u << out))) {
                    mask |= 1u << out;
                    grew = true;
                }
                int i = k - 1;
                while (i >= 0 && odo[i] + 1 == members.size()) odo[i--] = 0;
                if (i < 0) break;
                ++odo[i];
            }
            if (grew) break; // member list is stale
        }
    }
    return mask;
}

std::vector<int> mask_to_carrier(std::uint32_t mask, int d) {
    std::vector<int> out;
    for (int x = 0; x < d; ++x)
        if (mask & (1u << x)) out.push_back(x);
    return out;
}

} // namespace

std::vector<std::vector<int>> subalgebras(const FiniteAlgebra& a) {
    a.validate();
    if (a.d > 12) throw GuardError("subalgebra enumeration supports d <= 12");
    std::set<std::uint32_t> closed;
    for (std::uint32_t seed = 1; seed < (1u << a.d); ++seed) closed.insert(close_mask(a, seed));
    std::vector<std::vector<int>> out;
    for (std::uint32_t mask : closed) out.push_back(mask_to_carrier(mask, a.d));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    return out;
}

namespace {

// Projection indices under which `op` acts on the two blocks of `side`;
// returns a bitmask over 1..k, zero when the partition is not respected.
std::uint32_t projection_candidates(const OperationTable& op, const std::vector<int>& carrier,
                                    const std::vector<int>& side) {
    int k = op.arity;
    std::uint32_t candidates = (k >= 32) ? ~0u : ((1u << k) - 1);
    std::vector<std::size_t> odo(k, 0);
    std::vector<int> args(k);
    while (candidates) {
        for (int i = 0; i < k; ++i) args[i] = carrier[odo[i]];
        int out = op.values[op.index_of(args)];
        auto pos = std::find(carrier.begin(), carrier.end(), out);
        if (pos == carrier.end()) return 0; // not closed; caller passes subalgebras only
        int out_side = side[pos - carrier.begin()];
        for (int l = 0; l < k; ++l)
            if ((candidates >> l) & 1)
                if (side[odo[l]] != out_side) candidates &= ~(1u << l);
        int i = k - 1;
        while (i >= 0 && odo[i] + 1 == carrier.size()) odo[i--] = 0;
        if (i < 0) break;
        ++odo[i];
    }
    return candidates;
}

void enumerate_quotients(const FiniteAlgebra& a, bool stop_at_first,
                         std::vector<TrivialQuotient>& out) {
    for (const auto& carrier : subalgebras(a)) {
        int n = (int)carrier.size();
        if (n < 2) continue;
        // 2-block partitions: the first element stays in block 0
        for (std::uint32_t rest = 1; rest < (1u << (n - 1)); ++rest) {
            std::vector<int> side(n, 0);
            for (int i = 1; i < n; ++i) side[i] = (rest >> (i - 1)) & 1;
            TrivialQuotient q{carrier, side, {}};
            bool ok = true;
            for (const auto& op : a.ops) {
                std::uint32_t cand = projection_candidates(op.table, carrier, side);
                if (!cand) { ok = false; break; }
                q.projection_index.push_back(std::countr_zero(cand) + 1);
            }
            if (ok) {
                out.push_back(std::move(q));
                if (stop_at_first) return;
            }
        }
    }
}

} // namespace

std::optional<TrivialQuotient> has_trivial_two_quotient(const FiniteAlgebra& a) {
    std::vector<TrivialQuotient> found;
    enumerate_quotients(a, true, found);
    if (found.empty()) return std::nullopt;
    return found.front();
}

std::vector<TrivialQuotient> trivial_two_quotients(const FiniteAlgebra& a) {
    std::vector<TrivialQuotient> found;
    enumerate_quotients(a, false, found);
    return found;
}

bool is_mashup(const OperationTable& omega, const OperationTable& g, const OperationTable& h,
               int ell, int r, int s) {
    if (omega.arity != g.arity || omega.arity != h.arity)
        throw ValidationError("mashup check needs three operations of one arity");
    if (omega.domain_size != g.domain_size || omega.domain_size != h.domain_size)
        throw ValidationError("mashup check needs operations over one domain");
    int k = omega.arity;
    if (ell < 1 || ell > k) throw ValidationError("mashup position outside [1,arity]");
    if (r == s) throw ValidationError("mashup elements must be distinct");
    std::vector<int> args(k, r);
    args[ell - 1] = s;
    if (omega.values[omega.index_of(args)] != g.values[g.index_of(args)]) return false;
    std::fill(args.begin(), args.end(), s);
    args[ell - 1] = r;
    return omega.values[omega.index_of(args)] == h.values[h.index_of(args)];
}

std::optional<MashupGap> mashup_premise_gap(const FiniteAlgebra& a, const std::string& g,
                                            const std::string& h, bool search_closure) {
    a.validate();
    if (a.d > 8) throw GuardError("mashup premise search supports d <= 8");
    int gi = a.index_of(g), hi = a.index_of(h);
    if (gi < 0 || hi < 0) throw ValidationError("mashup operations must be named in the algebra");
    const OperationTable& gt = a.ops[gi].table;
    const OperationTable& ht = a.ops[hi].table;
    if (gt.arity != ht.arity)
        throw ValidationError("mashup premise needs g and h of one arity");
    int k = gt.arity;

    std::vector<OperationTable> candidates;
    if (search_closure) {
        for (auto& t : clone_closure(a, k))
            if (t.arity == k) candidates.push_back(std::move(t));
    } else {
        for (const auto& op : a.ops)
            if (op.table.arity == k) candidates.push_back(op.table);
    }

    for (int ell = 1; ell <= k; ++ell)
        for (int r = 0; r < a.d; ++r)
            for (int s = 0; s < a.d; ++s) {
                if (r == s) continue;
                bool witnessed = false;
                for (const auto& w : candidates)
                    if (is_mashup(w, gt, ht, ell, r, s)) { witnessed = true; break; }
                if (!witnessed) return MashupGap{ell, r, s};
            }
    return std::nullopt;
}

MashupVerdict check_mashup_lemma(const FiniteAlgebra& a, const std::string& g,
                                 const std::string& h, bool search_closure) {
    MashupVerdict verdict;
    verdict.gap = mashup_premise_gap(a, g, h, search_closure);
    verdict.premise = !verdict.gap.has_value();

    int gi = a.index_of(g), hi = a.index_of(h);
    verdict.conclusion = true;
    for (const auto& q : trivial_two_quotients(a))
        if (q.projection_index[gi] != q.projection_index[hi]) {
            verdict.conclusion = false;
            break;
        }
    verdict.lemma_respected = !verdict.premise || verdict.conclusion;
    return verdict;
}

std::vector<OperationTable> clone_closure(const FiniteAlgebra& a, int max_arity) {
    a.validate();
    if (!((a.d == 2 && max_arity <= 3) || (a.d == 3 && max_arity <= 2)))
        throw GuardError("clone closure supports d = 2 with max_arity <= 3 "
                         "or d = 3 with max_arity <= 2");
    if (max_arity < 1) throw ValidationError("max_arity must be >= 1");

    std::vector<OperationTable> out;
    for (int j = 1; j <= max_arity; ++j) {
        // arity-j slice: close the projections under composition with the
        // fundamental operations (outer op fundamental, inner ops from the slice)
        std::set<std::vector<int>> tables;
        std::vector<std::vector<int>> worklist;
        std::size_t size = 1;
        for (int i = 0; i < j; ++i) size *= (std::size_t)a.d;
        for (int c = 1; c <= j; ++c) {
            auto p = OperationTable::projection(a.d, j, c);
            if (tables.insert(p.values).second) worklist.push_back(p.values);
        }
        while (!worklist.empty()) {
            // full recompute rounds keep the iteration order deterministic
            std::vector<std::vector<int>> fresh;
            std::vector<std::vector<int>> known(tables.begin(), tables.end());
            for (const auto& op : a.ops) {
                int k = op.table.arity;
                std::vector<std::size_t> odo(k, 0);
                std::vector<int> args(k);
                while (true) {
                    std::vector<int> composed(size);
                    for (std::size_t t = 0; t < size; ++t) {
                        for (int i = 0; i < k; ++i) args[i] = known[odo[i]][t];
                        composed[t] = op.table.values[op.table.index_of(args)];
                    }
                    if (tables.insert(composed).second) fresh.push_back(std::move(composed));
                    int i = k - 1;
                    while (i >= 0 && odo[i] + 1 == known.size()) odo[i--] = 0;
                    if (i < 0) break;
                    ++odo[i];
                }
            }
            worklist = std::move(fresh);
        }
        for (const auto& values : tables) out.push_back({a.d, j, values});
    }
    return out;
}

} // namespace typecsp
