#include "typecsp/finite_csp.hpp"

#include "typecsp/errors.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <numeric>
#include <random>

namespace typecsp {

FnEqPredicate::FnEqPredicate(std::vector<int> left_id, std::vector<int> right_id)
    : left_id_(std::move(left_id)), right_id_(std::move(right_id)) {
    for (int c : left_id_) id_count_ = std::max(id_count_, c + 1);
    for (int c : right_id_) id_count_ = std::max(id_count_, c + 1);
    left_class_.assign(id_count_, Bitset((int)left_id_.size()));
    right_class_.assign(id_count_, Bitset((int)right_id_.size()));
    for (int a = 0; a < (int)left_id_.size(); ++a) left_class_[left_id_[a]].set(a);
    for (int b = 0; b < (int)right_id_.size(); ++b) right_class_[right_id_[b]].set(b);
}

bool FnEqPredicate::supported(int a, const Bitset& dom_second) const {
    return right_class_[left_id_[a]].intersects(dom_second);
}

bool FnEqPredicate::supported_rev(int b, const Bitset& dom_first) const {
    return left_class_[right_id_[b]].intersects(dom_first);
}

void SolverInstance::validate() const {
    for (int x = 0; x < var_count(); ++x)
        if (domains[x].empty())
            throw ValidationError("variable " + std::to_string(x) + " has an empty domain");
    auto check_var = [&](int x, const std::string& where) {
        if (x < 0 || x >= var_count())
            throw ValidationError(where + " references variable " + std::to_string(x) +
                                  " outside [0," + std::to_string(var_count()) + ")");
    };
    for (const auto& c : unary) {
        check_var(c.var, "unary constraint");
        if (c.allowed.size() != domains[c.var].size())
            throw ValidationError("unary allowed-set size does not match the domain");
    }
    for (const auto& c : binary) {
        check_var(c.u, "binary constraint");
        check_var(c.v, "binary constraint");
        if (!!c.table == !!c.pred)
            throw ValidationError("binary constraint needs exactly one of table/pred");
        if (c.table && (c.table->rows() != domains[c.u].size() ||
                        c.table->cols() != domains[c.v].size()))
            throw ValidationError("binary table shape does not match the domains");
    }
    for (const auto& c : nary) {
        if (c.scope.empty()) throw ValidationError("n-ary constraint has empty scope");
        for (int x : c.scope) check_var(x, "n-ary constraint");
        for (const auto& t : c.tuples) {
            if (t.size() != c.scope.size())
                throw ValidationError("n-ary tuple length does not match the scope");
            for (std::size_t j = 0; j < t.size(); ++j)
                if (t[j] < 0 || t[j] >= domains[c.scope[j]].size())
                    throw ValidationError("n-ary tuple value outside the domain");
        }
    }
}

namespace {

// Engine state shared by AC and MAC. Arcs are (constraint, revised position):
// binary constraints contribute two arcs, n-ary ones one arc per position.
class Engine {
public:
    Engine(const SolverInstance& inst, SolveStats& stats) : stats_(stats) {
        doms_ = inst.domains;
        for (const auto& c : inst.unary) doms_[c.var] &= c.allowed;

        for (const auto& c : inst.binary) {
            if (c.u == c.v) {
                // a self-loop constrains the diagonal: fold it into the domain
                Bitset diag(doms_[c.u].size());
                for (int x = 0; x < diag.size(); ++x)
                    if (c.table ? c.table->at(x, x) : c.pred->holds(x, x)) diag.set(x);
                doms_[c.u] &= diag;
                continue;
            }
            BinC b;
            b.u = c.u;
            b.v = c.v;
            if (c.table) {
                b.fwd = c.table.get();
                transposed_.push_back(std::make_unique<BitMatrix>(transpose(*c.table)));
                b.rev = transposed_.back().get();
            } else {
                b.pred = c.pred.get();
            }
            bins_.push_back(b);
        }
        for (const auto& c : inst.nary) {
            NaryC n;
            n.scope = c.scope;
            // tuples violating repeated-scope equality can never be supports
            for (const auto& t : c.tuples) {
                bool ok = true;
                for (std::size_t a = 0; a < c.scope.size() && ok; ++a)
                    for (std::size_t b = a + 1; b < c.scope.size() && ok; ++b)
                        if (c.scope[a] == c.scope[b] && t[a] != t[b]) ok = false;
                if (ok) n.tuples.push_back(t);
            }
            narys_.push_back(std::move(n));
        }

        // arc layout: binary arcs first (2 per constraint), then n-ary arcs
        arc_count_ = 2 * (int)bins_.size();
        nary_arc_base_.resize(narys_.size());
        for (std::size_t i = 0; i < narys_.size(); ++i) {
            nary_arc_base_[i] = arc_count_;
            arc_count_ += (int)narys_[i].scope.size();
        }
        in_queue_.assign(arc_count_, false);

        watchers_.assign(doms_.size(), {});
        for (std::size_t c = 0; c < bins_.size(); ++c) {
            watchers_[bins_[c].v].push_back(2 * (int)c);     // change of v revises u
            watchers_[bins_[c].u].push_back(2 * (int)c + 1); // change of u revises v
        }
        for (std::size_t c = 0; c < narys_.size(); ++c)
            for (std::size_t pos = 0; pos < narys_[c].scope.size(); ++pos)
                for (std::size_t other = 0; other < narys_[c].scope.size(); ++other)
                    if (other != pos)
                        watchers_[narys_[c].scope[other]].push_back(nary_arc_base_[c] + (int)pos);
        for (auto& w : watchers_) {
            std::sort(w.begin(), w.end());
            w.erase(std::unique(w.begin(), w.end()), w.end());
        }
    }

    std::vector<Bitset>& domains() { return doms_; }

    void enqueue_all() {
        for (int a = 0; a < arc_count_; ++a) push(a);
    }

    void enqueue_watchers(int var) {
        for (int a : watchers_[var]) push(a);
    }

    /// Runs the propagation queue to fixpoint. False on domain wipeout.
    bool propagate() {
        while (!queue_.empty()) {
            int arc = queue_.front();
            queue_.pop_front();
            in_queue_[arc] = false;
            if (!revise(arc)) {
                // leave the queue clean for the next propagate() call
                for (int a : queue_) in_queue_[a] = false;
                queue_.clear();
                return false;
            }
        }
        return true;
    }

    void mark() { trail_marks_.push_back(trail_.size()); }

    void undo() {
        std::size_t upto = trail_marks_.back();
        trail_marks_.pop_back();
        while (trail_.size() > upto) {
            doms_[trail_.back().first] = std::move(trail_.back().second);
            trail_.pop_back();
        }
    }

    void assign(int var, int value) {
        trail_.emplace_back(var, doms_[var]);
        doms_[var].clear();
        doms_[var].set(value);
        enqueue_watchers(var);
    }

private:
    struct BinC {
        int u = 0, v = 0;
        const BitMatrix* fwd = nullptr;
        const BitMatrix* rev = nullptr;
        const BinaryPredicate* pred = nullptr;
    };
    struct NaryC {
        std::vector<int> scope;
        std::vector<std::vector<int>> tuples;
    };

    static BitMatrix transpose(const BitMatrix& m) {
        BitMatrix t(m.cols(), m.rows());
        for (int r = 0; r < m.rows(); ++r)
            for (int c = m.row(r).first(); c >= 0; c = m.row(r).next(c)) t.set(c, r);
        return t;
    }

    void push(int arc) {
        if (!in_queue_[arc]) {
            in_queue_[arc] = true;
            queue_.push_back(arc);
        }
    }

    bool remove_unsupported(int var, const std::function<bool(int)>& has_support) {
        bool changed = false;
        Bitset& dom = doms_[var];
        Bitset saved = dom;
        for (int a = dom.first(); a >= 0; a = dom.next(a)) {
            if (!has_support(a)) {
                if (!changed) {
                    trail_.emplace_back(var, saved);
                    changed = true;
                }
                dom.reset(a);
            }
        }
        if (changed) {
            if (dom.empty()) return false;
            enqueue_watchers(var);
        }
        return true;
    }

    bool revise(int arc) {
        ++stats_.propagations;
        if (arc < 2 * (int)bins_.size()) {
            const BinC& c = bins_[arc / 2];
            if (arc % 2 == 0) {
                const Bitset& dv = doms_[c.v];
                return remove_unsupported(c.u, [&](int a) {
                    return c.fwd ? c.fwd->row(a).intersects(dv) : c.pred->supported(a, dv);
                });
            }
            const Bitset& du = doms_[c.u];
            return remove_unsupported(c.v, [&](int b) {
                return c.rev ? c.rev->row(b).intersects(du) : c.pred->supported_rev(b, du);
            });
        }
        // n-ary arc
        std::size_t ci = 0;
        while (ci + 1 < narys_.size() && nary_arc_base_[ci + 1] <= arc) ++ci;
        int pos = arc - nary_arc_base_[ci];
        const NaryC& c = narys_[ci];
        return remove_unsupported(c.scope[pos], [&](int a) {
            for (const auto& t : c.tuples) {
                if (t[pos] != a) continue;
                bool ok = true;
                for (std::size_t j = 0; j < c.scope.size(); ++j)
                    if (!doms_[c.scope[j]].test(t[j])) { ok = false; break; }
                if (ok) return true;
            }
            return false;
        });
    }

    SolveStats& stats_;
    std::vector<Bitset> doms_;
    std::vector<BinC> bins_;
    std::vector<NaryC> narys_;
    std::vector<std::unique_ptr<BitMatrix>> transposed_;
    std::vector<int> nary_arc_base_;
    std::vector<std::vector<int>> watchers_; // per variable, arcs to requeue on change
    int arc_count_ = 0;
    std::deque<int> queue_;
    std::vector<bool> in_queue_;
    std::vector<std::pair<int, Bitset>> trail_;
    std::vector<std::size_t> trail_marks_;
};

} // namespace

AcOutcome enforce_arc_consistency(const SolverInstance& inst) {
    inst.validate();
    SolveStats stats;
    Engine eng(inst, stats);
    AcOutcome out;
    for (const auto& d : eng.domains())
        if (d.empty()) { // a unary constraint may already wipe a domain
            out.consistent = false;
            out.domains = eng.domains();
            out.propagations = stats.propagations;
            return out;
        }
    eng.enqueue_all();
    out.consistent = eng.propagate();
    out.domains = eng.domains();
    out.propagations = stats.propagations;
    return out;
}

namespace {

class Search {
public:
    Search(const SolverInstance& inst, const SolverConfig& config, SolveResult& result)
        : config_(config), result_(result), eng_(inst, result.stats) {
        n_ = inst.var_count();
        priority_.resize(n_);
        std::iota(priority_.begin(), priority_.end(), 0);
        if (config.shuffle_ties) {
            std::mt19937_64 rng(config.seed);
            std::shuffle(priority_.begin(), priority_.end(), rng);
        }
        deadline_valid_ = config.time_limit_seconds.has_value();
        if (deadline_valid_)
            deadline_ = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(*config.time_limit_seconds));
    }

    SolveStatus run() {
        for (const auto& d : eng_.domains())
            if (d.empty()) return SolveStatus::Unsat;
        eng_.enqueue_all();
        if (!eng_.propagate()) return SolveStatus::Unsat;
        return descend();
    }

private:
    int select_variable() const {
        int best = -1, best_size = 0;
        for (int x = 0; x < n_; ++x) {
            int size = eng_.domains()[x].count();
            if (size <= 1) continue;
            if (best < 0) {
                best = x;
                best_size = size;
                if (config_.var_order == SolverConfig::VarOrder::Lexicographic) return best;
                continue;
            }
            if (size < best_size || (size == best_size && priority_[x] < priority_[best])) {
                best = x;
                best_size = size;
            }
        }
        return best;
    }

    SolveStatus descend() {
        int var = select_variable();
        if (var < 0) {
            result_.assignment.resize(n_);
            for (int x = 0; x < n_; ++x) result_.assignment[x] = eng_.domains()[x].first();
            return SolveStatus::Sat;
        }
        Bitset values = eng_.domains()[var];
        for (int a = values.first(); a >= 0; a = values.next(a)) {
            ++result_.stats.nodes;
            if (config_.node_limit && result_.stats.nodes > *config_.node_limit)
                return SolveStatus::NodeLimit;
            if (deadline_valid_ && (result_.stats.nodes & 63) == 0 &&
                std::chrono::steady_clock::now() > deadline_)
                return SolveStatus::TimeLimit;
            eng_.mark();
            eng_.assign(var, a);
            if (eng_.propagate()) {
                SolveStatus s = descend();
                if (s != SolveStatus::Unsat) return s; // Sat or a limit
            }
            eng_.undo();
        }
        return SolveStatus::Unsat;
    }

    const SolverConfig& config_;
    SolveResult& result_;
    mutable Engine eng_;
    int n_ = 0;
    std::vector<int> priority_;
    bool deadline_valid_ = false;
    std::chrono::steady_clock::time_point deadline_;
};

} // namespace

SolveResult solve(const SolverInstance& inst, const SolverConfig& config) {
    inst.validate();
    SolveResult result;
    Search search(inst, config, result);
    result.status = search.run();
    if (result.status != SolveStatus::Sat) result.assignment.clear();
    return result;
}

} // namespace typecsp
