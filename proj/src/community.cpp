#include "narmine/community.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "narmine/csv.hpp"
#include "narmine/error.hpp"

namespace narmine::community {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGainEps = 1e-12;

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    // Lower representative wins.
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
    }
};

}  // namespace

int Partition::n_communities() const {
    int k = 0;
    for (int c : assignment) k = std::max(k, c + 1);
    return k;
}

std::vector<int> compact_labels(const std::vector<int>& assignment) {
    std::map<int, int> remap;
    std::vector<int> out;
    out.reserve(assignment.size());
    for (int c : assignment) {
        auto [it, inserted] = remap.emplace(c, static_cast<int>(remap.size()));
        (void)inserted;
        out.push_back(it->second);
    }
    return out;
}

std::vector<int> Dendrogram::cut(std::size_t level) const {
    if (level > merges.size()) throw Error("dendrogram level out of range");
    Dsu dsu(n_leaves);
    for (std::size_t i = 0; i < level; ++i) dsu.unite(merges[i].first, merges[i].second);
    std::vector<int> assignment(static_cast<std::size_t>(n_leaves));
    for (int v = 0; v < n_leaves; ++v) assignment[static_cast<std::size_t>(v)] = dsu.find(v);
    return compact_labels(assignment);
}

std::size_t Dendrogram::best_level() const {
    std::size_t best = 0;
    for (std::size_t l = 1; l < modularity_by_level.size(); ++l)
        if (modularity_by_level[l] > modularity_by_level[best]) best = l;
    return best;
}

double modularity(const graph::WeightedGraph& g, const std::vector<int>& assignment) {
    if (assignment.size() != static_cast<std::size_t>(g.n_nodes()))
        throw Error("assignment size does not match graph");
    const double m2 = 2.0 * g.total_weight();
    if (m2 <= 0.0) return 0.0;
    std::map<int, double> w_in, s_tot;
    for (const auto& e : g.edges()) {
        if (assignment[static_cast<std::size_t>(e.a)] ==
            assignment[static_cast<std::size_t>(e.b)])
            w_in[assignment[static_cast<std::size_t>(e.a)]] += e.weight;
    }
    for (int v = 0; v < g.n_nodes(); ++v)
        s_tot[assignment[static_cast<std::size_t>(v)]] += g.strength(v);
    double q = 0.0;
    for (const auto& [c, s] : s_tot) {
        double in = 0.0;
        if (auto it = w_in.find(c); it != w_in.end()) in = it->second;
        q += 2.0 * in / m2 - (s / m2) * (s / m2);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Walktrap

HierarchicalResult walktrap(const graph::WeightedGraph& g, int walk_length) {
    const int n = g.n_nodes();
    if (n == 0) throw Error("walktrap: empty graph");
    if (walk_length < 1) throw ConfigError("walk_length must be >= 1");

    // t-step transition probabilities, one row per node.
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int v = 0; v < n; ++v) {
        double s = g.strength(v);
        if (s <= 0.0) {
            p(v, v) = 1.0;  // isolated node stays put
            continue;
        }
        for (const auto& [u, w] : g.neighbors(v)) p(v, u) = w / s;
    }
    Eigen::MatrixXd pt = p;
    for (int step = 1; step < walk_length; ++step) pt = pt * p;

    // Column weights 1/d_k over nodes with edges.
    Eigen::VectorXd inv_d = Eigen::VectorXd::Zero(n);
    for (int v = 0; v < n; ++v)
        if (g.strength(v) > 0.0) inv_d(v) = 1.0 / g.strength(v);

    struct Comm {
        int size = 0;
        Eigen::VectorXd prob;  // mean t-step row over members
        std::set<int> adj;     // neighbor community representatives
    };
    std::map<int, Comm> comms;
    for (int v = 0; v < n; ++v) {
        Comm c;
        c.size = 1;
        c.prob = pt.row(v).transpose();
        comms.emplace(v, std::move(c));
    }
    for (const auto& e : g.edges()) {
        comms[e.a].adj.insert(e.b);
        comms[e.b].adj.insert(e.a);
    }

    Dendrogram dendro;
    dendro.n_leaves = n;
    std::vector<int> assignment(static_cast<std::size_t>(n));
    std::iota(assignment.begin(), assignment.end(), 0);
    dendro.modularity_by_level.push_back(modularity(g, assignment));

    Dsu dsu(n);
    auto delta_sigma = [&](const Comm& c1, const Comm& c2) {
        double r2 = ((c1.prob - c2.prob).array().square() * inv_d.array()).sum();
        double k = static_cast<double>(c1.size) * static_cast<double>(c2.size) /
                   static_cast<double>(c1.size + c2.size);
        return k * r2 / static_cast<double>(n);
    };

    while (true) {
        double best = kInf;
        int ba = -1, bb = -1;
        for (const auto& [rep, comm] : comms) {
            for (int other : comm.adj) {
                if (other <= rep) continue;
                double ds = delta_sigma(comm, comms.at(other));
                if (ds < best - 1e-15 ||
                    (std::fabs(ds - best) <= 1e-15 &&
                     (ba == -1 || rep < ba || (rep == ba && other < bb)))) {
                    best = ds;
                    ba = rep;
                    bb = other;
                }
            }
        }
        if (ba < 0) break;  // no adjacent communities left

        Comm merged;
        Comm& c1 = comms.at(ba);
        Comm& c2 = comms.at(bb);
        merged.size = c1.size + c2.size;
        merged.prob = (static_cast<double>(c1.size) * c1.prob +
                       static_cast<double>(c2.size) * c2.prob) /
                      static_cast<double>(merged.size);
        for (int x : c1.adj)
            if (x != bb) merged.adj.insert(x);
        for (int x : c2.adj)
            if (x != ba) merged.adj.insert(x);
        comms.erase(bb);
        comms.erase(ba);
        for (auto& [rep, comm] : comms) {
            (void)rep;
            std::size_t touched = comm.adj.erase(ba) + comm.adj.erase(bb);
            if (touched > 0) comm.adj.insert(ba);
        }
        for (int x : merged.adj) comms.at(x).adj.insert(ba);
        comms.emplace(ba, std::move(merged));

        dsu.unite(ba, bb);
        dendro.merges.emplace_back(ba, bb);
        for (int v = 0; v < n; ++v) assignment[static_cast<std::size_t>(v)] = dsu.find(v);
        dendro.modularity_by_level.push_back(modularity(g, assignment));
    }

    HierarchicalResult res;
    res.dendrogram = std::move(dendro);
    std::size_t level = res.dendrogram.best_level();
    res.partition.assignment = res.dendrogram.cut(level);
    res.partition.modularity = res.dendrogram.modularity_by_level[level];
    res.partition.algorithm = "walktrap";
    return res;
}

// ---------------------------------------------------------------------------
// Multilevel

namespace {

struct LevelGraph {
    int n = 0;
    std::vector<std::map<int, double>> adj;  // cross weights, no self entries
    std::vector<double> self;                // internal weight (each edge once)
    std::vector<double> strength;            // sum cross + 2 * self
    double m2 = 0.0;                         // sum of strengths
};

LevelGraph level_from_graph(const graph::WeightedGraph& g) {
    LevelGraph lg;
    lg.n = g.n_nodes();
    lg.adj.assign(static_cast<std::size_t>(lg.n), {});
    lg.self.assign(static_cast<std::size_t>(lg.n), 0.0);
    lg.strength.assign(static_cast<std::size_t>(lg.n), 0.0);
    for (const auto& e : g.edges()) {
        lg.adj[static_cast<std::size_t>(e.a)][e.b] += e.weight;
        lg.adj[static_cast<std::size_t>(e.b)][e.a] += e.weight;
    }
    for (int v = 0; v < lg.n; ++v) {
        lg.strength[static_cast<std::size_t>(v)] = g.strength(v);
        lg.m2 += g.strength(v);
    }
    return lg;
}

// One pass of local moves; returns community assignment over level nodes.
std::vector<int> local_moves(const LevelGraph& lg, bool* moved_any) {
    std::vector<int> comm(static_cast<std::size_t>(lg.n));
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> tot(lg.strength);  // per community total strength
    *moved_any = false;

    bool improved = true;
    while (improved) {
        improved = false;
        for (int v = 0; v < lg.n; ++v) {
            int old_c = comm[static_cast<std::size_t>(v)];
            double kv = lg.strength[static_cast<std::size_t>(v)];
            tot[static_cast<std::size_t>(old_c)] -= kv;

            // Links from v to each neighboring community.
            std::map<int, double> links;
            links[old_c] += 0.0;
            for (const auto& [u, w] : lg.adj[static_cast<std::size_t>(v)])
                links[comm[static_cast<std::size_t>(u)]] += w;

            auto gain = [&](int c) {
                double l = 0.0;
                if (auto it = links.find(c); it != links.end()) l = it->second;
                return l / lg.m2 * 2.0 -
                       2.0 * kv * tot[static_cast<std::size_t>(c)] / (lg.m2 * lg.m2);
            };

            // Staying wins ties; among strictly better targets the lowest
            // community id wins, so every accepted move raises modularity.
            int best_c = old_c;
            double best_gain = gain(old_c);
            for (const auto& [c, l] : links) {
                (void)l;
                if (c == old_c) continue;
                double gn = gain(c);
                if (gn > best_gain + kGainEps ||
                    (best_c != old_c && std::fabs(gn - best_gain) <= kGainEps && c < best_c)) {
                    best_c = c;
                    best_gain = gn;
                }
            }
            comm[static_cast<std::size_t>(v)] = best_c;
            tot[static_cast<std::size_t>(best_c)] += kv;
            if (best_c != old_c) {
                improved = true;
                *moved_any = true;
            }
        }
    }
    return comm;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& comm,
                     const std::vector<int>& new_id) {
    int k = 0;
    for (int c : new_id) k = std::max(k, c + 1);
    LevelGraph out;
    out.n = k;
    out.adj.assign(static_cast<std::size_t>(k), {});
    out.self.assign(static_cast<std::size_t>(k), 0.0);
    out.strength.assign(static_cast<std::size_t>(k), 0.0);
    out.m2 = lg.m2;
    for (int v = 0; v < lg.n; ++v) {
        int cv = new_id[static_cast<std::size_t>(comm[static_cast<std::size_t>(v)])];
        out.self[static_cast<std::size_t>(cv)] += lg.self[static_cast<std::size_t>(v)];
        out.strength[static_cast<std::size_t>(cv)] += lg.strength[static_cast<std::size_t>(v)];
        for (const auto& [u, w] : lg.adj[static_cast<std::size_t>(v)]) {
            if (u < v) continue;  // each level edge once
            int cu = new_id[static_cast<std::size_t>(comm[static_cast<std::size_t>(u)])];
            if (cu == cv)
                out.self[static_cast<std::size_t>(cv)] += w;
            else {
                out.adj[static_cast<std::size_t>(cv)][cu] += w;
                out.adj[static_cast<std::size_t>(cu)][cv] += w;
            }
        }
    }
    return out;
}

}  // namespace

Partition multilevel(const graph::WeightedGraph& g) {
    const int n = g.n_nodes();
    if (n == 0) throw Error("multilevel: empty graph");

    Partition p;
    p.algorithm = "multilevel";
    p.assignment.resize(static_cast<std::size_t>(n));
    std::iota(p.assignment.begin(), p.assignment.end(), 0);
    if (g.n_edges() == 0) {
        p.modularity = 0.0;
        return p;
    }

    LevelGraph lg = level_from_graph(g);
    std::vector<int> node_to_level(p.assignment);  // original node -> level node

    while (true) {
        bool moved = false;
        std::vector<int> comm = local_moves(lg, &moved);
        std::vector<int> new_id = compact_labels(comm);
        int k = 0;
        for (int c : new_id) k = std::max(k, c + 1);
        for (auto& a : node_to_level)
            a = new_id[static_cast<std::size_t>(comm[static_cast<std::size_t>(a)])];
        if (!moved || k == lg.n) break;
        lg = aggregate(lg, comm, new_id);
    }

    p.assignment = compact_labels(node_to_level);
    p.modularity = modularity(g, p.assignment);
    return p;
}

// ---------------------------------------------------------------------------
// Fast greedy

HierarchicalResult fastgreedy(const graph::WeightedGraph& g) {
    const int n = g.n_nodes();
    if (n == 0) throw Error("fastgreedy: empty graph");

    Dendrogram dendro;
    dendro.n_leaves = n;
    std::vector<int> assignment(static_cast<std::size_t>(n));
    std::iota(assignment.begin(), assignment.end(), 0);
    dendro.modularity_by_level.push_back(modularity(g, assignment));

    const double m2 = 2.0 * g.total_weight();
    if (g.n_edges() > 0) {
        std::vector<double> a(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) a[static_cast<std::size_t>(v)] = g.strength(v) / m2;

        // dq[i][j]: modularity gain of merging communities i and j.
        std::vector<std::map<int, double>> dq(static_cast<std::size_t>(n));
        for (const auto& e : g.edges()) {
            double gain = 2.0 * (e.weight / m2 -
                                 a[static_cast<std::size_t>(e.a)] *
                                     a[static_cast<std::size_t>(e.b)]);
            dq[static_cast<std::size_t>(e.a)][e.b] = gain;
            dq[static_cast<std::size_t>(e.b)][e.a] = gain;
        }

        Dsu dsu(n);
        double q = dendro.modularity_by_level[0];
        std::set<int> alive;
        for (int v = 0; v < n; ++v) alive.insert(v);

        while (true) {
            double best = -kInf;
            int bi = -1, bj = -1;
            for (int i : alive) {
                for (const auto& [j, gain] : dq[static_cast<std::size_t>(i)]) {
                    if (j <= i) continue;
                    if (gain > best + 1e-15 ||
                        (std::fabs(gain - best) <= 1e-15 &&
                         (bi == -1 || i < bi || (i == bi && j < bj)))) {
                        best = gain;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (bi < 0) break;

            // Merge bj into bi.
            auto& row_i = dq[static_cast<std::size_t>(bi)];
            auto& row_j = dq[static_cast<std::size_t>(bj)];
            for (const auto& [k, gain_jk] : row_j) {
                if (k == bi) continue;
                auto it = row_i.find(k);
                double updated;
                if (it != row_i.end())
                    updated = it->second + gain_jk;  // k connected to both
                else
                    updated = gain_jk - 2.0 * a[static_cast<std::size_t>(bi)] *
                                            a[static_cast<std::size_t>(k)];
                row_i[k] = updated;
                dq[static_cast<std::size_t>(k)][bi] = updated;
                dq[static_cast<std::size_t>(k)].erase(bj);
            }
            for (auto& [k, gain_ik] : row_i) {
                if (dq[static_cast<std::size_t>(bj)].count(k)) continue;
                if (k == bj) continue;
                double updated = gain_ik - 2.0 * a[static_cast<std::size_t>(bj)] *
                                               a[static_cast<std::size_t>(k)];
                row_i[k] = updated;
                dq[static_cast<std::size_t>(k)][bi] = updated;
            }
            row_i.erase(bj);
            dq[static_cast<std::size_t>(bj)].clear();
            a[static_cast<std::size_t>(bi)] += a[static_cast<std::size_t>(bj)];
            a[static_cast<std::size_t>(bj)] = 0.0;
            alive.erase(bj);

            dsu.unite(bi, bj);
            q += best;
            dendro.merges.emplace_back(bi, bj);
            dendro.modularity_by_level.push_back(q);
        }
    }

    HierarchicalResult res;
    res.dendrogram = std::move(dendro);
    std::size_t level = res.dendrogram.best_level();
    res.partition.assignment = res.dendrogram.cut(level);
    res.partition.modularity = res.dendrogram.modularity_by_level[level];
    res.partition.algorithm = "fastgreedy";
    return res;
}

// ---------------------------------------------------------------------------
// Concordance

namespace {

// Min-cost assignment over a rows x cols matrix, rows <= cols.
// Returns assigned column per row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    int n = static_cast<int>(cost.size());
    int m = static_cast<int>(cost[0].size());
    std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<double> v(static_cast<std::size_t>(m + 1), 0.0);
    std::vector<int> p(static_cast<std::size_t>(m + 1), 0);
    std::vector<int> way(static_cast<std::size_t>(m + 1), 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(m + 1), kInf);
        std::vector<bool> used(static_cast<std::size_t>(m + 1), false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            int i0 = p[static_cast<std::size_t>(j0)];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                double cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(
                                 j - 1)] -
                             u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> match(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j)
        if (p[static_cast<std::size_t>(j)] > 0)
            match[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return match;
}

}  // namespace

double concordance(const Partition& detected, const Partition& reference) {
    if (detected.assignment.size() != reference.assignment.size())
        throw Error("concordance: partitions cover different node sets");
    if (detected.assignment.empty()) throw Error("concordance: empty partitions");

    auto da = compact_labels(detected.assignment);
    auto ra = compact_labels(reference.assignment);
    int kd = 0, kr = 0;
    for (int c : da) kd = std::max(kd, c + 1);
    for (int c : ra) kr = std::max(kr, c + 1);

    std::vector<std::vector<double>> overlap(static_cast<std::size_t>(kd),
                                             std::vector<double>(static_cast<std::size_t>(kr),
                                                                 0.0));
    for (std::size_t i = 0; i < da.size(); ++i)
        overlap[static_cast<std::size_t>(da[i])][static_cast<std::size_t>(ra[i])] += 1.0;

    bool transposed = kd > kr;
    if (transposed) {
        std::vector<std::vector<double>> t(static_cast<std::size_t>(kr),
                                           std::vector<double>(static_cast<std::size_t>(kd)));
        for (int i = 0; i < kd; ++i)
            for (int j = 0; j < kr; ++j)
                t[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                    overlap[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        overlap.swap(t);
    }

    std::vector<std::vector<double>> cost(overlap.size(),
                                          std::vector<double>(overlap[0].size()));
    for (std::size_t i = 0; i < overlap.size(); ++i)
        for (std::size_t j = 0; j < overlap[i].size(); ++j) cost[i][j] = -overlap[i][j];
    auto match = hungarian(cost);

    double agreed = 0.0;
    for (std::size_t i = 0; i < match.size(); ++i)
        if (match[i] >= 0) agreed += overlap[i][static_cast<std::size_t>(match[i])];
    return agreed / static_cast<double>(da.size());
}

Partition partition_from_labels(const std::vector<std::string>& labels) {
    std::map<std::string, int> ids;
    for (const auto& l : labels) ids.emplace(l, 0);
    int next = 0;
    for (auto& [l, id] : ids) {
        (void)l;
        id = next++;
    }
    Partition p;
    p.algorithm = "reference";
    p.assignment.reserve(labels.size());
    for (const auto& l : labels) p.assignment.push_back(ids[l]);
    return p;
}

void save_partition(const std::vector<std::string>& node_ids, const Partition& p,
                    const std::vector<std::string>* reference_labels, std::ostream& out) {
    if (node_ids.size() != p.assignment.size())
        throw Error("partition size does not match node list");
    out << "term,community_id";
    if (reference_labels) out << ",reference_label";
    out << '\n';
    for (std::size_t i = 0; i < node_ids.size(); ++i) {
        out << csv::quote(node_ids[i]) << ',' << p.assignment[i];
        if (reference_labels) out << ',' << csv::quote((*reference_labels)[i]);
        out << '\n';
    }
}

void save_partition_file(const std::vector<std::string>& node_ids, const Partition& p,
                         const std::vector<std::string>* reference_labels,
                         const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write partition file: " + path);
    save_partition(node_ids, p, reference_labels, out);
}

}  // namespace narmine::community
