#include "blowup/jets.hpp"

#include <array>
#include <cmath>
#include <map>
#include <tuple>

namespace blowup {

namespace {

constexpr int kMaxOrder = 4;

// One term of d_{i_1}...d_{i_k} f: coef * (d_z^a d_q^b F) * prod over slots of
//   'e': delta(i_s, axis), 'x': xi_{i_s}, 'd': delta(i_s, i_partner)
struct Term {
    double coef;
    int a, b;
    std::vector<char> kind;
    std::vector<int> partner;
    auto key() const { return std::make_tuple(a, b, kind, partner); }
};

std::vector<Term> derivative_terms(int k) {
    std::vector<Term> terms{Term{1.0, 0, 0, {}, {}}};
    for (int s = 0; s < k; ++s) {
        std::map<std::tuple<int, int, std::vector<char>, std::vector<int>>, double> acc;
        auto add = [&acc](const Term& t) { acc[t.key()] += t.coef; };
        for (const Term& t : terms) {
            // d_i F(z, q) = delta(i, axis) F_z + 2 xi_i F_q
            Term te = t;
            te.kind.push_back('e');
            te.partner.push_back(-1);
            te.a += 1;
            add(te);
            Term tx = t;
            tx.kind.push_back('x');
            tx.partner.push_back(-1);
            tx.b += 1;
            tx.coef *= 2.0;
            add(tx);
            // d_i xi_j = delta(i, j)
            for (size_t u = 0; u < t.kind.size(); ++u) {
                if (t.kind[u] != 'x') continue;
                Term td = t;
                td.kind[u] = 'd';
                td.partner[u] = s;
                td.kind.push_back('d');
                td.partner.push_back(static_cast<int>(u));
                add(td);
            }
        }
        terms.clear();
        for (const auto& [key, c] : acc) {
            if (c == 0.0) continue;
            terms.push_back(Term{c, std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key)});
        }
    }
    return terms;
}

// A derivative along a fixed word is sum coef * z^pz * r^pr * parts[a][b].
struct Piece {
    double coef;
    int a, b, pz, pr;
};

struct WordEntry {
    std::vector<int> word;
    int distinct_others;
    std::vector<Piece> pieces;
};

void canonical_words(int k, std::vector<int>& cur, int next_other, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int letter = 0; letter <= next_other; ++letter) {
        cur.push_back(letter);
        canonical_words(k, cur, letter == next_other ? next_other + 1 : next_other, out);
        cur.pop_back();
    }
}

std::vector<Piece> pieces_for(const std::vector<Term>& terms, const std::vector<int>& w) {
    std::map<std::tuple<int, int, int, int>, double> acc;
    for (const Term& t : terms) {
        int pz = 0, pr = 0;
        bool zero = false;
        for (size_t s = 0; s < w.size() && !zero; ++s) {
            switch (t.kind[s]) {
                case 'e':
                    zero = w[s] != 0;
                    break;
                case 'x':
                    if (w[s] == 0)
                        ++pz;
                    else if (w[s] == 1)
                        ++pr;
                    else
                        zero = true;
                    break;
                default:
                    zero = w[s] != w[t.partner[s]];
            }
        }
        if (!zero) acc[{t.a, t.b, pz, pr}] += t.coef;
    }
    std::vector<Piece> out;
    for (const auto& [key, c] : acc)
        if (c != 0.0) out.push_back(Piece{c, std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key)});
    return out;
}

const std::vector<WordEntry>& word_table(int k) {
    static const std::array<std::vector<WordEntry>, kMaxOrder + 1> tables = [] {
        std::array<std::vector<WordEntry>, kMaxOrder + 1> t;
        for (int order = 0; order <= kMaxOrder; ++order) {
            const auto terms = derivative_terms(order);
            std::vector<std::vector<int>> words;
            std::vector<int> cur;
            canonical_words(order, cur, 2, words);
            for (const auto& w : words) {
                int others = 0;
                for (int l : w) others = std::max(others, l - 1);
                WordEntry e{w, others, pieces_for(terms, w)};
                if (!e.pieces.empty()) t[order].push_back(std::move(e));
            }
        }
        return t;
    }();
    if (k < 0 || k > kMaxOrder) throw DomainError("derivative order out of supported range");
    return tables[k];
}

double word_multiplicity(int d, int others) {
    double m = 1.0;
    for (int i = 0; i < others; ++i) m *= (d - 2 - i);
    return m;
}

Nodal evaluate_pieces(const Jet& f, const std::vector<Piece>& pieces) {
    const Grid& g = *f.grid;
    Nodal out = Nodal::Zero(g.nr(), g.nt());
    const Nodal z = g.rho() * g.mu().transpose();
    const Nodal r = g.rho() * g.sin_theta().transpose();
    for (const Piece& p : pieces) {
        if (p.a > f.order || p.b > f.order - p.a) throw DomainError("jet order too small for requested derivative");
        Nodal term = p.coef * f.at(p.a, p.b);
        for (int i = 0; i < p.pz; ++i) term = term.cwiseProduct(z);
        for (int i = 0; i < p.pr; ++i) term = term.cwiseProduct(r);
        out += term;
    }
    return out;
}

}  // namespace

Jet jet_of(const AxisPoly& f, const GridPtr& g, int order) {
    Jet j{g, order, {}};
    j.parts.resize(order + 1);
    AxisPoly za = f;
    for (int a = 0; a <= order; ++a) {
        AxisPoly zb = za;
        for (int b = 0; a + b <= order; ++b) {
            j.parts[a].push_back(zb.sample(g).values());
            zb = zb.dq();
        }
        za = za.dz();
    }
    return j;
}

Jet jet_of(const ScalarField& f, int order) {
    Jet j{f.grid(), order, {}};
    j.parts.resize(order + 1);
    ScalarField za = f;
    for (int a = 0; a <= order; ++a) {
        ScalarField zb = za;
        for (int b = 0; a + b <= order; ++b) {
            j.parts[a].push_back(zb.values());
            if (a + b < order) zb = q_partial(zb);
        }
        if (a < order) za = z_partial(za);
    }
    return j;
}

Nodal directional_derivative(const Jet& f, const std::vector<int>& word) {
    const auto terms = derivative_terms(static_cast<int>(word.size()));
    return evaluate_pieces(f, pieces_for(terms, word));
}

Nodal contract(const Jet& a, const Jet& b, int k) {
    const Grid& g = *a.grid;
    Nodal out = Nodal::Zero(g.nr(), g.nt());
    for (const WordEntry& e : word_table(k)) {
        const double m = word_multiplicity(g.d(), e.distinct_others);
        if (m == 0.0) continue;
        const Nodal da = evaluate_pieces(a, e.pieces);
        if (&a == &b) {
            out += m * da.cwiseAbs2();
        } else {
            out += m * da.cwiseProduct(evaluate_pieces(b, e.pieces));
        }
    }
    return out;
}

double sobolev_seminorm(const ScalarField& f, int k, ResolutionWarning* warn) {
    if (k < 0 || k > (f.grid()->d() + 1) / 2) throw DomainError("seminorm order exceeds (d+1)/2");
    if (warn) *warn = check_resolution(f);
    const Jet j = jet_of(f, k);
    return std::sqrt(std::max(0.0, f.grid()->integrate_ball(contract(j, j, k))));
}

double sobolev_seminorm(const AxisPoly& f, const GridPtr& g, int k) {
    if (k < 0 || k > (g->d() + 1) / 2) throw DomainError("seminorm order exceeds (d+1)/2");
    const Jet j = jet_of(f, g, k);
    return std::sqrt(std::max(0.0, g->integrate_ball(contract(j, j, k))));
}

}  // namespace blowup
