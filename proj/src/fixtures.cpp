#include "fockforge/fixtures.hpp"

#include <cmath>
#include <random>

namespace fockforge {

using nlohmann::json;

namespace {

const double kPi = std::acos(-1.0);

cplx phase(double denom) { return std::polar(1.0, kPi / denom); }

} // namespace

std::string fixture_name(FixtureId id) {
    switch (id) {
    case FixtureId::ex_kq: return "ex_kq";
    case FixtureId::ex_pw: return "ex_pw";
    case FixtureId::ex_offdiag: return "ex_offdiag";
    case FixtureId::ex_anyon4: return "ex_anyon4";
    case FixtureId::ex_spatial: return "ex_spatial";
    }
    return "?";
}

FixtureId fixture_from(const std::string& name) {
    for (FixtureId id : all_fixtures())
        if (fixture_name(id) == name) return id;
    throw SpecError("unknown fixture '" + name + "'");
}

std::vector<FixtureId> all_fixtures() {
    return {FixtureId::ex_kq, FixtureId::ex_pw, FixtureId::ex_offdiag, FixtureId::ex_anyon4,
            FixtureId::ex_spatial};
}

FixtureParams default_params() {
    FixtureParams p;
    p.qa = {phase(3), phase(5), phase(7), phase(11)};
    // Pair (0,2) has |Q1| < 1 and lands in Z; the others are in Y.
    p.spatial_q1 = {{{0, 1}, phase(3)}, {{0, 2}, 0.5 * phase(7)}, {{1, 2}, phase(5)},
                    {{0, 3}, phase(13)}, {{1, 3}, 0.8 * phase(9)}, {{2, 3}, phase(7)}};
    p.spatial_q2 = {{{0, 1}, phase(5)}, {{0, 2}, phase(11)}, {{1, 2}, phase(7)},
                    {{0, 3}, phase(3)}, {{1, 3}, phase(5)}, {{2, 3}, phase(13)}};
    return p;
}

json params_to_json(FixtureId id, const FixtureParams& p) {
    json j;
    j["fixture"] = fixture_name(id);
    j["n_sites"] = p.n_sites;
    j["internal_dim"] = 2;
    j["n_max"] = p.n_max;
    j["tol"] = p.tol;
    j["rank_tol"] = p.rank_tol;
    switch (id) {
    case FixtureId::ex_kq:
    case FixtureId::ex_offdiag:
        j["k"] = p.k;
        j["q"] = complex_to_json(p.q);
        break;
    case FixtureId::ex_pw: j["mu"] = p.mu; break;
    case FixtureId::ex_anyon4:
        for (int i = 0; i < 4; ++i) j["q" + std::to_string(i + 1)] = complex_to_json(p.qa[i]);
        break;
    case FixtureId::ex_spatial: {
        json q1 = json::array(), q2 = json::array();
        for (const auto& [k, v] : p.spatial_q1)
            if (k.second < p.n_sites) q1.push_back({{"x", k.first}, {"y", k.second}, {"value", complex_to_json(v)}});
        for (const auto& [k, v] : p.spatial_q2)
            if (k.second < p.n_sites) q2.push_back({{"x", k.first}, {"y", k.second}, {"value", complex_to_json(v)}});
        j["Q1"] = q1;
        j["Q2"] = q2;
        break;
    }
    }
    return j;
}

CMatrix kq_display(double k, cplx q) {
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 0) = k;
    c(1, 2) = q;
    c(2, 1) = std::conj(q);
    c(3, 3) = k;
    return c;
}

CMatrix pw_display(double mu) {
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 0) = mu * mu;
    c(1, 2) = mu;
    c(2, 1) = mu;
    c(2, 2) = mu * mu - 1;
    c(3, 3) = mu * mu;
    return c;
}

CMatrix offdiag_display(double k, cplx q) {
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 3) = q;
    c(1, 1) = k;
    c(2, 2) = k;
    c(3, 0) = std::conj(q);
    return c;
}

CMatrix anyon_display(const std::array<cplx, 4>& qa) {
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 0) = qa[0];
    c(1, 2) = qa[2];
    c(2, 1) = qa[1];
    c(3, 3) = qa[3];
    return c;
}

CMatrix pw_tilde_display(double mu) {
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 0) = mu * mu;
    c(1, 2) = mu;
    c(2, 1) = mu;
    c(3, 0) = mu * mu - 1;
    c(3, 3) = mu * mu;
    return c;
}

CMatrix offdiag_tilde_display(double k, cplx q) {
    CMatrix c = CMatrix::Zero(4, 4);
    c(0, 3) = k;
    c(1, 1) = std::conj(q);
    c(2, 2) = q;
    c(3, 0) = k;
    return c;
}

MultiSpec fixture_spec(FixtureId id, const FixtureParams& p) {
    MultiSpec s;
    s.sites = {p.n_sites, 2};
    s.tol = p.rank_tol;
    switch (id) {
    case FixtureId::ex_kq:
        s.rule.kind = RuleKind::Constant;
        s.rule.c = kq_display(p.k, p.q).transpose();
        break;
    case FixtureId::ex_pw:
        s.rule.kind = RuleKind::Constant;
        s.rule.c = pw_display(p.mu).transpose();
        break;
    case FixtureId::ex_offdiag:
        s.rule.kind = RuleKind::Constant;
        s.rule.c = offdiag_display(p.k, p.q).transpose();
        break;
    case FixtureId::ex_anyon4:
        s.rule.kind = RuleKind::SignSplit;
        s.rule.c = anyon_display(p.qa).transpose();
        break;
    case FixtureId::ex_spatial:
        s.rule.kind = RuleKind::ScalarPair;
        for (const auto& [k, v] : p.spatial_q1)
            if (k.second < p.n_sites) s.rule.q1[k] = v;
        for (const auto& [k, v] : p.spatial_q2)
            if (k.second < p.n_sites) s.rule.q2[k] = v;
        break;
    }
    validate(s);
    return s;
}

LoadedSpec fixture_loaded(FixtureId id, const FixtureParams& p) {
    LoadedSpec l;
    l.mode = "multicomponent";
    l.multi = fixture_spec(id, p);
    l.h_dim = l.multi.sites.h_dim();
    l.n_max = p.n_max;
    l.tol = p.tol;
    l.rank_tol = p.rank_tol;
    l.name = fixture_name(id);
    return l;
}

namespace {

using CoefFn = std::function<cplx(int, int)>;

CoefFn constant(cplx c) {
    return [c](int, int) { return c; };
}

Atom at(char kind, int comp, int slot) { return Atom{kind, comp - 1, slot}; }

PrintedRelation simple(std::string label, std::string text, Atom l1, Atom l2, CoefFn c, Atom r1, Atom r2,
                       bool pairing) {
    PrintedRelation r;
    r.label = std::move(label);
    r.text = std::move(text);
    r.lhs.push_back({constant(1.0), l1, l2});
    r.rhs.push_back({std::move(c), r1, r2});
    r.pairing = pairing;
    return r;
}

std::string idx(int i) { return std::to_string(i); }

std::vector<PrintedRelation> kq_family(const MultiSpec&, double k, cplx q) {
    // Q(1,1) = Q(2,2) = k, Q(1,2) = conj q, Q(2,1) = q.
    auto Q = [k, q](int i, int j) -> cplx {
        if (i == j) return k;
        return i == 1 ? std::conj(q) : q;
    };
    std::vector<PrintedRelation> out;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            out.push_back(simple("mixed_" + idx(i) + idx(j),
                                 "a_" + idx(i) + "^-(phi)a_" + idx(j) + "^+(psi) = Q(" + idx(i) + "," + idx(j) +
                                     ") a_" + idx(j) + "^+(psi)a_" + idx(i) + "^-(phi)" +
                                     (i == j ? " + <phi,psi>" : ""),
                                 at('-', i, 0), at('+', j, 1), constant(Q(i, j)), at('+', j, 1), at('-', i, 0),
                                 i == j));
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            if (i == j) continue;
            out.push_back(simple("creation_" + idx(i) + idx(j),
                                 "a_" + idx(i) + "^+(phi)a_" + idx(j) + "^+(psi) = Q(" + idx(j) + "," + idx(i) +
                                     ") a_" + idx(j) + "^+(psi)a_" + idx(i) + "^+(phi)",
                                 at('+', i, 0), at('+', j, 1), constant(Q(j, i)), at('+', j, 1), at('+', i, 0),
                                 false));
            out.push_back(simple("annihilation_" + idx(i) + idx(j),
                                 "a_" + idx(i) + "^-(phi)a_" + idx(j) + "^-(psi) = Q(" + idx(j) + "," + idx(i) +
                                     ") a_" + idx(j) + "^-(psi)a_" + idx(i) + "^-(phi)",
                                 at('-', i, 0), at('-', j, 1), constant(Q(j, i)), at('-', j, 1), at('-', i, 0),
                                 false));
        }
    return out;
}

std::vector<PrintedRelation> offdiag_family(double k, cplx q) {
    const cplx qb = std::conj(q);
    std::vector<PrintedRelation> out;
    out.push_back(simple("r1", "a_1^-(phi)a_1^+(psi) = k a_2^+(psi)a_2^-(phi) + <phi,psi>", at('-', 1, 0),
                         at('+', 1, 1), constant(k), at('+', 2, 1), at('-', 2, 0), true));
    out.push_back(simple("r2", "a_2^-(phi)a_2^+(psi) = k a_1^+(psi)a_1^-(phi) + <phi,psi>", at('-', 2, 0),
                         at('+', 2, 1), constant(k), at('+', 1, 1), at('-', 1, 0), true));
    out.push_back(simple("r3", "a_1^-(phi)a_2^+(psi) = conj(q) a_1^+(psi)a_2^-(phi)", at('-', 1, 0),
                         at('+', 2, 1), constant(qb), at('+', 1, 1), at('-', 2, 0), false));
    out.push_back(simple("r4", "a_2^-(phi)a_1^+(psi) = q a_2^+(psi)a_1^-(phi)", at('-', 2, 0), at('+', 1, 1),
                         constant(q), at('+', 2, 1), at('-', 1, 0), false));
    out.push_back(simple("r5", "a_1^+(phi)a_1^+(psi) = q a_2^+(psi)a_2^+(phi)", at('+', 1, 0), at('+', 1, 1),
                         constant(q), at('+', 2, 1), at('+', 2, 0), false));
    out.push_back(simple("r6", "a_1^-(phi)a_1^-(psi) = conj(q) a_2^-(psi)a_2^-(phi)", at('-', 1, 0),
                         at('-', 1, 1), constant(qb), at('-', 2, 1), at('-', 2, 0), false));
    return out;
}

std::vector<PrintedRelation> pw_family(double mu) {
    const double mu2 = mu * mu;
    std::vector<PrintedRelation> out;
    out.push_back(simple("r1", "a_1^-(phi)a_1^+(psi) = mu^2 a_1^+(psi)a_1^-(phi) + <phi,psi>", at('-', 1, 0),
                         at('+', 1, 1), constant(mu2), at('+', 1, 1), at('-', 1, 0), true));
    {
        PrintedRelation r = simple("r2",
                                   "a_2^-(phi)a_2^+(psi) = (mu^2-1) a_1^+(psi)a_1^-(phi) + mu^2 a_2^+(psi)a_2^-(phi) "
                                   "+ <phi,psi>",
                                   at('-', 2, 0), at('+', 2, 1), constant(mu2 - 1), at('+', 1, 1), at('-', 1, 0), true);
        r.rhs.push_back({constant(mu2), at('+', 2, 1), at('-', 2, 0)});
        out.push_back(std::move(r));
    }
    out.push_back(simple("r3", "a_1^-(phi)a_2^+(psi) = mu a_2^+(psi)a_1^-(phi)", at('-', 1, 0), at('+', 2, 1),
                         constant(mu), at('+', 2, 1), at('-', 1, 0), false));
    out.push_back(simple("r4", "a_2^-(phi)a_1^+(psi) = mu a_1^+(psi)a_2^-(phi)", at('-', 2, 0), at('+', 1, 1),
                         constant(mu), at('+', 1, 1), at('-', 2, 0), false));
    {
        PrintedRelation r;
        r.label = "r5";
        r.text = "a_2^+(phi)a_1^+(psi) + a_2^+(psi)a_1^+(phi) = mu (a_1^+(phi)a_2^+(psi) + a_1^+(psi)a_2^+(phi))";
        r.lhs = {{constant(1.0), at('+', 2, 0), at('+', 1, 1)}, {constant(1.0), at('+', 2, 1), at('+', 1, 0)}};
        r.rhs = {{constant(mu), at('+', 1, 0), at('+', 2, 1)}, {constant(mu), at('+', 1, 1), at('+', 2, 0)}};
        out.push_back(std::move(r));
    }
    {
        PrintedRelation r;
        r.label = "r6";
        r.text = "a_1^-(phi)a_2^-(psi) + a_1^-(psi)a_2^-(phi) = mu (a_2^-(phi)a_1^-(psi) + a_2^-(psi)a_1^-(phi))";
        r.lhs = {{constant(1.0), at('-', 1, 0), at('-', 2, 1)}, {constant(1.0), at('-', 1, 1), at('-', 2, 0)}};
        r.rhs = {{constant(mu), at('-', 2, 0), at('-', 1, 1)}, {constant(mu), at('-', 2, 1), at('-', 1, 0)}};
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<PrintedRelation> anyon_family(const std::array<cplx, 4>& qa) {
    // Q(i,x,j,y) for components i, j in {1,2}; "lt" is x < y.
    auto Q = [qa](int i, int x, int j, int y) -> cplx {
        const bool lt = x < y;
        if (i == 1 && j == 1) return lt ? qa[0] : std::conj(qa[0]);
        if (i == 2 && j == 2) return lt ? qa[3] : std::conj(qa[3]);
        if (i == 1 && j == 2) return lt ? qa[2] : std::conj(qa[1]);
        return lt ? qa[1] : std::conj(qa[2]);
    };
    std::vector<PrintedRelation> out;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            const std::string a = idx(i), b = idx(j);
            out.push_back(simple("mixed_" + a + b,
                                 "a_" + a + "^-(x)a_" + b + "^+(y) = Q(" + a + ",x," + b + ",y) a_" + b +
                                     "^+(y)a_" + a + "^-(x)" + (i == j ? " + delta(x-y)" : ""),
                                 at('-', i, 0), at('+', j, 1), [Q, i, j](int x, int y) { return Q(i, x, j, y); },
                                 at('+', j, 1), at('-', i, 0), i == j));
            out.push_back(simple("creation_" + a + b,
                                 "a_" + a + "^+(x)a_" + b + "^+(y) = Q(" + b + ",y," + a + ",x) a_" + b +
                                     "^+(y)a_" + a + "^+(x)",
                                 at('+', i, 0), at('+', j, 1), [Q, i, j](int x, int y) { return Q(j, y, i, x); },
                                 at('+', j, 1), at('+', i, 0), false));
            out.push_back(simple("annihilation_" + a + b,
                                 "a_" + a + "^-(x)a_" + b + "^-(y) = Q(" + b + ",y," + a + ",x) a_" + b +
                                     "^-(y)a_" + a + "^-(x)",
                                 at('-', i, 0), at('-', j, 1), [Q, i, j](int x, int y) { return Q(j, y, i, x); },
                                 at('-', j, 1), at('-', i, 0), false));
        }
    return out;
}

std::vector<PrintedRelation> spatial_family(const MultiSpec& spec, ExchangeReading reading) {
    const MultiSpec s = spec;
    auto q1 = [s](int x, int y) { return scalar_q1(s, x, y); };
    auto q2 = [s](int x, int y) { return scalar_q2(s, x, y); };
    const bool rev = reading == ExchangeReading::Reversed;
    auto e1 = [s, rev](int x, int y) { return rev ? scalar_q1(s, y, x) : scalar_q1(s, x, y); };
    auto e2 = [s, rev](int x, int y) { return rev ? scalar_q2(s, y, x) : scalar_q2(s, x, y); };
    const std::string ex = rev ? "(y,x)" : "(x,y)";
    auto in_y = [s](int x, int y) { return in_y_sector(s, x, y); };

    std::vector<PrintedRelation> out;
    out.push_back(simple("r1", "a_1^-(x)a_1^+(y) = Q_2(x,y) a_2^+(y)a_2^-(x) + delta(x-y)", at('-', 1, 0),
                         at('+', 1, 1), q2, at('+', 2, 1), at('-', 2, 0), true));
    out.push_back(simple("r2", "a_2^-(x)a_2^+(y) = Q_2(x,y) a_1^+(y)a_1^-(x) + delta(x-y)", at('-', 2, 0),
                         at('+', 2, 1), q2, at('+', 1, 1), at('-', 1, 0), true));
    out.push_back(simple("r3", "a_1^-(x)a_2^+(y) = Q_1(x,y) a_1^+(y)a_2^-(x)", at('-', 1, 0), at('+', 2, 1), q1,
                         at('+', 1, 1), at('-', 2, 0), false));
    out.push_back(simple("r4", "a_2^-(x)a_1^+(y) = Q_1(x,y) a_2^+(y)a_1^-(x)", at('-', 2, 0), at('+', 1, 1), q1,
                         at('+', 2, 1), at('-', 1, 0), false));
    out.push_back(simple("r5", "a_1^+(x)a_2^+(y) = Q_2" + ex + " a_1^+(y)a_2^+(x)", at('+', 1, 0), at('+', 2, 1), e2,
                         at('+', 1, 1), at('+', 2, 0), false));
    out.push_back(simple("r6", "a_2^+(x)a_1^+(y) = Q_2" + ex + " a_2^+(y)a_1^+(x)", at('+', 2, 0), at('+', 1, 1), e2,
                         at('+', 2, 1), at('+', 1, 0), false));
    PrintedRelation r7 = simple("r7", "a_1^+(x)a_1^+(y) = Q_1" + ex + " a_2^+(y)a_2^+(x)", at('+', 1, 0),
                                at('+', 1, 1), e1, at('+', 2, 1), at('+', 2, 0), false);
    r7.condition = in_y;
    r7.condition_text = "(x,y) in Y";
    out.push_back(std::move(r7));
    out.push_back(simple("r8", "a_1^-(x)a_2^-(y) = Q_2" + ex + " a_1^-(y)a_2^-(x)", at('-', 1, 0), at('-', 2, 1), e2,
                         at('-', 1, 1), at('-', 2, 0), false));
    out.push_back(simple("r9", "a_2^-(x)a_1^-(y) = Q_2" + ex + " a_2^-(y)a_1^-(x)", at('-', 2, 0), at('-', 1, 1), e2,
                         at('-', 2, 1), at('-', 1, 0), false));
    PrintedRelation r10 = simple("r10", "a_1^-(x)a_1^-(y) = Q_1" + ex + " a_2^-(y)a_2^-(x)", at('-', 1, 0),
                                 at('-', 1, 1), e1, at('-', 2, 1), at('-', 2, 0), false);
    r10.condition = in_y;
    r10.condition_text = "(x,y) in Y";
    out.push_back(std::move(r10));
    return out;
}

} // namespace

std::vector<PrintedRelation> printed_relations(FixtureId id, const MultiSpec& spec, ExchangeReading reading) {
    // Parameters are read back from the rule so the tables follow the spec actually built.
    const CMatrix& c = spec.rule.c;
    switch (id) {
    case FixtureId::ex_kq: return kq_family(spec, c(0, 0).real(), c(2, 1));
    case FixtureId::ex_offdiag: return offdiag_family(c(1, 1).real(), c(3, 0));
    case FixtureId::ex_pw: return pw_family(c(1, 2).real());
    case FixtureId::ex_anyon4: return anyon_family({c(0, 0), c(1, 2), c(2, 1), c(3, 3)});
    case FixtureId::ex_spatial: return spatial_family(spec, reading);
    }
    return {};
}

namespace {

bool is_mixed(const PrintedRelation& r) {
    for (const auto* side : {&r.lhs, &r.rhs})
        for (const auto& t : *side)
            if (t.first.kind != t.second.kind) return true;
    return false;
}

std::vector<Monomial> at_pair(const std::vector<PrintedTerm>& ts, int x, int y) {
    std::vector<Monomial> out;
    for (const auto& t : ts) out.push_back({t.coef(x, y), t.first, t.second});
    return out;
}

// Blocks of a, flattened over keys with both levels <= max_level, in the key order of `like`.
CVector flatten(const BlockOperator& a, const BlockOperator& like, int max_level) {
    std::vector<cplx> vals;
    for (const auto& [key, b] : like.blocks) {
        if (key.first > max_level || key.second > max_level) continue;
        const CMatrix* m = a.find(key.first, key.second);
        for (Index c = 0; c < b.cols(); ++c)
            for (Index r = 0; r < b.rows(); ++r) vals.push_back(m ? (*m)(r, c) : cplx(0, 0));
    }
    return Eigen::Map<CVector>(vals.data(), static_cast<Index>(vals.size()));
}

} // namespace

PrintedCheck check_printed(const PointOperators& ops, const FockTruncation& tr, const PrintedRelation& rel,
                           double tol) {
    const int n = ops.sites.n_sites;
    const bool mixed = is_mixed(rel);
    const int top = mixed ? tr.n_max - 1 : tr.n_max;
    PrintedCheck out;
    double worst = 0;
    int pairs = 0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            const BlockOperator diff = evaluate(ops, at_pair(rel.lhs, x, y), x, y) -
                                       evaluate(ops, at_pair(rel.rhs, x, y), x, y);
            const double r = block_norm(diff, top);
            if (!rel.condition || rel.condition(x, y)) {
                worst = std::max(worst, r);
                ++pairs;
            } else {
                out.off_condition = std::max(out.off_condition, r);
            }
        }
    // Coinciding sites: only a^-a^+ survives, as the contact term delta_ij.
    if (rel.lhs.size() == 1 && rel.lhs[0].first.kind == '-' && rel.lhs[0].second.kind == '+') {
        const auto& t = rel.lhs[0];
        const auto dims = level_dims(tr);
        for (int x = 0; x < n; ++x) {
            const BlockOperator lhs = ops.a('-', t.first.comp, x) * ops.a('+', t.second.comp, x);
            const double expected = t.first.comp == t.second.comp ? 1.0 : 0.0;
            out.contact = std::max(out.contact, interior_norm(lhs - expected * identity_operator(dims)));
        }
    }
    if (rel.lhs.size() == 1 && rel.rhs.size() == 1 && n >= 2) {
        const auto& l = rel.lhs[0];
        const auto& r = rel.rhs[0];
        const BlockOperator lo = ops.a(l.first.kind, l.first.comp, l.first.slot == 0 ? 0 : 1) *
                                 ops.a(l.second.kind, l.second.comp, l.second.slot == 0 ? 0 : 1);
        const BlockOperator ro = ops.a(r.first.kind, r.first.comp, r.first.slot == 0 ? 0 : 1) *
                                 ops.a(r.second.kind, r.second.comp, r.second.slot == 0 ? 0 : 1);
        const CVector a = flatten(lo, lo, top), b = flatten(ro, lo, top);
        if (b.squaredNorm() > 0) {
            out.fitted_available = true;
            out.fitted = b.dot(a) / b.squaredNorm() / l.coef(0, 1);
            out.displayed = r.coef(0, 1) / l.coef(0, 1);
        }
    }
    json inputs{{"pairs", pairs}, {"condition", rel.condition_text}, {"contact", out.contact}};
    if (out.off_condition >= 0) inputs["off_condition_residual"] = out.off_condition;
    if (out.fitted_available) {
        inputs["displayed_coefficient"] = complex_to_json(out.displayed);
        inputs["fitted_coefficient"] = complex_to_json(out.fitted);
    }
    const double residual = std::max(worst, out.contact);
    out.report = RelationReport{rel.label, rel.text, inputs, residual, residual <= tol};
    return out;
}

GoldenSpans golden_spans(FixtureId id, const FixtureParams& p) {
    auto span = [](std::vector<std::vector<cplx>> cols) {
        CMatrix m(4, static_cast<Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            for (Index r = 0; r < 4; ++r) m(r, static_cast<Index>(c)) = cols[c][r];
        return range_basis(m);
    };
    // Basis order e11, e12, e21, e22.
    switch (id) {
    case FixtureId::ex_kq: return {span({{0, 1, 0, 0}, {0, 0, 1, 0}}), span({{1, 0, 0, 0}, {0, 0, 0, 1}})};
    case FixtureId::ex_pw:
        return {span({{0, -p.mu, 1, 0}}), span({{1, 0, 0, 0}, {0, 0, 0, 1}, {0, 1, p.mu, 0}})};
    case FixtureId::ex_offdiag:
        return {span({{1, 0, 0, 0}, {0, 0, 0, 1}}), span({{0, 1, 0, 0}, {0, 0, 1, 0}})};
    default: throw ContractViolation("golden_spans: no displayed spans for " + fixture_name(id));
    }
}

double realization_residual(double k, cplx u, cplx c, int n_sites, int levels, int samples, unsigned seed) {
    const int h = n_sites;
    CMatrix flip = CMatrix::Zero(h * h, h * h);
    for (int a = 0; a < h; ++a)
        for (int b = 0; b < h; ++b) flip(a * h + b, b * h + a) = 1.0;
    const DeformationOperator d = make_deformation(k * flip, h);
    const FockTruncation tr = build_truncation(d, levels);
    const auto dims = level_dims(tr);
    std::vector<Index> offset(dims.size() + 1, 0);
    for (std::size_t n = 0; n < dims.size(); ++n) offset[n + 1] = offset[n] + dims[n];
    const Index dim = offset.back();

    CMatrix uop = CMatrix::Zero(dim, dim);
    for (std::size_t n = 0; n < dims.size(); ++n)
        for (Index r = offset[n]; r < offset[n + 1]; ++r) uop(r, r) = std::pow(u, static_cast<int>(n));
    const CMatrix one = identity(dim);
    // Columns whose two factors both sit at level <= levels - 1.
    std::vector<Index> cols;
    for (Index i1 = 0; i1 < offset[levels]; ++i1)
        for (Index i2 = 0; i2 < offset[levels]; ++i2) cols.push_back(i1 * dim + i2);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto random_vec = [&]() {
        CVector v(h);
        for (int i = 0; i < h; ++i) v(i) = {g(rng), g(rng)};
        return v;
    };
    auto Q = [k, c](int i, int j) -> cplx { return i == j ? cplx(k) : (i == 1 ? c : std::conj(c)); };
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        const CVector phi = random_vec(), psi = random_vec();
        const cplx pairing = (phi.transpose() * psi)(0, 0);
        const CMatrix ap_phi = to_dense(a_plus(phi, tr)), am_phi = to_dense(a_minus(phi, tr));
        const CMatrix ap_psi = to_dense(a_plus(psi, tr)), am_psi = to_dense(a_minus(psi, tr));
        auto plus = [&](int i, const CMatrix& a) { return i == 1 ? kron(a, one) : kron(uop, a); };
        auto minus = [&](int i, const CMatrix& a) { return i == 1 ? kron(a, one) : kron(CMatrix(uop.adjoint()), a); };
        auto measure = [&](const CMatrix& m) {
            double r = 0;
            for (Index col : cols) r = std::max(r, m.col(col).cwiseAbs().maxCoeff());
            worst = std::max(worst, r);
        };
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                CMatrix lhs = minus(i, am_phi) * plus(j, ap_psi);
                CMatrix rhs = Q(i, j) * (plus(j, ap_psi) * minus(i, am_phi));
                if (i == j) rhs += pairing * identity(dim * dim);
                measure(lhs - rhs);
                if (i == j) continue;
                measure(plus(i, ap_phi) * plus(j, ap_psi) - Q(j, i) * (plus(j, ap_psi) * plus(i, ap_phi)));
                measure(minus(i, am_phi) * minus(j, am_psi) - Q(j, i) * (minus(j, am_psi) * minus(i, am_phi)));
            }
    }
    return worst;
}

RealizationReport realization_check(const FixtureParams& p, int n_sites, int levels, int samples, unsigned seed) {
    RealizationReport r;
    const cplx q = p.q, qb = std::conj(p.q);
    r.literal_vs_displayed = realization_residual(p.k, q, qb, n_sites, levels, samples, seed);
    r.literal_vs_conjugate = realization_residual(p.k, q, q, n_sites, levels, samples, seed);
    r.conjugate_vs_displayed = realization_residual(p.k, qb, qb, n_sites, levels, samples, seed);
    const double t = 1e-9;
    if (r.literal_vs_displayed <= t)
        r.orientation = "U = q^n gives Q(1,2) = conj q, as displayed";
    else if (r.literal_vs_conjugate <= t)
        r.orientation = "U = q^n gives Q(1,2) = q; U = conj(q)^n gives the displayed Q(1,2) = conj q";
    else
        r.orientation = "neither orientation holds";
    return r;
}

std::vector<double> norm_ratio_series(const SiteModel& sites, const FockTruncation& tr, const CVector& phi_sites) {
    if (phi_sites.size() != sites.n_sites) throw ContractViolation("norm_ratio_series: one value per site");
    CVector f = CVector::Zero(sites.h_dim());
    for (int x = 0; x < sites.n_sites; ++x) f(sites.index(x, 0)) = phi_sites(x);
    const BlockOperator a = a_plus(f, tr);
    const double nphi = phi_sites.norm();
    std::vector<double> out;
    double running = 0;
    for (int n = 0; n < tr.n_max; ++n) {
        if (const CMatrix* b = a.find(n + 1, n)) running = std::max(running, op_norm(*b) / nphi);
        out.push_back(running);
    }
    return out;
}

} // namespace fockforge
