#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "fockforge/spec_io.hpp"

namespace fockforge {

enum class FixtureId { ex_kq, ex_pw, ex_offdiag, ex_anyon4, ex_spatial };

std::string fixture_name(FixtureId id);
FixtureId fixture_from(const std::string& name);   // SpecError on unknown names
std::vector<FixtureId> all_fixtures();

/// Harness defaults. The scalar tables of ex_spatial are keyed by site pairs x < y.
struct FixtureParams {
    double k = 0.5;
    cplx q{0.0, 1.0};
    double mu = 0.5;
    std::array<cplx, 4> qa{};
    std::map<std::pair<int, int>, cplx> spatial_q1, spatial_q2;
    int n_sites = 3;
    int n_max = 3;
    double tol = 1e-8;
    double rank_tol = 1e-9;
};

FixtureParams default_params();
nlohmann::json params_to_json(FixtureId id, const FixtureParams& p);

/// Matrices as they are displayed in the examples. A display lists C_{ij}^{kl} with the
/// source pair (i,j) along rows, so the operator is the transpose of the display.
CMatrix kq_display(double k, cplx q);
CMatrix pw_display(double mu);
CMatrix offdiag_display(double k, cplx q);
CMatrix anyon_display(const std::array<cplx, 4>& qa);

/// Displayed reshuffles C~ (same display convention).
CMatrix pw_tilde_display(double mu);
CMatrix offdiag_tilde_display(double k, cplx q);

MultiSpec fixture_spec(FixtureId id, const FixtureParams& p);
LoadedSpec fixture_loaded(FixtureId id, const FixtureParams& p);

/// One displayed relation, evaluated pointwise at ordered site pairs x != y.
struct PrintedTerm {
    std::function<cplx(int, int)> coef;
    Atom first, second;
};

struct PrintedRelation {
    std::string label;
    std::string text;                       // the relation in the notation of the example
    std::vector<PrintedTerm> lhs, rhs;
    bool pairing = false;                   // carries a delta_ij <phi,psi> term
    std::function<bool(int, int)> condition;   // empty: all pairs
    std::string condition_text;
};

/// How the exchange (++ and --) coefficients of ex_spatial are read.
enum class ExchangeReading { AsDisplayed, Reversed };

std::vector<PrintedRelation> printed_relations(FixtureId id, const MultiSpec& spec,
                                               ExchangeReading reading = ExchangeReading::AsDisplayed);

struct PrintedCheck {
    RelationReport report;          // residual over pairs meeting the condition, plus contact
    double off_condition = -1;      // worst residual where the condition fails; -1 if never
    double contact = 0;             // lhs at x = y against delta_ij, for single a^-a^+ lhs
    bool fitted_available = false;
    cplx displayed{0, 0};           // coefficient at (x, y) = (0, 1) for single-term relations
    cplx fitted{0, 0};              // least-squares coefficient at the same pair
};

PrintedCheck check_printed(const PointOperators& ops, const FockTruncation& tr,
                           const PrintedRelation& rel, double tol);

/// Kernel and range of 1 - C C^* as displayed in the examples (ex_kq, ex_pw, ex_offdiag).
struct GoldenSpans {
    Subspace ker, ran;
};

GoldenSpans golden_spans(FixtureId id, const FixtureParams& p);

/// Tensor product realization: two copies of the k-deformed Fock space on C^N,
/// a_1 = a (x) 1, a_2 = U (x) a with U = u^n on level n. Residuals of the
/// k/Q family with Q(1,2) = c, Q(2,1) = conj c, evaluated on factor levels <= L-1.
struct RealizationReport {
    double literal_vs_displayed = 0;     // u = q,       c = conj q (as displayed)
    double literal_vs_conjugate = 0;     // u = q,       c = q
    double conjugate_vs_displayed = 0;   // u = conj q,  c = conj q
    std::string orientation;             // which pairing the literal U realizes
};

double realization_residual(double k, cplx u, cplx c, int n_sites, int levels, int samples,
                            unsigned seed);
RealizationReport realization_check(const FixtureParams& p, int n_sites, int levels, int samples = 4,
                                    unsigned seed = 7);

/// ||a_1^+(phi)|| / ||phi|| for truncations n_max = 1..tr.n_max, phi supported on component 1.
std::vector<double> norm_ratio_series(const SiteModel& sites, const FockTruncation& tr,
                                      const CVector& phi_sites);

} // namespace fockforge
