#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wfk/kenmotsu.hpp"
#include "wfk/weakf.hpp"

namespace wfk {

// Ric*(X,Y) = 1/2 trace{Z -> R(X, fY) f Z}; not assumed symmetric.
TensorValue star_ricci(const WeakFManifold& m, const Point& p);
// r* = trace_g Ric*
double star_scalar(const WeakFManifold& m, const Point& p);

// "thm4.28" (Ric* against Ric(X,QY) plus the beta^2 terms) and "thm4.29" (r*).
std::pair<ResidualReport, ResidualReport> theorem4_residual(const WeakFManifold& m, const Point& p);

// Ric* = a g + b sum eta^i eta^i + (a+b) sum_{i != j} eta^i eta^j over all N^2 components.
EinsteinFit star_eta_einstein_fit(const WeakFManifold& m, const Point& p);
// "cor2": a = -b = r*/2n, together with the fit residual.
ResidualReport cor2_check(const WeakFManifold& m, const Point& p);

// "star.def": antisymmetric part of Ric* and the commutator [Ric#, Q].
ResidualReport star_symmetry_check(const WeakFManifold& m, const Point& p);
// "star.30": trace{Z -> -f R(fY,Z)X} against trace{Z -> -f R(Z,X)fY}, and
// their sum against 2 Ric*.
ResidualReport star_trace_check(const WeakFManifold& m, const Point& p);

struct SolitonData {
    std::optional<VectorField> V;
    std::optional<Expr> potential;  // gradient form, V = grad v
    double lambda = 0.0;
    double mu = 0.0;
};

enum class SolitonClass { expanding, steady, shrinking };
std::string to_string(SolitonClass c);
// Negative lambda is expanding, zero steady, positive shrinking (|lambda| <= 1e-9 counts as zero).
SolitonClass classify(double lambda);

struct SolitonVerdict {
    double residual = 0.0;        // soliton equation, with Hess v for the gradient form
    double cross_residual = 0.0;  // expanded form through Ric(X, QY), or Q Ric# for the gradient form
    SolitonClass classification = SolitonClass::steady;
    double prop5_gap = 0.0;       // |lambda + mu|
};

// Throws ValidationError when Ric* is not symmetric at p or the data lacks V.
SolitonVerdict soliton_residual(const WeakFManifold& m, const SolitonData& sol, const Point& p);
SolitonVerdict gradient_soliton_residual(const WeakFManifold& m, const SolitonData& sol, const Point& p);

struct SolitonFit {
    double lambda = 0.0;
    double mu = 0.0;
    double residual = 0.0;
};

// Least-squares lambda, mu in the soliton equation over the sample; needs at least 2 points.
SolitonFit fit_soliton_constants(const WeakFManifold& m, const VectorField& v, const std::vector<Point>& sample);

struct Prop5Result {
    bool pass = false;
    double gap = 0.0;                  // |lambda + mu|
    std::optional<double> cor3_gap;    // |lambda| when mu = 0
};
Prop5Result prop5_check(double lambda, double mu, double tolerance = 1e-5);

struct ContactVerdict {
    bool is_contact = false;
    double sigma = 0.0;
    bool is_strict = false;
    double residual = 0.0;
};
// L_V eta^i = sigma eta^i with one least-squares sigma over i and the probes.
ContactVerdict contact_field_check(const WeakFManifold& m, const VectorField& v, const Point& p);

// Report-only comparisons of the direct L_V D and L_V R against the stated
// right sides: "lemma2.42", "lemma2.34", "lemma2.35".
std::vector<ResidualReport> lemma2_audit(const WeakFManifold& m, const SolitonData& sol, const Point& p);

// example2 reference closed forms against the oracle: "disc.ricstar",
// "disc.rstar", "disc.lambda". Each passes when oracle - reference equals the
// predicted gap (1+c) beta^2 (2n(s-1)+1-s) (times 2n for r*).
std::vector<ResidualReport> discrepancy_audit(const WeakFManifold& m, const Point& p);

}  // namespace wfk
