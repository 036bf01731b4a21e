#pragma once

#include "lipnorm/ball.hpp"
#include "lipnorm/exponent.hpp"
#include "lipnorm/norm_value.hpp"

namespace lipnorm {

// Finitely supported E-valued function on the space with zero coordinatewise
// sum. The target E is R^dim under a configurable l_s norm.
struct Molecule {
    SpacePtr space;
    size_t dim = 0;
    std::vector<std::vector<Rat>> support; // one dim-tuple per point

    void validate() const; // zero-sum and shape
};

struct Atom {
    std::vector<Rat> v;
    size_t left = 0, right = 0; // v m_{left,right}: +v at left, -v at right
};

struct AtomDecomposition {
    SpacePtr space;
    size_t dim = 0;
    std::vector<Atom> atoms;
    std::vector<double> sigma; // optional scaling weights from a previous search
};

Molecule molecule_from_atoms(const AtomDecomposition& decomp);
Molecule molecule_from_json(const std::string& text, const SpacePtr& space);

// <T, m> = sum_x <T(x), m(x)> for a function table T: point -> dim-tuple.
double pair_value(const std::vector<std::vector<double>>& table, const Molecule& m);

// l_q norm of a vector (q = 2 is the default target norm).
double vector_norm(const std::vector<Rat>& v, const Exponent& q);

// Chevet-Saphar norm upper bound:
//   inf over decompositions m = sum v_j m_{x'_j x''_j} and sigma > 0 of
//   || sigma_j ||v_j|| | l_P || * weak_R(1/sigma over the atom pairs),
// with (P, R) = (p, p') for the cs_p norm and (p', r) when r is given
// (the cs_{p',r} norm). The search alternates a frozen-vertex closed form
// for sigma with full weak-norm re-evaluation, over a pool of spanning-tree
// decompositions, the star through the base point, and any supplied hints
// (e.g. concatenations, which make the beta-triangle inequality hold for the
// returned values by construction).
NormValue cs_upper(const Molecule& m, const Exponent& p, const std::optional<Exponent>& r,
                   const LipschitzBall& ball, const Exponent& vnorm = Exponent(2),
                   size_t starts = 32, uint64_t seed = 5,
                   const std::vector<AtomDecomposition>& hints = {});

// cs_upper plus the winning decomposition (zero atoms dropped) and the sigma
// weights that achieved the value; a concatenation of two such decompositions,
// with each side's sigma rescaled, witnesses the beta-triangle inequality.
struct CsUpperDetail {
    NormValue value;
    AtomDecomposition best;
};
CsUpperDetail cs_upper_detail(const Molecule& m, const Exponent& p,
                              const std::optional<Exponent>& r, const LipschitzBall& ball,
                              const Exponent& vnorm = Exponent(2), size_t starts = 32,
                              uint64_t seed = 5, const std::vector<AtomDecomposition>& hints = {});

// Duality lower bound for cs_p: sup of pair(T, m) over tables T with
// pi_{(p',m(p';p'))}(T) <= 1. Rank-one tables u * g over ball vertices are
// scanned exactly (their summing norm is at most ||u||, attained for
// nonconstant g); random tables are normalized by an exact LP upper bound of
// their summing norm on the rounded-up image space.
NormValue cs_lower(const Molecule& m, const Exponent& p, const LipschitzBall& ball,
                   const Exponent& vnorm = Exponent(2), size_t starts = 32, uint64_t seed = 5);

// S_G: pushes the molecule forward along the map, summing coincident images.
Molecule image_molecule(const PointMap& map, const Molecule& m);

// Holder conjugate: 1/p + 1/p' = 1 (p >= 1).
Exponent holder_conjugate(const Exponent& p);

} // namespace lipnorm
