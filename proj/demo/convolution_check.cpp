// Checks ||f * g | B^{s+u}_{p,q}|| <= C ||f | B^s_{p1,q1}|| ||g | B^u_{p2,q2}||
// on a seeded corpus and reports the empirical constant at N and 2N.

#include <cstdio>

#include "lplab.hpp"

using namespace lplab;

int main() {
    InequalityCase c;
    c.kind = CaseKind::conv3;
    c.scale = Scale::B;
    c.s = 0.5;
    c.u = 0.5;
    c.p = 1;
    c.q = 1;
    c.p1 = 1;
    c.q1 = 2;
    c.p2 = 1;
    c.q2 = 2;
    CorpusSpec f, g;
    f.seed = 7;
    g.seed = 8;
    f.count = g.count = 20;
    const auto rep = check_inequality_refined(c, f, g, Grid(1, 2048, 20.0));
    std::printf("%s\n", to_json(rep).dump(2).c_str());

    // The same corpus against the sharp Young inequality.
    InequalityCase young;
    young.p = 2;
    young.p1 = 2;
    young.p2 = 1;
    young.constant_claim = 1.0;
    const Grid grid(1, 2048, 20.0);
    const auto y = check_inequality(young, generate_corpus(f, grid), generate_corpus(g, grid), build_resolution(grid));
    std::printf("young: max ratio %.6f, verdict %s\n", y.max_ratio, to_string(y.verdict));
}
