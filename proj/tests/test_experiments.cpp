#include "ellharm/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace ellharm;
using namespace ellharm::experiments;

namespace {
std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}
} // namespace

TEST(Csv, FormatRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -4.5e-300, 12.566370614359172}) EXPECT_EQ(std::stod(format_number(v)), v);
    std::ostringstream os;
    CsvWriter w(os, {"a", "b", "c"});
    w.row(1, 0.5, "x");
    EXPECT_EQ(os.str(), "a,b,c\n1,0.5,x\n");
}

TEST(GammaRun, RowsAndHeader) {
    const auto rows = run_gamma({3, 2, 1}, 3, quad::QuadOptions{});
    ASSERT_EQ(rows.size(), 7u);
    for (int p = 0; p < 7; ++p) {
        EXPECT_EQ(rows[p].p, p);
        EXPECT_GT(rows[p].gamma, 0);
    }
    std::ostringstream os;
    write_gamma_csv(rows, os);
    const auto ls = lines(os.str());
    EXPECT_EQ(ls.front(), "n,p,gamma,evaluations");
    EXPECT_EQ(ls.size(), 8u);
}

TEST(QuadCompare, RowsDeterministic) {
    const auto a = run_quad_compare({3, 2, 1}, 2, 1, {0, 2, 4});
    const auto b = run_quad_compare({3, 2, 1}, 2, 1, {0, 2, 4});
    ASSERT_EQ(a.size(), 9u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].gamma, b[i].gamma);
    EXPECT_THROW(run_quad_compare({3, 2, 1}, 2, 5, {0}), InvalidArgument);
    std::ostringstream os;
    write_quad_compare_csv(a, os);
    EXPECT_EQ(lines(os.str()).front(), "scheme,level,evaluations,gamma,abs_err,rel_err");
}

TEST(QuadCompare, BudgetAndSlopeHelpers) {
    using quad::Transform;
    const std::vector<QuadCompareRow> rows{{Transform::tanh, 0, 10, 0, 1e-2, 0},
                                           {Transform::tanh, 1, 20, 0, 1e-4, 0},
                                           {Transform::tanh, 2, 30, 0, 1e-6, 0}};
    EXPECT_EQ(best_error_within(rows, Transform::tanh, 25), 1e-4);
    EXPECT_EQ(best_error_within(rows, Transform::tanh, 30), 1e-6);
    EXPECT_TRUE(std::isinf(best_error_within(rows, Transform::tanh, 5)));
    EXPECT_TRUE(std::isinf(best_error_within(rows, Transform::erf, 100)));
    EXPECT_NEAR(convergence_slope(rows, Transform::tanh, 0), -0.2, 1e-12);
    EXPECT_TRUE(std::isnan(convergence_slope(rows, Transform::tanh, 1e-3)));
}

TEST(BornRun, Slope) {
    EXPECT_NEAR(loglog_slope({1, 10, 100}, {2, 20, 200}), 1.0, 1e-12);
    EXPECT_NEAR(loglog_slope({1, 10}, {1, 0.01}), -2.0, 1e-12);
    const auto e = near_sphere(0.5);
    EXPECT_EQ(e.a(), 1.5);
    EXPECT_EQ(e.b(), 1.1);
    EXPECT_THROW(near_sphere(0), InvalidArgument);
    const auto rows = run_born_limit({0.1}, 1, 80, 4);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].born, -0.49375);
    EXPECT_EQ(rows[0].abs_err, std::abs(rows[0].dg - rows[0].born));
}

TEST(SolvateRun, PartialSumsOfOneExpansion) {
    const DielectricModel m({3, 2, 1}, 1, 80, seeded_charges({3, 2, 1}, 5, default_seed));
    const auto rows = run_solvate(m, {0, 3, 6});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[2].abs_err, 0.0);
    EXPECT_EQ(rows[1].dg, solvation_energy(m, 3));
    EXPECT_LT(rows[0].evaluations, rows[1].evaluations);
    EXPECT_THROW(run_solvate(m, {}), InvalidArgument);
    EXPECT_THROW(run_solvate(m, {-1}), InvalidArgument);
}

TEST(ExpandRun, ProbeAndRows) {
    const auto ch = seeded_charges({3, 2, 1}, 5, default_seed);
    const DielectricModel m({3, 2, 1}, 2, 80, ch);
    const auto p = brillouin_probe(ch, 1.5);
    double rb = 0;
    for (const auto& c : ch) rb = std::max(rb, norm(c.position));
    EXPECT_NEAR(norm(p), 1.5 * rb, 1e-12);
    const auto rows = run_expand_compare(m, p, {0, 4, 8});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].direct, coulomb_potential_direct(ch, p, 2.0));
    EXPECT_LT(rows[2].ell_err, rows[0].ell_err);
    EXPECT_THROW(run_expand_compare(m, {0.5, 0, 0}, {2}), InvalidArgument);
    std::ostringstream os;
    write_expand_csv(rows, os);
    EXPECT_EQ(lines(os.str()).front(), "order,direct,ell,sph,ell_err,sph_err");
}
