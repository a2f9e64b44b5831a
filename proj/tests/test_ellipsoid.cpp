#include "ellharm/ellipsoid.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ellharm;

TEST(System, DerivedParameters) {
    const EllipsoidalSystem s(3, 2, 1);
    EXPECT_DOUBLE_EQ(s.hSq(), 5.0);
    EXPECT_DOUBLE_EQ(s.kSq(), 8.0);
    const auto t = new_system(2, 1.5, 1);
    EXPECT_DOUBLE_EQ(t.hSq(), 1.75);
    EXPECT_DOUBLE_EQ(t.kSq(), 3.0);
    EXPECT_LT(t.hSq(), t.kSq());
}

TEST(System, RejectsDegenerate) {
    EXPECT_THROW(new_system(1, 1, 0.5), InvalidArgument);
    EXPECT_THROW(new_system(2, 1, 1), InvalidArgument);
    EXPECT_THROW(new_system(1, 2, 0.5), InvalidArgument);
    EXPECT_THROW(new_system(3, 2, 0), InvalidArgument);
    EXPECT_THROW(new_system(3, 2, -1), InvalidArgument);
    EXPECT_THROW(new_system(NAN, 2, 1), InvalidArgument);
    try {
        new_system(1, 1, 0.5);
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("a > b"), std::string::npos);
    }
}

TEST(CartToEll, RootsMatchBisection) {
    const EllipsoidalSystem s(3, 2, 1);
    const Vec3 r{1.0, 0.8, 0.5};
    const auto want = oracle::confocal_roots(s, r);
    const auto p = cart_to_ellipsoidal(s, r);
    EXPECT_LE(oracle::relerr(p.lambda * p.lambda, want[0]), 1e-12);
    EXPECT_LE(oracle::relerr(p.mu * p.mu, want[1]), 1e-12);
    EXPECT_LE(oracle::relerr(p.nu * p.nu, want[2]), 1e-12);
    const auto back = ellipsoidal_to_cart(s, p);
    EXPECT_NEAR(back.x, 1.0, 1e-10);
    EXPECT_NEAR(back.y, 0.8, 1e-10);
    EXPECT_NEAR(back.z, 0.5, 1e-10);
}

TEST(CartToEll, SurfaceHasLambdaA) {
    const EllipsoidalSystem s(3, 2, 1);
    for (int i = 0; i < 50; ++i) {
        const double th = 0.1 + 0.06 * i, ph = 0.37 * i;
        const Vec3 r{3 * std::sin(th) * std::cos(ph), 2 * std::sin(th) * std::sin(ph), std::cos(th)};
        EXPECT_NEAR(std::abs(cart_to_ellipsoidal(s, r).lambda), 3.0, 1e-12);
    }
}

TEST(CartToEll, SignConvention) {
    const EllipsoidalSystem s(3, 2, 1);
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) {
                const Vec3 r{sx * 1.1, sy * 0.7, sz * 0.4};
                const auto p = cart_to_ellipsoidal(s, r);
                EXPECT_EQ(sign_of(p.lambda), sx * sy * sz);
                EXPECT_EQ(sign_of(p.mu), sx * sy);
                EXPECT_EQ(sign_of(p.nu), sx * sz);
                const auto back = ellipsoidal_to_cart(s, p);
                EXPECT_EQ(sign_of(back.x), sx);
                EXPECT_EQ(sign_of(back.y), sy);
                EXPECT_EQ(sign_of(back.z), sz);
            }
}

TEST(EllToCart, AllPositive) {
    const EllipsoidalSystem s(3, 2, 1);
    const auto r = ellipsoidal_to_cart(s, {3.5, 2.5, 1.5});
    EXPECT_GT(r.x, 0);
    EXPECT_GT(r.y, 0);
    EXPECT_GT(r.z, 0);
    // the image satisfies the confocal equation at t = lambda^2
    const double t = 3.5 * 3.5;
    EXPECT_NEAR(r.x * r.x / t + r.y * r.y / (t - 5) + r.z * r.z / (t - 8), 1.0, 1e-10);
}

TEST(EllToCart, RejectsBracketViolation) {
    const EllipsoidalSystem s(3, 2, 1);
    EXPECT_THROW(ellipsoidal_to_cart(s, {2.0, 2.5, 1.5}), CoordinateError);
    EXPECT_THROW(ellipsoidal_to_cart(s, {3.5, 3.0, 1.5}), CoordinateError);
    EXPECT_THROW(ellipsoidal_to_cart(s, {3.5, 2.5, 2.5}), CoordinateError);
}

TEST(CartToEll, Degeneracies) {
    const EllipsoidalSystem s(3, 2, 1);
    EXPECT_THROW(cart_to_ellipsoidal(s, s.h(), 0, 0), CoordinateError);
    EXPECT_THROW(cart_to_ellipsoidal(s, -s.k(), 0, 0), CoordinateError);
    EXPECT_THROW(cart_to_ellipsoidal(s, NAN, 0, 0), CoordinateError);
    const auto o = cart_to_ellipsoidal(s, 0, 0, 0);
    EXPECT_DOUBLE_EQ(o.lambda, s.k());
    EXPECT_DOUBLE_EQ(o.mu, s.h());
    EXPECT_DOUBLE_EQ(o.nu, 0.0);
    const auto back = ellipsoidal_to_cart(s, o);
    EXPECT_NEAR(norm(back), 0.0, 1e-12);
    // on the x = 0 plane nu snaps to 0 with positive sign
    const auto p = cart_to_ellipsoidal(s, 0.0, -0.7, 0.4);
    EXPECT_EQ(p.nu, 0.0);
    const auto q = ellipsoidal_to_cart(s, p);
    EXPECT_NEAR(q.y, -0.7, 1e-10);
    EXPECT_NEAR(q.z, 0.4, 1e-10);
}

TEST(CartToEll, RoundTripRandom) {
    const EllipsoidalSystem s(3, 2, 1);
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-9.0, 9.0);
    int done = 0;
    double worst = 0;
    while (done < 10000) {
        const Vec3 r{u(gen), u(gen) * 0.8, u(gen) * 0.6};
        if (std::min({std::abs(r.x), std::abs(r.y), std::abs(r.z)}) < 1e-6 * s.a()) continue;
        const auto p = cart_to_ellipsoidal(s, r);
        const double l2 = p.lambda * p.lambda, m2 = p.mu * p.mu, n2 = p.nu * p.nu;
        ASSERT_GE(l2, s.kSq());
        ASSERT_GE(s.kSq(), m2);
        ASSERT_GE(m2, s.hSq());
        ASSERT_GE(s.hSq(), n2);
        ASSERT_GE(n2, 0.0);
        const auto back = ellipsoidal_to_cart(s, p);
        worst = std::max(worst, norm(back - r) / norm(r));
        ++done;
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(CartToEll, InverseRoundTrip) {
    const EllipsoidalSystem s(2, 1.5, 1);
    for (double l : {1.8, 2.5, 7.0})
        for (double m : {1.4, 1.55, 1.7})
            for (double n : {0.2, 0.8, 1.2}) {
                const EllipsoidalPoint p{l, -m, n};
                const auto q = cart_to_ellipsoidal(s, ellipsoidal_to_cart(s, p));
                EXPECT_LE(oracle::relerr(q.lambda, p.lambda), 1e-10);
                EXPECT_LE(oracle::relerr(q.mu, p.mu), 1e-10);
                EXPECT_LE(oracle::relerr(q.nu, p.nu), 1e-10);
            }
}
