#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waring/algebra.hpp"
#include "waring/random.hpp"
#include "waring/roots.hpp"

using namespace waring;
using namespace std::complex_literals;

namespace {

// Independent expansion oracle: multiply d copies of the linear form as
// polynomials stored by exponent vector.
std::map<Exponent, Complex> expand_product(std::span<const Complex> ell, int d)
{
    const std::size_t vars = ell.size();
    std::map<Exponent, Complex> poly{{Exponent(vars, 0), 1.0}};
    for (int step = 0; step < d; ++step) {
        std::map<Exponent, Complex> next;
        for (const auto& [e, c] : poly)
            for (std::size_t v = 0; v < vars; ++v) {
                Exponent f = e;
                ++f[v];
                next[f] += c * ell[v];
            }
        poly = std::move(next);
    }
    return poly;
}

void expect_form(const HomogeneousForm& f, std::initializer_list<Complex> expected, double tol = 1e-14)
{
    ASSERT_EQ(f.coeffs().size(), expected.size());
    std::size_t i = 0;
    for (const auto& e : expected) {
        EXPECT_NEAR(std::abs(f.coeffs()[i] - e), 0.0, tol) << "coefficient " << i;
        ++i;
    }
}

} // namespace

TEST(ProjectivePoint, NormalizesLargestCoordinate)
{
    ProjectivePoint p({2.0, -4.0, 1.0});
    EXPECT_EQ(p[1], Complex(1.0));
    EXPECT_EQ(p[0], Complex(-0.5));
    EXPECT_TRUE(p.is_real());

    ProjectivePoint tie({1i, 1.0});  // tie broken by lowest index
    EXPECT_EQ(tie[0], Complex(1.0));
    EXPECT_NEAR(std::abs(tie[1] - (-1i)), 0.0, 1e-15);
    EXPECT_FALSE(tie.is_real());
}

TEST(ProjectivePoint, RejectsZeroAndNonFinite)
{
    EXPECT_THROW(ProjectivePoint({0.0, 0.0}), InvalidArgument);
    EXPECT_THROW(ProjectivePoint({std::nan(""), 1.0}), InvalidArgument);
}

TEST(ConjugatePoint, Examples)
{
    const ProjectivePoint c = conjugate_point(ProjectivePoint({1.0, 1i}));
    EXPECT_NEAR(std::abs(c[1] - (-1i)), 0.0, 1e-15);

    const ProjectivePoint r({1.0, 0.0, -2.0});
    const ProjectivePoint rc = conjugate_point(r);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_EQ(rc[i], r[i]);
}

TEST(ConjugatePoint, IsAnInvolution)
{
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        const ProjectivePoint p = random_complex_point(rng, 1 + t % 4);
        const ProjectivePoint pp = conjugate_point(conjugate_point(p));
        for (std::size_t i = 0; i < p.size(); ++i)
            EXPECT_NEAR(std::abs(pp[i] - p[i]), 0.0, 1e-12);
        EXPECT_GT(projective_distance(p, conjugate_point(p)), 1e-6);
    }
}

TEST(PowerOfLinearForm, Examples)
{
    expect_form(power_of_linear_form(ProjectivePoint({1.0, 0.0}), 3), {1.0, 0.0, 0.0, 0.0});
    expect_form(power_of_linear_form(ProjectivePoint({1.0, 1.0}), 2), {1.0, 2.0, 1.0});
    EXPECT_TRUE(power_of_linear_form(ProjectivePoint({1.0, 1.0}), 2).is_real());
}

TEST(PowerOfLinearForm, ComplexRepresentative)
{
    // [i, 1] is stored as [1, -i]; (i x + y)^3 = -i (x - i y)^3.
    const ProjectivePoint ell({1i, 1.0});
    const HomogeneousForm f = power_of_linear_form(ell, 3);
    EXPECT_FALSE(f.is_real());
    const Complex raw[] = {1i, 1.0};
    const auto oracle = expand_product(raw, 3);
    const MonomialBasis basis(1, 3);
    for (std::size_t k = 0; k < basis.size(); ++k)
        EXPECT_NEAR(std::abs(-1i * f.coeffs()[k] - oracle.at(basis[k])), 0.0, 1e-14);
    // oracle itself: -i x^3 - 3 x^2 y + 3 i x y^2 + y^3
    EXPECT_NEAR(std::abs(oracle.at({3, 0}) - (-1i)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(oracle.at({2, 1}) - (-3.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(oracle.at({1, 2}) - 3i), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(oracle.at({0, 3}) - 1.0), 0.0, 1e-15);
}

TEST(PowerOfLinearForm, MatchesProductExpansion)
{
    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
        const int n = 1 + t % 3;
        const int d = 1 + t % 6;
        const ProjectivePoint ell = random_complex_point(rng, n);
        const HomogeneousForm f = power_of_linear_form(ell, d);
        const auto oracle = expand_product(ell.coords(), d);
        const MonomialBasis basis(n, d);
        for (std::size_t k = 0; k < basis.size(); ++k)
            EXPECT_NEAR(std::abs(f.coeffs()[k] - oracle.at(basis[k])), 0.0,
                        1e-12 * (1.0 + std::abs(oracle.at(basis[k]))));
    }
}

TEST(PowerOfLinearForm, EvaluatesToPowerOfPairing)
{
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 3;
        const int d = 1 + t % 7;
        const ProjectivePoint ell = random_complex_point(rng, n);
        const ProjectivePoint p = random_complex_point(rng, n);
        Complex dot = 0.0;
        for (std::size_t i = 0; i < ell.size(); ++i)
            dot += ell[i] * p[i];
        const Complex expected = std::pow(dot, d);
        const Complex got = evaluate(power_of_linear_form(ell, d), p);
        EXPECT_LE(std::abs(got - expected), 1e-10 * std::max(1.0, std::abs(expected)));
    }
}

TEST(Evaluate, Examples)
{
    const auto x2y2 = HomogeneousForm::from_real(1, 2, std::vector<double>{1, 0, 1});
    EXPECT_NEAR(std::abs(evaluate(x2y2, ProjectivePoint({1.0, 0.0})) - 1.0), 0.0, 1e-15);

    // x0^2 + x1^2 + x2^2 (graded lex: x0^2 x0x1 x0x2 x1^2 x1x2 x2^2)
    const auto conic = HomogeneousForm::from_real(2, 2, std::vector<double>{1, 0, 0, 1, 0, 1});
    EXPECT_NEAR(std::abs(evaluate(conic, ProjectivePoint({1i, 1.0, 0.0}))), 0.0, 1e-15);

    const auto cubic = HomogeneousForm::from_real(1, 3, std::vector<double>{1, 0, -3, 0});
    EXPECT_NEAR(std::abs(evaluate(cubic, ProjectivePoint({1.0, 1.0})) - (-2.0)), 0.0, 1e-14);

    EXPECT_THROW(evaluate(cubic, ProjectivePoint({1.0, 1.0, 1.0})), InvalidArgument);
}

TEST(HomogeneousForm, Invariants)
{
    EXPECT_THROW(HomogeneousForm::from_real(1, 2, std::vector<double>{0, 0, 0}), InvalidArgument);
    EXPECT_THROW(HomogeneousForm::from_real(1, 2, std::vector<double>{1, 0}), InvalidArgument);
    const auto f = HomogeneousForm::from_real(2, 3, std::vector<double>(10, 1.0));
    EXPECT_EQ(f.coefficient({1, 1, 1}), Complex(1.0));
    EXPECT_THROW(f.coefficient({1, 1}), InvalidArgument);
    EXPECT_THROW(f.coefficient({2, 2, 0}), InvalidArgument);
}

TEST(Catalecticant, Examples)
{
    const auto x3 = HomogeneousForm::from_real(1, 3, std::vector<double>{1, 0, 0, 0});
    const auto m1 = catalecticant(x3, 1);
    ASSERT_EQ(m1.rows(), 3);
    ASSERT_EQ(m1.cols(), 2);
    Eigen::MatrixXd e1(3, 2);
    e1 << 1, 0, 0, 0, 0, 0;
    EXPECT_TRUE(m1.real().isApprox(e1));
    EXPECT_EQ(numeric_rank(m1), 1);

    const auto sum = HomogeneousForm::from_real(1, 3, std::vector<double>{1, 0, 0, 1});
    Eigen::MatrixXd e2(3, 2);
    e2 << 1, 0, 0, 0, 0, 1;
    EXPECT_TRUE(catalecticant(sum, 1).real().isApprox(e2));
    EXPECT_EQ(numeric_rank(catalecticant(sum, 1)), 2);

    // x^3 - 3 x y^2: a = (1, 0, -1, 0)
    const auto cubic = HomogeneousForm::from_real(1, 3, std::vector<double>{1, 0, -3, 0});
    const auto m3 = catalecticant(cubic, 2);
    Eigen::MatrixXd e3(2, 3);
    e3 << 1, 0, -1, 0, -1, 0;
    EXPECT_TRUE(m3.real().isApprox(e3));
    Eigen::Vector3d kern(1, 0, 1);
    EXPECT_NEAR((m3.real() * kern).norm(), 0.0, 1e-15);

    EXPECT_THROW(catalecticant(cubic, 0), InvalidArgument);
    EXPECT_THROW(catalecticant(cubic, 3), InvalidArgument);
}

TEST(Catalecticant, Dimensions)
{
    const auto f = HomogeneousForm::from_real(2, 5, std::vector<double>(21, 1.0));
    for (int k = 1; k <= 4; ++k) {
        const auto m = catalecticant(f, k);
        EXPECT_EQ(m.rows(), binomial(2 + 5 - k, 2));
        EXPECT_EQ(m.cols(), binomial(2 + k, 2));
    }
}

TEST(NumericRank, Examples)
{
    EXPECT_EQ(numeric_rank(Eigen::Matrix3d::Identity()), 3);
    Eigen::MatrixXd m(3, 2);
    m << 1, 0, 0, 0, 0, 1;
    EXPECT_EQ(numeric_rank(m), 2);
    EXPECT_EQ(numeric_rank(Eigen::MatrixXd::Zero(3, 3)), 0);
}

TEST(NumericRank, PowersHaveRankOneCatalecticants)
{
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + t % 3;
        const int d = 2 + t % 7;
        const ProjectivePoint ell = random_real_point(rng, n);
        const auto f = power_of_linear_form(ell, d);
        for (int k = 1; k < d; ++k)
            EXPECT_EQ(numeric_rank(catalecticant(f, k)), 1) << "n=" << n << " d=" << d << " k=" << k;
    }
}

TEST(NumericRank, SumsOfPowersHaveGenericRank)
{
    Rng rng(9);
    for (int n = 1; n <= 2; ++n)
        for (int d = 2; d <= 8; ++d)
            for (int s = 1; s <= 4; ++s) {
                const MonomialBasis basis(n, d);
                std::vector<double> acc(basis.size(), 0.0);
                for (int i = 0; i < s; ++i) {
                    const auto p = power_of_linear_form(random_real_point(rng, n), d);
                    const double c = rng.normal();
                    for (std::size_t k = 0; k < acc.size(); ++k)
                        acc[k] += c * p.coeffs()[k].real();
                }
                const auto f = HomogeneousForm::from_real(n, d, acc);
                const int k = d / 2;
                if (k < 1)
                    continue;
                const auto m = catalecticant(f, k);
                const auto expected = std::min<Eigen::Index>({s, m.rows(), m.cols()});
                EXPECT_EQ(numeric_rank(m), expected) << "n=" << n << " d=" << d << " s=" << s;
            }
}

TEST(UnivariateRoots, Examples)
{
    auto sorted = [](std::vector<Complex> r) {
        std::ranges::sort(r, [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        return r;
    };
    auto r1 = sorted(univariate_roots(std::vector<double>{1, 0, 1}));
    ASSERT_EQ(r1.size(), 2u);
    EXPECT_NEAR(std::abs(r1[0] - (-1i)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r1[1] - 1i), 0.0, 1e-14);

    auto r2 = sorted(univariate_roots(std::vector<double>{-1, 0, 1}));
    EXPECT_NEAR(std::abs(r2[0] - (-1.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r2[1] - 1.0), 0.0, 1e-14);

    // t^3 - 3t
    auto r3 = sorted(univariate_roots(std::vector<double>{0, -3, 0, 1}));
    ASSERT_EQ(r3.size(), 3u);
    EXPECT_NEAR(std::abs(r3[0] + std::sqrt(3.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r3[1]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r3[2] - std::sqrt(3.0)), 0.0, 1e-14);

    // trailing high-order zero is trimmed
    EXPECT_EQ(univariate_roots(std::vector<double>{-1, 1, 0}).size(), 1u);
    EXPECT_THROW(univariate_roots(std::vector<double>{0, 0}), InvalidArgument);
}

TEST(UnivariateRoots, BackwardErrorIsSmall)
{
    Rng rng(21);
    for (int t = 0; t < 500; ++t) {
        const int m = 1 + t % 12;
        std::vector<Complex> c(static_cast<std::size_t>(m + 1));
        for (auto& z : c)
            z = (t % 3 == 0) ? rng.complex_normal() : Complex(rng.normal());
        const auto roots = univariate_roots(c);
        ASSERT_EQ(roots.size(), static_cast<std::size_t>(m));
        for (const auto& z : roots)
            EXPECT_LE(root_backward_error(c, z), Tolerances{}.root);
    }
}

TEST(UnivariateRoots, DoubleRootBackwardError)
{
    // (t - 1)^2 (t + 2)
    const std::vector<double> c{2, -3, 0, 1};
    std::vector<Complex> cc(c.begin(), c.end());
    for (const auto& z : univariate_roots(c))
        EXPECT_LE(root_backward_error(cc, z), Tolerances{}.root);
}

TEST(PairConjugateRoots, Examples)
{
    const std::vector<Complex> a{1i, -1i};
    const auto pa = pair_conjugate_roots(a);
    EXPECT_EQ(pa.label(), Label(1, 0));

    const std::vector<Complex> b{1.0, -1.0};
    EXPECT_EQ(pair_conjugate_roots(b).label(), Label(0, 2));

    const std::vector<Complex> c{0.0, std::sqrt(3.0), -std::sqrt(3.0), 1i, -1i};
    const auto pc = pair_conjugate_roots(c);
    EXPECT_EQ(pc.label(), Label(1, 3));
    EXPECT_GT(pc.pairs[0].imag(), 0.0);

    const std::vector<Complex> bad{1i, 2i};
    EXPECT_THROW(pair_conjugate_roots(bad), PairingFailure);
    const std::vector<Complex> lonely{1.0 + 1i};
    EXPECT_THROW(pair_conjugate_roots(lonely), PairingFailure);
}

TEST(PairConjugateRoots, RealPolynomialsNeverFailToPair)
{
    Rng rng(13);
    for (int t = 0; t < 10000; ++t) {
        const int m = 2 + t % 9;
        const auto c = rng.normal_vector(static_cast<std::size_t>(m + 1));
        const auto roots = univariate_roots(c);
        RootPartition part;
        ASSERT_NO_THROW(part = pair_conjugate_roots(roots)) << "trial " << t;
        EXPECT_EQ(weight(part.label()), m);
    }
}

TEST(BinaryFormRoots, HandlesRootsAtInfinity)
{
    // XY: roots (1:0) and (0:1)
    const auto r = binary_form_roots(std::vector<double>{0, 1, 0});
    EXPECT_EQ(r.label(), Label(0, 2));
    EXPECT_NEAR(r.min_separation, std::sqrt(2.0), 1e-12);

    // X^2 + Y^2: the pair (1 : +-i)
    const auto c = binary_form_roots(std::vector<double>{1, 0, 1});
    ASSERT_EQ(c.label(), Label(1, 0));
    const ProjectivePoint expected({1.0, 1i});
    const double dist = std::min(projective_distance(c.pair_points[0], expected),
                                 projective_distance(c.pair_points[0], conjugate_point(expected)));
    EXPECT_LT(dist, 1e-12);

    // Y^2 has a double root
    EXPECT_LT(binary_form_roots(std::vector<double>{0, 0, 1}).min_separation, 1e-6);
}
