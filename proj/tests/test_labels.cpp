#include <gtest/gtest.h>

#include "waring/labels.hpp"
#include "waring/random.hpp"

using namespace waring;
using namespace std::complex_literals;

namespace {

HomogeneousForm binary(std::vector<double> c)
{
    const int d = static_cast<int>(c.size()) - 1;
    return HomogeneousForm::from_real(1, d, c);
}

// The representative [i, 1] is stored as [1, -i]; the certificate coefficient
// transforms as mu' = mu * (i)^d for the rescaled linear form.
Complex rescale_coefficient(Complex mu_for_raw, Complex raw_lead, int d)
{
    return mu_for_raw * std::pow(raw_lead, d);
}

} // namespace

TEST(Label, Weight)
{
    EXPECT_EQ(weight(Label(1, 0)), 2);
    EXPECT_EQ(weight(Label(0, 2)), 2);
    EXPECT_EQ(weight(Label(2, 1)), 5);
    EXPECT_THROW(Label(0, 0), InvalidArgument);
    EXPECT_THROW(Label(-1, 3), InvalidArgument);
}

TEST(LabelOf, Examples)
{
    EXPECT_EQ(label_of({ProjectivePoint({1.0, 1i}), ProjectivePoint({1.0, -1i})}).label(), Label(1, 0));
    EXPECT_EQ(label_of({ProjectivePoint({1.0, 0.0}), ProjectivePoint({0.0, 1.0})}).label(), Label(0, 2));
    EXPECT_THROW(label_of({ProjectivePoint({1.0, 1i}), ProjectivePoint({1.0, 2i})}), NotSigmaInvariant);
    EXPECT_THROW(label_of({ProjectivePoint({1.0, 2.0}), ProjectivePoint({-2.0, -4.0})}), DuplicatePoint);
}

TEST(LabelOf, RelabelIsStable)
{
    Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + t % 3;
        const int a = t % 3;
        const int b = (t / 3) % 3 + (a == 0 ? 1 : 0);
        std::vector<ProjectivePoint> pts;
        for (int i = 0; i < b; ++i)
            pts.push_back(random_real_point(rng, n));
        for (int j = 0; j < a; ++j) {
            const auto p = random_complex_point(rng, n);
            pts.push_back(p);
            pts.push_back(conjugate_point(p));
        }
        const LabeledSet s = label_of(pts);
        EXPECT_EQ(s.label(), Label(a, b));
        EXPECT_EQ(s.size(), static_cast<std::size_t>(2 * a + b));
        EXPECT_EQ(label_of(s.points()).label(), s.label());
    }
}

TEST(LabeledSet, RejectsInvalidStructure)
{
    EXPECT_THROW(LabeledSet({}, {}), InvalidArgument);
    EXPECT_THROW(LabeledSet({}, {ProjectivePoint({1.0, 2.0})}), InvalidArgument);
    EXPECT_THROW(LabeledSet({ProjectivePoint({1.0, 1i})}, {}), InvalidArgument);
    EXPECT_THROW(LabeledSet({ProjectivePoint({1.0, 0.5})}, {ProjectivePoint({1.0, 0.5 + 1e-12i}, 0.0)}),
                 DuplicatePoint);
}

TEST(SpanMembership, SumOfRealPowers)
{
    const LabeledSet s({ProjectivePoint({1.0, 0.0}), ProjectivePoint({0.0, 1.0})}, {});
    const auto m = span_membership(binary({1, 0, 0, 1}), s);
    ASSERT_TRUE(m.in_span);
    EXPECT_NEAR(m.certificate.real_coeffs[0], 1.0, 1e-14);
    EXPECT_NEAR(m.certificate.real_coeffs[1], 1.0, 1e-14);
    EXPECT_NEAR(m.certificate.residual, 0.0, 1e-15);
    EXPECT_FALSE(m.certificate.rank_deficient);
}

TEST(SpanMembership, ConjugatePair)
{
    // x^3 - 3 x y^2 = (i/2)(i x + y)^3 + conj; stored representative is [1, -i]
    const LabeledSet s({}, {ProjectivePoint({1i, 1.0})});
    const auto m = span_membership(binary({1, 0, -3, 0}), s);
    ASSERT_TRUE(m.in_span);
    EXPECT_LE(m.certificate.residual, 1e-12);
    const Complex expected = rescale_coefficient(0.5i, 1i, 3);  // (i/2) * i^3 = 1/2
    EXPECT_NEAR(std::abs(m.certificate.pair_coeffs[0] - expected), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(expected - 0.5), 0.0, 1e-15);
}

TEST(SpanMembership, NotInSpan)
{
    const LabeledSet s({ProjectivePoint({0.0, 1.0})}, {});
    const auto m = span_membership(binary({1, 0, 0, 0}), s);
    EXPECT_FALSE(m.in_span);
    EXPECT_NEAR(m.certificate.residual, 1.0, 1e-12);
}

TEST(SpanMembership, RankDeficientBasisIsFlagged)
{
    // three powers in the 3-dimensional space of binary quadratics plus a fourth
    const LabeledSet s({ProjectivePoint({1.0, 0.0}), ProjectivePoint({0.0, 1.0}),
                        ProjectivePoint({1.0, 1.0}), ProjectivePoint({1.0, -1.0})},
                       {});
    const auto m = span_membership(binary({1, 3, 2}), s);
    EXPECT_TRUE(m.in_span);
    EXPECT_TRUE(m.certificate.rank_deficient);
}

TEST(SpanMembershipPoint, Examples)
{
    const ProjectivePoint q({1.0, 0.0, 0.0});
    const LabeledSet pair({}, {ProjectivePoint({1i, 1.0, 0.0})});
    const auto m = span_membership_point(q, pair);
    ASSERT_TRUE(m.in_span);
    // q = mu p + conj(mu) sigma(p) with p = [i, 1, 0] gives mu = -i/2; for
    // the stored representative [1, -i, 0] = p / i this is mu * i = 1/2.
    EXPECT_NEAR(std::abs(m.certificate.pair_coeffs[0] - (-0.5i) * 1i), 0.0, 1e-14);

    const LabeledSet two({ProjectivePoint({1.0, 1.0, 0.0}), ProjectivePoint({1.0, -1.0, 0.0})}, {});
    const auto m2 = span_membership_point(q, two);
    ASSERT_TRUE(m2.in_span);
    EXPECT_NEAR(m2.certificate.real_coeffs[0], 0.5, 1e-14);
    EXPECT_NEAR(m2.certificate.real_coeffs[1], 0.5, 1e-14);

    const LabeledSet axes({ProjectivePoint({1.0, 0.0, 0.0}), ProjectivePoint({0.0, 1.0, 0.0})}, {});
    EXPECT_FALSE(span_membership_point(ProjectivePoint({0.0, 0.0, 1.0}), axes).in_span);
}

TEST(Reconstruct, Examples)
{
    const LabeledSet s({}, {ProjectivePoint({1i, 1.0})});
    const auto target = binary({1, 0, -3, 0});
    const auto m = span_membership(target, s);
    const auto back = reconstruct(s, m.certificate, 3);
    EXPECT_LE(relative_distance(back, target), 1e-10);

    const LabeledSet axes({ProjectivePoint({1.0, 0.0}), ProjectivePoint({0.0, 1.0})}, {});
    SpanCertificate c;
    c.real_coeffs = {1.0, 1.0};
    EXPECT_EQ(reconstruct(axes, c, 3), binary({1, 0, 0, 1}));

    SpanCertificate zero;
    zero.real_coeffs = {0.0, 0.0};
    EXPECT_THROW(reconstruct(axes, zero, 3), InvalidArgument);
}

TEST(Reconstruct, RoundTripScalingAndExactRealness)
{
    Rng rng(23);
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + t % 3;
        const int d = 2 + t % 5;
        const int a = t % 2 + (t % 7 == 0 ? 1 : 0);
        const int b = 1 + t % 2;
        std::vector<ProjectivePoint> reals;
        std::vector<ProjectivePoint> pairs;
        for (int i = 0; i < b; ++i)
            reals.push_back(random_real_point(rng, n));
        for (int j = 0; j < a; ++j)
            pairs.push_back(random_complex_point(rng, n));
        const LabeledSet s(reals, pairs);
        SpanCertificate planted;
        for (int i = 0; i < b; ++i)
            planted.real_coeffs.push_back(rng.normal());
        for (int j = 0; j < a; ++j)
            planted.pair_coeffs.push_back(rng.complex_normal());
        const HomogeneousForm f = reconstruct(s, planted, d);
        ASSERT_TRUE(f.is_real());

        const auto m = span_membership(f, s);
        ASSERT_TRUE(m.in_span) << "residual " << m.certificate.residual;
        const HomogeneousForm back = reconstruct(s, m.certificate, d);
        EXPECT_TRUE(back.is_real());
        for (const auto& z : back.coeffs())
            EXPECT_EQ(z.imag(), 0.0);
        EXPECT_LE(relative_distance(back, f), Tolerances{}.residual);

        const double scale = -3.5;
        std::vector<double> scaled;
        for (const auto& z : f.coeffs())
            scaled.push_back(scale * z.real());
        const auto ms = span_membership(HomogeneousForm::from_real(n, d, scaled), s);
        EXPECT_EQ(ms.in_span, m.in_span);
        if (!m.certificate.rank_deficient) {
            for (std::size_t i = 0; i < m.certificate.real_coeffs.size(); ++i)
                EXPECT_NEAR(ms.certificate.real_coeffs[i], scale * m.certificate.real_coeffs[i],
                            1e-8 * (1.0 + std::abs(scale * m.certificate.real_coeffs[i])));
            for (std::size_t j = 0; j < m.certificate.pair_coeffs.size(); ++j)
                EXPECT_LE(std::abs(ms.certificate.pair_coeffs[j] - scale * m.certificate.pair_coeffs[j]),
                          1e-8 * (1.0 + std::abs(scale * m.certificate.pair_coeffs[j])));
        }
    }
}
