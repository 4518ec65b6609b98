#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "occtime/special_fn.hpp"

using namespace occtime;

namespace {

struct IkRef {
  double nu, x, i, k;
};

// 40-digit mpmath values, rounded to 20 digits.
const IkRef kIkTable[] = {
    {0, 1e-5, 1.000000000025, 11.628856980944362293},
    {0, 0.5, 1.0634833707413235193, 0.92441907122766586178},
    {0, 1.9, 2.1277401940538878569, 0.12884597927604747986},
    {0, 2.1, 2.4462831294361822913, 0.10078374088996694581},
    {0, 10, 2815.7166284662544715, 0.000017780062316167651811},
    {0, 50, 2.9325537838493363267e+20, 3.4101677497894955139e-23},
    {0, 300, 4.4758473679350521181e+128, 3.7236948548891432633e-132},
    {0.3, 1e-5, 0.028620072143150883654, 58.178619126715337991},
    {0.3, 0.5, 0.77095173457921946, 0.97647412438178792102},
    {0.3, 1.9, 2.0227688010159704413, 0.13137942527906502387},
    {0.3, 2.1, 2.3466954118970241258, 0.10260207043456642528},
    {0.3, 10, 2802.3624889744584638, 0.000017856607016823022452},
    {0.3, 50, 2.9298887214511478474e+20, 3.4132081995368530188e-23},
    {0.3, 300, 4.4751749183812633686e+128, 3.7242525232458952339e-132},
    {0.5, 1e-5, 0.0025231325220622122569, 396.32876645312006576},
    {0.5, 0.5, 0.58799308679041632549, 1.0750476034999202387},
    {0.5, 1.9, 1.8917640064945101348, 0.13599521326566795789},
    {0.5, 2.1, 2.2144047846744857727, 0.10590875899695359003},
    {0.5, 10, 2778.784603874571024, 0.000017993478093705179608},
    {0.5, 50, 2.925156852991290042e+20, 3.4186200954570746356e-23},
    {0.5, 300, 4.4739797022303323029e+128, 3.7252441396544857648e-132},
    {1.7, 1e-5, 6.3009907245151665181e-10, 466780003.19334496},
    {1.7, 0.5, 0.062759535142037902669, 4.4441563201861339669},
    {1.7, 1.9, 0.81744299216432679638, 0.23689187682713977522},
    {1.7, 2.1, 1.0368775688891894061, 0.17663645748973691386},
    {1.7, 10, 2418.2298212158207825, 0.000020404704827133554017},
    {1.7, 50, 2.8481826641583032162e+20, 3.5091573095620960501e-23},
    {1.7, 300, 4.4543047101544508967e+128, 3.7416439395202638096e-132},
    {5.25, 1e-5, 7.9936902105768543359e-31, 1.1914158883953451603e+29},
    {5.25, 0.5, 3.7729390615749699841e-6, 25124.562450157227538},
    {5.25, 1.9, 0.0047676620802744252791, 18.753846173551274086},
    {5.25, 2.1, 0.0083195875298321228994, 10.609863934694612902},
    {5.25, 10, 683.42498078101144762, 0.000064771827258550774494},
    {5.25, 50, 2.2204259735517670025e+20, 4.4792247055041261177e-23},
    {5.25, 300, 4.2745658145366112064e+128, 3.8984399791327079565e-132},
    {20.5, 1e-5, 1.9241355639508675823e-128, 1.2675948804955883871e+126},
    {20.5, 0.5, 4.115126196777747968e-32, 5.925207156147612423e+29},
    {20.5, 1.9, 3.2877424531839322417e-20, 738680563400561758.9},
    {20.5, 2.1, 2.5821182172030801583e-19, 93965396933050228.845},
    {20.5, 10, 0.000059837187271629022232, 366.29576426146747784},
    {20.5, 50, 4459526040539347252.4, 2.0747976116585941062e-21},
    {20.5, 300, 2.21972282016283283e+128, 7.4909860692867292199e-132},
};

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(Bessel, MatchesHighPrecisionTable) {
  for (const auto& r : kIkTable) {
    const BesselIK v = bessel_ik(r.nu, r.x);
    EXPECT_LT(rel(v.i, r.i), 1e-12) << "I nu=" << r.nu << " x=" << r.x;
    EXPECT_LT(rel(v.k, r.k), 1e-12) << "K nu=" << r.nu << " x=" << r.x;
  }
}

TEST(Bessel, NegativeOrders) {
  // mpmath: I_{-0.3}, K_{-0.3}, I_{-0.7}, K_{-0.7}.
  EXPECT_LT(rel(bessel_i(-0.3, 0.01), 3.7759940681354499247), 1e-12);
  EXPECT_LT(rel(bessel_k(-0.3, 1.0), 0.43507602420880202435), 1e-13);
  EXPECT_LT(rel(bessel_i(-0.7, 5.0), 25.771611620236413395), 1e-13);
  EXPECT_LT(rel(bessel_k(-0.7, 0.01), 26.433878465829253192), 1e-13);
  EXPECT_LT(rel(bessel_i(-0.3, 1.0), 1.3128748576757479408), 1e-13);
}

TEST(Bessel, WronskianProperty) {
  // I_nu K_nu' - I_nu' K_nu = -1/x for every order and argument.
  for (double nu : {0.0, 0.25, 0.5, 1.3, 7.9})
    for (double x : {1e-3, 0.3, 1.99, 2.01, 17.0, 120.0}) {
      const BesselIK v = bessel_ik(nu, x);
      EXPECT_NEAR((v.i * v.kp - v.ip * v.k) * x, -1.0, 1e-12) << nu << " " << x;
    }
}

TEST(Bessel, HalfOrderClosedForms) {
  for (double x : {0.01, 0.7, 3.0, 40.0}) {
    EXPECT_LT(rel(bessel_k(0.5, x), std::sqrt(M_PI / (2 * x)) * std::exp(-x)), 1e-14);
    EXPECT_LT(rel(bessel_i(0.5, x), std::sqrt(2 / (M_PI * x)) * std::sinh(x)), 1e-14);
  }
}

TEST(Bessel, UnderflowIsFlagged) {
  const CheckedValue v = bessel_k_checked(0.3, 800.0);
  EXPECT_TRUE(v.underflow);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_FALSE(bessel_k_checked(0.3, 10.0).underflow);
}

TEST(Bessel, ScaledSequenceMatchesDirect) {
  std::vector<double> q(6);
  const double nu = -0.3, z = 1.7;
  scaled_bessel_k_sequence(nu, z, q);
  for (unsigned j = 0; j < q.size(); ++j)
    EXPECT_LT(rel(q[j], std::pow(z, j) * bessel_k(nu + j, z)), 1e-13) << j;
}

TEST(Binomial, GeneralizedValues) {
  EXPECT_DOUBLE_EQ(gen_binomial(5.0, 2), 10.0);
  EXPECT_DOUBLE_EQ(gen_binomial(-0.5, 2), 0.375);
  EXPECT_DOUBLE_EQ(gen_binomial(-1.0, 3), -1.0);
  EXPECT_EQ(gen_binomial(parse_rational("-1/3"), 3), BigRational(-14, 81));
  EXPECT_DOUBLE_EQ(gen_binomial(0.7, 0), 1.0);
}

TEST(Stirling, KnownValues) {
  EXPECT_EQ(stirling1_unsigned(10, 3), BigInt(1172700));
  EXPECT_EQ(stirling2(10, 3), BigInt(9330));
  EXPECT_EQ(stirling1_unsigned(0, 0), BigInt(1));
  EXPECT_EQ(stirling2(5, 0), BigInt(0));
  EXPECT_EQ(stirling1_unsigned(3, 5), BigInt(0));
}

TEST(Stirling, RowSumsProperty) {
  // sum_k s1(n, k) = n!; sum_k (-1)^{n-k} s1(n, k) S2(k, j) = [n == j].
  for (unsigned n = 0; n <= 30; ++n) {
    BigInt row = 0;
    for (unsigned k = 0; k <= n; ++k) row += stirling1_unsigned(n, k);
    EXPECT_EQ(row, factorial(n)) << n;
    for (unsigned j = 0; j <= n; ++j) {
      BigInt s = 0;
      for (unsigned k = j; k <= n; ++k) {
        const BigInt t = stirling1_unsigned(n, k) * stirling2(k, j);
        s += (n - k) % 2 ? BigInt(-t) : t;
      }
      EXPECT_EQ(s, BigInt(n == j ? 1 : 0)) << n << " " << j;
    }
  }
}

TEST(Stirling, ExceedsInt64WithoutOverflow) {
  // s1(30, 1) = 29!, far beyond 64 bits.
  EXPECT_EQ(stirling1_unsigned(30, 1), factorial(29));
  EXPECT_THROW(StirlingCache::instance().first_kind(kStirlingMaxRow + 1, 1), std::out_of_range);
}

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parse_rational("3/8"), BigRational(3, 8));
  EXPECT_EQ(parse_rational("-0.3"), BigRational(-3, 10));
  EXPECT_EQ(parse_rational("7"), BigRational(7));
  EXPECT_EQ(format_rational(BigRational(5, 16)), "5/16");
  EXPECT_EQ(format_rational(BigRational(4)), "4");
  EXPECT_EQ(to_rational(0.375), BigRational(3, 8));
  EXPECT_THROW(parse_rational("abc"), std::exception);
}
