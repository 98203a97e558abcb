#pragma once

#include <vector>

#include "newsrec/stats.hpp"

// Two-sample t statistics and two-sided p-values from scipy.stats.ttest_ind
// (scipy 1.15.3; equal_var=True for Student, False for Welch).
struct TTestCase {
  newsrec::TTestVariant variant;
  std::vector<double> a;
  std::vector<double> b;
  double t;
  double p;
};

inline const TTestCase kTTestReference[] = {
    {newsrec::TTestVariant::Student, {1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}, -1.0, 0.34659350708733416},
    {newsrec::TTestVariant::Student,
     {0.12, 0.55, 0.31, 0.9, 0.47, 0.66},
     {0.2, 0.81, 0.77, 0.95, 0.68, 0.59, 0.88},
     -1.3511620705592835,
     0.2037790016364971},
    {newsrec::TTestVariant::Welch, {1, 2, 3, 4, 5}, {2, 4, 6, 8, 10, 12}, -2.3763541031440183, 0.04928433820673049},
    {newsrec::TTestVariant::Welch,
     {10.1, 9.8, 10.4, 10.0, 9.7},
     {11.2, 8.1, 12.5, 9.9, 13.0, 7.4, 10.8, 12.2},
     -0.8689836086666946,
     0.41216409491668515},
    {newsrec::TTestVariant::Student,
     {3.1, 2.9, 3.3, 3.0},
     {3.05, 3.2, 2.85, 3.1, 2.95},
     0.44301431381276374,
     0.6711228524330854},
    {newsrec::TTestVariant::Welch,
     {0.0, 0.0, 1.0, 1.0, 1.0, 0.5},
     {0.2, 0.25, 0.3},
     1.6439898730535731,
     0.15880998625660753},
    {newsrec::TTestVariant::Student,
     {-2.5, -1.0, 0.3, 4.4, 2.2, -0.7, 1.9, 0.0, 3.5, -3.3},
     {5.1, 6.0, 4.2, 7.7, 3.9, 6.6, 5.5, 4.8},
     -5.120388667253414,
     0.0001027407780708914},
};
